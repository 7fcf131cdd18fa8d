//! Run the projected-simplex experiment and write its tables and summary.

use std::path::PathBuf;

use projlens::experiments::{figure4, write_report, Figure4Config};

fn main() -> projlens::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(std::env::temp_dir).join("projlens-figure4");
    let result = figure4(&Figure4Config::default(), 0)?;
    for path in write_report(&result, &out, "run_experiment")? {
        println!("wrote {}", path.display());
    }
    println!("{}", serde_json::to_string_pretty(&result.summary)?);
    Ok(())
}
