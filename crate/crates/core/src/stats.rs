//! Small statistics helpers used by the experiments: one-sample KS,
//! quantiles, log-log slope fits and Hartigan's dip statistic.

use crate::error::{Error, Result};

/// Two-sided one-sample KS statistic of `sample` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::InvalidCount("KS statistic needs a nonempty sample".into()));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max))
}

/// Quantile with linear interpolation between order statistics
/// (`h = (n − 1) p`).
pub fn quantile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidCount("quantile of an empty sample".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("quantile level {p} outside [0, 1]")));
    }
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    let h = (xs.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Ok(xs[lo] + (h - lo as f64) * (xs[hi] - xs[lo]))
}

pub fn median(values: &[f64]) -> Result<f64> {
    quantile(values, 0.5)
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidCount("slope fit needs at least two (x, y) pairs".into()));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter("log-log fit needs positive values".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("slope fit needs distinct x values".into()));
    }
    Ok(sxy / sxx)
}

/// Hartigan's dip: the sup distance between the empirical CDF and the
/// closest unimodal CDF. Ranges over `[1/(2n), 1/4]`; values near 1/4 mean
/// two well separated modes of equal weight.
pub fn dip_statistic(sample: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::InvalidCount("dip statistic needs a nonempty sample".into()));
    }
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len();
    let mut dip = 1.0;
    if n < 2 || x[0] == x[n - 1] {
        return Ok(dip / (2.0 * n as f64));
    }

    // mn: greatest convex minorant, mj: least concave majorant, each as a
    // back (resp. forward) pointer to the previous touching point.
    let mut mn = vec![0usize; n];
    for j in 1..n {
        mn[j] = j - 1;
        loop {
            let mnj = mn[j];
            let mnmnj = mn[mnj];
            if mnj == 0 || (x[j] - x[mnj]) * ((mnj - mnmnj) as f64) < (x[mnj] - x[mnmnj]) * ((j - mnj) as f64) {
                break;
            }
            mn[j] = mnmnj;
        }
    }
    let mut mj = vec![n - 1; n];
    for k in (0..n - 1).rev() {
        mj[k] = k + 1;
        loop {
            let mjk = mj[k];
            let mjmjk = mj[mjk];
            if mjk == n - 1
                || (x[k] - x[mjk]) * (mjk as f64 - mjmjk as f64) < (x[mjk] - x[mjmjk]) * (k as f64 - mjk as f64)
            {
                break;
            }
            mj[k] = mjmjk;
        }
    }

    let (mut low, mut high) = (0usize, n - 1);
    let mut gcm = Vec::with_capacity(n);
    let mut lcm = Vec::with_capacity(n);
    loop {
        gcm.clear();
        gcm.push(high);
        while *gcm.last().unwrap() > low {
            gcm.push(mn[*gcm.last().unwrap()]);
        }
        let l_gcm = gcm.len() - 1;
        lcm.clear();
        lcm.push(low);
        while *lcm.last().unwrap() < high {
            lcm.push(mj[*lcm.last().unwrap()]);
        }
        let l_lcm = lcm.len() - 1;

        let (mut ig, mut ih) = (l_gcm, l_lcm);
        let mut ix = l_gcm as isize - 1;
        let mut iv = 1usize;
        let mut d = 0.0;
        if l_gcm != 1 || l_lcm != 1 {
            loop {
                let gcmix = gcm[ix as usize];
                let lcmiv = lcm[iv];
                if gcmix > lcmiv {
                    let gcmi1 = gcm[ix as usize + 1];
                    let dx = (lcmiv - gcmi1 + 1) as f64
                        - (x[lcmiv] - x[gcmi1]) * (gcmix - gcmi1) as f64 / (x[gcmix] - x[gcmi1]);
                    iv += 1;
                    if dx >= d {
                        d = dx;
                        ig = ix as usize + 1;
                        ih = iv - 1;
                    }
                } else {
                    let lcmiv1 = lcm[iv - 1];
                    let dx = (x[gcmix] - x[lcmiv1]) * (lcmiv - lcmiv1) as f64 / (x[lcmiv] - x[lcmiv1])
                        - (gcmix as f64 - lcmiv1 as f64 - 1.0);
                    ix -= 1;
                    if dx >= d {
                        d = dx;
                        ig = (ix + 1) as usize;
                        ih = iv;
                    }
                }
                if ix < 0 {
                    ix = 0;
                }
                if iv > l_lcm {
                    iv = l_lcm;
                }
                if gcm[ix as usize] == lcm[iv] {
                    break;
                }
            }
        } else {
            d = 1.0;
        }
        if d < dip {
            break;
        }

        let mut dip_l: f64 = 0.0;
        for j in ig..l_gcm {
            let (jb, je) = (gcm[j + 1], gcm[j]);
            let mut max_t: f64 = 1.0;
            if je - jb > 1 && x[je] != x[jb] {
                let c = (je - jb) as f64 / (x[je] - x[jb]);
                for jj in jb..=je {
                    max_t = max_t.max((jj - jb + 1) as f64 - (x[jj] - x[jb]) * c);
                }
            }
            dip_l = dip_l.max(max_t);
        }
        let mut dip_u: f64 = 0.0;
        for j in ih..l_lcm {
            let (jb, je) = (lcm[j], lcm[j + 1]);
            let mut max_t: f64 = 1.0;
            if je - jb > 1 && x[je] != x[jb] {
                let c = (je - jb) as f64 / (x[je] - x[jb]);
                for jj in jb..=je {
                    max_t = max_t.max((x[jj] - x[jb]) * c - (jj as f64 - jb as f64 - 1.0));
                }
            }
            dip_u = dip_u.max(max_t);
        }
        dip = dip.max(dip_l.max(dip_u));

        if low == gcm[ig] && high == lcm[ih] {
            break;
        }
        low = gcm[ig];
        high = lcm[ih];
    }
    Ok(dip / (2.0 * n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_of_uniform_grid() {
        let xs: Vec<f64> = (0..10).map(|i| (i as f64 + 0.5) / 10.0).collect();
        let ks = ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((ks - 0.05).abs() < 1e-15);
        assert!(ks_statistic(&[], |x| x).is_err());
    }

    #[test]
    fn quantiles() {
        let v = [3.0, 1.0, 4.0, 1.5, 9.0];
        assert_eq!(median(&v).unwrap(), 3.0);
        assert_eq!(quantile(&v, 0.0).unwrap(), 1.0);
        assert_eq!(quantile(&v, 1.0).unwrap(), 9.0);
        assert!((quantile(&v, 0.25).unwrap() - 1.5).abs() < 1e-15);
        assert!((quantile(&[1.0, 2.0], 0.5).unwrap() - 1.5).abs() < 1e-15);
        assert!(quantile(&v, 1.5).is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let x = [100.0, 300.0, 1000.0, 3000.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 2.0 * v.powf(-0.5)).collect();
        assert!((log_log_slope(&x, &y).unwrap() + 0.5).abs() < 1e-12);
        assert!(log_log_slope(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn dip_of_evenly_spaced_points() {
        for n in [2usize, 5, 20, 101] {
            let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
            let dip = dip_statistic(&xs).unwrap();
            assert!((dip - 1.0 / (2.0 * n as f64)).abs() < 1e-12, "n={n}: {dip}");
        }
    }

    #[test]
    fn dip_of_two_tight_clusters() {
        let mut xs: Vec<f64> = (0..200).map(|i| i as f64 * 1e-4).collect();
        xs.extend((0..200).map(|i| 10.0 + i as f64 * 1e-4));
        let dip = dip_statistic(&xs).unwrap();
        assert!((dip - 0.25).abs() < 0.01, "{dip}");
    }

    #[test]
    fn dip_is_small_for_unimodal() {
        let xs: Vec<f64> = (1..1000).map(|i| crate::rng::normal_quantile(i as f64 / 1000.0)).collect();
        let dip = dip_statistic(&xs).unwrap();
        assert!(dip < 0.01, "{dip}");
        assert_eq!(dip_statistic(&[2.0, 2.0, 2.0]).unwrap(), 1.0 / 6.0);
    }
}
