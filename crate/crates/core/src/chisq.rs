//! Central and noncentral chi-square CDFs.
//!
//! The central CDF is the regularized lower incomplete gamma function
//! `P(d/2, x/2)`. The noncentral CDF is the Poisson mixture
//! `Σ_j e^{-λ/2} (λ/2)^j / j! · P(d/2 + j, x/2)`, summed outward from the
//! Poisson mode. Only the mode term calls the incomplete gamma function; its
//! neighbours follow from `P(a+1, y) = P(a, y) - y^a e^{-y} / Γ(a+1)`.

use crate::error::{Error, Result};

const GAMMA_TOL: f64 = 1e-14;
const GAMMA_MAX_TERMS: usize = 1_000_000;
const POISSON_TAIL: f64 = 1e-12;
const TINY: f64 = 1e-300;

/// Regularized lower incomplete gamma `P(a, x)` for `a > 0`, `x ≥ 0`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    gamma_pq(a, x).0
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    gamma_pq(a, x).1
}

fn gamma_pq(a: f64, x: f64) -> (f64, f64) {
    debug_assert!(a > 0.0);
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if x.is_infinite() {
        return (1.0, 0.0);
    }
    let log_prefactor = -x + a * x.ln() - libm::lgamma(a);
    if x < a + 1.0 {
        let p = (log_prefactor.exp() * lower_series(a, x)).min(1.0);
        (p, 1.0 - p)
    } else {
        let q = (log_prefactor.exp() * upper_fraction(a, x)).min(1.0);
        (1.0 - q, q)
    }
}

/// `Σ_n x^n / (a (a+1) ... (a+n))`.
fn lower_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..GAMMA_MAX_TERMS {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term < sum * GAMMA_TOL {
            break;
        }
    }
    sum
}

/// Continued fraction for `Q(a, x) e^x x^{-a} Γ(a)` (modified Lentz).
fn upper_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_TERMS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < GAMMA_TOL {
            break;
        }
    }
    h
}

/// `P(χ²_d(λ) ≤ x)` for the chi-square law with `d` degrees of freedom and
/// noncentrality `λ`. Returns 0 for `x ≤ 0`.
pub fn chisq_cdf(d: usize, lambda: f64, x: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParameter("chi-square needs d >= 1 degrees of freedom".into()));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("noncentrality {lambda} must be finite and >= 0")));
    }
    if x.is_nan() {
        return Err(Error::InvalidParameter("x is NaN".into()));
    }
    Ok(chisq_cdf_unchecked(d, lambda, x))
}

pub(crate) fn chisq_cdf_unchecked(d: usize, lambda: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < 1e-290 {
        // P(d/2, x/2) ≤ (x/2)^{d/2} / Γ(d/2 + 1) is far below round-off here.
        return 0.0;
    }
    let a0 = 0.5 * d as f64;
    let y = 0.5 * x;
    if lambda == 0.0 {
        return gamma_p(a0, y);
    }
    let h = 0.5 * lambda;
    let mode = h.floor();
    let m = mode as u64;

    let a_mode = a0 + mode;
    let cdf_mode = gamma_p(a_mode, y);
    // t(a) = y^a e^{-y} / Γ(a+1), the step between P(a, y) and P(a+1, y).
    let t_mode = (a_mode * y.ln() - y - libm::lgamma(a_mode + 1.0)).exp();
    let w_mode = (-h + mode * h.ln() - libm::lgamma(mode + 1.0)).exp();

    let mut sum = w_mode * cdf_mode;
    let mut weight = w_mode;

    // Next term above the mode: index, Poisson weight, CDF and step.
    let mut up_j = m + 1;
    let mut up_w = w_mode * h / (mode + 1.0);
    let mut up_cdf = (cdf_mode - t_mode).clamp(0.0, 1.0);
    let mut up_t = t_mode * y / (a_mode + 1.0);

    // Next term below the mode.
    let mut lo_open = m > 0;
    let mut lo_j = m.saturating_sub(1);
    let mut lo_w = if lo_open { w_mode * mode / h } else { 0.0 };
    let mut lo_t = if lo_open { t_mode * a_mode / y } else { 0.0 };
    let mut lo_cdf = (cdf_mode + lo_t).clamp(0.0, 1.0);

    // Geometric bounds on the Poisson mass not yet summed on each side.
    let tail_up = |j: u64, w: f64| w / (1.0 - h / (j as f64 + 1.0));
    let tail_lo = |j: u64, w: f64| w / (1.0 - j as f64 / h);

    loop {
        let up_bound = tail_up(up_j, up_w);
        let lo_bound = if lo_open { tail_lo(lo_j, lo_w) } else { 0.0 };
        if !(up_bound + lo_bound > POISSON_TAIL * weight) {
            break;
        }
        if up_bound >= lo_bound {
            sum += up_w * up_cdf;
            weight += up_w;
            let a = a0 + up_j as f64;
            up_cdf = (up_cdf - up_t).clamp(0.0, 1.0);
            up_t *= y / (a + 1.0);
            up_j += 1;
            up_w *= h / up_j as f64;
        } else {
            sum += lo_w * lo_cdf;
            weight += lo_w;
            if lo_j == 0 {
                lo_open = false;
            } else {
                let a = a0 + lo_j as f64;
                lo_w *= lo_j as f64 / h;
                lo_j -= 1;
                lo_t *= a / y;
                lo_cdf = (lo_cdf + lo_t).clamp(0.0, 1.0);
            }
        }
    }
    (sum / weight).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_p_special_cases() {
        // P(1, x) = 1 - e^{-x}
        for &x in &[0.01f64, 0.5, 1.5, 10.0, 40.0] {
            assert!((gamma_p(1.0, x) - (1.0 - (-x).exp())).abs() < 1e-14);
        }
        // P(1/2, x) = erf(√x)
        for &x in &[0.01f64, 0.3, 2.0, 9.0] {
            assert!((gamma_p(0.5, x) - libm::erf(x.sqrt())).abs() < 1e-14);
        }
        assert_eq!(gamma_p(3.0, 0.0), 0.0);
        assert!((gamma_p(2.0, 3.0) + gamma_q(2.0, 3.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_p_large_shape() {
        let a = 1e6;
        assert!((gamma_p(a, a) - 0.5).abs() < 1e-3);
    }

    #[test]
    fn central_d2_closed_form() {
        for &r in &[0.1f64, 0.5, 1.0, 2.0, 3.0, 6.0] {
            let exact = 1.0 - (-r * r / 2.0).exp();
            assert!((chisq_cdf(2, 0.0, r * r).unwrap() - exact).abs() < 1e-10);
        }
        assert!((chisq_cdf(2, 0.0, 1.0).unwrap() - 0.3934693402873666).abs() < 1e-12);
    }

    #[test]
    fn errors_and_edges() {
        assert!(chisq_cdf(0, 0.0, 1.0).is_err());
        assert!(chisq_cdf(2, -1.0, 1.0).is_err());
        assert_eq!(chisq_cdf(3, 2.0, -1.0).unwrap(), 0.0);
        assert_eq!(chisq_cdf(3, 2.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn noncentral_d1_matches_normal_interval() {
        // χ²_1(λ) ≤ x  ⇔  |Z + √λ| ≤ √x
        let phi = crate::rng::normal_cdf;
        for &lam in &[0.3f64, 1.0, 9.0, 50.0, 400.0] {
            for &x in &[0.1f64, 1.0, 5.0, 20.0, 80.0, 500.0] {
                let (s, t) = (x.sqrt(), lam.sqrt());
                let exact = phi(s - t) - phi(-s - t);
                let got = chisq_cdf(1, lam, x).unwrap();
                assert!((got - exact).abs() < 1e-11, "λ={lam} x={x}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn huge_noncentrality_stays_finite() {
        let lam = 2e6;
        let v = chisq_cdf(2, lam, lam).unwrap();
        assert!((v - 0.5).abs() < 0.01, "{v}");
        assert!(chisq_cdf(2, lam, 1.0).unwrap() < 1e-12);
    }
}
