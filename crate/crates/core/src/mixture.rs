//! Balls and exact ball masses under spherical Gaussians and their
//! scale-mixtures.
//!
//! `ν_σ(B(x, r)) = P(‖Z‖² ≤ r²)` for `Z ~ N(x, σ² I_d)`, which is the
//! noncentral chi-square CDF with `d` degrees of freedom and noncentrality
//! `‖x‖²/σ²` evaluated at `(r/σ)²`.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::chisq::chisq_cdf_unchecked;
use crate::datasets::Profile;
use crate::error::{Error, Result};
use crate::rng::normal_cdf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    Finite(f64),
    /// The empty set (mass 0 everywhere); produced by deflating a ball
    /// below radius zero.
    Empty,
    /// The whole space (mass 1 everywhere).
    All,
}

impl Serialize for Radius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Radius::Finite(r) => s.serialize_f64(*r),
            Radius::Empty => s.serialize_str("EMPTY"),
            Radius::All => s.serialize_str("ALL"),
        }
    }
}

/// Closed ball `{z : ‖z - center‖ ≤ r}` or one of the distinguished sets.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: Radius,
}

impl Serialize for Ball {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Ball", 2)?;
        st.serialize_field("center", &self.center)?;
        st.serialize_field("radius", &self.radius)?;
        st.end()
    }
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidDimension("ball center must have dimension >= 1".into()));
        }
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius {radius} must be finite and >= 0")));
        }
        Ok(Self { center, radius: Radius::Finite(radius) })
    }

    pub fn all(d: usize) -> Self {
        Self { center: vec![0.0; d], radius: Radius::All }
    }

    pub fn empty(d: usize) -> Self {
        Self { center: vec![0.0; d], radius: Radius::Empty }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    /// Finite radius, if any.
    pub fn finite_radius(&self) -> Option<f64> {
        match self.radius {
            Radius::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn center_sq_norm(&self) -> f64 {
        self.center.iter().map(|c| c * c).sum()
    }

    /// Closed-ball membership.
    pub fn contains(&self, z: &[f64]) -> bool {
        match self.radius {
            Radius::All => true,
            Radius::Empty => false,
            Radius::Finite(r) => sq_dist(&self.center, z).sqrt() <= r,
        }
    }

    /// Distance from `z` to the ball (0 inside).
    pub fn distance(&self, z: &[f64]) -> f64 {
        match self.radius {
            Radius::All => 0.0,
            Radius::Empty => f64::INFINITY,
            Radius::Finite(r) => (sq_dist(&self.center, z).sqrt() - r).max(0.0),
        }
    }

    /// Whether `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Ball) -> bool {
        match (self.radius, other.radius) {
            (Radius::Empty, _) | (_, Radius::All) => true,
            (_, Radius::Empty) | (Radius::All, _) => false,
            (Radius::Finite(r), Radius::Finite(s)) => sq_dist(&self.center, &other.center).sqrt() + r <= s,
        }
    }
}

#[inline]
pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Grow (`delta > 0`) or shrink the radius, keeping the center. Shrinking
/// below zero gives the empty set; `ALL` and `EMPTY` are fixed points.
pub fn resize_ball(ball: &Ball, delta: f64) -> Ball {
    let radius = match ball.radius {
        Radius::Finite(r) if r + delta < 0.0 => Radius::Empty,
        Radius::Finite(r) => Radius::Finite(r + delta),
        other => other,
    };
    Ball { center: ball.center.clone(), radius }
}

/// `ν_σ(B)` for `ν_σ = N(0, σ² I_d)`, `d` taken from the ball.
pub fn nu_ball_mass(sigma: f64, ball: &Ball) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma {sigma} must be finite and > 0")));
    }
    if ball.dim() == 0 {
        return Err(Error::InvalidDimension("ball dimension must be >= 1".into()));
    }
    Ok(match ball.radius {
        Radius::Empty => 0.0,
        Radius::All => 1.0,
        Radius::Finite(r) => gaussian_ball_mass(ball.dim(), sigma, ball.center_sq_norm(), r),
    })
}

/// Mass of `B(x, r)` with `‖x‖² = center_sq` under `N(0, σ² I_d)`, `σ > 0`.
pub(crate) fn gaussian_ball_mass(d: usize, sigma: f64, center_sq: f64, r: f64) -> f64 {
    if d == 1 {
        // Interval [c - r, c + r] with c ≥ 0 by symmetry.
        let c = center_sq.sqrt();
        let (lo, hi) = ((c - r) / sigma, (c + r) / sigma);
        return if lo > 0.0 {
            (normal_cdf(-lo) - normal_cdf(-hi)).max(0.0)
        } else {
            (normal_cdf(hi) - normal_cdf(lo)).max(0.0)
        };
    }
    let s2 = sigma * sigma;
    chisq_cdf_unchecked(d, center_sq / s2, r * r / s2)
}

/// Scale-mixture `Σ_i w_i N(0, σ_i² I_d)` of spherical Gaussians.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel {
    profile: Profile,
    d: usize,
}

impl MixtureModel {
    pub fn new(profile: Profile, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension("mixture dimension must be >= 1".into()));
        }
        Ok(Self { profile, d })
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn ball_mass(&self, ball: &Ball) -> Result<f64> {
        if ball.dim() != self.d {
            return Err(Error::Shape { expected: self.d, found: ball.dim() });
        }
        Ok(match ball.radius {
            Radius::Empty => 0.0,
            Radius::All => 1.0,
            Radius::Finite(r) => self.mass_at(ball.center_sq_norm(), r),
        })
    }

    /// Mass of a finite ball of radius `r` whose center has squared norm
    /// `center_sq`. Atoms at `σ = 0` are point masses at the origin.
    pub fn mass_at(&self, center_sq: f64, r: f64) -> f64 {
        let total: f64 = self
            .profile
            .atoms()
            .iter()
            .map(|a| {
                let m = if a.sigma == 0.0 {
                    if center_sq.sqrt() <= r {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    gaussian_ball_mass(self.d, a.sigma, center_sq, r)
                };
                a.weight * m
            })
            .sum();
        total.clamp(0.0, 1.0)
    }

    /// `E‖Z‖² = d Σ_i w_i σ_i²`.
    pub fn second_moment(&self) -> f64 {
        self.d as f64 * self.profile.second_moment()
    }
}

pub fn mixture_ball_mass(model: &MixtureModel, ball: &Ball) -> Result<f64> {
    model.ball_mass(ball)
}

pub fn mixture_second_moment(model: &MixtureModel) -> f64 {
    model.second_moment()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(c: &[f64], r: f64) -> Ball {
        Ball::new(c.to_vec(), r).unwrap()
    }

    #[test]
    fn standard_disc() {
        let m = nu_ball_mass(1.0, &ball(&[0.0, 0.0], 1.0)).unwrap();
        assert!((m - 0.3934693402873666).abs() < 1e-12);
        assert_eq!(nu_ball_mass(2.5, &Ball::all(3)).unwrap(), 1.0);
        assert_eq!(nu_ball_mass(2.5, &Ball::empty(3)).unwrap(), 0.0);
        assert!(nu_ball_mass(0.0, &ball(&[0.0], 1.0)).is_err());
    }

    #[test]
    fn scale_equivariance() {
        for d in 1..=4 {
            let c: Vec<f64> = (0..d).map(|i| 0.3 * i as f64 + 0.2).collect();
            let half: Vec<f64> = c.iter().map(|v| v / 2.0).collect();
            let a = nu_ball_mass(2.0, &ball(&c, 1.7)).unwrap();
            let b = nu_ball_mass(1.0, &ball(&half, 0.85)).unwrap();
            assert!((a - b).abs() < 1e-13, "d={d}");
        }
    }

    #[test]
    fn d1_fast_path_agrees_with_series() {
        for &(c, r, s) in &[(0.0, 1.0, 1.0), (2.0, 0.5, 1.0), (5.0, 3.0, 0.7), (0.3, 4.0, 2.0), (30.0, 1.0, 1.0)] {
            let fast = gaussian_ball_mass(1, s, c * c, r);
            let series = chisq_cdf_unchecked(1, c * c / (s * s), r * r / (s * s));
            assert!((fast - series).abs() < 1e-12, "{c} {r} {s}");
        }
    }

    #[test]
    fn mixture_of_two_scales() {
        let p = Profile::new([(1.0, 0.5), (2.0, 0.5)]).unwrap();
        let m = MixtureModel::new(p, 2).unwrap();
        let got = m.ball_mass(&ball(&[0.0, 0.0], 1.0)).unwrap();
        let exact = 0.5 * (1.0 - (-0.5f64).exp()) + 0.5 * (1.0 - (-0.125f64).exp());
        assert!((got - exact).abs() < 1e-12);
        assert!((got - 0.25548621885138556).abs() < 1e-12);
        assert_eq!(m.ball_mass(&Ball::all(2)).unwrap(), 1.0);
        assert!(matches!(m.ball_mass(&ball(&[0.0], 1.0)), Err(Error::Shape { .. })));
    }

    #[test]
    fn single_atom_mixture_equals_nu() {
        let m = MixtureModel::new(Profile::atom(1.3).unwrap(), 3).unwrap();
        let b = ball(&[0.4, -1.0, 2.0], 1.1);
        assert_eq!(m.ball_mass(&b).unwrap(), nu_ball_mass(1.3, &b).unwrap());
    }

    #[test]
    fn zero_sigma_atom_is_point_mass() {
        let m = MixtureModel::new(Profile::new([(0.0, 0.5), (1.0, 0.5)]).unwrap(), 2).unwrap();
        let near = m.ball_mass(&ball(&[0.1, 0.0], 0.1)).unwrap();
        let far = m.ball_mass(&ball(&[0.1, 0.0], 0.05)).unwrap();
        assert!(near > 0.5 && far < 0.5);
    }

    #[test]
    fn second_moments() {
        let m = MixtureModel::new(Profile::atom(1.0).unwrap(), 2).unwrap();
        assert_eq!(m.second_moment(), 2.0);
        let m = MixtureModel::new(Profile::new([(1.0, 0.5), (3.0, 0.5)]).unwrap(), 1).unwrap();
        assert!((mixture_second_moment(&m) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn resize() {
        let b = ball(&[0.0, 0.0], 1.0);
        assert_eq!(resize_ball(&b, 0.5), ball(&[0.0, 0.0], 1.5));
        assert_eq!(resize_ball(&b, -1.5).radius, Radius::Empty);
        assert_eq!(resize_ball(&resize_ball(&b, 0.3), -0.3), b);
        assert_eq!(resize_ball(&Ball::all(2), -5.0).radius, Radius::All);
        assert_eq!(resize_ball(&Ball::empty(2), 5.0).radius, Radius::Empty);
    }

    #[test]
    fn serializes_distinguished_radii() {
        let s = serde_json::to_string(&Ball::all(2)).unwrap();
        assert_eq!(s, r#"{"center":[0.0,0.0],"radius":"ALL"}"#);
        let s = serde_json::to_string(&ball(&[1.0], 0.5)).unwrap();
        assert_eq!(s, r#"{"center":[1.0],"radius":0.5}"#);
    }
}
