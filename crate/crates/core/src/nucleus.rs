//! Smeared nuclear charge and the radial potential it generates.
//!
//! The density is the polynomial bump `n(r) = C (1 - (r/R)^2)^q` on `r < R`,
//! normalized to unit total charge. Both the enclosed charge and the outer
//! shell integral are polynomials in `r`, so the potential is evaluated in
//! closed form.

use std::f64::consts::PI;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NuclearModel {
    radius: f64,
    exponent: u32,
    normalization: f64,
    /// binomial(q, j) (-1)^j
    coefficients: Vec<f64>,
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// ∫_0^1 x^2 (1 - x^2)^q dx = q! / (2 Π_{j=0}^{q} (3/2 + j)).
fn unit_shell_moment(q: u32) -> f64 {
    let mut num = 1.0;
    for i in 1..=q {
        num *= i as f64;
    }
    let den: f64 = (0..=q).map(|j| 1.5 + j as f64).product();
    0.5 * num / den
}

impl NuclearModel {
    pub fn new(radius: f64, exponent: u32) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(LabError::InvalidParameter(format!("nuclear radius must be positive, got {radius}")));
        }
        if exponent < 2 {
            return Err(LabError::InvalidParameter(format!(
                "profile exponent must be >= 2 for a smooth edge, got {exponent}"
            )));
        }
        let normalization = 1.0 / (4.0 * PI * radius.powi(3) * unit_shell_moment(exponent));
        let coefficients = (0..=exponent)
            .map(|j| binomial(exponent, j) * if j % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        Ok(Self { radius, exponent, normalization, coefficients })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn density(&self, r: f64) -> f64 {
        if r >= self.radius {
            return 0.0;
        }
        let x = r / self.radius;
        self.normalization * (1.0 - x * x).powi(self.exponent as i32)
    }

    /// Charge enclosed in the ball of radius `r`.
    pub fn enclosed_charge(&self, r: f64) -> f64 {
        if r >= self.radius {
            return 1.0;
        }
        let x = r / self.radius;
        let s: f64 = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| c * x.powi(2 * j as i32 + 3) / (2 * j + 3) as f64)
            .sum();
        4.0 * PI * self.normalization * self.radius.powi(3) * s
    }

    /// ∫_r^∞ 4π s n(s) ds.
    fn outer_integral(&self, r: f64) -> f64 {
        if r >= self.radius {
            return 0.0;
        }
        let x = r / self.radius;
        let s: f64 = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(j, c)| c * (1.0 - x.powi(2 * j as i32 + 2)) / (2 * j + 2) as f64)
            .sum();
        4.0 * PI * self.normalization * self.radius.powi(2) * s
    }

    /// V(r) = -Q(r)/r - ∫_r^∞ 4π s n(s) ds. Finite at r = 0.
    pub fn potential(&self, r: f64) -> f64 {
        if r >= self.radius {
            return -1.0 / r;
        }
        if r == 0.0 {
            return -self.outer_integral(0.0);
        }
        -self.enclosed_charge(r) / r - self.outer_integral(r)
    }
}

/// One-body radial potential felt by an electron.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Smeared(NuclearModel),
    /// Unit point charge, `-1/r`. Reference configuration only.
    PointCoulomb,
    Free,
}

impl Potential {
    pub fn value(&self, r: f64) -> f64 {
        match self {
            Potential::Smeared(m) => m.potential(r),
            Potential::PointCoulomb => -1.0 / r,
            Potential::Free => 0.0,
        }
    }

    pub fn support_radius(&self) -> f64 {
        match self {
            Potential::Smeared(m) => m.radius(),
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive_gk;

    #[test]
    fn rejects_bad_parameters() {
        assert!(NuclearModel::new(0.0, 4).is_err());
        assert!(NuclearModel::new(-1.0, 4).is_err());
        assert!(NuclearModel::new(1.0, 1).is_err());
    }

    #[test]
    fn total_charge_is_one() {
        for &(r, q) in &[(1.0, 4), (0.5, 4), (2.0, 2), (0.3, 7)] {
            let m = NuclearModel::new(r, q).unwrap();
            assert!((m.enclosed_charge(r) - 1.0).abs() < 1e-12);
            let numeric = adaptive_gk(|s| vec![4.0 * PI * s * s * m.density(s)], 0.0, r, 1, 1e-15, 1e-14).unwrap();
            assert!((numeric[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn normalization_matches_numeric_quadrature() {
        let m = NuclearModel::new(1.0, 4).unwrap();
        let integral = adaptive_gk(|s| vec![4.0 * PI * s * s * (1.0 - s * s).powi(4)], 0.0, 1.0, 1, 1e-16, 1e-15)
            .unwrap()[0];
        assert!((m.normalization() - 1.0 / integral).abs() / m.normalization() < 1e-12);
    }

    #[test]
    fn compact_support() {
        let m = NuclearModel::new(0.5, 4).unwrap();
        for r in [0.5, 0.6, 1.0, 10.0] {
            assert_eq!(m.density(r), 0.0);
        }
        assert!(m.density(0.49) > 0.0);
    }

    #[test]
    fn potential_at_origin_matches_quadrature() {
        let m = NuclearModel::new(0.5, 4).unwrap();
        let v0 = adaptive_gk(|s| vec![-4.0 * PI * s * m.density(s)], 0.0, 0.5, 1, 1e-15, 1e-14).unwrap()[0];
        assert!((m.potential(0.0) - v0).abs() < 1e-12);
    }

    #[test]
    fn potential_bounds_and_tail() {
        let m = NuclearModel::new(0.5, 4).unwrap();
        for i in 1..2000 {
            let r = i as f64 * 1e-3;
            let v = m.potential(r);
            assert!(v < 0.0);
            assert!(v >= -1.0 / r - 1e-14);
            if r >= 0.5 {
                assert_eq!(v, -1.0 / r);
            }
        }
        // continuity at the edge
        assert!((m.potential(0.5 - 1e-9) + 2.0).abs() < 1e-7);
    }
}
