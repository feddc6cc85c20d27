//! SU(2) elements and the covering map onto SO(3).

use nalgebra::{Matrix2, Matrix3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{LabError, Result};

pub type C64 = Complex64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Largest modulus over complex entries.
pub fn max_abs<'a>(entries: impl IntoIterator<Item = &'a C64>) -> f64 {
    entries.into_iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn pauli() -> [Matrix2<C64>; 3] {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    [
        Matrix2::new(o, l, l, o),
        Matrix2::new(o, -I, I, o),
        Matrix2::new(l, o, o, -l),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationSU2 {
    m: Matrix2<C64>,
}

impl RotationSU2 {
    /// Validates unitarity and unit determinant to 1e-12.
    pub fn new(m: Matrix2<C64>) -> Result<Self> {
        let dev = max_abs((m * m.adjoint() - Matrix2::identity()).iter());
        let det = (m.determinant() - C64::new(1.0, 0.0)).norm();
        if dev > 1e-12 || det > 1e-12 {
            return Err(LabError::InvalidParameter(format!(
                "not an SU(2) matrix (unitarity defect {dev:.2e}, determinant defect {det:.2e})"
            )));
        }
        Ok(Self { m })
    }

    pub fn identity() -> Self {
        Self { m: Matrix2::identity() }
    }

    pub fn minus_identity() -> Self {
        Self { m: -Matrix2::identity() }
    }

    /// `exp(-i theta n.sigma / 2)`, a rotation by `theta` about the unit axis `n`.
    pub fn from_axis_angle(axis: [f64; 3], theta: f64) -> Self {
        let norm = axis.iter().map(|v| v * v).sum::<f64>().sqrt();
        let n: Vec<f64> = axis.iter().map(|v| v / norm).collect();
        let s = pauli();
        let ns = s[0] * C64::new(n[0], 0.0) + s[1] * C64::new(n[1], 0.0) + s[2] * C64::new(n[2], 0.0);
        let m = Matrix2::identity() * C64::new((theta / 2.0).cos(), 0.0) - ns * (I * (theta / 2.0).sin());
        Self { m }
    }

    /// Haar-distributed element from a normalized Gaussian quaternion.
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let q: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (a, b, c, d) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
        let alpha = C64::new(a, b);
        let beta = C64::new(c, d);
        Self { m: Matrix2::new(alpha, -beta.conj(), beta, alpha.conj()) }
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.m
    }

    pub fn compose(&self, other: &RotationSU2) -> RotationSU2 {
        RotationSU2 { m: self.m * other.m }
    }

    pub fn inverse(&self) -> RotationSU2 {
        RotationSU2 { m: self.m.adjoint() }
    }

    /// The fixed candidate set used for symmetry-breaking searches:
    /// y-rotations by pi/2 and pi, z- and x-rotations by pi.
    pub fn candidates() -> Vec<(String, RotationSU2)> {
        use std::f64::consts::PI;
        vec![
            ("y(pi/2)".into(), Self::from_axis_angle([0.0, 1.0, 0.0], PI / 2.0)),
            ("y(pi)".into(), Self::from_axis_angle([0.0, 1.0, 0.0], PI)),
            ("z(pi)".into(), Self::from_axis_angle([0.0, 0.0, 1.0], PI)),
            ("x(pi)".into(), Self::from_axis_angle([1.0, 0.0, 0.0], PI)),
        ]
    }
}

/// `R_A` with `(R_A x).sigma = A (x.sigma) A^{-1}`.
pub fn su2_to_so3(a: &RotationSU2) -> Matrix3<f64> {
    let s = pauli();
    let m = a.matrix();
    Matrix3::from_fn(|i, j| 0.5 * (s[i] * m * s[j] * m.adjoint()).trace().re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn xsigma(x: [f64; 3]) -> Matrix2<C64> {
        let s = pauli();
        s[0] * C64::new(x[0], 0.0) + s[1] * C64::new(x[1], 0.0) + s[2] * C64::new(x[2], 0.0)
    }

    #[test]
    fn rejects_non_unitary() {
        let m = Matrix2::new(C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0));
        assert!(RotationSU2::new(m).is_err());
        assert!(RotationSU2::new(*RotationSU2::random(&mut ChaCha8Rng::seed_from_u64(1)).matrix()).is_ok());
    }

    #[test]
    fn kernel_is_plus_minus_identity() {
        assert!((su2_to_so3(&RotationSU2::identity()) - Matrix3::identity()).amax() < 1e-15);
        assert!((su2_to_so3(&RotationSU2::minus_identity()) - Matrix3::identity()).amax() < 1e-15);
    }

    #[test]
    fn z_rotation_by_pi_over_3() {
        let t = std::f64::consts::PI / 3.0;
        let a = RotationSU2::new(Matrix2::new(
            C64::from_polar(1.0, -t / 2.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::from_polar(1.0, t / 2.0),
        ))
        .unwrap();
        let r = su2_to_so3(&a);
        let expected = Matrix3::new(t.cos(), -t.sin(), 0.0, t.sin(), t.cos(), 0.0, 0.0, 0.0, 1.0);
        assert!((r - expected).amax() < 1e-14);
        for e in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
            let rx = r * nalgebra::Vector3::from(e);
            let lhs = xsigma([rx[0], rx[1], rx[2]]);
            let rhs = a.matrix() * xsigma(e) * a.matrix().adjoint();
            assert!(max_abs((lhs - rhs).iter()) < 1e-12);
        }
    }

    #[test]
    fn homomorphism_and_orthogonality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = RotationSU2::random(&mut rng);
            let b = RotationSU2::random(&mut rng);
            let ra = su2_to_so3(&a);
            assert!((ra * ra.transpose() - Matrix3::identity()).amax() < 1e-12);
            assert!((ra.determinant() - 1.0).abs() < 1e-12);
            assert!((su2_to_so3(&a.compose(&b)) - ra * su2_to_so3(&b)).amax() < 1e-12);
        }
    }

    #[test]
    fn candidates_are_valid() {
        for (_, a) in RotationSU2::candidates() {
            assert!(RotationSU2::new(*a.matrix()).is_ok());
        }
    }
}
