//! Wigner D blocks from the symmetric-tensor realization of SU(2).
//!
//! Rows and columns are ordered `m = j, j-1, ..., -j`, so the `j = 1/2`
//! block is the matrix `A` itself.

use nalgebra::DMatrix;

use super::su2::{RotationSU2, C64};

fn factorial(n: i32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: i32, k: i32) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn cpow(z: C64, n: i32) -> C64 {
    (0..n).fold(C64::new(1.0, 0.0), |acc, _| acc * z)
}

/// `D^j(A)` for `tj = 2j`; entry `(i, k)` is `D_{m' m}` with
/// `m' = j - i`, `m = j - k`.
pub fn wigner_block(tj: i32, a: &RotationSU2) -> DMatrix<C64> {
    let m = a.matrix();
    let (aa, bb, cc, dd) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let dim = (tj + 1) as usize;
    DMatrix::from_fn(dim, dim, |i, k| {
        let jpm = tj - i as i32; // j + m'
        let jmm = tj - jpm; // j - m'
        let jpq = tj - k as i32; // j + m
        let jmq = tj - jpq; // j - m
        let norm = (factorial(jpm) * factorial(jmm) / (factorial(jpq) * factorial(jmq))).sqrt();
        let mut sum = C64::new(0.0, 0.0);
        for s in 0..=jpq {
            let t = jpm - s;
            if t < 0 || t > jmq {
                continue;
            }
            sum += cpow(aa, s) * cpow(cc, jpq - s) * cpow(bb, t) * cpow(dd, jmq - t) * (binomial(jpq, s) * binomial(jmq, t));
        }
        sum * norm
    })
}
