//! Exact angular algebra: SU(2), Wigner D blocks, 3j and Gaunt coefficients,
//! spherical and spinor harmonics.

pub mod gaunt;
pub mod harmonics;
pub mod su2;
pub mod threej;
pub mod wigner;

pub use gaunt::{gaunt, GauntTable};
pub use su2::{su2_to_so3, RotationSU2, C64};
pub use threej::{clebsch_gordan, three_j};
pub use wigner::wigner_block;

/// Smallest singular value of the Gram matrix of `{phi, A.phi}` for the
/// spin-orbital `(kappa, m)`: `1 - |D_{mm}(A)|`.
pub fn independence_margin(kappa: i32, tm: i32, a: &RotationSU2) -> f64 {
    let tj = 2 * kappa.abs() - 1;
    let d = wigner_block(tj, a);
    let idx = ((tj - tm) / 2) as usize;
    1.0 - d[(idx, idx)].norm()
}

/// First candidate rotation making `{phi, A.phi}` linearly independent with
/// margin at least `threshold`.
pub fn independence_witness(kappa: i32, tm: i32, threshold: f64) -> Option<(String, RotationSU2, f64)> {
    RotationSU2::candidates()
        .into_iter()
        .map(|(name, a)| {
            let m = independence_margin(kappa, tm, &a);
            (name, a, m)
        })
        .find(|(_, _, m)| *m >= threshold)
}
