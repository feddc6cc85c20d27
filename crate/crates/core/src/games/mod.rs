//! Min-max and max-min levels, the projector game and the open-shell
//! machinery built on top of the Dirac-Fock core.

pub mod gap;
pub mod grassmann;
pub mod kato;
pub mod levels;
pub mod lyapunov;
pub mod shells;

pub use gap::{gap_certificate, GapCertificate, RotationGap};
pub use levels::{level_big_e, level_small_e, GameOptions, GameReport, GameStep, LevelE};
pub use shells::{classify_shells, shell_orbitals, ShellKind, ShellSplit};
pub use grassmann::{descend, exhaustive_sphere_minimum, minimize_on_s0, reduced_openshell_energy, GrassmannPoint, S0Minimum};
pub use lyapunov::{lyapunov_schmidt_refine, FiberSolution, NewtonOptions};
pub use kato::{open_shell_column, projector_rotation_firstorder, KatoReport};

pub use crate::radial::log_log_slope;
