//! Asymptotic ingredients of property (P): the resolvent average, the
//! nonrelativistic pairing of a shell, the field f(A, phi), the surface
//! integral I(r) and the resulting certificate.

pub mod certificate;
pub mod crosscheck;
pub mod field;
pub mod pauli;
pub mod resolvent;

pub use resolvent::{resolvent_average, resolvent_closed_form, resolvent_quadrature, ResolventAverage};
pub use pauli::{pair_orbital, pauli_orbital, PairedOrbital, PauliOrbital};
pub use field::{cauchy_schwarz_margin, f_field, surface_integral, FField};
pub use certificate::{property_p_certificate, scan_candidate, tail_window, CandidateScan, PropertyPCertificate, SIGNAL_FACTOR, TAIL_HIGH, TAIL_LOW};
pub use crosscheck::{leak_cross_check, LeakCrossCheck};
