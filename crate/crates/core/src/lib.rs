pub mod error;
pub mod grid;
pub mod nucleus;
pub mod quadrature;
pub mod bspline;
pub mod radial;
pub mod angular;
pub mod coulomb;
pub mod fock;
pub mod games;
pub mod propertyp;
pub mod lab;
