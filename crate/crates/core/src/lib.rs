//! Exact GF(2) computations of quantum Steenrod squares, symplectic squares
//! and equivariant symplectic cohomology quotients.
//!
//! Targets are the total spaces `Tot(O(-k) -> CP^m)` (with closed-form
//! quantum corrections for `k = 1`) and cotangent bundles of spheres, where
//! only chain-level prefixes of the symplectic square are determined.

pub mod checks;
pub mod cli_io;
pub mod equivariant_quotient;
pub mod error;
pub mod linalg;
pub mod loop_space;
pub mod novikov;
pub mod parallel;
pub mod quantum_ring;
pub mod quantum_steenrod;
pub mod steenrod;

pub use error::{Error, Result};
pub use novikov::NovikovScalar;
pub use quantum_ring::{QHElement, RingDescriptor};
pub use quantum_steenrod::EqElement;

/// Version string mixed into cache keys.
pub const ENGINE_VERSION: &str = concat!("qsteen-", env!("CARGO_PKG_VERSION"));

/// Grading of an element: zero is homogeneous of every degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Degree {
    Zero,
    Homogeneous(i64),
    Inhomogeneous,
}

impl Degree {
    pub fn of_terms<I: IntoIterator<Item = i64>>(degrees: I) -> Degree {
        let mut out = Degree::Zero;
        for d in degrees {
            out = match out {
                Degree::Zero => Degree::Homogeneous(d),
                Degree::Homogeneous(e) if e == d => out,
                _ => return Degree::Inhomogeneous,
            };
        }
        out
    }

    /// True for zero or for a homogeneous element of degree `d`.
    pub fn is_compatible_with(self, d: i64) -> bool {
        match self {
            Degree::Zero => true,
            Degree::Homogeneous(e) => e == d,
            Degree::Inhomogeneous => false,
        }
    }
}
