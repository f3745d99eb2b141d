//! Dense geometric algebra over Euclidean `R^N`.
//!
//! Multivectors store all `2^N` coefficients; basis blades are addressed by the
//! bitmask of their factor indices. Every value is immutable once built and
//! every operation is a pure function, so everything here is `Send + Sync`.

mod linear;
mod multivector;
mod rotor;
mod subspace;

pub use linear::LinearMapN;
pub use multivector::{blade_grade, reorder_sign, reverse_sign, Multivector, MAX_DIM};
pub use rotor::Rotor;
pub use subspace::{project_tangent, project_transverse, Subspace};

use crate::error::Result;

pub fn geometric_product(a: &Multivector, b: &Multivector) -> Result<Multivector> {
    a.geometric_product(b)
}

pub fn inner_product(a: &Multivector, b: &Multivector) -> Result<Multivector> {
    a.inner(b)
}

pub fn outer_product(a: &Multivector, b: &Multivector) -> Result<Multivector> {
    a.outer(b)
}

pub fn commutator(a: &Multivector, b: &Multivector) -> Result<Multivector> {
    a.commutator(b)
}

pub fn rotor_exp(bivector: &Multivector) -> Result<Rotor> {
    Rotor::exp(bivector)
}

pub fn outermorphism(f: &LinearMapN, a: &Multivector) -> Result<Multivector> {
    f.outermorphism(a)
}

pub fn symmetric_sqrt(f: &LinearMapN) -> Result<LinearMapN> {
    f.sqrt()
}

pub fn symmetric_inv_sqrt(f: &LinearMapN) -> Result<LinearMapN> {
    f.inv_sqrt()
}
