//! Shape-tensor geometry of embedded manifolds, in geometric algebra.
//!
//! The guide in `book/` walks through the modules in order; its listings run
//! as doctests of this crate.

pub mod cli;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod ga;
pub mod linalg;
pub mod manifold;
pub mod shapemin;
pub mod transport;

pub use error::{Error, Result};

// The guide's code listings run as doctests.
#[cfg(doctest)]
pub mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/multivectors.md")]
    pub mod multivectors {}
    #[doc = include_str!("../../../book/src/manifolds.md")]
    pub mod manifolds {}
    #[doc = include_str!("../../../book/src/transport.md")]
    pub mod transport {}
    #[doc = include_str!("../../../book/src/curvature.md")]
    pub mod curvature {}
    #[doc = include_str!("../../../book/src/shape-minimizing.md")]
    pub mod shape_minimizing {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
