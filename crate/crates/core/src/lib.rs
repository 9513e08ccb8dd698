//! Desk-scale computations around dynamical degrees and Frobenius eigenvalues.

pub mod corr;
pub mod counting;
pub mod cyclelattice;
pub mod dyndeg;
pub mod factor;
pub mod ffield;
pub mod fpoly;
pub mod linalg;
pub mod poly;
pub mod roots;
pub mod verdict;
pub mod zeta;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/zeta.md")]
    mod zeta {}
    #[doc = include_str!("../../../book/src/lattices.md")]
    mod lattices {}
    #[doc = include_str!("../../../book/src/correspondences.md")]
    mod correspondences {}
    #[doc = include_str!("../../../book/src/dynamical-degrees.md")]
    mod dynamical_degrees {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
