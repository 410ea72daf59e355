//! Approximate identities, Mellin analysis on the multiplicative group and
//! converse Fatou experiments on Euclidean and real hyperbolic spaces.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Quadrature and special-function tables keep their published digits.
#![allow(clippy::excessive_precision)]

pub mod error;
pub mod grid;
pub mod harness;
pub mod hyperbolic;
pub mod kernels;
pub mod measures;
pub mod mellin;
pub mod multconv;
pub mod quad;
pub mod registry;
pub mod specfun;

pub use error::{Error, Result};
pub use grid::GeomGrid;
pub use kernels::RadialKernel;
pub use measures::trace::{Classification, ClassifierOptions, LimitTrace};
pub use measures::{RadialFunction, RadialMeasure};
pub use specfun::ComplexValue;

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::Serializer;

pub(crate) fn serialize_complex_vec<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}
