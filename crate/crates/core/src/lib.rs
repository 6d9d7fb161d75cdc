//! Finite-dimensional noncommutative L_p spaces over `⊕ M_n`: Schatten-type
//! norms against weighted traces, modular theory of faithful states,
//! conditional expectations, and the classification of 2-isometries
//! `T(φ^{1/p} x) = w φ̄^{1/p} π(x)`.
//!
//! Every numerical routine is generic over the real scalar ([`scalar::Real`],
//! implemented for `f64` and `f32`); the aliases below fix the scalar.

pub mod algebra;
pub mod error;
pub mod expectation;
pub mod factory;
pub mod isometry;
pub mod json;
pub mod linalg;
pub mod lp;
pub mod modular;
pub mod scalar;
pub mod suites;
pub mod yeadon;

pub use algebra::Algebra;
pub use error::{Error, Result};

pub type Element = algebra::BlockMatrix<f64>;
pub type State = algebra::State<f64>;
pub type AlgebraMap = algebra::AlgebraMap<f64>;
pub type LpVector = lp::LpVector<f64>;
pub type LpMap = lp::LpMap<f64>;
pub type Subalgebra = expectation::Subalgebra<f64>;
pub type ConditionalExpectation = expectation::ConditionalExpectation<f64>;
pub type IsometryData = isometry::IsometryData<f64>;
pub type ClassificationReport = isometry::ClassificationReport<f64>;
pub type YeadonTriple = yeadon::YeadonTriple<f64>;

pub type Element32 = algebra::BlockMatrix<f32>;
pub type State32 = algebra::State<f32>;
pub type AlgebraMap32 = algebra::AlgebraMap<f32>;
pub type LpVector32 = lp::LpVector<f32>;
pub type LpMap32 = lp::LpMap<f32>;
pub type Subalgebra32 = expectation::Subalgebra<f32>;
pub type ConditionalExpectation32 = expectation::ConditionalExpectation<f32>;
pub type IsometryData32 = isometry::IsometryData<f32>;
pub type ClassificationReport32 = isometry::ClassificationReport<f32>;
pub type YeadonTriple32 = yeadon::YeadonTriple<f32>;
