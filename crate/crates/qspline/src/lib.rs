//! Quantum-assisted piecewise-linear splines.
//!
//! The crate fits linear splines to activation functions by solving one
//! 2x2 linear system per knot interval, with three interchangeable
//! strategies:
//!
//! - **classical**: direct block inversion;
//! - **hybrid**: coefficients estimated by a simulated HHL linear-system
//!   solver, evaluation done classically;
//! - **full**: HHL coefficients and a swap-test circuit for evaluation, so
//!   the function value is read from measurement probabilities alone.
//!
//! Supporting pieces: a dense statevector simulator ([`sim`]), the solver
//! itself ([`hhl`]), the swap-test readout ([`swap_test`]), activation
//! scaling ([`activations`]), and operation-count models comparing HHL to
//! classical solvers ([`complexity`]).
//!
//! The numeric kernels are generic over the scalar type through
//! [`scalar::Scalar`] (`f32` or `f64`); the `*64` aliases below pin the
//! default double-precision instantiations.

pub mod activations;
pub mod complexity;
pub mod hhl;
mod linalg;
pub mod pipeline;
pub mod scalar;
pub mod sim;
pub mod spline;
pub mod tol;

pub use linalg::Mat;

pub use scalar::Scalar;

pub type StateVector64 = sim::StateVector<f64>;
pub type Gate64 = sim::Gate<f64>;
pub type Circuit64 = sim::Circuit<f64>;
pub type SplineConfig64 = spline::SplineConfig<f64>;
pub type BlockSystem64 = spline::BlockSystem<f64>;
pub type SplineFit64 = spline::SplineFit<f64>;
pub type Activation64 = activations::Activation<f64>;
pub type Scaler64 = activations::Scaler<f64>;
pub type HhlConfig64 = hhl::HhlConfig<f64>;
pub type HhlResult64 = hhl::HhlResult<f64>;
pub type CostModel64 = complexity::CostModel<f64>;
pub type PipelineConfig64 = pipeline::PipelineConfig<f64>;
pub type PipelineReport64 = pipeline::PipelineReport<f64>;

pub type StateVector32 = sim::StateVector<f32>;
pub type SplineConfig32 = spline::SplineConfig<f32>;
pub type Activation32 = activations::Activation<f32>;
pub type CostModel32 = complexity::CostModel<f32>;
