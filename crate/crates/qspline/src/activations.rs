//! Target activation functions and the [0, 1] min-max scaling applied
//! before amplitude encoding.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{linspace, Scalar};
use crate::tol;

#[derive(Debug, Error, PartialEq)]
pub enum ActivationError {
    #[error("unknown activation '{0}' (expected sigmoid, tanh, relu or elu)")]
    Unknown(String),
    #[error("cannot scale a constant function (min == max on the domain)")]
    ConstantFunction,
    #[error("scaling domain is empty")]
    EmptyDomain,
}

/// The four target activations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation<T> {
    Sigmoid,
    Tanh,
    Relu,
    Elu { alpha: T },
}

impl<T: Scalar> Activation<T> {
    pub fn elu() -> Self {
        Activation::Elu { alpha: T::one() }
    }

    pub fn eval(&self, x: T) -> T {
        match self {
            Activation::Sigmoid => T::one() / (T::one() + (-x).exp()),
            Activation::Tanh => x.tanh(),
            Activation::Relu => x.max(T::zero()),
            Activation::Elu { alpha } => {
                if x >= T::zero() {
                    x
                } else {
                    *alpha * (x.exp() - T::one())
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
            Activation::Elu { .. } => "elu",
        }
    }

    /// All four targets with default parameters.
    pub fn all() -> [Self; 4] {
        [
            Activation::Sigmoid,
            Activation::Tanh,
            Activation::Relu,
            Activation::elu(),
        ]
    }

    pub fn parse(name: &str) -> Result<Self, ActivationError> {
        match name {
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            "elu" => Ok(Activation::elu()),
            other => Err(ActivationError::Unknown(other.into())),
        }
    }
}

/// Affine map sending `[f_min, f_max]` onto `[0, 1]`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Scaler<T> {
    pub f_min: T,
    pub f_max: T,
}

impl<T: Scalar> Scaler<T> {
    pub fn apply(&self, value: T) -> T {
        (value - self.f_min) / (self.f_max - self.f_min)
    }

    pub fn invert(&self, scaled: T) -> T {
        self.f_min + scaled * (self.f_max - self.f_min)
    }
}

/// Min-max scaler fitted on a dense grid over the fit domain; targets go
/// into [0, 1] before quantum encoding since amplitudes bound them there.
pub fn fit_scaler<T: Scalar>(
    activation: Activation<T>,
    domain: (T, T),
    grid_points: usize,
) -> Result<Scaler<T>, ActivationError> {
    if domain.0 >= domain.1 || !domain.0.is_finite() || !domain.1.is_finite() {
        return Err(ActivationError::EmptyDomain);
    }
    let points = grid_points.max(2);
    let mut f_min = T::infinity();
    let mut f_max = T::neg_infinity();
    for x in linspace(domain.0, domain.1, points) {
        let v = activation.eval(x);
        f_min = f_min.min(v);
        f_max = f_max.max(v);
    }
    if f_max - f_min <= tol::zero_rhs::<T>() {
        return Err(ActivationError::ConstantFunction);
    }
    Ok(Scaler { f_min, f_max })
}

/// Default sampling density for [`fit_scaler`].
pub const SCALER_GRID_POINTS: usize = 1000;
