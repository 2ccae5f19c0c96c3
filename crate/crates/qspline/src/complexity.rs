//! Operation-count cost models for linear-system solvers and the
//! HHL-vs-classical crossover analysis. All formulas use unit leading
//! constants and natural logarithms, with the error tolerance entering as
//! `|ln eps|` for the conjugate gradient and `1/eps` for HHL.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{approx_f64, real, Scalar};

#[derive(Debug, Error, PartialEq)]
pub enum ComplexityError {
    #[error("invalid cost parameter: {0}")]
    InvalidParameter(String),
    #[error("system size n must be at least 2, got {0}")]
    SizeTooSmall(u64),
}

/// The five modelled algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    GaussJordan,
    Strassen,
    Coppersmith,
    ConjugateGradient,
    Hhl,
}

impl Algorithm {
    pub fn all() -> [Algorithm; 5] {
        [
            Algorithm::GaussJordan,
            Algorithm::Strassen,
            Algorithm::Coppersmith,
            Algorithm::ConjugateGradient,
            Algorithm::Hhl,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::GaussJordan => "gauss_jordan",
            Algorithm::Strassen => "strassen",
            Algorithm::Coppersmith => "coppersmith",
            Algorithm::ConjugateGradient => "conjugate_gradient",
            Algorithm::Hhl => "hhl",
        }
    }
}

/// A cost formula bound to its sparsity / conditioning / tolerance
/// parameters:
///
/// | algorithm           | cost                         |
/// |---------------------|------------------------------|
/// | gauss_jordan        | n^3                          |
/// | strassen            | n^2.8                        |
/// | coppersmith         | n^2.37                       |
/// | conjugate_gradient  | s sqrt(kappa) n / |ln eps|   |
/// | hhl                 | s^2 kappa^2 ln(n) / eps      |
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CostModel<T> {
    pub algorithm: Algorithm,
    /// Max nonzeros per row/column.
    pub sparsity: T,
    /// Condition number of the system matrix.
    pub kappa: T,
    /// Error tolerance in (0, 1).
    pub eps: T,
}

impl<T: Scalar> CostModel<T> {
    pub fn new(algorithm: Algorithm, sparsity: T, kappa: T, eps: T) -> Result<Self, ComplexityError> {
        if sparsity < T::one() || sparsity.is_nan() {
            return Err(ComplexityError::InvalidParameter(format!(
                "sparsity must be >= 1, got {}",
                approx_f64(sparsity)
            )));
        }
        if kappa < T::one() || kappa.is_nan() {
            return Err(ComplexityError::InvalidParameter(format!(
                "condition number must be >= 1, got {}",
                approx_f64(kappa)
            )));
        }
        if eps <= T::zero() || eps >= T::one() || eps.is_nan() {
            return Err(ComplexityError::InvalidParameter(format!(
                "error tolerance must lie in (0, 1), got {}",
                approx_f64(eps)
            )));
        }
        Ok(CostModel {
            algorithm,
            sparsity,
            kappa,
            eps,
        })
    }

    /// Operation count at system size `n`.
    pub fn cost(&self, n: u64) -> Result<T, ComplexityError> {
        if n < 2 {
            return Err(ComplexityError::SizeTooSmall(n));
        }
        let nf = real::<T>(n as f64);
        Ok(match self.algorithm {
            Algorithm::GaussJordan => nf.powi(3),
            Algorithm::Strassen => nf.powf(real::<T>(2.8)),
            Algorithm::Coppersmith => nf.powf(real::<T>(2.37)),
            Algorithm::ConjugateGradient => {
                self.sparsity * self.kappa.sqrt() * nf / self.eps.ln().abs()
            }
            Algorithm::Hhl => {
                self.sparsity * self.sparsity * self.kappa * self.kappa * nf.ln() / self.eps
            }
        })
    }

    pub fn with_sparsity(mut self, sparsity: T) -> Self {
        self.sparsity = sparsity;
        self
    }
}

/// Penalized condition number `|lambda_max + eta| / |lambda_min + eta|`;
/// ridge weight drives it towards 1.
pub fn condition_number_penalized<T: Scalar>(
    lambda_min: T,
    lambda_max: T,
    eta: T,
) -> Result<T, ComplexityError> {
    let den = (lambda_min + eta).abs();
    if den <= T::epsilon() {
        return Err(ComplexityError::InvalidParameter(
            "penalized smallest eigenvalue must be nonzero".into(),
        ));
    }
    Ok((lambda_max + eta).abs() / den)
}

/// Smallest `n <= n_max` from which `model_a` stays strictly cheaper than
/// `model_b` through `n_max`. `None` when no such point exists.
pub fn crossover<T: Scalar>(
    model_a: &CostModel<T>,
    model_b: &CostModel<T>,
    n_max: u64,
) -> Result<Option<u64>, ComplexityError> {
    if n_max < 2 {
        return Err(ComplexityError::SizeTooSmall(n_max));
    }
    let mut candidate = None;
    for n in 2..=n_max {
        if model_a.cost(n)? < model_b.cost(n)? {
            candidate.get_or_insert(n);
        } else {
            candidate = None;
        }
    }
    Ok(candidate)
}

/// One row of the cost-curve table; the HHL sparsity band is populated on
/// HHL rows when a band is requested.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurvePoint<T> {
    pub n: u64,
    pub algorithm: Algorithm,
    pub cost: T,
    pub band_min: Option<T>,
    pub band_max: Option<T>,
}

/// Evaluates every model over `n` in `[2, n_max]`, optionally adding the
/// min/max HHL cost as the sparsity sweeps over `band` (kappa held fixed).
pub fn emit_curves<T: Scalar>(
    models: &[CostModel<T>],
    n_max: u64,
    band: Option<(T, T)>,
) -> Result<Vec<CurvePoint<T>>, ComplexityError> {
    if n_max < 2 {
        return Err(ComplexityError::SizeTooSmall(n_max));
    }
    if let Some((lo, hi)) = band {
        if !(lo >= T::one() && hi >= lo) {
            return Err(ComplexityError::InvalidParameter(
                "sparsity band must satisfy 1 <= lo <= hi".into(),
            ));
        }
    }
    let mut rows = Vec::new();
    for n in 2..=n_max {
        for model in models {
            let (band_min, band_max) = match (model.algorithm, band) {
                (Algorithm::Hhl, Some((lo, hi))) => {
                    // HHL cost is monotone in the sparsity
                    let low = model.with_sparsity(lo).cost(n)?;
                    let high = model.with_sparsity(hi).cost(n)?;
                    (Some(low), Some(high))
                }
                _ => (None, None),
            };
            rows.push(CurvePoint {
                n,
                algorithm: model.algorithm,
                cost: model.cost(n)?,
                band_min,
                band_max,
            });
        }
    }
    Ok(rows)
}

/// The five Table-style models sharing one parameter set.
pub fn standard_models<T: Scalar>(
    sparsity: T,
    kappa: T,
    eps: T,
) -> Result<Vec<CostModel<T>>, ComplexityError> {
    Algorithm::all()
        .into_iter()
        .map(|algorithm| CostModel::new(algorithm, sparsity, kappa, eps))
        .collect()
}
