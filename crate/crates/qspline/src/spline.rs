//! Classical spline machinery: truncated-power basis expansion, penalized
//! least-squares fitting, and the per-interval 2x2 block systems whose
//! solutions are the piecewise-linear spline coefficients.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, Mat};
use crate::scalar::{approx_f64, linspace, real, Scalar};

#[derive(Debug, Error, PartialEq)]
pub enum SplineError {
    #[error("invalid spline config: {0}")]
    InvalidConfig(String),
    #[error("block systems require order 2 (linear pieces), got order {0}")]
    UnsupportedOrder(usize),
    #[error("target function is not finite at knot {knot}")]
    NonFiniteTarget { knot: f64 },
    #[error("normal equations are singular; add a ridge penalty or more samples")]
    SingularNormalEquations,
    #[error("block {index} covering [{left}, {right}] is singular")]
    SingularBlock { index: usize, left: f64, right: f64 },
    #[error("x = {x} lies outside the spline domain [{left}, {right}]")]
    OutOfDomain { x: f64, left: f64, right: f64 },
    #[error("coefficient count {coefficients} does not match {intervals} intervals")]
    LengthMismatch {
        coefficients: usize,
        intervals: usize,
    },
}

/// Knot layout, polynomial order and ridge penalty governing a fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplineConfig<T> {
    /// Strictly increasing breakpoints.
    pub knots: Vec<T>,
    /// Polynomial order M (M = 2 fits a line per interval).
    pub order: usize,
    /// Ridge weight applied to the penalty matrix.
    pub penalty: T,
    /// Closed interval containing all knots.
    pub domain: (T, T),
}

impl<T: Scalar> SplineConfig<T> {
    pub fn new(knots: Vec<T>, order: usize, penalty: T, domain: (T, T)) -> Result<Self, SplineError> {
        let config = SplineConfig {
            knots,
            order,
            penalty,
            domain,
        };
        config.validate()?;
        Ok(config)
    }

    /// `count` equally spaced knots covering `[a, b]`, order 2, no penalty.
    pub fn equally_spaced(a: T, b: T, count: usize) -> Result<Self, SplineError> {
        if count < 2 {
            return Err(SplineError::InvalidConfig(
                "need at least two knots".into(),
            ));
        }
        Self::new(linspace(a, b, count), 2, T::zero(), (a, b))
    }

    fn validate(&self) -> Result<(), SplineError> {
        if self.order < 1 {
            return Err(SplineError::InvalidConfig("order must be >= 1".into()));
        }
        if self.penalty < T::zero() {
            return Err(SplineError::InvalidConfig(
                "penalty must be nonnegative".into(),
            ));
        }
        if self.knots.len() < 2 {
            return Err(SplineError::InvalidConfig(
                "need at least two knots".into(),
            ));
        }
        if self.domain.0 >= self.domain.1 {
            return Err(SplineError::InvalidConfig("empty domain".into()));
        }
        for pair in self.knots.windows(2) {
            if pair[0] >= pair[1] || pair[0].is_nan() || pair[1].is_nan() {
                return Err(SplineError::InvalidConfig(
                    "knots must be strictly increasing".into(),
                ));
            }
        }
        if self.knots[0] < self.domain.0 || *self.knots.last().unwrap() > self.domain.1 {
            return Err(SplineError::InvalidConfig(
                "knots must lie inside the domain".into(),
            ));
        }
        Ok(())
    }

    pub fn interval_count(&self) -> usize {
        self.knots.len() - 1
    }
}

impl<T: Scalar> Default for SplineConfig<T> {
    /// 20 equally spaced knots with spacing 0.1 starting at -1, so the grid
    /// covers [-1, 0.9] and contains 0 (a linear spline then reproduces
    /// relu exactly).
    fn default() -> Self {
        let knots: Vec<T> = (0..20)
            .map(|i| real::<T>(-1.0 + 0.1 * i as f64))
            .collect();
        let domain = (knots[0], knots[19]);
        SplineConfig {
            knots,
            order: 2,
            penalty: T::zero(),
            domain,
        }
    }
}

/// One term of the truncated power basis.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisTerm<T> {
    /// `x^(power)`.
    Monomial { power: u32 },
    /// `(x - knot)_+^(power)`.
    TruncatedPower { knot: T, power: u32 },
}

impl<T: Scalar> BasisTerm<T> {
    pub fn eval(&self, x: T) -> T {
        match self {
            BasisTerm::Monomial { power } => x.powi(*power as i32),
            BasisTerm::TruncatedPower { knot, power } => {
                let shifted = x - *knot;
                if shifted > T::zero() {
                    shifted.powi(*power as i32)
                } else {
                    T::zero()
                }
            }
        }
    }
}

/// The M + K basis maps: M monomials followed by K truncated powers in knot
/// order.
#[derive(Debug, Clone)]
pub struct BasisExpansion<T> {
    pub terms: Vec<BasisTerm<T>>,
}

impl<T: Scalar> BasisExpansion<T> {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval_row(&self, x: T) -> Vec<T> {
        self.terms.iter().map(|t| t.eval(x)).collect()
    }
}

/// Monomials `x^0 .. x^(M-1)` followed by `(x - xi_k)_+^(M-1)` per knot.
pub fn build_basis<T: Scalar>(config: &SplineConfig<T>) -> Result<BasisExpansion<T>, SplineError> {
    config.validate()?;
    let mut terms = Vec::with_capacity(config.order + config.knots.len());
    for j in 0..config.order {
        terms.push(BasisTerm::Monomial { power: j as u32 });
    }
    for &knot in &config.knots {
        terms.push(BasisTerm::TruncatedPower {
            knot,
            power: (config.order - 1) as u32,
        });
    }
    Ok(BasisExpansion { terms })
}

/// Dense design matrix (rows = samples, columns = basis functions) plus the
/// diagonal of the roughness penalty matrix.
#[derive(Debug, Clone)]
pub struct DesignMatrix<T> {
    pub entries: Mat<T>,
    pub penalty_diag: Vec<T>,
}

impl<T: Scalar> DesignMatrix<T> {
    /// Identity penalty (plain ridge shrinkage).
    pub fn new(entries: Mat<T>) -> Self {
        let penalty_diag = vec![T::one(); entries.ncols()];
        DesignMatrix {
            entries,
            penalty_diag,
        }
    }

    pub fn with_penalty_diag(mut self, diag: Vec<T>) -> Self {
        assert_eq!(diag.len(), self.entries.ncols());
        assert!(
            diag.iter().all(|d| *d >= T::zero()),
            "penalty diagonal must be nonnegative"
        );
        self.penalty_diag = diag;
        self
    }

    /// Evaluates the basis at the sample points.
    pub fn from_basis(basis: &BasisExpansion<T>, xs: &[T]) -> Self {
        let rows: Vec<Vec<T>> = xs.iter().map(|&x| basis.eval_row(x)).collect();
        Self::new(Mat::from_rows(&rows))
    }
}

/// Ridge solution `(NᵀN + eta * Omega)^{-1} Nᵀ y`.
pub fn fit_penalized<T: Scalar>(
    design: &DesignMatrix<T>,
    y: &[T],
    penalty: T,
) -> Result<Vec<T>, SplineError> {
    assert_eq!(design.entries.nrows(), y.len(), "sample count mismatch");
    let nt = design.entries.transpose();
    let mut normal = nt.matmul(&design.entries);
    for (i, &omega) in design.penalty_diag.iter().enumerate() {
        normal[(i, i)] += penalty * omega;
    }
    let rhs = nt.matvec(y);
    normal
        .cholesky_solve(&rhs)
        .ok_or(SplineError::SingularNormalEquations)
}

/// Per-interval 2x2 systems `S_k beta_k = y_k` with
/// `S_k = [[1, xi_k], [1, xi_{k+1}]]`, assembled from a scalar target.
#[derive(Debug, Clone)]
pub struct BlockSystem<T> {
    pub blocks: Vec<[[T; 2]; 2]>,
    pub rhs: Vec<[T; 2]>,
    pub intervals: Vec<(T, T)>,
}

impl<T: Scalar> BlockSystem<T> {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Index of the interval containing `x`. Knots belong to the interval
    /// on their right, except the last knot which closes the final
    /// interval.
    pub fn find_interval(&self, x: T) -> Result<usize, SplineError> {
        let first = self.intervals[0].0;
        let last = self.intervals[self.intervals.len() - 1].1;
        if x < first || x > last {
            return Err(SplineError::OutOfDomain {
                x: approx_f64(x),
                left: approx_f64(first),
                right: approx_f64(last),
            });
        }
        let idx = self
            .intervals
            .partition_point(|&(_, right)| right <= x)
            .min(self.intervals.len() - 1);
        Ok(idx)
    }

    /// Expands the blocks into the full `2K' x 2K'` block-diagonal matrix
    /// and stacked right-hand side.
    pub fn assemble_dense(&self) -> (Mat<T>, Vec<T>) {
        let n = 2 * self.len();
        let mut mat = Mat::zeros(n, n);
        let mut rhs = vec![T::zero(); n];
        for (k, (block, y)) in self.blocks.iter().zip(&self.rhs).enumerate() {
            for r in 0..2 {
                for c in 0..2 {
                    mat[(2 * k + r, 2 * k + c)] = block[r][c];
                }
                rhs[2 * k + r] = y[r];
            }
        }
        (mat, rhs)
    }
}

pub fn build_block_system<T, F>(
    config: &SplineConfig<T>,
    target: F,
) -> Result<BlockSystem<T>, SplineError>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    config.validate()?;
    if config.order != 2 {
        return Err(SplineError::UnsupportedOrder(config.order));
    }
    let values: Vec<T> = config.knots.iter().map(|&k| target(k)).collect();
    for (&knot, &value) in config.knots.iter().zip(&values) {
        if !value.is_finite() {
            return Err(SplineError::NonFiniteTarget {
                knot: approx_f64(knot),
            });
        }
    }
    let mut blocks = Vec::with_capacity(config.interval_count());
    let mut rhs = Vec::with_capacity(config.interval_count());
    let mut intervals = Vec::with_capacity(config.interval_count());
    for k in 0..config.interval_count() {
        let (left, right) = (config.knots[k], config.knots[k + 1]);
        blocks.push([[T::one(), left], [T::one(), right]]);
        rhs.push([values[k], values[k + 1]]);
        intervals.push((left, right));
    }
    Ok(BlockSystem {
        blocks,
        rhs,
        intervals,
    })
}

/// Which solver produced a fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitSource {
    Classical,
    HhlCircuit,
    HhlIdeal,
}

/// Per-interval (intercept, slope) coefficients.
#[derive(Debug, Clone)]
pub struct SplineFit<T> {
    pub coefficients: Vec<[T; 2]>,
    pub source: FitSource,
    /// Present for quantum-solved fits; `None` for classical ones.
    pub per_interval_fidelity: Option<Vec<T>>,
}

/// Exact per-block solve by direct 2x2 inversion.
pub fn solve_blocks_classical<T: Scalar>(
    system: &BlockSystem<T>,
) -> Result<SplineFit<T>, SplineError> {
    let mut coefficients = Vec::with_capacity(system.len());
    for (k, (block, y)) in system.blocks.iter().zip(&system.rhs).enumerate() {
        let beta = linalg::solve2(block, y).ok_or(SplineError::SingularBlock {
            index: k,
            left: approx_f64(system.intervals[k].0),
            right: approx_f64(system.intervals[k].1),
        })?;
        coefficients.push(beta);
    }
    Ok(SplineFit {
        coefficients,
        source: FitSource::Classical,
        per_interval_fidelity: None,
    })
}

/// Piecewise evaluation: locates the interval containing `x` and returns
/// `beta_k . (1, x)`.
pub fn evaluate_spline<T: Scalar>(
    fit: &SplineFit<T>,
    system: &BlockSystem<T>,
    x: T,
) -> Result<T, SplineError> {
    if fit.coefficients.len() != system.len() {
        return Err(SplineError::LengthMismatch {
            coefficients: fit.coefficients.len(),
            intervals: system.len(),
        });
    }
    let k = system.find_interval(x)?;
    let beta = fit.coefficients[k];
    Ok(beta[0] + beta[1] * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sigmoid(x: f64) -> f64 {
        1.0 / (1.0 + (-x).exp())
    }

    #[test]
    fn basis_matches_truncated_power_definitions() {
        // M = 2, single knot at 0
        let config = SplineConfig::new(vec![0.0, 1.0], 2, 0.0, (-1.0, 1.0)).unwrap();
        let basis = build_basis(&config).unwrap();
        assert_eq!(basis.len(), 4); // 2 monomials + 2 knots
        let row = basis.eval_row(0.5);
        assert_eq!(row[0], 1.0); // x^0
        assert_eq!(row[1], 0.5); // x^1
        assert_eq!(row[2], 0.5); // (x - 0)_+
        // negative part truncates
        let row = basis.eval_row(-0.5);
        assert_eq!(row[2], 0.0);
    }

    #[test]
    fn cubic_basis_term() {
        // M = 4, knot at 0.2: (0.5 - 0.2)^3 = 0.027
        let config = SplineConfig::new(vec![0.2f64, 0.9], 4, 0.0, (0.0, 1.0)).unwrap();
        let basis = build_basis(&config).unwrap();
        assert_eq!(basis.len(), 6);
        assert!((basis.terms[4].eval(0.5) - 0.027).abs() < 1e-15);
    }

    #[test]
    fn config_validation_rejects_bad_knots() {
        assert!(matches!(
            SplineConfig::new(vec![0.0, 0.0], 2, 0.0, (-1.0, 1.0)),
            Err(SplineError::InvalidConfig(_))
        ));
        assert!(matches!(
            SplineConfig::new(vec![0.0, 2.0], 2, 0.0, (-1.0, 1.0)),
            Err(SplineError::InvalidConfig(_))
        ));
        assert!(matches!(
            SplineConfig::new(vec![0.0, 1.0], 0, 0.0, (-1.0, 1.0)),
            Err(SplineError::InvalidConfig(_))
        ));
    }

    #[test]
    fn default_config_has_twenty_knots_including_zero() {
        let config = SplineConfig::<f64>::default();
        assert_eq!(config.knots.len(), 20);
        assert_eq!(config.interval_count(), 19);
        assert!(config.knots.iter().any(|&k| k.abs() < 1e-12));
        assert_eq!(config.order, 2);
        assert_eq!(config.penalty, 0.0);
    }

    #[test]
    fn identity_design_fits_exactly() {
        let design = DesignMatrix::new(Mat::<f64>::identity(2));
        let theta = fit_penalized(&design, &[1.0, 2.0], 0.0).unwrap();
        assert!((theta[0] - 1.0).abs() < 1e-12);
        assert!((theta[1] - 2.0).abs() < 1e-12);
        // eta = 1 with identity penalty halves the solution
        let theta = fit_penalized(&design, &[1.0, 2.0], 1.0).unwrap();
        assert!((theta[0] - 0.5).abs() < 1e-12);
        assert!((theta[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn penalized_fit_matches_gauss_jordan_oracle() {
        // independent oracle: explicit Gauss-Jordan inversion of the
        // normal equations, kept free of the Cholesky implementation path
        #[allow(clippy::needless_range_loop)]
        fn gauss_jordan_inverse(a: &Mat<f64>) -> Vec<Vec<f64>> {
            let n = a.nrows();
            let mut aug: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let mut row: Vec<f64> = (0..n).map(|j| a[(i, j)]).collect();
                    row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
                    row
                })
                .collect();
            for col in 0..n {
                let pivot = (col..n)
                    .max_by(|&r, &s| {
                        aug[r][col].abs().partial_cmp(&aug[s][col].abs()).unwrap()
                    })
                    .unwrap();
                aug.swap(col, pivot);
                let p = aug[col][col];
                assert!(p.abs() > 1e-12, "oracle hit a singular matrix");
                for j in 0..2 * n {
                    aug[col][j] /= p;
                }
                for r in 0..n {
                    if r == col {
                        continue;
                    }
                    let f = aug[r][col];
                    for j in 0..2 * n {
                        aug[r][j] -= f * aug[col][j];
                    }
                }
            }
            aug.into_iter().map(|row| row[n..].to_vec()).collect()
        }

        // fixed pseudo-random 10x4 design
        let mut seed = 88172645463325252u64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let rows: Vec<Vec<f64>> = (0..10).map(|_| (0..4).map(|_| next()).collect()).collect();
        let y: Vec<f64> = (0..10).map(|_| next()).collect();
        let eta = 0.1;
        let design = DesignMatrix::new(Mat::from_rows(&rows));
        let theta = fit_penalized(&design, &y, eta).unwrap();

        // oracle: theta = (N^T N + eta I)^{-1} N^T y via Gauss-Jordan
        let nt = design.entries.transpose();
        let mut normal = nt.matmul(&design.entries);
        for i in 0..4 {
            normal[(i, i)] += eta;
        }
        let inv = gauss_jordan_inverse(&normal);
        let nty = nt.matvec(&y);
        for i in 0..4 {
            let expect: f64 = (0..4).map(|j| inv[i][j] * nty[j]).sum();
            assert!(
                (theta[i] - expect).abs() < 1e-10,
                "component {i}: {} vs oracle {expect}",
                theta[i]
            );
        }
    }

    #[test]
    fn rank_deficient_unpenalized_fit_errors() {
        // duplicated column makes N^T N singular
        let rows = vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]];
        let design = DesignMatrix::new(Mat::from_rows(&rows));
        assert_eq!(
            fit_penalized(&design, &[1.0, 2.0, 3.0], 0.0).unwrap_err(),
            SplineError::SingularNormalEquations
        );
        // a ridge penalty restores solvability
        assert!(fit_penalized(&design, &[1.0, 2.0, 3.0], 0.5).is_ok());
    }

    #[test]
    fn block_system_construction() {
        let config = SplineConfig::new(vec![0.0, 1.0], 2, 0.0, (0.0, 1.0)).unwrap();
        let system = build_block_system(&config, |x| x).unwrap();
        assert_eq!(system.len(), 1);
        assert_eq!(system.blocks[0], [[1.0, 0.0], [1.0, 1.0]]);
        assert_eq!(system.rhs[0], [0.0, 1.0]);

        let config = SplineConfig::new(vec![-1.0, 0.0, 1.0], 2, 0.0, (-1.0, 1.0)).unwrap();
        let system = build_block_system(&config, |_| 0.5).unwrap();
        assert_eq!(system.len(), 2);
        assert_eq!(system.rhs[0], [0.5, 0.5]);
        assert_eq!(system.rhs[1], [0.5, 0.5]);
    }

    #[test]
    fn block_system_rejects_non_finite_targets() {
        let config = SplineConfig::new(vec![0.0, 1.0], 2, 0.0, (0.0, 1.0)).unwrap();
        let err = build_block_system(&config, |x| 1.0 / x).unwrap_err();
        assert!(matches!(err, SplineError::NonFiniteTarget { .. }));
    }

    #[test]
    fn default_sigmoid_blocks_reproduce_chord_slopes() {
        // oracle: the slope of each solved block must equal the chord slope
        // (f(right) - f(left)) / (right - left)
        let config = SplineConfig::<f64>::default();
        let system = build_block_system(&config, sigmoid).unwrap();
        assert_eq!(system.len(), 19);
        let fit = solve_blocks_classical(&system).unwrap();
        for (k, &(left, right)) in system.intervals.iter().enumerate() {
            let chord = (sigmoid(right) - sigmoid(left)) / (right - left);
            assert!(
                (fit.coefficients[k][1] - chord).abs() < 1e-12,
                "interval {k}"
            );
        }
    }

    #[test]
    fn classical_block_solutions() {
        let system = BlockSystem {
            blocks: vec![[[1.0, 0.0], [1.0, 1.0]], [[1.0, -1.0], [1.0, 1.0]]],
            rhs: vec![[0.0, 1.0], [1.0, 1.0]],
            intervals: vec![(0.0, 1.0), (1.0, 2.0)],
        };
        let fit = solve_blocks_classical(&system).unwrap();
        assert_eq!(fit.coefficients[0], [0.0, 1.0]);
        assert_eq!(fit.coefficients[1], [1.0, 0.0]);
        assert_eq!(fit.source, FitSource::Classical);
        assert!(fit.per_interval_fidelity.is_none());
    }

    #[test]
    fn singular_block_names_the_interval() {
        let system = BlockSystem {
            blocks: vec![[[1.0, 0.5], [1.0, 0.5]]],
            rhs: vec![[0.0, 1.0]],
            intervals: vec![(0.5, 0.5)],
        };
        match solve_blocks_classical(&system) {
            Err(SplineError::SingularBlock { index: 0, .. }) => {}
            other => panic!("expected SingularBlock, got {other:?}"),
        }
    }

    #[test]
    fn evaluation_and_tie_breaks() {
        let config = SplineConfig::new(vec![0.0f64, 1.0, 2.0], 2, 0.0, (0.0, 2.0)).unwrap();
        // piecewise target: slope 1 then slope -1
        let system = build_block_system(&config, |x| if x <= 1.0 { x } else { 2.0 - x }).unwrap();
        let fit = solve_blocks_classical(&system).unwrap();
        assert!((evaluate_spline(&fit, &system, 0.5).unwrap() - 0.5).abs() < 1e-12);
        // the interior knot belongs to the interval on its right
        assert_eq!(system.find_interval(1.0).unwrap(), 1);
        // the final knot closes the last interval
        assert_eq!(system.find_interval(2.0).unwrap(), 1);
        assert!((evaluate_spline(&fit, &system, 2.0).unwrap() - 0.0).abs() < 1e-12);
        assert!(matches!(
            evaluate_spline(&fit, &system, 2.5),
            Err(SplineError::OutOfDomain { .. })
        ));
    }

    #[test]
    fn relu_with_knot_at_zero_is_exact() {
        let config = SplineConfig::<f64>::default();
        let system = build_block_system(&config, |x: f64| x.max(0.0)).unwrap();
        let fit = solve_blocks_classical(&system).unwrap();
        let grid = crate::scalar::linspace(-1.0, 0.9, 100);
        let rss: f64 = grid
            .iter()
            .map(|&x| {
                let e = evaluate_spline(&fit, &system, x).unwrap() - x.max(0.0);
                e * e
            })
            .sum();
        assert!(rss <= 1e-20, "rss = {rss:e}");
    }

    #[test]
    fn interpolation_property_at_knots() {
        let config = SplineConfig::<f64>::default();
        let system = build_block_system(&config, sigmoid).unwrap();
        let fit = solve_blocks_classical(&system).unwrap();
        for &knot in &config.knots {
            let value = evaluate_spline(&fit, &system, knot).unwrap();
            assert!((value - sigmoid(knot)).abs() < 1e-12, "knot {knot}");
        }
    }

    #[test]
    fn block_solutions_match_assembled_dense_solve() {
        // the "little trick": per-block solutions equal the dense solve of
        // the assembled block-diagonal system
        let config = SplineConfig::<f64>::default();
        let system = build_block_system(&config, f64::tanh).unwrap();
        let fit = solve_blocks_classical(&system).unwrap();
        let (dense, rhs) = system.assemble_dense();
        assert_eq!(dense.nrows(), 38);
        let stacked = dense.lu_solve(&rhs).expect("assembled system solvable");
        for k in 0..system.len() {
            assert!((stacked[2 * k] - fit.coefficients[k][0]).abs() < 1e-10);
            assert!((stacked[2 * k + 1] - fit.coefficients[k][1]).abs() < 1e-10);
        }
    }

    #[test]
    fn block_residuals_are_tiny() {
        let config = SplineConfig::<f64>::default();
        let system = build_block_system(&config, sigmoid).unwrap();
        let fit = solve_blocks_classical(&system).unwrap();
        for ((block, y), beta) in system
            .blocks
            .iter()
            .zip(&system.rhs)
            .zip(&fit.coefficients)
        {
            for r in 0..2 {
                let residual = block[r][0] * beta[0] + block[r][1] * beta[1] - y[r];
                assert!(residual.abs() <= 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn shrinkage_is_monotone_in_penalty(
            seed_rows in proptest::collection::vec(
                proptest::collection::vec(-2.0..2.0f64, 3), 6
            ),
            y in proptest::collection::vec(-2.0..2.0f64, 6),
            eta1 in 0.0..2.0f64,
            delta in 0.01..2.0f64,
        ) {
            let design = DesignMatrix::new(Mat::from_rows(&seed_rows));
            let eta2 = eta1 + delta;
            let t1 = fit_penalized(&design, &y, eta1);
            let t2 = fit_penalized(&design, &y, eta2);
            if let (Ok(t1), Ok(t2)) = (t1, t2) {
                let n1 = linalg::norm(&t1);
                let n2 = linalg::norm(&t2);
                prop_assert!(n2 <= n1 + 1e-9, "norm grew from {n1} to {n2}");
            }
        }

        #[test]
        fn interval_lookup_is_total_on_domain(x in -1.0..=0.9f64) {
            let config = SplineConfig::<f64>::default();
            let system = build_block_system(&config, sigmoid).unwrap();
            let k = system.find_interval(x).unwrap();
            let (left, right) = system.intervals[k];
            prop_assert!(left <= x && x <= right);
        }
    }
}
