//! Orchestration of the three estimation strategies over one activation:
//! classical per-block solves, hybrid (quantum coefficient estimation with
//! classical evaluation), and full quantum (swap-test evaluation on top of
//! the quantum coefficients), plus the report metrics.

use rand::SeedableRng;
use serde::Serialize;
use std::sync::OnceLock;
use thiserror::Error;

use crate::activations::{fit_scaler, Activation, ActivationError, SCALER_GRID_POINTS};
use crate::hhl::{solve_hhl_with_state, HhlBackend, HhlConfig, HhlError};
use crate::scalar::{approx_f64, linspace, real, Scalar};
use crate::sim::StateVector;
use crate::spline::{
    build_block_system, evaluate_spline, solve_blocks_classical, BlockSystem, FitSource,
    SplineConfig, SplineError, SplineFit,
};
use crate::swap_test::{
    back_transform, encode_input, outcome_from_p0, sample_p0, swap_test, SwapTestError,
};
use crate::tol;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error("scaling failed: {0}")]
    Scaler(#[from] ActivationError),
    #[error("interval {index} ([{left}, {right}]): {source}")]
    Interval {
        index: usize,
        left: f64,
        right: f64,
        source: HhlError,
    },
    #[error(transparent)]
    SwapTest(#[from] SwapTestError),
    #[error("prediction and truth lengths differ: {predictions} vs {truths}")]
    LengthMismatch { predictions: usize, truths: usize },
}

/// Estimation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classical,
    Hybrid,
    Full,
}

impl Mode {
    fn wants_hybrid(self) -> bool {
        matches!(self, Mode::Hybrid | Mode::Full)
    }

    fn wants_full(self) -> bool {
        matches!(self, Mode::Full)
    }
}

/// How quantum solution directions are rescaled into usable coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormRecovery {
    /// Rescale so the spline reproduces the scaled target exactly at the
    /// interval knot with the larger target magnitude. Deterministic and
    /// sign-correct; the default.
    Anchor,
    /// Magnitude from `sqrt(P_success) ||y|| / C`; the overall sign is
    /// unrecoverable and fixed by the direction convention.
    SuccessProbability,
}

/// Full configuration of a pipeline run.
#[derive(Debug, Clone, Serialize, serde::Deserialize)]
pub struct PipelineConfig<T> {
    pub spline: SplineConfig<T>,
    pub hhl: HhlConfig<T>,
    /// Uniform evaluation grid size over the knot span.
    pub grid_points: usize,
    /// `None` reads exact probabilities; `Some(n)` samples n ancilla shots
    /// per swap test.
    pub shots: Option<u64>,
    /// Seed for the optional shot sampling.
    pub seed: u64,
    /// Repair the sign of full-quantum estimates from the hybrid sign.
    pub sign_repair: bool,
    pub norm_recovery: NormRecovery,
}

impl<T: Scalar> Default for PipelineConfig<T> {
    fn default() -> Self {
        PipelineConfig {
            spline: SplineConfig::default(),
            hhl: HhlConfig::default(),
            grid_points: 100,
            shots: None,
            seed: 0,
            sign_repair: false,
            norm_recovery: NormRecovery::Anchor,
        }
    }
}

/// One evaluation-grid row of the report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurveSample<T> {
    pub x: T,
    pub f_true: T,
    pub f_classic: T,
    pub f_hybrid: Option<T>,
    pub f_full: Option<T>,
    /// Fidelity of the HHL solve on the interval containing `x`.
    pub interval_fidelity: Option<T>,
}

/// Metrics and curves for one activation.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport<T> {
    pub activation: String,
    pub rss_classic: T,
    pub rss_hybrid: Option<T>,
    pub rss_full: Option<T>,
    pub average_fidelity: Option<T>,
    pub per_interval_fidelity: Option<Vec<T>>,
    pub curve_samples: Vec<CurveSample<T>>,
}

/// Residual sum of squares.
pub fn rss<T: Scalar>(predictions: &[T], truths: &[T]) -> Result<T, PipelineError> {
    if predictions.len() != truths.len() {
        return Err(PipelineError::LengthMismatch {
            predictions: predictions.len(),
            truths: truths.len(),
        });
    }
    Ok(predictions
        .iter()
        .zip(truths)
        .map(|(p, t)| (*p - *t) * (*p - *t))
        .sum())
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman<T: Scalar>(xs: &[T], ys: &[T]) -> T {
    assert_eq!(xs.len(), ys.len());
    let rank = |vals: &[T]| -> Vec<T> {
        let mut order: Vec<usize> = (0..vals.len()).collect();
        order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap_or(std::cmp::Ordering::Equal));
        let mut ranks = vec![T::zero(); vals.len()];
        let mut i = 0;
        while i < order.len() {
            let mut j = i;
            while j + 1 < order.len() && vals[order[j + 1]] == vals[order[i]] {
                j += 1;
            }
            let shared = real::<T>((i + j) as f64 / 2.0);
            for &idx in &order[i..=j] {
                ranks[idx] = shared;
            }
            i = j + 1;
        }
        ranks
    };
    let ra = rank(xs);
    let rb = rank(ys);
    let mean_a = ra.iter().copied().sum::<T>() / real::<T>(ra.len() as f64);
    let mean_b = rb.iter().copied().sum::<T>() / real::<T>(rb.len() as f64);
    let mut cov = T::zero();
    let mut var_a = T::zero();
    let mut var_b = T::zero();
    for (a, b) in ra.iter().zip(&rb) {
        let da = *a - mean_a;
        let db = *b - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    let denom = (var_a * var_b).sqrt();
    if denom <= T::epsilon() {
        T::zero()
    } else {
        cov / denom
    }
}

/// Per-interval quantum solution after norm recovery.
struct IntervalSolution<T: Scalar> {
    beta: [T; 2],
    beta_norm: T,
    fidelity: T,
    /// `None` for identically-zero systems, which bypass the solver.
    state: Option<StateVector<T>>,
}

fn worker_pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var("QSPLINE_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("worker pool construction")
    })
}

/// Solves every interval with the configured HHL backend and rescales the
/// unit directions into spline coefficients.
fn solve_intervals<T: Scalar>(
    system: &BlockSystem<T>,
    config: &PipelineConfig<T>,
) -> Result<Vec<IntervalSolution<T>>, PipelineError> {
    let results: Vec<Result<IntervalSolution<T>, HhlError>> = worker_pool().install(|| {
        use rayon::prelude::*;
        (0..system.len())
            .into_par_iter()
            .map(|k| solve_one_interval(system, config, k))
            .collect()
    });
    let mut solutions = Vec::with_capacity(results.len());
    for (k, result) in results.into_iter().enumerate() {
        match result {
            Ok(solution) => solutions.push(solution),
            Err(source) => {
                let (left, right) = system.intervals[k];
                return Err(PipelineError::Interval {
                    index: k,
                    left: approx_f64(left),
                    right: approx_f64(right),
                    source,
                });
            }
        }
    }
    Ok(solutions)
}

fn solve_one_interval<T: Scalar>(
    system: &BlockSystem<T>,
    config: &PipelineConfig<T>,
    k: usize,
) -> Result<IntervalSolution<T>, HhlError> {
    let y = system.rhs[k];
    if (y[0] * y[0] + y[1] * y[1]).sqrt() <= tol::zero_rhs::<T>() {
        // an identically-zero system has the exact solution beta = 0; no
        // quantum state encodes it, so the interval is settled classically
        return Ok(IntervalSolution {
            beta: [T::zero(), T::zero()],
            beta_norm: T::zero(),
            fidelity: T::one(),
            state: None,
        });
    }
    let (result, state) = solve_hhl_with_state(&system.blocks[k], &y, &config.hhl)?;
    let direction = result.solution_direction;
    let scale = match config.norm_recovery {
        NormRecovery::Anchor => {
            let (left, right) = system.intervals[k];
            let anchor = if y[0].abs() >= y[1].abs() {
                (left, y[0])
            } else {
                (right, y[1])
            };
            let reach = direction[0] + direction[1] * anchor.0;
            if reach.abs() <= tol::singular::<T>() {
                T::zero() // direction orthogonal to the anchor point
            } else {
                anchor.1 / reach
            }
        }
        NormRecovery::SuccessProbability => result.recovered_norm,
    };
    Ok(IntervalSolution {
        beta: [direction[0] * scale, direction[1] * scale],
        beta_norm: scale.abs(),
        fidelity: result.fidelity,
        state: Some(state),
    })
}

fn fit_from_solutions<T: Scalar>(
    solutions: &[IntervalSolution<T>],
    backend: HhlBackend,
) -> SplineFit<T> {
    SplineFit {
        coefficients: solutions.iter().map(|s| s.beta).collect(),
        source: match backend {
            HhlBackend::Circuit => FitSource::HhlCircuit,
            HhlBackend::Ideal => FitSource::HhlIdeal,
        },
        per_interval_fidelity: Some(solutions.iter().map(|s| s.fidelity).collect()),
    }
}

/// Quantum-solved spline fit over an existing block system, with the
/// configured norm recovery applied and per-interval fidelities recorded.
pub fn hybrid_spline_fit<T: Scalar>(
    system: &BlockSystem<T>,
    config: &PipelineConfig<T>,
) -> Result<SplineFit<T>, PipelineError> {
    let solutions = solve_intervals(system, config)?;
    Ok(fit_from_solutions(&solutions, config.hhl.backend))
}

/// Runs one activation through the requested strategy. Classical results
/// are always produced; hybrid and full columns appear per `mode`.
pub fn run_pipeline<T: Scalar>(
    activation: Activation<T>,
    config: &PipelineConfig<T>,
    mode: Mode,
) -> Result<PipelineReport<T>, PipelineError> {
    let knots = &config.spline.knots;
    let span = (knots[0], *knots.last().expect("validated knots"));
    let scaler = fit_scaler(activation, span, SCALER_GRID_POINTS)?;
    let system = build_block_system(&config.spline, |x| scaler.apply(activation.eval(x)))?;
    let classical_fit = solve_blocks_classical(&system)?;

    let solutions = if mode.wants_hybrid() {
        Some(solve_intervals(&system, config)?)
    } else {
        None
    };
    let hybrid_fit = solutions
        .as_ref()
        .map(|sols| fit_from_solutions(sols, config.hhl.backend));

    let grid = linspace(span.0, span.1, config.grid_points.max(2));
    let mut truths = Vec::with_capacity(grid.len());
    let mut classic = Vec::with_capacity(grid.len());
    let mut hybrid = Vec::with_capacity(grid.len());
    let mut full = Vec::with_capacity(grid.len());
    let mut samples = Vec::with_capacity(grid.len());

    for (i, &x) in grid.iter().enumerate() {
        let f_true = activation.eval(x);
        let f_classic = scaler.invert(evaluate_spline(&classical_fit, &system, x)?);
        truths.push(f_true);
        classic.push(f_classic);

        let mut f_hybrid = None;
        let mut f_full = None;
        let mut interval_fidelity = None;
        if let (Some(fit), Some(sols)) = (&hybrid_fit, &solutions) {
            let k = system.find_interval(x)?;
            let scaled_hybrid = evaluate_spline(fit, &system, x)?;
            f_hybrid = Some(scaler.invert(scaled_hybrid));
            interval_fidelity = Some(sols[k].fidelity);
            if mode.wants_full() {
                let estimate = full_estimate(&sols[k], x, scaled_hybrid, config, i)?;
                f_full = Some(scaler.invert(estimate));
            }
        }
        if let Some(v) = f_hybrid {
            hybrid.push(v);
        }
        if let Some(v) = f_full {
            full.push(v);
        }
        samples.push(CurveSample {
            x,
            f_true,
            f_classic,
            f_hybrid,
            f_full,
            interval_fidelity,
        });
    }

    let fidelities = hybrid_fit
        .as_ref()
        .and_then(|fit| fit.per_interval_fidelity.clone());
    let average_fidelity = fidelities.as_ref().map(|f| {
        f.iter().copied().sum::<T>() / real::<T>(f.len() as f64)
    });

    Ok(PipelineReport {
        activation: activation.name().to_owned(),
        rss_classic: rss(&classic, &truths)?,
        rss_hybrid: if mode.wants_hybrid() {
            Some(rss(&hybrid, &truths)?)
        } else {
            None
        },
        rss_full: if mode.wants_full() {
            Some(rss(&full, &truths)?)
        } else {
            None
        },
        average_fidelity,
        per_interval_fidelity: fidelities,
        curve_samples: samples,
    })
}

/// One grid point through encode -> swap test -> back-transform, using only
/// measurement probabilities of the solver's output state.
fn full_estimate<T: Scalar>(
    solution: &IntervalSolution<T>,
    x: T,
    scaled_hybrid: T,
    config: &PipelineConfig<T>,
    point_index: usize,
) -> Result<T, PipelineError> {
    let state = match &solution.state {
        None => return Ok(T::zero()), // zero system evaluates to zero
        Some(state) => state,
    };
    let (x_state, x_norm) = encode_input(x);
    let exact = swap_test(state, &x_state)?;
    let outcome = match config.shots {
        None => exact,
        Some(shots) => {
            let stream = config
                .seed
                .wrapping_add((point_index as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(stream);
            outcome_from_p0(sample_p0(exact.p0, shots.max(1), &mut rng))?
        }
    };
    let mut estimate = back_transform(&outcome, solution.beta_norm, x_norm);
    if config.sign_repair && scaled_hybrid < T::zero() {
        estimate = -estimate;
    }
    Ok(estimate)
}

/// Runs all four activations end to end (classical, hybrid and full
/// columns), mirroring the four-row metrics table.
pub fn reproduce_table<T: Scalar>(
    config: &PipelineConfig<T>,
) -> Result<Vec<PipelineReport<T>>, PipelineError> {
    Activation::all()
        .into_iter()
        .map(|activation| run_pipeline(activation, config, Mode::Full))
        .collect()
}
