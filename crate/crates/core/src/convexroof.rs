//! Variational upper bounds on the convex-roof extended negativity.
//!
//! Every size-`K` pure-state ensemble of `ρ = Σ_j λ_j |e_j⟩⟨e_j|` is
//! `|ψ̃_k⟩ = Σ_j T_kj √λ_j |e_j⟩` for some `K × r` matrix `T` with
//! orthonormal columns. Writing `C̃_k` for the `dA × dB` coefficient matrix of
//! the unnormalized member, its weight is `‖C̃_k‖_F²` and its weighted
//! pure-state negativity is `(‖C̃_k‖_*² - ‖C̃_k‖_F²)/(d - 1)`, so the ensemble
//! average is
//!
//! ```text
//! J(T) = (Σ_k ‖C̃_k‖_*² - 1)/(d - 1)
//! ```
//!
//! `J` is minimized over the complex Stiefel manifold by Riemannian gradient
//! descent with a Barzilai-Borwein trial step, Armijo backtracking and a
//! QR retraction. The nuclear norm is not differentiable where a member loses
//! Schmidt rank, and plain descent stalls on those kinks. Each restart
//! therefore runs a short continuation: singular values `σ` enter through
//! `√(σ² + ε²) - ε` for a decreasing sequence of `ε`, finishing with the exact
//! objective. Within a stage every accepted step strictly lowers the stage
//! objective; across stages the isometry with the lowest exact `J` is kept.
//! When the line search fails, a few random tangent probes are tried before a
//! stage is declared stationary.
//!
//! The result is an upper bound on the convex roof; local search certifies
//! nothing about the global minimum.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eig, BipartiteDims, ComplexMatrix, Subsystem, C64, ZERO};
use crate::measures::{self, f_function};
use crate::states::{rng_from_seed, DensityMatrix, PureState, HERMITIAN_TOL};

/// Eigenvalues of `ρ` at or below this are outside the support.
pub const RANK_CUTOFF: f64 = 1e-10;
const ISOMETRY_TOL: f64 = 1e-8;
const WEIGHT_TOL: f64 = 1e-10;
const PRUNE_WEIGHT: f64 = 1e-15;
const STALL_ITERATIONS: usize = 10;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;
const PROBES: usize = 12;
/// Smoothing widths `ε` for `σ ↦ √(σ² + ε²) - ε`; the last stage is exact.
const SMOOTHING_SCHEDULE: [f64; 5] = [3e-2, 1e-2, 3e-3, 1e-3, 0.0];

/// Weighted pure-state ensemble `{p_k, |ψ_k⟩}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    dims: BipartiteDims,
    weights: Vec<f64>,
    states: Vec<PureState>,
}

impl Decomposition {
    /// Drops zero-weight members; the remaining weights must be positive and
    /// sum to one.
    pub fn new(weights: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if weights.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                found: states.len(),
            });
        }
        let Some(first) = states.first() else {
            return Err(Error::ParameterOutOfRange {
                name: "ensemble size",
                value: 0.0,
            });
        };
        let dims = first.dims();
        let mut kept_w = Vec::with_capacity(weights.len());
        let mut kept_s = Vec::with_capacity(states.len());
        for (w, s) in weights.into_iter().zip(states) {
            if s.dims() != dims {
                return Err(Error::DimensionMismatch {
                    expected: dims.total(),
                    found: s.dims().total(),
                });
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::ParameterOutOfRange {
                    name: "weight",
                    value: w,
                });
            }
            if w > 0.0 {
                kept_w.push(w);
                kept_s.push(s);
            }
        }
        let total: f64 = kept_w.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::ParameterOutOfRange {
                name: "weight sum",
                value: total,
            });
        }
        Ok(Self {
            dims,
            weights: kept_w,
            states: kept_s,
        })
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ_k p_k |ψ_k⟩⟨ψ_k|`
    pub fn density_matrix(&self) -> ComplexMatrix {
        let n = self.dims.total();
        let mut m = ComplexMatrix::zeros(n, n);
        for (w, s) in self.weights.iter().zip(&self.states) {
            let a = s.amplitudes();
            for i in 0..n {
                let ai = a[i] * *w;
                for j in 0..n {
                    m[(i, j)] += ai * a[j].conj();
                }
            }
        }
        m
    }

    /// Ensemble for `λρ₁ + (1-λ)ρ₂` built from ensembles of `ρ₁` and `ρ₂`.
    pub fn mixture(&self, other: &Decomposition, lambda: f64) -> Result<Decomposition> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dims.total(),
                found: other.dims.total(),
            });
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::ParameterOutOfRange {
                name: "lambda",
                value: lambda,
            });
        }
        let weights = self
            .weights
            .iter()
            .map(|w| w * lambda)
            .chain(other.weights.iter().map(|w| w * (1.0 - lambda)))
            .collect();
        let states = self.states.iter().chain(&other.states).cloned().collect();
        Decomposition::new(weights, states)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerConfig {
    /// Ensemble size `K`; `None` picks `min(2r, r + 4)` for rank `r`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_iterations: usize,
    /// A restart stops once the Riemannian gradient norm falls below this.
    pub step_tolerance: f64,
    /// Improvements below this count as stalled iterations.
    pub value_tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 16,
            max_iterations: 2000,
            step_tolerance: 1e-10,
            value_tolerance: 1e-7,
            seed: 42,
        }
    }
}

impl OptimizerConfig {
    pub fn default_ensemble_size(rank: usize) -> usize {
        (2 * rank).min(rank + 4)
    }

    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::ConfigInvalid("restarts must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::ConfigInvalid(
                "max_iterations must be at least 1".into(),
            ));
        }
        for (name, v) in [
            ("step_tolerance", self.step_tolerance),
            ("value_tolerance", self.value_tolerance),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::ConfigInvalid(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.ensemble_size == Some(0) {
            return Err(Error::ConfigInvalid(
                "ensemble_size must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrenResult {
    /// Upper bound on the convex-roof extended negativity.
    pub value: f64,
    pub witness: Decomposition,
    pub restarts_used: usize,
    /// Iterations spent by the restart that produced the witness.
    pub iterations: usize,
    /// Whether that restart stopped on a tolerance rather than the iteration cap.
    pub converged: bool,
    pub seed: u64,
}

/// Eigen-ensemble of `ρ` restricted to its support.
#[derive(Debug, Clone)]
struct Support {
    dims: BipartiteDims,
    values: Vec<f64>,
    /// Columns are the support eigenvectors.
    vectors: ComplexMatrix,
}

impl Support {
    fn of(rho: &DensityMatrix) -> Self {
        let eig = hermitian_eig(rho.matrix(), HERMITIAN_TOL).expect("density matrix is Hermitian");
        let rank = eig.values.iter().take_while(|&&l| l > RANK_CUTOFF).count();
        let n = rho.dims().total();
        Self {
            dims: rho.dims(),
            values: eig.values[..rank].to_vec(),
            vectors: ComplexMatrix::from_fn(n, rank, |i, j| eig.vectors[(i, j)]),
        }
    }

    fn rank(&self) -> usize {
        self.values.len()
    }

    /// Unnormalized members `Σ_j T_kj √λ_j |e_j⟩`, one per row of `T`.
    fn members(&self, isometry: &ComplexMatrix) -> Vec<Vec<C64>> {
        let n = self.dims.total();
        let scaled = ComplexMatrix::from_fn(n, self.rank(), |i, j| {
            self.vectors[(i, j)] * self.values[j].sqrt()
        });
        (0..isometry.rows())
            .map(|k| scaled.matvec(isometry.row(k)))
            .collect()
    }
}

fn check_isometry(isometry: &ComplexMatrix, rank: usize) -> Result<()> {
    if isometry.cols() != rank {
        return Err(Error::RankMismatch {
            expected: rank,
            found: isometry.cols(),
        });
    }
    if isometry.rows() < rank {
        return Err(Error::NotIsometry {
            deviation: f64::INFINITY,
        });
    }
    let deviation = isometry.unitarity_deviation();
    if deviation > ISOMETRY_TOL {
        return Err(Error::NotIsometry { deviation });
    }
    Ok(())
}

fn decomposition_from_members(
    dims: BipartiteDims,
    members: Vec<Vec<C64>>,
) -> Result<Decomposition> {
    let mut weights = Vec::with_capacity(members.len());
    let mut states = Vec::with_capacity(members.len());
    for m in members {
        let w: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        if w <= PRUNE_WEIGHT {
            continue;
        }
        weights.push(w);
        states.push(PureState::normalized(dims, m)?);
    }
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    Decomposition::new(weights, states)
}

/// Ensemble generated from the eigen-ensemble of `ρ` by a `K × r` isometry.
pub fn expand_decomposition(
    rho: &DensityMatrix,
    isometry: &ComplexMatrix,
) -> Result<Decomposition> {
    let support = Support::of(rho);
    check_isometry(isometry, support.rank())?;
    decomposition_from_members(rho.dims(), support.members(isometry))
}

/// Inverse of [`expand_decomposition`]: `T_kj = ⟨e_j|ψ̃_k⟩/√λ_j`. The ensemble
/// must reconstruct `ρ`; the result is checked for orthonormal columns.
pub fn isometry_from_decomposition(
    rho: &DensityMatrix,
    dec: &Decomposition,
) -> Result<ComplexMatrix> {
    if dec.dims() != rho.dims() {
        return Err(Error::DimensionMismatch {
            expected: rho.dims().total(),
            found: dec.dims().total(),
        });
    }
    let support = Support::of(rho);
    let r = support.rank();
    let t = ComplexMatrix::from_fn(dec.len(), r, |k, j| {
        let e = support.vectors.column(j);
        linalg::inner(&e, dec.states()[k].amplitudes())
            * (dec.weights()[k] / support.values[j]).sqrt()
    });
    check_isometry(&t, r)?;
    Ok(t)
}

/// Reduced state on the smaller subsystem, whose side is `min(dA, dB)`.
fn smaller_marginal(psi: &PureState) -> ComplexMatrix {
    let dims = psi.dims();
    let rho = ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes());
    let which = if dims.a <= dims.b {
        Subsystem::B
    } else {
        Subsystem::A
    };
    linalg::partial_trace(&rho, dims, which).expect("pure state matches its dims")
}

/// `Σ_k p_k f(tr_B |ψ_k⟩⟨ψ_k|)`, the ensemble average of pure-state negativity.
pub fn decomposition_objective(dec: &Decomposition) -> f64 {
    let d = dec.dims().min_dim();
    if d < 2 {
        return 0.0;
    }
    dec.weights()
        .iter()
        .zip(dec.states())
        .map(|(w, s)| {
            let f = f_function(&smaller_marginal(s), d).expect("reduced pure state is PSD");
            w * f.max(0.0)
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    /// `max |Σ p_k |ψ_k⟩⟨ψ_k| - ρ|`
    pub reconstruction_residual: f64,
    /// `|Σ p_k - 1|`
    pub weight_sum_deviation: f64,
    pub member_norms: Vec<f64>,
    /// Largest `|‖ψ_k‖ - 1|`.
    pub max_norm_deviation: f64,
    pub min_weight: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn verify_decomposition(
    dec: &Decomposition,
    rho: &DensityMatrix,
    tol: f64,
) -> VerificationReport {
    let reconstruction_residual = if dec.dims() == rho.dims() {
        dec.density_matrix().max_abs_diff(rho.matrix())
    } else {
        f64::INFINITY
    };
    let weight_sum_deviation = (dec.weights().iter().sum::<f64>() - 1.0).abs();
    let member_norms: Vec<f64> = dec
        .states()
        .iter()
        .map(|s| linalg::vector_norm(s.amplitudes()))
        .collect();
    let max_norm_deviation = member_norms
        .iter()
        .map(|n| (n - 1.0).abs())
        .fold(0.0, f64::max);
    let min_weight = dec.weights().iter().copied().fold(f64::INFINITY, f64::min);
    let passed = reconstruction_residual <= tol
        && weight_sum_deviation <= tol
        && max_norm_deviation <= tol
        && min_weight > 0.0;
    VerificationReport {
        reconstruction_residual,
        weight_sum_deviation,
        member_norms,
        max_norm_deviation,
        min_weight,
        tolerance: tol,
        passed,
    }
}

/// Objective `J(T)` and its Euclidean gradient with respect to `T`.
struct Landscape {
    da: usize,
    db: usize,
    denom: f64,
    /// `√λ_j e_j` reshaped to `dA × dB`, flattened row-major.
    basis: Vec<Vec<C64>>,
}

impl Landscape {
    fn new(support: &Support) -> Self {
        let n = support.dims.total();
        let basis = (0..support.rank())
            .map(|j| {
                let s = support.values[j].sqrt();
                (0..n).map(|i| support.vectors[(i, j)] * s).collect()
            })
            .collect();
        Self {
            da: support.dims.a,
            db: support.dims.b,
            denom: support.dims.min_dim() as f64 - 1.0,
            basis,
        }
    }

    fn member(&self, t: &ComplexMatrix, k: usize) -> ComplexMatrix {
        let mut c = vec![ZERO; self.da * self.db];
        for (tkj, b) in t.row(k).iter().zip(&self.basis) {
            for (ci, bi) in c.iter_mut().zip(b) {
                *ci += tkj * bi;
            }
        }
        ComplexMatrix::from_row_major(self.da, self.db, c).expect("member shape")
    }

    fn value(&self, t: &ComplexMatrix, eps: f64) -> f64 {
        let mut acc = 0.0;
        for k in 0..t.rows() {
            let s = linalg::singular_values(&self.member(t, k));
            let (sum, sum_sq) = s.iter().fold((0.0, 0.0), |(a, b), &x| {
                let p = smooth_abs(x, eps);
                (a + p, b + p * p)
            });
            acc += sum * sum - sum_sq;
        }
        acc / self.denom
    }

    fn value_and_gradient(&self, t: &ComplexMatrix, eps: f64) -> (f64, ComplexMatrix) {
        let (kk, r) = t.shape();
        let mut grad = ComplexMatrix::zeros(kk, r);
        let mut acc = 0.0;
        for k in 0..kk {
            let svd = linalg::svd(&self.member(t, k));
            let phi: Vec<f64> = svd
                .singular_values
                .iter()
                .map(|&x| smooth_abs(x, eps))
                .collect();
            let sum: f64 = phi.iter().sum();
            acc += sum * sum - phi.iter().map(|p| p * p).sum::<f64>();
            // Spectral gradient U diag(∂h/∂σ_i) V† of h = (Σφ)² - Σφ².
            let weights: Vec<f64> = svd
                .singular_values
                .iter()
                .zip(&phi)
                .map(|(&x, &p)| 2.0 * smooth_abs_derivative(x, eps) * (sum - p))
                .collect();
            let (da, db) = (self.da, self.db);
            let mut g = vec![ZERO; da * db];
            for (i, &w) in weights.iter().enumerate() {
                for a in 0..da {
                    let ua = svd.u[(a, i)] * w;
                    for b in 0..db {
                        g[a * db + b] += ua * svd.v[(b, i)].conj();
                    }
                }
            }
            for (j, b) in self.basis.iter().enumerate() {
                let z: C64 = b.iter().zip(&g).map(|(bi, gi)| bi.conj() * gi).sum();
                grad[(k, j)] = z / self.denom;
            }
        }
        (acc / self.denom, grad)
    }
}

/// `√(σ² + ε²) - ε`, equal to `σ` at `ε = 0`.
fn smooth_abs(x: f64, eps: f64) -> f64 {
    if eps == 0.0 {
        x
    } else {
        x.hypot(eps) - eps
    }
}

fn smooth_abs_derivative(x: f64, eps: f64) -> f64 {
    if eps == 0.0 {
        1.0
    } else {
        x / x.hypot(eps)
    }
}

/// Projection onto the tangent space of the Stiefel manifold at `t`.
fn project_tangent(t: &ComplexMatrix, z: &ComplexMatrix) -> ComplexMatrix {
    let sym = t.adjoint().matmul(z).hermitian_part();
    z - &t.matmul(&sym)
}

/// `qf(t + step · direction)`
fn retract(t: &ComplexMatrix, direction: &ComplexMatrix, step: f64) -> Option<ComplexMatrix> {
    let mut x = t + &direction.scale_real(step);
    linalg::orthonormalize_columns(&mut x).then_some(x)
}

struct RestartOutcome {
    value: f64,
    isometry: ComplexMatrix,
    iterations: usize,
    converged: bool,
}

/// Result of descending one smoothing stage.
struct StageOutcome {
    isometry: ComplexMatrix,
    iterations: usize,
    stationary: bool,
}

/// Descends the `eps`-smoothed objective from `start` for at most `budget`
/// iterations. The smoothed objective never increases between iterations.
fn descend<R: Rng>(
    landscape: &Landscape,
    start: ComplexMatrix,
    eps: f64,
    budget: usize,
    config: &OptimizerConfig,
    rng: &mut R,
) -> StageOutcome {
    let mut t = start;
    let (mut value, euclid) = landscape.value_and_gradient(&t, eps);
    let mut grad = project_tangent(&t, &euclid);
    let mut prev: Option<(ComplexMatrix, ComplexMatrix)> = None;
    let mut stalled = 0;
    let mut iterations = 0;

    while iterations < budget {
        iterations += 1;
        let gnorm2 = grad.real_inner(&grad);
        if gnorm2.sqrt() < config.step_tolerance {
            return StageOutcome {
                isometry: t,
                iterations,
                stationary: true,
            };
        }

        let mut step = match &prev {
            Some((t_old, g_old)) => {
                let s = &t - t_old;
                let y = &grad - g_old;
                let sy = s.real_inner(&y).abs();
                if sy > 1e-300 {
                    s.real_inner(&s) / sy
                } else {
                    1.0
                }
            }
            None => 0.1 / gnorm2.sqrt().max(1e-12),
        };
        step = step.clamp(1e-12, 1e3);

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            if let Some(cand) = retract(&t, &grad, -step) {
                let v = landscape.value(&cand, eps);
                if v <= value - ARMIJO * step * gnorm2 {
                    accepted = Some(cand);
                    break;
                }
            }
            step *= 0.5;
        }
        if accepted.is_none() {
            accepted = probe(landscape, &t, value, eps, rng);
        }
        let Some(cand) = accepted else {
            return StageOutcome {
                isometry: t,
                iterations,
                stationary: true,
            };
        };

        let (v_new, euclid) = landscape.value_and_gradient(&cand, eps);
        let improvement = value - v_new;
        prev = Some((std::mem::replace(&mut t, cand), grad));
        value = v_new;
        grad = project_tangent(&t, &euclid);

        if improvement < config.value_tolerance {
            stalled += 1;
            if stalled >= STALL_ITERATIONS {
                return StageOutcome {
                    isometry: t,
                    iterations,
                    stationary: true,
                };
            }
        } else {
            stalled = 0;
        }
    }
    StageOutcome {
        isometry: t,
        iterations,
        stationary: false,
    }
}

/// Runs the smoothing schedule, ending on the exact objective, and keeps the
/// isometry with the lowest exact objective seen at any stage boundary.
fn refine<R: Rng>(
    landscape: &Landscape,
    start: ComplexMatrix,
    config: &OptimizerConfig,
    rng: &mut R,
) -> RestartOutcome {
    let mut best_value = landscape.value(&start, 0.0);
    let mut best = start.clone();
    let mut t = start;
    let mut used = 0;
    let mut converged = false;
    for (stage, &eps) in SMOOTHING_SCHEDULE.iter().enumerate() {
        let remaining = config.max_iterations - used;
        if remaining == 0 {
            break;
        }
        let last = stage + 1 == SMOOTHING_SCHEDULE.len();
        // Leave room for the exact stage when smoothing stalls slowly.
        let budget = if last {
            remaining
        } else {
            remaining.div_ceil(2)
        };
        let out = descend(landscape, t, eps, budget, config, rng);
        used += out.iterations;
        t = out.isometry;
        let v = landscape.value(&t, 0.0);
        if v < best_value {
            best_value = v;
            best = t.clone();
        }
        if last {
            converged = out.stationary;
        }
    }
    RestartOutcome {
        value: best_value,
        isometry: best,
        iterations: used,
        converged,
    }
}

/// Derivative-free fallback: random tangent probes at shrinking radii.
fn probe<R: Rng>(
    landscape: &Landscape,
    t: &ComplexMatrix,
    value: f64,
    eps: f64,
    rng: &mut R,
) -> Option<ComplexMatrix> {
    let (kk, r) = t.shape();
    for radius in [1e-2, 1e-3, 1e-4] {
        for _ in 0..PROBES / 3 {
            let z = project_tangent(t, &linalg::gaussian_matrix(kk, r, rng));
            let norm = z.frobenius_norm();
            if norm < 1e-300 {
                continue;
            }
            if let Some(cand) = retract(t, &z, radius / norm) {
                if landscape.value(&cand, eps) < value {
                    return Some(cand);
                }
            }
        }
    }
    None
}

fn restart_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 over (seed, index)
    let mut z = seed
        ^ (index as u64)
            .wrapping_add(1)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn pad_rows(t: &ComplexMatrix, rows: usize) -> ComplexMatrix {
    if t.rows() >= rows {
        return t.clone();
    }
    ComplexMatrix::from_fn(
        rows,
        t.cols(),
        |i, j| if i < t.rows() { t[(i, j)] } else { ZERO },
    )
}

/// Minimizes the ensemble-average pure-state negativity over decompositions
/// of `rho`, returning the best value over all restarts and its witness.
pub fn optimize_cren(rho: &DensityMatrix, config: &OptimizerConfig) -> Result<CrenResult> {
    optimize_cren_with_starts(rho, config, &[])
}

/// Like [`optimize_cren`], with the first restarts initialized from the given
/// ensembles of `rho` instead of random isometries.
pub fn optimize_cren_with_starts(
    rho: &DensityMatrix,
    config: &OptimizerConfig,
    starts: &[Decomposition],
) -> Result<CrenResult> {
    config.validate()?;
    let dims = rho.dims();
    if dims.min_dim() < 2 {
        return Err(Error::DegenerateDimension(dims));
    }
    let support = Support::of(rho);
    let rank = support.rank();
    if rank == 0 {
        return Err(Error::Inconsistent(
            "density matrix has empty support".into(),
        ));
    }
    let k = config
        .ensemble_size
        .unwrap_or_else(|| OptimizerConfig::default_ensemble_size(rank));
    if k < rank {
        return Err(Error::ConfigInvalid(format!(
            "ensemble_size {k} is below the rank {rank} of the state"
        )));
    }
    let warm: Vec<ComplexMatrix> = starts
        .iter()
        .map(|dec| isometry_from_decomposition(rho, dec).map(|t| pad_rows(&t, k)))
        .collect::<Result<_>>()?;
    let restarts = config.restarts.max(warm.len());

    if rank == 1 {
        // The only decomposition of a pure state is the state itself.
        let members = support.members(&ComplexMatrix::identity(1));
        let witness = decomposition_from_members(dims, members)?;
        return Ok(CrenResult {
            value: decomposition_objective(&witness),
            witness,
            restarts_used: 0,
            iterations: 0,
            converged: true,
            seed: config.seed,
        });
    }

    let landscape = Landscape::new(&support);
    let outcomes: Vec<RestartOutcome> = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(restart_seed(config.seed, i));
            let start = match warm.get(i) {
                Some(t) => t.clone(),
                None => linalg::random_isometry(k, rank, &mut rng),
            };
            refine(&landscape, start, config, &mut rng)
        })
        .collect();

    let best = outcomes
        .into_iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.value.total_cmp(&b.value).then(ia.cmp(ib)))
        .map(|(_, o)| o)
        .expect("at least one restart");

    let witness = decomposition_from_members(dims, support.members(&best.isometry))?;
    let value = decomposition_objective(&witness);
    let floor = measures::NEGATIVE_NOISE_TOL;
    if value < -floor {
        return Err(Error::Inconsistent(format!(
            "objective {value:e} is negative"
        )));
    }
    Ok(CrenResult {
        value,
        witness,
        restarts_used: restarts,
        iterations: best.iterations,
        converged: best.converged,
        seed: config.seed,
    })
}
