//! Bipartite pure and mixed states, the isotropic and Werner families, and
//! their twirling projections.
//!
//! Conventions: basis index of `|i⟩_A|j⟩_B` is `i·dB + j`;
//! `|Φ+⟩ = d^{-1/2} Σ_j |jj⟩`; `|Ψ±_ij⟩ = (|ij⟩ ± |ji⟩)/√2` for `i < j`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitian_eig, BipartiteDims, ComplexMatrix, HermitianEigen, C64, ONE, ZERO,
};

/// Tolerance on `‖ψ‖ = 1`.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance on `‖ρ - ρ†‖_max`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on `|tr ρ - 1|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue a density matrix may carry.
pub const PSD_TOL: f64 = 1e-9;

/// Reproducible generator used for every seeded API.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: BipartiteDims,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Wraps amplitudes that are already unit norm.
    pub fn new(dims: BipartiteDims, amplitudes: Vec<C64>) -> Result<Self> {
        check_len(dims, amplitudes.len())?;
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let norm = linalg::vector_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { dims, amplitudes })
    }

    pub fn normalized(dims: BipartiteDims, mut amplitudes: Vec<C64>) -> Result<Self> {
        check_len(dims, amplitudes.len())?;
        let norm = linalg::vector_norm(&amplitudes);
        if !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        if norm < 1e-300 {
            return Err(Error::ZeroVector);
        }
        for z in amplitudes.iter_mut() {
            *z /= norm;
        }
        Ok(Self { dims, amplitudes })
    }

    /// `|a⟩ ⊗ |b⟩`, normalized.
    pub fn product(a: &[C64], b: &[C64]) -> Result<Self> {
        let dims = BipartiteDims::new(a.len(), b.len())?;
        Self::normalized(dims, linalg::kron_vec(a, b))
    }

    /// Computational basis state `|i⟩|j⟩`.
    pub fn basis(dims: BipartiteDims, i: usize, j: usize) -> Self {
        assert!(i < dims.a && j < dims.b, "basis index out of range");
        let mut amplitudes = vec![ZERO; dims.total()];
        amplitudes[i * dims.b + j] = ONE;
        Self { dims, amplitudes }
    }

    /// `|Φ+⟩` in `d ⊗ d`.
    pub fn maximally_entangled(d: usize) -> Result<Self> {
        let dims = BipartiteDims::square(d)?;
        let mut amplitudes = vec![ZERO; d * d];
        let a = C64::new(1.0 / (d as f64).sqrt(), 0.0);
        for j in 0..d {
            amplitudes[j * d + j] = a;
        }
        Ok(Self { dims, amplitudes })
    }

    /// `|Ψ±_ij⟩ = (|ij⟩ ± |ji⟩)/√2` in `d ⊗ d`, `i ≠ j`.
    pub fn psi_pair(d: usize, i: usize, j: usize, antisymmetric: bool) -> Result<Self> {
        let dims = BipartiteDims::square(d)?;
        if i == j || i >= d || j >= d {
            return Err(Error::ParameterOutOfRange {
                name: "pair index",
                value: j as f64,
            });
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut amplitudes = vec![ZERO; d * d];
        amplitudes[i * d + j] = C64::new(s, 0.0);
        amplitudes[j * d + i] = C64::new(if antisymmetric { -s } else { s }, 0.0);
        Ok(Self { dims, amplitudes })
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// The `dA × dB` matrix `C` with `|ψ⟩ = Σ C_ij |i⟩|j⟩`.
    pub fn coefficient_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_row_major(self.dims.a, self.dims.b, self.amplitudes.clone())
            .expect("amplitude length checked at construction")
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims,
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    /// `(U_A ⊗ U_B)|ψ⟩`
    pub fn apply_local(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<Self> {
        let u = local_operator(self.dims, ua, ub)?;
        Self::normalized(self.dims, u.matvec(&self.amplitudes))
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &PureState) -> f64 {
        linalg::inner(&self.amplitudes, &other.amplitudes).norm_sqr()
    }
}

fn check_len(dims: BipartiteDims, len: usize) -> Result<()> {
    if len != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            found: len,
        });
    }
    Ok(())
}

fn local_operator(
    dims: BipartiteDims,
    ua: &ComplexMatrix,
    ub: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if ua.shape() != (dims.a, dims.a) {
        return Err(Error::DimensionMismatch {
            expected: dims.a,
            found: ua.rows(),
        });
    }
    if ub.shape() != (dims.b, dims.b) {
        return Err(Error::DimensionMismatch {
            expected: dims.b,
            found: ub.rows(),
        });
    }
    Ok(linalg::kron(ua, ub))
}

/// Certified density matrix: Hermitian, PSD and unit trace within the module
/// tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: BipartiteDims,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigen(&self) -> HermitianEigen {
        hermitian_eig(&self.matrix, HERMITIAN_TOL).expect("validated density matrix is Hermitian")
    }

    /// `λρ + (1-λ)σ`
    pub fn mix(&self, other: &DensityMatrix, lambda: f64) -> Result<DensityMatrix> {
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
        let m = &self.matrix.scale_real(lambda) + &other.matrix.scale_real(1.0 - lambda);
        Ok(DensityMatrix {
            dims: self.dims,
            matrix: m,
        })
    }

    /// `(U_A ⊗ U_B) ρ (U_A ⊗ U_B)†`
    pub fn conjugate_local(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<Self> {
        let u = local_operator(self.dims, ua, ub)?;
        let m = u.matmul(&self.matrix).matmul(&u.adjoint()).hermitian_part();
        validate_density(&m, self.dims)
    }
}

pub fn validate_density(m: &ComplexMatrix, dims: BipartiteDims) -> Result<DensityMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if m.rows() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            found: m.rows(),
        });
    }
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian {
            deviation,
            tol: HERMITIAN_TOL,
        });
    }
    let trace = m.trace().re;
    if (trace - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceNotOne { trace });
    }
    let eig = hermitian_eig(m, HERMITIAN_TOL)?;
    let min_eigenvalue = eig.values.last().copied().unwrap_or(0.0);
    if min_eigenvalue < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    Ok(DensityMatrix {
        dims,
        matrix: m.clone(),
    })
}

/// Schmidt form `|ψ⟩ = (U_A ⊗ U_B) Σ_j √μ_j |jj⟩`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Descending, summing to one, length `min(dA, dB)`.
    pub probabilities: Vec<f64>,
    pub local_unitary_a: ComplexMatrix,
    pub local_unitary_b: ComplexMatrix,
}

impl SchmidtDecomposition {
    /// Amplitudes of `(U_A ⊗ U_B) Σ_j √μ_j |jj⟩`.
    pub fn reconstruct(&self) -> Vec<C64> {
        let (da, db) = (self.local_unitary_a.rows(), self.local_unitary_b.rows());
        let mut out = vec![ZERO; da * db];
        for (k, &mu) in self.probabilities.iter().enumerate() {
            let s = mu.sqrt();
            for i in 0..da {
                let a = self.local_unitary_a[(i, k)] * s;
                for j in 0..db {
                    out[i * db + j] += a * self.local_unitary_b[(j, k)];
                }
            }
        }
        out
    }
}

pub fn schmidt_decompose(psi: &PureState) -> SchmidtDecomposition {
    let svd = linalg::svd(&psi.coefficient_matrix());
    // C = U Σ V†, so |b_k⟩ is the complex conjugate of the k-th column of V.
    let total: f64 = svd.singular_values.iter().map(|s| s * s).sum();
    let probabilities = svd.singular_values.iter().map(|s| s * s / total).collect();
    SchmidtDecomposition {
        probabilities,
        local_unitary_a: linalg::complete_to_unitary(&svd.u),
        local_unitary_b: linalg::complete_to_unitary(&svd.v.conj()),
    }
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ParameterOutOfRange { name, value });
    }
    Ok(())
}

fn check_family_dim(d: usize) -> Result<BipartiteDims> {
    if d < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "d",
            value: d as f64,
        });
    }
    BipartiteDims::square(d)
}

/// `ρ_F = (1-F)/(d²-1) (I - |Φ+⟩⟨Φ+|) + F |Φ+⟩⟨Φ+|`
pub fn isotropic_state(fidelity: f64, d: usize) -> Result<DensityMatrix> {
    check_unit_interval("F", fidelity)?;
    let dims = check_family_dim(d)?;
    let df = d as f64;
    let noise = (1.0 - fidelity) / (df * df - 1.0);
    let n = d * d;
    let mut m = ComplexMatrix::from_real_diagonal(&vec![noise; n]);
    // |Φ+⟩⟨Φ+| has entries 1/d on the (ii, jj) block.
    let weight = (fidelity - noise) / df;
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] += C64::new(weight, 0.0);
        }
    }
    Ok(DensityMatrix { dims, matrix: m })
}

/// Mixture of the symmetric and antisymmetric projectors with weight `W` on
/// the antisymmetric subspace.
pub fn werner_state(w: f64, d: usize) -> Result<DensityMatrix> {
    check_unit_interval("W", w)?;
    let dims = check_family_dim(d)?;
    let df = d as f64;
    let sym = 2.0 * (1.0 - w) / (df * (df + 1.0));
    let anti = 2.0 * w / (df * (df - 1.0));
    // P_sym = (I + S)/2, P_anti = (I - S)/2 with S the swap.
    let identity_coeff = 0.5 * (sym + anti);
    let swap_coeff = 0.5 * (sym - anti);
    let n = d * d;
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            let r = i * d + j;
            m[(r, r)] += C64::new(identity_coeff, 0.0);
            m[(r, j * d + i)] += C64::new(swap_coeff, 0.0);
        }
    }
    Ok(DensityMatrix { dims, matrix: m })
}

fn square_side(rho: &DensityMatrix) -> Result<usize> {
    if rho.dims.is_square() {
        Ok(rho.dims.a)
    } else {
        Err(Error::NotSquareBipartition(rho.dims))
    }
}

/// `⟨Φ+|ρ|Φ+⟩`
pub fn fidelity_param(rho: &DensityMatrix) -> Result<f64> {
    let d = square_side(rho)?;
    let mut acc = ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += rho.matrix[(i * d + i, j * d + j)];
        }
    }
    Ok((acc.re / d as f64).clamp(0.0, 1.0))
}

/// `tr(ρ Σ_{i<j} |Ψ-_ij⟩⟨Ψ-_ij|) = (1 - tr(ρ S))/2`
pub fn werner_param(rho: &DensityMatrix) -> Result<f64> {
    let d = square_side(rho)?;
    let mut swap_expectation = ZERO;
    for i in 0..d {
        for j in 0..d {
            swap_expectation += rho.matrix[(i * d + j, j * d + i)];
        }
    }
    Ok((0.5 * (1.0 - swap_expectation.re)).clamp(0.0, 1.0))
}

/// `(U ⊗ U*)`-twirl, evaluated as the projection onto the isotropic family.
pub fn twirl_isotropic(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let d = square_side(rho)?;
    isotropic_state(fidelity_param(rho)?, d)
}

/// `(U ⊗ U)`-twirl, evaluated as the projection onto the Werner family.
pub fn twirl_werner(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let d = square_side(rho)?;
    werner_state(werner_param(rho)?, d)
}

/// Haar-random pure state from a normalized complex Gaussian vector.
pub fn random_pure(dims: BipartiteDims, seed: u64) -> PureState {
    random_pure_from_rng(dims, &mut rng_from_seed(seed))
}

pub fn random_pure_from_rng<R: Rng + ?Sized>(dims: BipartiteDims, rng: &mut R) -> PureState {
    loop {
        let v: Vec<C64> = (0..dims.total())
            .map(|_| linalg::standard_complex_normal(rng))
            .collect();
        if let Ok(psi) = PureState::normalized(dims, v) {
            return psi;
        }
    }
}

/// `G G† / tr(G G†)` with `G` a `dA·dB × rank` complex Gaussian matrix.
pub fn random_density(dims: BipartiteDims, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_from_rng(dims, rank, &mut rng_from_seed(seed))
}

pub fn random_density_from_rng<R: Rng + ?Sized>(
    dims: BipartiteDims,
    rank: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let n = dims.total();
    if rank == 0 || rank > n {
        return Err(Error::RankOutOfRange { rank, max: n });
    }
    let g = linalg::gaussian_matrix(n, rank, rng);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    let m = m.scale_real(1.0 / tr).hermitian_part();
    Ok(DensityMatrix { dims, matrix: m })
}

/// Random convex mixture of `count` random product pure states.
pub fn random_product_mixture<R: Rng + ?Sized>(
    dims: BipartiteDims,
    count: usize,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if count == 0 {
        return Err(Error::RankOutOfRange {
            rank: 0,
            max: usize::MAX,
        });
    }
    let weights: Vec<f64> = (0..count).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    let n = dims.total();
    let mut m = ComplexMatrix::zeros(n, n);
    for w in weights {
        let a = random_pure_from_rng(BipartiteDims::new(dims.a, 1)?, rng);
        let b = random_pure_from_rng(BipartiteDims::new(dims.b, 1)?, rng);
        let psi = linalg::kron_vec(a.amplitudes(), b.amplitudes());
        m = &m + &ComplexMatrix::outer(&psi, &psi).scale_real(w / total);
    }
    validate_density(&m.hermitian_part(), dims)
}
