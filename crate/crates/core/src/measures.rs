//! Closed-form entanglement measures.
//!
//! `negativity` works on any bipartite density matrix through the partial
//! transpose. The convex-roof extended negativity (CREN) has closed forms for
//! pure states (through the Schmidt probabilities) and for the isotropic and
//! Werner families. In `2 ⊗ 2` it coincides with the Wootters concurrence,
//! which is provided as an independent oracle.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, BipartiteDims, ComplexMatrix, C64, DEFAULT_CLAMP_TOL, ZERO};
use crate::states::{schmidt_decompose, DensityMatrix, PureState};

/// Computed values this far below zero are treated as rounding noise.
pub const NEGATIVE_NOISE_TOL: f64 = 1e-12;
const NORMALIZATION_TOL: f64 = 1e-10;
const UNITARY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    PartialTranspose,
    Schmidt,
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::PartialTranspose => "partial_transpose",
            Method::Schmidt => "schmidt",
            Method::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureValue {
    pub value: f64,
    pub method: Method,
    pub dims_used: BipartiteDims,
}

fn clamp_noise(value: f64, what: &str) -> Result<f64> {
    if value < -NEGATIVE_NOISE_TOL {
        return Err(Error::Inconsistent(format!(
            "{what} evaluated to {value:e}, below the rounding allowance"
        )));
    }
    Ok(value.max(0.0))
}

/// `(‖ρ^{T_B}‖₁ - 1)/(d - 1)` with `d = min(dA, dB)`; zero when `d = 1`.
pub fn negativity(rho: &DensityMatrix) -> Result<MeasureValue> {
    let dims = rho.dims();
    let d = dims.min_dim();
    if d < 2 {
        return Ok(MeasureValue {
            value: 0.0,
            method: Method::ClosedForm,
            dims_used: dims,
        });
    }
    let pt = linalg::partial_transpose(rho.matrix(), dims)?;
    let norm = linalg::trace_norm(&pt)?;
    // tr(ρ^{T_B}) = tr ρ, which is 1 up to validation tolerance.
    let raw = (norm - pt.trace().re) / (d as f64 - 1.0);
    Ok(MeasureValue {
        value: clamp_noise(raw, "negativity")?,
        method: Method::PartialTranspose,
        dims_used: dims,
    })
}

fn check_probabilities(mu: &[f64]) -> Result<()> {
    if mu
        .iter()
        .any(|&m| !m.is_finite() || m < -NEGATIVE_NOISE_TOL)
    {
        return Err(Error::NotNormalized { norm: f64::NAN });
    }
    let total: f64 = mu.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { norm: total });
    }
    Ok(())
}

/// `N_p(μ) = (2/(d-1)) Σ_{i<j} √(μ_i μ_j)` for Schmidt probabilities `μ`.
pub fn pure_negativity(mu: &[f64]) -> Result<MeasureValue> {
    check_probabilities(mu)?;
    let d = mu.len();
    let dims_used = BipartiteDims::square(d.max(1))?;
    if d < 2 {
        return Ok(MeasureValue {
            value: 0.0,
            method: Method::ClosedForm,
            dims_used,
        });
    }
    let roots: Vec<f64> = mu.iter().map(|&m| m.max(0.0).sqrt()).collect();
    let mut pair_sum = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            pair_sum += roots[i] * roots[j];
        }
    }
    Ok(MeasureValue {
        value: 2.0 * pair_sum / (d as f64 - 1.0),
        method: Method::Schmidt,
        dims_used,
    })
}

/// CREN of a pure state, i.e. the pure-state negativity of its Schmidt vector.
pub fn cren_pure(psi: &PureState) -> Result<MeasureValue> {
    let dims = psi.dims();
    if dims.min_dim() < 2 {
        return Ok(MeasureValue {
            value: 0.0,
            method: Method::ClosedForm,
            dims_used: dims,
        });
    }
    let s = schmidt_decompose(psi);
    let mut v = pure_negativity(&s.probabilities)?;
    v.dims_used = dims;
    Ok(v)
}

fn psd_spectrum(rho: &ComplexMatrix) -> Result<Vec<f64>> {
    linalg::psd_eigenvalues(rho, DEFAULT_CLAMP_TOL).map_err(|e| match e {
        Error::NegativeEigenvalue { value, .. } => Error::NotPsd {
            min_eigenvalue: value,
        },
        other => other,
    })
}

/// `g(ρ) = [tr √ρ]²`
pub fn g_function(rho: &ComplexMatrix) -> Result<f64> {
    let root_sum: f64 = psd_spectrum(rho)?.iter().map(|l| l.sqrt()).sum();
    Ok(root_sum * root_sum)
}

/// `f(ρ_A) = (g(ρ_A) - 1)/(d - 1)`, the pure-state negativity expressed on
/// the reduced state.
pub fn f_function(rho_a: &ComplexMatrix, d: usize) -> Result<f64> {
    if rho_a.rows() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: rho_a.rows(),
        });
    }
    if d < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "d",
            value: d as f64,
        });
    }
    Ok((g_function(rho_a)? - 1.0) / (d as f64 - 1.0))
}

fn check_family(name: &'static str, value: f64, d: usize) -> Result<BipartiteDims> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ParameterOutOfRange { name, value });
    }
    if d < 2 {
        return Err(Error::ParameterOutOfRange {
            name: "d",
            value: d as f64,
        });
    }
    BipartiteDims::square(d)
}

/// CREN of the isotropic state with fidelity `F`: `max{(Fd - 1)/(d - 1), 0}`.
pub fn cren_isotropic(fidelity: f64, d: usize) -> Result<MeasureValue> {
    let dims_used = check_family("F", fidelity, d)?;
    let df = d as f64;
    Ok(MeasureValue {
        value: ((fidelity * df - 1.0) / (df - 1.0)).max(0.0),
        method: Method::ClosedForm,
        dims_used,
    })
}

/// CREN of the Werner state with antisymmetric weight `W`: `max{(2W - 1)/(d - 1), 0}`.
pub fn cren_werner(w: f64, d: usize) -> Result<MeasureValue> {
    let dims_used = check_family("W", w, d)?;
    Ok(MeasureValue {
        value: ((2.0 * w - 1.0) / (d as f64 - 1.0)).max(0.0),
        method: Method::ClosedForm,
        dims_used,
    })
}

fn sigma_y_sigma_y() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 3)] = C64::new(-1.0, 0.0);
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(-1.0, 0.0);
    m
}

/// Two-qubit concurrence `max{0, λ₁ - λ₂ - λ₃ - λ₄}`, with `λ_i²` the
/// eigenvalues of `√ρ ρ̃ √ρ` and `ρ̃ = (σ_y⊗σ_y) ρ* (σ_y⊗σ_y)`.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<MeasureValue> {
    let dims = rho.dims();
    if dims.a != 2 || dims.b != 2 {
        return Err(Error::NotTwoQubit(dims));
    }
    let yy = sigma_y_sigma_y();
    let m = rho.matrix();
    let tilde = yy.matmul(&m.conj()).matmul(&yy);
    let root = linalg::matrix_sqrt_psd(m, DEFAULT_CLAMP_TOL)?;
    let r = root.matmul(&tilde).matmul(&root).hermitian_part();
    let lambdas: Vec<f64> = linalg::psd_eigenvalues(&r, DEFAULT_CLAMP_TOL)?
        .into_iter()
        .map(f64::sqrt)
        .collect();
    let value = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(MeasureValue {
        value: value.max(0.0),
        method: Method::Oracle,
        dims_used: dims,
    })
}

fn check_unitary_for(mu: &[f64], v: &ComplexMatrix) -> Result<()> {
    check_probabilities(mu)?;
    let d = mu.len();
    if v.shape() != (d, d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: v.rows(),
        });
    }
    let deviation = v.unitarity_deviation();
    if deviation > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

/// Isotropic fidelity of the pure state with Schmidt probabilities `μ` and
/// relative unitary `V = U_Aᵀ U_B`: `(1/d)|Σ_k √μ_k V_kk|²`.
pub fn isotropic_fidelity_of_pure(mu: &[f64], v: &ComplexMatrix) -> Result<f64> {
    check_unitary_for(mu, v)?;
    let sum: C64 = mu
        .iter()
        .enumerate()
        .map(|(k, &m)| v[(k, k)] * m.max(0.0).sqrt())
        .fold(ZERO, |acc, z| acc + z);
    Ok((sum.norm_sqr() / mu.len() as f64).min(1.0))
}

/// Werner weight of the pure state with Schmidt probabilities `μ` and relative
/// unitary `Λ = U_A† U_B`: `½ Σ_{i<j} |√μ_i Λ_ji - √μ_j Λ_ij|²`.
pub fn werner_overlap_of_pure(mu: &[f64], lambda: &ComplexMatrix) -> Result<f64> {
    check_unitary_for(mu, lambda)?;
    let d = mu.len();
    let roots: Vec<f64> = mu.iter().map(|&m| m.max(0.0).sqrt()).collect();
    let mut w = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = lambda[(j, i)] * roots[i] - lambda[(i, j)] * roots[j];
            w += 0.5 * z.norm_sqr();
        }
    }
    Ok(w.min(1.0))
}
