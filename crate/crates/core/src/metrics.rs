//! Figures of merit for DCT approximations under a first-order Markov model.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::catalog;
use crate::linalg::{exact_dct_matrix, invert, ApproxTransform, RealMatrix};
use crate::{Error, Result, EIGEN_TOL};

/// Markov-1 source with correlation `rho` between neighbouring samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceModel {
    pub rho: f64,
    pub n: usize,
}

impl CovarianceModel {
    pub fn new(rho: f64, n: usize) -> Result<Self> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::InvalidArgument(alloc::format!("rho = {rho} is outside (0, 1)")));
        }
        if n == 0 {
            return Err(Error::InvalidArgument("blocklength must be positive".into()));
        }
        Ok(Self { rho, n })
    }

    /// `ρ = 0.95`, `n = 8`.
    pub fn standard() -> Self {
        Self { rho: 0.95, n: 8 }
    }
}

/// `R_x(i, j) = ρ^|i−j|`.
pub fn covariance_matrix(model: &CovarianceModel) -> Result<RealMatrix> {
    let model = CovarianceModel::new(model.rho, model.n)?;
    Ok(RealMatrix::from_fn(model.n, model.n, |i, j| libm::pow(model.rho, i.abs_diff(j) as f64)))
}

fn reference_dct(c_hat: &RealMatrix) -> Result<RealMatrix> {
    if !c_hat.is_square() {
        return Err(Error::InvalidArgument("transform must be square".into()));
    }
    exact_dct_matrix(c_hat.rows())
}

/// `ε = π·‖C − Ĉ‖²_F`.
pub fn total_error_energy(c_hat: &RealMatrix) -> Result<f64> {
    Ok(PI * reference_dct(c_hat)?.sub(c_hat)?.frobenius_sq())
}

/// `(1/n)·tr((C − Ĉ)·R_x·(C − Ĉ)ᵀ)`.
pub fn mse(c_hat: &RealMatrix, model: &CovarianceModel) -> Result<f64> {
    let diff = reference_dct(c_hat)?.sub(c_hat)?;
    let r = covariance_matrix(&CovarianceModel { n: c_hat.rows(), ..*model })?;
    let e = diff.matmul(&r)?.matmul(&diff.transpose())?;
    Ok(e.trace() / c_hat.rows() as f64)
}

/// `R_y = Ĉ·R_x·Ĉᵀ`.
pub fn output_covariance(c_hat: &RealMatrix, model: &CovarianceModel) -> Result<RealMatrix> {
    let r = covariance_matrix(&CovarianceModel { n: c_hat.cols(), ..*model })?;
    c_hat.matmul(&r)?.matmul(&c_hat.transpose())
}

/// Unified coding gain in dB, valid for non-orthogonal transforms.
///
/// `Aᵢ = su[(ĉᵢ·ĉᵢᵀ) ⊙ R_x]` and `Bᵢ = ‖ĝᵢ‖²` where `ĝᵢ` is row `i` of `Ĉ⁻¹`.
pub fn unified_coding_gain(c_hat: &RealMatrix, model: &CovarianceModel) -> Result<f64> {
    if !c_hat.is_square() {
        return Err(Error::InvalidArgument("transform must be square".into()));
    }
    let n = c_hat.rows();
    let r = covariance_matrix(&CovarianceModel { n, ..*model })?;
    let inv = invert(c_hat)?;
    let mut log_sum = 0.0;
    for i in 0..n {
        let c = c_hat.row(i);
        let mut a = 0.0;
        for p in 0..n {
            for q in 0..n {
                a += c[p] * c[q] * r[(p, q)];
            }
        }
        let b: f64 = inv.row(i).iter().map(|g| g * g).sum();
        log_sum += libm::log10(a * b);
    }
    Ok(-10.0 * log_sum / n as f64)
}

/// Coding gain in dB for transforms with orthogonal rows.
///
/// The diagonal entries `rᵢᵢ` of `R_y` are coefficient variances and enter
/// the ratio of arithmetic to geometric mean directly; the geometric mean is
/// normalized by the squared row norms.
pub fn coding_gain(c_hat: &RealMatrix, model: &CovarianceModel) -> Result<f64> {
    let gram = c_hat.matmul(&c_hat.transpose())?;
    if !gram.is_diagonal(EIGEN_TOL * gram.max_abs().max(1.0)) {
        return Err(Error::Precondition("coding gain needs orthogonal rows; use the unified coding gain"));
    }
    let n = c_hat.rows();
    let ry = output_covariance(c_hat, model)?;
    let d = ry.diag();
    let arith = d.iter().sum::<f64>() / n as f64;
    let log_geo = (0..n).map(|i| libm::log10(d[i] * gram[(i, i)])).sum::<f64>() / n as f64;
    Ok(10.0 * (libm::log10(arith) - log_geo))
}

/// `100·Σ|rᵢᵢ| / ΣΣ|rᵢⱼ|` over `R_y`, in percent.
pub fn transform_efficiency(c_hat: &RealMatrix, model: &CovarianceModel) -> Result<f64> {
    let ry = output_covariance(c_hat, model)?;
    let diag: f64 = ry.diag().iter().map(|v| libm::fabs(*v)).sum();
    let total: f64 = ry.data().iter().map(|v| libm::fabs(*v)).sum();
    if total == 0.0 {
        return Err(Error::Degenerate("output covariance is zero"));
    }
    Ok(100.0 * diag / total)
}

/// `ρ = 0.01, 0.02, …, 0.99`.
pub fn default_rho_grid() -> Vec<f64> {
    (1..100).map(|i| i as f64 / 100.0).collect()
}

/// Unified coding gain of the exact DCT minus that of `c_hat`, per `ρ`.
pub fn coding_gain_curve(c_hat: &RealMatrix, rho_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    let c = reference_dct(c_hat)?;
    rho_grid
        .iter()
        .map(|&rho| {
            let model = CovarianceModel::new(rho, c.rows())?;
            Ok((rho, unified_coding_gain(&c, &model)? - unified_coding_gain(c_hat, &model)?))
        })
        .collect()
}

/// One row of the performance table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub name: String,
    pub epsilon: f64,
    pub mse: f64,
    pub unified_cg: f64,
    /// Only defined for transforms with orthogonal rows.
    pub cg: Option<f64>,
    pub eta: f64,
}

pub fn report_for(approx: &ApproxTransform, model: &CovarianceModel) -> Result<MetricsReport> {
    let c = &approx.c_hat;
    let cg = match coding_gain(c, model) {
        Ok(v) => Some(v),
        Err(Error::Precondition(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(MetricsReport {
        name: approx.name.clone(),
        epsilon: total_error_energy(c)?,
        mse: mse(c, model)?,
        unified_cg: unified_coding_gain(c, model)?,
        cg,
        eta: transform_efficiency(c, model)?,
    })
}

/// Table row for a catalog transform.
pub fn full_report(name: &str, model: &CovarianceModel) -> Result<MetricsReport> {
    report_for(&catalog::get_transform(name)?, model)
}
