use crate::KmsError;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VanHoveStatus {
    Converged,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanHoveReport {
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
    /// `v_{i+1} − v_i`.
    pub differences: Vec<f64>,
    /// `|v_{i+1} − v_i| / |v_{i+1}|`.
    pub relative_differences: Vec<f64>,
    /// Successive difference ratios `d_{i+1} / d_i`.
    pub ratios: Vec<f64>,
    /// Decay rate of `|d|` per unit index, from a log-linear fit.
    pub fitted_kappa: Option<f64>,
    pub limit: f64,
    pub limit_error: f64,
    pub tolerance: f64,
    pub status: VanHoveStatus,
}

/// Extrapolates a van Hove sequence. Differences below `tolerance · |v|`
/// count as converged noise; larger differences must shrink monotonically.
/// The limit adds the geometric remainder `d ρ / (1 − ρ)` of the last ratio.
pub fn van_hove_limit(values: &[(u32, f64)], tolerance: f64) -> Result<VanHoveReport, KmsError> {
    if values.len() < 3 {
        return Err(KmsError::Invalid(format!("van Hove extrapolation needs >= 3 indices, got {}", values.len())));
    }
    if !(tolerance > 0.0) {
        return Err(KmsError::Invalid(format!("tolerance must be > 0, got {tolerance}")));
    }
    let mut seq = values.to_vec();
    seq.sort_by_key(|p| p.0);
    if seq.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(KmsError::Invalid("duplicate van Hove index".into()));
    }
    let indices: Vec<u32> = seq.iter().map(|p| p.0).collect();
    let vals: Vec<f64> = seq.iter().map(|p| p.1).collect();
    let differences: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).collect();
    let relative_differences: Vec<f64> =
        differences.iter().zip(&vals[1..]).map(|(d, v)| d.abs() / v.abs().max(f64::MIN_POSITIVE)).collect();
    let ratios: Vec<f64> = differences.windows(2).map(|w| w[1] / w[0]).collect();
    let last = *vals.last().expect("non-empty");
    let noise = tolerance * last.abs();
    let monotone = differences.windows(2).all(|w| w[1].abs() <= w[0].abs() || w[1].abs() <= noise);
    let last_rel = *relative_differences.last().expect("non-empty");
    let status = if monotone && last_rel <= tolerance { VanHoveStatus::Converged } else { VanHoveStatus::Inconclusive };

    let fit: Vec<(f64, f64)> = differences
        .iter()
        .zip(indices.windows(2))
        .filter(|(d, _)| d.abs() > 0.0)
        .map(|(d, w)| (w[0] as f64, d.abs().ln()))
        .collect();
    let fitted_kappa = (fit.len() >= 2).then(|| {
        let n = fit.len() as f64;
        let mx = fit.iter().map(|p| p.0).sum::<f64>() / n;
        let my = fit.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = fit.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = fit.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        -sxy / sxx
    });

    let d_last = *differences.last().expect("non-empty");
    let rho = *ratios.last().expect("non-empty");
    let (limit, limit_error) = if rho.is_finite() && rho.abs() < 1.0 {
        let remainder = d_last * rho / (1.0 - rho);
        (last + remainder, remainder.abs().max(f64::EPSILON * last.abs()))
    } else {
        (last, d_last.abs())
    };
    Ok(VanHoveReport {
        indices,
        values: vals,
        differences,
        relative_differences,
        ratios,
        fitted_kappa,
        limit,
        limit_error,
        tolerance,
        status,
    })
}
