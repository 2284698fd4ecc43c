use crate::AnalysisError;

/// Coefficient of multiple correlation of `W >= 2` equal-length waveforms.
///
/// `sqrt(max(0, 1 - within / total))`, where `within` is the variance about
/// the per-sample mean with `T(W-1)` degrees of freedom and `total` the
/// variance about the grand mean with `WT-1`.
pub fn cmc(waveforms: &[Vec<f64>]) -> Result<f64, AnalysisError> {
    let w = waveforms.len();
    if w < 2 {
        return Err(AnalysisError::InvalidInput("need at least two waveforms".into()));
    }
    let t = waveforms[0].len();
    if t < 2 || waveforms.iter().any(|x| x.len() != t) {
        return Err(AnalysisError::InvalidInput("waveforms must share a length of at least 2".into()));
    }
    if waveforms.iter().flatten().any(|v| !v.is_finite()) {
        return Err(AnalysisError::InvalidInput("non-finite sample".into()));
    }
    let wf = w as f64;
    let grand = waveforms.iter().flatten().sum::<f64>() / (wf * t as f64);
    let mut within = 0.0;
    let mut total = 0.0;
    for k in 0..t {
        let mean_t = waveforms.iter().map(|x| x[k]).sum::<f64>() / wf;
        for x in waveforms {
            within += (x[k] - mean_t).powi(2);
            total += (x[k] - grand).powi(2);
        }
    }
    let within = within / (t as f64 * (wf - 1.0));
    let total = total / (wf * t as f64 - 1.0);
    if !(total > 0.0) {
        return Err(AnalysisError::DegenerateInput("grand variance is zero".into()));
    }
    Ok((1.0 - within / total).max(0.0).sqrt().min(1.0))
}
