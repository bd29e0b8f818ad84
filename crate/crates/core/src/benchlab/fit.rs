//! Log-log scaling fits.

#[derive(Clone, Debug, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest time growth between adjacent rows, normalised to a doubling
    /// of the x value: `(t2/t1)^(ln 2 / ln(x2/x1))`.
    pub max_doubling_ratio: f64,
    pub used: usize,
    /// Rows dropped for a zero time or zero x.
    pub excluded: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FitError {
    #[error("need at least {need} usable rows, have {have}")]
    TooFewRows { need: usize, have: usize },
}

pub const MIN_ROWS: usize = 4;

/// Least-squares slope of `ln t` against `ln x` over `(x, t)` points.
pub fn fit_scaling(points: &[(f64, f64)]) -> Result<Fit, FitError> {
    let pts: Vec<(f64, f64)> = points.iter().copied().filter(|&(x, t)| x > 0.0 && t > 0.0).collect();
    let excluded = points.len() - pts.len();
    if excluded > 0 {
        log::warn!("fit_scaling: excluded {excluded} rows with zero size or time");
    }
    if pts.len() < MIN_ROWS {
        return Err(FitError::TooFewRows { need: MIN_ROWS, have: pts.len() });
    }
    let lx: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let lt: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let k = pts.len() as f64;
    let (mx, mt) = (lx.iter().sum::<f64>() / k, lt.iter().sum::<f64>() / k);
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxt: f64 = lx.iter().zip(&lt).map(|(x, t)| (x - mx) * (t - mt)).sum();
    let slope = sxt / sxx;
    let mut max_doubling_ratio = f64::NEG_INFINITY;
    for w in pts.windows(2) {
        let (x1, t1) = w[0];
        let (x2, t2) = w[1];
        if x2 > x1 {
            let r = (t2 / t1).powf(std::f64::consts::LN_2 / (x2 / x1).ln());
            max_doubling_ratio = max_doubling_ratio.max(r);
        }
    }
    Ok(Fit { slope, intercept: mt - slope * mx, max_doubling_ratio, used: pts.len(), excluded })
}
