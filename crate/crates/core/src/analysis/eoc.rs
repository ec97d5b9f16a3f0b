use crate::{Error, Result};

/// Least-squares slope of `log e` against `log h`.
pub fn eoc(h: &[f64], e: &[f64]) -> Result<f64> {
    if h.len() != e.len() || h.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need at least two (h, error) pairs, got {} and {}",
            h.len(),
            e.len()
        )));
    }
    if let Some((a, b)) = h.iter().zip(e).find(|(a, b)| !(**a > 0.0) || !(**b > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "mesh sizes and errors must be positive, got h = {a}, e = {b}"
        )));
    }
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("all mesh sizes are equal".into()));
    }
    Ok(sxy / sxx)
}

/// Slope over the last `window` pairs (all pairs if fewer).
pub fn eoc_tail(h: &[f64], e: &[f64], window: usize) -> Result<f64> {
    let start = h.len().saturating_sub(window);
    eoc(&h[start..], &e[start..e.len().min(h.len())])
}

/// Slopes between consecutive pairs.
pub fn pairwise_eoc(h: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    (1..h.len().min(e.len()))
        .map(|i| eoc(&h[i - 1..=i], &e[i - 1..=i]))
        .collect()
}
