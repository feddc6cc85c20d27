//! Approach of the Dirac levels to the Schrodinger levels as `c` grows.

use super::{schrodinger_channel, solve_channel, Channel, RadialModel};
use crate::error::{LabError, Result};

#[derive(Debug, Clone)]
pub struct NonrelRow {
    pub c: f64,
    /// |(lambda_i - c^2) - mu_i| for the first few 1s-type levels
    pub errors: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct NonrelStudy {
    pub rows: Vec<NonrelRow>,
    /// least-squares slope of log(error of the lowest level) against log c
    pub slope: f64,
}

pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Error table for the `kappa = -1` channel over the given speeds of light.
pub fn nonrel_limit_study(model: &RadialModel, cs: &[f64], levels: usize) -> Result<NonrelStudy> {
    if cs.len() < 3 {
        return Err(LabError::InvalidParameter("need at least three values of c".into()));
    }
    let ch = Channel { kappa: -1 };
    let mu = schrodinger_channel(model, 0)?;
    let mut rows = Vec::new();
    for &c in cs {
        let m = model.with_c(c)?;
        let orbs = solve_channel(&m, ch)?;
        let bound: Vec<_> = orbs.iter().filter(|o| o.is_bound(c)).collect();
        let errors = bound.iter().zip(&mu).take(levels).map(|(o, s)| (o.shifted - s.energy).abs()).collect();
        rows.push(NonrelRow { c, errors });
    }
    let first: Vec<f64> = rows.iter().map(|r| r.errors[0]).collect();
    let slope = log_log_slope(cs, &first);
    Ok(NonrelStudy { rows, slope })
}
