//! wasm-bindgen entry points for the static demo page in `www/`.
//! Each returns a JSON string; errors come back as JS exceptions.

use dflab::grid::GridSpec;
use dflab::nucleus::{NuclearModel, Potential};
use dflab::propertyp::resolvent_average;
use dflab::radial::{assemble_spectrum, nonrel_limit_study, RadialModel};
use serde::Serialize;
use wasm_bindgen::prelude::*;

fn model(c: f64, radius: f64, basis: usize) -> Result<RadialModel, String> {
    let potential = if radius > 0.0 {
        Potential::Smeared(NuclearModel::new(radius, 4).map_err(|e| e.to_string())?)
    } else {
        Potential::PointCoulomb
    };
    RadialModel::new(GridSpec::default(), potential, c, basis).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct ShellRow {
    label: String,
    dimension: usize,
    /// energy minus c^2
    shifted: f64,
}

#[derive(Serialize)]
struct NonrelOut {
    c: Vec<f64>,
    errors: Vec<f64>,
    slope: f64,
}

#[derive(Serialize)]
struct ResolventOut {
    ratio: f64,
    discrepancy: f64,
    remainder: f64,
}

pub fn spectrum_json(c: f64, radius: f64, kmax: u32, shells: usize) -> Result<String, String> {
    let table = assemble_spectrum(&model(c, radius, 60)?, kmax, 1e-12, shells).map_err(|e| e.to_string())?;
    let rows: Vec<ShellRow> =
        table.shells.iter().map(|s| ShellRow { label: s.label(), dimension: s.dimension, shifted: s.shifted }).collect();
    serde_json::to_string(&rows).map_err(|e| e.to_string())
}

pub fn nonrel_json(radius: f64, cs: &[f64]) -> Result<String, String> {
    let study = nonrel_limit_study(&model(cs[0], radius, 60)?, cs, 1).map_err(|e| e.to_string())?;
    let out = NonrelOut {
        c: study.rows.iter().map(|r| r.c).collect(),
        errors: study.rows.iter().map(|r| r.errors[0]).collect(),
        slope: study.slope,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

/// Free resolvent average along `direction` for each `|p|/c` in `ratios`.
pub fn resolvent_json(c: f64, direction: [f64; 3], ratios: &[f64]) -> Result<String, String> {
    let n = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n == 0.0 {
        return Err("direction must be nonzero".into());
    }
    let mut out = Vec::new();
    for &x in ratios {
        let p = direction.map(|t| t / n * x * c);
        let r = resolvent_average(p, c).map_err(|e| e.to_string())?;
        out.push(ResolventOut { ratio: x, discrepancy: r.discrepancy(), remainder: r.expansion_remainder() });
    }
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// Bound shells of the radial Dirac operator; `radius = 0` selects a point nucleus.
#[wasm_bindgen]
pub fn spectrum(c: f64, radius: f64, kmax: u32, shells: usize) -> Result<String, JsError> {
    js(spectrum_json(c, radius, kmax, shells))
}

/// Distance of the lowest Dirac level from the Schrodinger one, per `c`.
#[wasm_bindgen]
pub fn nonrel(radius: f64, cs: Vec<f64>) -> Result<String, JsError> {
    js(nonrel_json(radius, &cs))
}

#[wasm_bindgen]
pub fn resolvent(c: f64, px: f64, py: f64, pz: f64, ratios: Vec<f64>) -> Result<String, JsError> {
    js(resolvent_json(c, [px, py, pz], &ratios))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shells_and_tables_serialize() {
        let s: serde_json::Value = serde_json::from_str(&spectrum_json(100.0, 0.5, 2, 4).unwrap()).unwrap();
        assert_eq!(s.as_array().unwrap().len(), 4);
        assert_eq!(s[0]["dimension"], 2);
        let n: serde_json::Value = serde_json::from_str(&nonrel_json(0.5, &[20.0, 40.0, 80.0]).unwrap()).unwrap();
        assert!((n["slope"].as_f64().unwrap() + 2.0).abs() < 0.3);
        let r: serde_json::Value = serde_json::from_str(&resolvent_json(100.0, [0.0, 0.0, 1.0], &[0.05]).unwrap()).unwrap();
        assert!(r[0]["discrepancy"].as_f64().unwrap() < 1e-8);
        assert!(resolvent_json(100.0, [0.0; 3], &[0.1]).is_err());
    }
}
