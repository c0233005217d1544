//! Browser bindings for the kernel laboratory: three interactive
//! computations (IDS curves, Bloch bands, Aubry duality overlays) exposed
//! as JSON-returning functions for a plain static page.
//!
//! Build with `wasm-pack build --target web` (or `cargo build --target
//! wasm32-unknown-unknown` plus `wasm-bindgen`); the crate also compiles
//! and tests natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use crossedlab::dynsys::PointX;
use crossedlab::presets;
use crossedlab::spectral::{bands, ids_shubin};

#[derive(Serialize)]
struct Curve {
    energies: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct BandsOut {
    nodes: Vec<f64>,
    bands: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct AubryOut {
    forward: Curve,
    dual: Curve,
    sup_distance: f64,
}

fn uniform_grid(radius: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| -radius + 2.0 * radius * i as f64 / (points - 1) as f64)
        .collect()
}

fn am_ids_curve(lambda: f64, theta: f64, n: i64, points: usize) -> Result<Curve, String> {
    let a = presets::almost_mathieu(lambda, theta);
    let energies = uniform_grid(2.0 + lambda, points.max(2));
    let curve = ids_shubin(&a, &PointX::Torus(vec![0.0]), n, &energies)
        .map_err(|e| e.to_string())?;
    Ok(Curve { energies, values: curve.values })
}

pub fn ids_json(lambda: f64, theta: f64, n: i64, points: usize) -> Result<String, String> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err("coupling must be positive".to_string());
    }
    if !(1..=2000).contains(&n) {
        return Err("box radius must be between 1 and 2000".to_string());
    }
    let curve = am_ids_curve(lambda, theta, n, points)?;
    serde_json::to_string(&curve).map_err(|e| e.to_string())
}

pub fn bands_json(potential: &[f64], resolution: usize) -> Result<String, String> {
    if potential.is_empty() || potential.len() > 16 {
        return Err("potential must have 1 to 16 entries".to_string());
    }
    if !(8..=4096).contains(&resolution) {
        return Err("zone resolution must be between 8 and 4096".to_string());
    }
    let a = presets::periodic(potential);
    let bs = bands(&a, resolution).map_err(|e| e.to_string())?;
    let out = BandsOut {
        nodes: bs.zone_nodes.iter().map(|n| n[0]).collect(),
        bands: bs.bands,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

pub fn aubry_json(lambda: f64, theta: f64, n: i64, points: usize) -> Result<String, String> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err("coupling must be positive".to_string());
    }
    if !(1..=2000).contains(&n) {
        return Err("box radius must be between 1 and 2000".to_string());
    }
    let forward = am_ids_curve(lambda, theta, n, points)?;
    let partner = presets::almost_mathieu(4.0 / lambda, theta);
    let mapped: Vec<f64> = forward.energies.iter().map(|e| 2.0 * e / lambda).collect();
    let dual_curve = ids_shubin(&partner, &PointX::Torus(vec![0.0]), n, &mapped)
        .map_err(|e| e.to_string())?;
    let sup_distance = forward
        .values
        .iter()
        .zip(&dual_curve.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let out = AubryOut {
        forward: Curve { energies: forward.energies.clone(), values: forward.values },
        dual: Curve { energies: forward.energies, values: dual_curve.values },
        sup_distance,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn ids_curve(lambda: f64, theta: f64, n: i32, points: u32) -> Result<String, JsError> {
    ids_json(lambda, theta, n as i64, points as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn band_structure(potential: Vec<f64>, resolution: u32) -> Result<String, JsError> {
    bands_json(&potential, resolution as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn aubry_pair(lambda: f64, theta: f64, n: i32, points: u32) -> Result<String, JsError> {
    aubry_json(lambda, theta, n as i64, points as usize).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crossedlab::presets::GOLDEN;

    #[test]
    fn ids_json_well_formed() {
        let json = ids_json(2.0, GOLDEN, 60, 65).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let values = v["values"].as_array().unwrap();
        assert_eq!(values.len(), 65);
        assert_eq!(values.last().unwrap().as_f64().unwrap(), 1.0);
    }

    #[test]
    fn bands_json_period_two() {
        let json = bands_json(&[0.0, 1.0], 64).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["nodes"].as_array().unwrap().len(), 64);
        assert_eq!(v["bands"][0].as_array().unwrap().len(), 2);
    }

    #[test]
    fn aubry_self_dual_small() {
        let json = aubry_json(2.0, GOLDEN, 80, 65).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(v["sup_distance"].as_f64().unwrap() < 0.1);
    }

    #[test]
    fn parameter_validation() {
        assert!(ids_json(-1.0, GOLDEN, 60, 65).is_err());
        assert!(ids_json(2.0, GOLDEN, 100000, 65).is_err());
        assert!(bands_json(&[], 64).is_err());
        assert!(bands_json(&[0.0], 2).is_err());
    }
}
