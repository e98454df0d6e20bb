//! Browser bindings. Every export takes plain arguments and returns a JSON
//! string; errors surface as thrown strings on the JS side.

use frobenius_pde::catalog::{make_pde, CatalogEntry, Model};
use frobenius_pde::frobenius::{radius_estimate, solve_with, ResonancePolicy, SolveOptions};
use frobenius_pde::indicial::{self, IndicialConic};
use frobenius_pde::verify::residual_max;
use frobenius_pde::Complex;
use serde::Serialize;
use wasm_bindgen::prelude::*;

const TOL: f64 = 1e-9;
const MAX_ORDER: u32 = 80;
const MAX_BOUND: u32 = 200;

fn conic_from(coeffs: &[f64]) -> Result<IndicialConic, String> {
    match *coeffs {
        [a, b, c, d, e, f] if coeffs.iter().all(|v| v.is_finite()) => Ok(IndicialConic::real(a, b, c, d, e, f)),
        _ => Err("expected six finite conic coefficients A, B, C, D, E, F".into()),
    }
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct ClassifyOut {
    discriminant_class: indicial::DiscriminantClass,
    degenerate: bool,
    degenerate_kind: indicial::DegenerateKind,
    discriminant: f64,
    determinant: f64,
}

/// Classifies `A r^2 + B rs + C s^2 + D r + E s + F`.
pub fn classify_conic_json(coeffs: &[f64]) -> Result<String, String> {
    let k = indicial::classify(&conic_from(coeffs)?).map_err(|e| e.to_string())?;
    json(&ClassifyOut {
        discriminant_class: k.discriminant_class,
        degenerate: k.degenerate,
        degenerate_kind: k.degenerate_kind,
        discriminant: k.discriminant,
        determinant: k.determinant,
    })
}

#[derive(Serialize)]
struct ScanOut {
    clean: bool,
    nonresonant_up_to: u32,
    hits: Vec<(u32, u32)>,
}

/// Resonant shifts of a real point `(r0, s0)` on the conic.
pub fn resonance_scan_json(coeffs: &[f64], r0: f64, s0: f64, bound: u32) -> Result<String, String> {
    let conic = conic_from(coeffs)?;
    let rep = indicial::resonance_scan(
        &conic,
        Complex::new(r0, 0.0),
        Complex::new(s0, 0.0),
        bound.clamp(1, MAX_BOUND),
        TOL,
    )
    .map_err(|e| e.to_string())?;
    json(&ScanOut {
        clean: rep.is_clean(),
        nonresonant_up_to: rep.nonresonant_up_to,
        hits: rep.hit_indices().into_iter().map(|q| (q.q1, q.q2)).collect(),
    })
}

#[derive(Serialize)]
struct SolveOut {
    model: String,
    order: u32,
    /// `[q1, q2, re, im]` for each nonzero coefficient.
    coeffs: Vec<(u32, u32, f64, f64)>,
    layer_sums: Vec<f64>,
    /// `null` when the estimate is unbounded.
    radius: Option<f64>,
    max_residual: f64,
    compatible_resonances: usize,
}

/// Solves a catalog model at a real base point. `param` binds the model's
/// single parameter, if it has one. Resonances are refused unless
/// `allow_compatible` is set and their right-hand sides vanish.
pub fn catalog_solve_json(
    model: &str,
    param: f64,
    order: u32,
    r0: f64,
    s0: f64,
    allow_compatible: bool,
) -> Result<String, String> {
    let model: Model = model
        .parse()
        .map_err(|e: frobenius_pde::catalog::CatalogError| e.to_string())?;
    let order = order.clamp(4, MAX_ORDER);
    let mut entry = CatalogEntry::new(model);
    if let Some(name) = model.params().first() {
        entry = entry.with(name, param);
    }
    let pde = make_pde(&entry, order).map_err(|e| e.to_string())?;
    let opts = SolveOptions {
        tol: TOL,
        resonance: if allow_compatible {
            ResonancePolicy::ZeroCompatible
        } else {
            ResonancePolicy::Refuse
        },
    };
    let sol = solve_with(&pde, Complex::new(r0, 0.0), Complex::new(s0, 0.0), order, opts).map_err(|e| e.to_string())?;
    let radius = radius_estimate(&sol);
    json(&SolveOut {
        model: model.name().into(),
        order,
        coeffs: sol.coeffs.to_quads(),
        layer_sums: (0..=order).map(|n| sol.coeffs.layer_sum(n)).collect(),
        radius: radius.is_finite().then_some(radius),
        max_residual: residual_max(&pde, &sol).max_residual,
        compatible_resonances: sol.compatible.len(),
    })
}

#[wasm_bindgen]
pub fn classify_conic(coeffs: Vec<f64>) -> Result<String, JsValue> {
    classify_conic_json(&coeffs).map_err(JsValue::from)
}

#[wasm_bindgen]
pub fn resonance_scan(coeffs: Vec<f64>, r0: f64, s0: f64, bound: u32) -> Result<String, JsValue> {
    resonance_scan_json(&coeffs, r0, s0, bound).map_err(JsValue::from)
}

#[wasm_bindgen]
pub fn catalog_solve(
    model: &str,
    param: f64,
    order: u32,
    r0: f64,
    s0: f64,
    allow_compatible: bool,
) -> Result<String, JsValue> {
    catalog_solve_json(model, param, order, r0, s0, allow_compatible).map_err(JsValue::from)
}

/// Model names for the page's selector, as a JSON array of `[name, param]`.
#[wasm_bindgen]
pub fn catalog_models() -> String {
    let list: Vec<(&str, Option<&str>)> = Model::ALL
        .iter()
        .map(|m| (m.name(), m.params().first().copied()))
        .collect();
    serde_json::to_string(&list).unwrap_or_else(|_| "[]".into())
}
