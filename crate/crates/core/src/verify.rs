//! Independent checks of Frobenius solutions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frobenius::{radius_estimate, FrobeniusSolution, RegularSingularPDE};
use crate::multiseries::{cauchy_mul, CSeries2, Complex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("solutions are evaluated only for x > 0 and y > 0")]
    NonPositiveArgument,
}

/// `L[x^r0 y^s0 sum d_Q X^Q] / (x^r0 y^s0)` as a series, by full products.
///
/// The coefficient at `Q` is `P(r0 + q1, s0 + q2) d_Q + e_Q`. The order is the
/// smaller of the two inputs.
pub fn apply_operator(pde: &RegularSingularPDE, r0: Complex, s0: Complex, coeffs: &CSeries2) -> CSeries2 {
    let n = coeffs.order().min(pde.order());
    let d = coeffs.truncate(n);
    let mut lead = CSeries2::zero(n);
    let mut ux = CSeries2::zero(n);
    let mut vy = CSeries2::zero(n);
    for (q, dq) in d.iter() {
        let u = r0 + f64::from(q.q1);
        let v = s0 + f64::from(q.q2);
        lead.set(
            q,
            (pde.ca * u * (u - 1.0) + pde.cb * u * v + pde.cc * v * (v - 1.0)) * dq,
        );
        ux.set(q, u * dq);
        vy.set(q, v * dq);
    }
    let mut out = lead;
    out = &out + &cauchy_mul(&pde.a, &ux);
    out = &out + &cauchy_mul(&pde.b, &vy);
    out = &out + &cauchy_mul(&pde.c, &d);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    /// Largest residual coefficient magnitude in each layer.
    pub per_layer: BTreeMap<u32, f64>,
    pub checked_up_to: u32,
    /// Highest total degree among the nonzero coefficients of `a`, `b`, `c`.
    pub perturbation_degree: u32,
}

/// Residual coefficients of the operator applied to `sol`.
///
/// The operator never lowers a multi-index, so the residual at `Q` involves
/// only `D_P` with `P <= Q`; every layer up to the truncation is therefore
/// exactly determined and is checked.
pub fn residual_max(pde: &RegularSingularPDE, sol: &FrobeniusSolution) -> ResidualReport {
    let res = apply_operator(pde, sol.r0, sol.s0, &sol.coeffs);
    let checked_up_to = res.order();
    let mut per_layer: BTreeMap<u32, f64> = (0..=checked_up_to).map(|n| (n, 0.0)).collect();
    for (q, v) in res.iter() {
        let e = per_layer.entry(q.norm()).or_insert(0.0);
        *e = e.max(v.norm());
    }
    let max_residual = per_layer.values().copied().fold(0.0, f64::max);
    ResidualReport {
        max_residual,
        per_layer,
        checked_up_to,
        perturbation_degree: pde.perturbation_degree(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: Complex,
    /// Set when `max(x, y)` is not below the estimated radius. The value is
    /// still the partial sum.
    pub outside_estimated_domain: bool,
    pub estimated_radius: f64,
}

/// `x^r0 y^s0 sum D_Q x^q1 y^q2` with the principal logarithm.
pub fn eval_solution(sol: &FrobeniusSolution, x: f64, y: f64) -> Result<Evaluation, VerifyError> {
    if !(x > 0.0 && y > 0.0) {
        return Err(VerifyError::NonPositiveArgument);
    }
    let prefactor = (sol.r0 * x.ln() + sol.s0 * y.ln()).exp();
    let sum = sol.coeffs.eval(Complex::new(x, 0.0), Complex::new(y, 0.0));
    let estimated_radius = radius_estimate(sol);
    Ok(Evaluation {
        value: prefactor * sum,
        outside_estimated_domain: x.max(y) >= estimated_radius,
        estimated_radius,
    })
}
