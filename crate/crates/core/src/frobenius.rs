//! Frobenius coefficient recurrence for
//! `A x^2 z_xx + B xy z_xy + C y^2 z_yy + x a z_x + y b z_y + c z = 0`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::euler::EulerPDE;
use crate::indicial::{indicial_of, resonance_scan, IndicialConic, ResonanceHit, ResonanceReport};
use crate::multiseries::{antiderivative_x, exp, reciprocal, sqrt, CSeries2, Complex, MultiIndex, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrobeniusError {
    #[error("base point is not on the indicial conic: |P(r0, s0)| = {residual:e}")]
    BasePointNotOnConic { residual: f64 },
    #[error("resonant base point: P(r0 + q1, s0 + q2) vanishes at {}", fmt_hits(.hits))]
    ResonantPoint { hits: Vec<ResonanceHit> },
    #[error("requested order {requested} exceeds the coefficient series order {available}")]
    OrderExceedsCoefficientOrder { requested: u32, available: u32 },
    #[error("recurrence at {q} needs coefficients up to layer {needed}, table has order {have}")]
    MissingPriorCoefficient { q: MultiIndex, needed: u32, have: u32 },
    #[error("recurrence produced a non-finite coefficient at {0}")]
    NonFinite(MultiIndex),
    #[error("the recurrence is undefined at Q = (0, 0)")]
    ZeroIndex,
    #[error("expected a series in {0} only")]
    NotUnivariate(&'static str),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

fn fmt_hits(hits: &[ResonanceHit]) -> String {
    hits.iter().map(|h| h.q.to_string()).collect::<Vec<_>>().join(", ")
}

/// The analytic coefficients share one truncation order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularSingularPDE {
    pub ca: Complex,
    pub cb: Complex,
    pub cc: Complex,
    pub a: CSeries2,
    pub b: CSeries2,
    pub c: CSeries2,
}

impl RegularSingularPDE {
    /// Truncates `a`, `b`, `c` to their smallest order.
    pub fn new(ca: Complex, cb: Complex, cc: Complex, a: CSeries2, b: CSeries2, c: CSeries2) -> Self {
        let n = a.order().min(b.order()).min(c.order());
        RegularSingularPDE {
            ca,
            cb,
            cc,
            a: a.truncate(n),
            b: b.truncate(n),
            c: c.truncate(n),
        }
    }

    pub fn from_euler(pde: &EulerPDE, order: u32) -> Self {
        Self::new(
            pde.a,
            pde.b,
            pde.c,
            CSeries2::constant(pde.d, order),
            CSeries2::constant(pde.e, order),
            CSeries2::constant(pde.f, order),
        )
    }

    pub fn order(&self) -> u32 {
        self.a.order()
    }

    pub fn conic(&self) -> IndicialConic {
        indicial_of(self)
    }

    /// Highest total degree with a nonzero coefficient across `a`, `b`, `c`.
    pub fn perturbation_degree(&self) -> u32 {
        self.a.max_degree().max(self.b.max_degree()).max(self.c.max_degree())
    }

    /// Indices `K != 0` where any of `a`, `b`, `c` is nonzero, with those coefficients.
    fn perturbation(&self) -> Vec<(MultiIndex, Complex, Complex, Complex)> {
        let mut keys: Vec<MultiIndex> = self
            .a
            .iter()
            .chain(self.b.iter())
            .chain(self.c.iter())
            .map(|(q, _)| q)
            .filter(|q| *q != MultiIndex::ZERO)
            .collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|k| (k, self.a.get(k), self.b.get(k), self.c.get(k)))
            .collect()
    }
}

/// `e_Q = sum over K != 0, K <= Q of [(r + q1 - k1) a_K + (s + q2 - k2) b_K + c_K] D_{Q-K}`.
///
/// `prior` must hold every layer below `|Q|`.
pub fn recurrence_rhs(
    pde: &RegularSingularPDE,
    r: Complex,
    s: Complex,
    q: MultiIndex,
    prior: &CSeries2,
) -> Result<Complex, FrobeniusError> {
    if q == MultiIndex::ZERO {
        return Err(FrobeniusError::ZeroIndex);
    }
    if prior.order() + 1 < q.norm() {
        return Err(FrobeniusError::MissingPriorCoefficient {
            q,
            needed: q.norm() - 1,
            have: prior.order(),
        });
    }
    Ok(rhs_from(&pde.perturbation(), r, s, q, prior))
}

fn rhs_from(
    pert: &[(MultiIndex, Complex, Complex, Complex)],
    r: Complex,
    s: Complex,
    q: MultiIndex,
    prior: &CSeries2,
) -> Complex {
    let mut e = Complex::default();
    for &(k, ak, bk, ck) in pert {
        if let Some(p) = q.checked_sub(k) {
            let d = prior.get(p);
            if d.re != 0.0 || d.im != 0.0 {
                let u = r + f64::from(p.q1);
                let v = s + f64::from(p.q2);
                e += (u * ak + v * bk + ck) * d;
            }
        }
    }
    e
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResonancePolicy {
    /// Any resonant shift up to the order is an error.
    #[default]
    Refuse,
    /// At a resonant shift whose right-hand side also vanishes (|e_Q| < tol),
    /// take `D_Q = 0` and continue. This picks one member of a family of
    /// formal solutions; incompatible resonances are still refused.
    ZeroCompatible,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub resonance: ResonancePolicy,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: crate::indicial::DEFAULT_RESONANCE_TOL,
            resonance: ResonancePolicy::Refuse,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusSolution {
    pub r0: Complex,
    pub s0: Complex,
    pub order: u32,
    /// `D_Q` with `D_{0,0} = 1`.
    pub coeffs: CSeries2,
    pub resonance: ResonanceReport,
    /// Resonant indices where `D_Q` was set to zero under [`ResonancePolicy::ZeroCompatible`].
    pub compatible: Vec<MultiIndex>,
}

impl FrobeniusSolution {
    pub fn coeff(&self, q1: u32, q2: u32) -> Complex {
        self.coeffs.coeff(q1, q2)
    }
}

pub fn solve(
    pde: &RegularSingularPDE,
    r0: Complex,
    s0: Complex,
    order: u32,
    tol: f64,
) -> Result<FrobeniusSolution, FrobeniusError> {
    solve_with(
        pde,
        r0,
        s0,
        order,
        SolveOptions {
            tol,
            resonance: ResonancePolicy::Refuse,
        },
    )
}

pub fn solve_with(
    pde: &RegularSingularPDE,
    r0: Complex,
    s0: Complex,
    order: u32,
    opts: SolveOptions,
) -> Result<FrobeniusSolution, FrobeniusError> {
    if order > pde.order() {
        return Err(FrobeniusError::OrderExceedsCoefficientOrder {
            requested: order,
            available: pde.order(),
        });
    }
    let conic = pde.conic();
    let base = conic.eval(r0, s0).norm();
    if !(base < opts.tol) {
        return Err(FrobeniusError::BasePointNotOnConic { residual: base });
    }
    let resonance = if order == 0 {
        ResonanceReport {
            r0,
            s0,
            bound: 0,
            tol: opts.tol,
            hits: vec![],
            nonresonant_up_to: 0,
        }
    } else {
        resonance_scan(&conic, r0, s0, order, opts.tol)
            .map_err(|_| FrobeniusError::BasePointNotOnConic { residual: base })?
    };
    if !resonance.is_clean() && opts.resonance == ResonancePolicy::Refuse {
        return Err(FrobeniusError::ResonantPoint {
            hits: resonance.hits.clone(),
        });
    }

    let pert = pde.perturbation();
    let mut coeffs = CSeries2::one(order);
    let mut compatible = Vec::new();
    let mut incompatible = Vec::new();
    for n in 1..=order {
        // each D_Q depends only on lower layers, so the order within a layer is free
        for q in MultiIndex::layer(n) {
            let e = rhs_from(&pert, r0, s0, q, &coeffs);
            let p = conic.eval_shift(r0, s0, q);
            if p.norm() < opts.tol {
                if e.norm() < opts.tol {
                    compatible.push(q);
                } else {
                    incompatible.push(ResonanceHit { q, magnitude: p.norm() });
                }
                continue;
            }
            let d = -e / p;
            if !(d.re.is_finite() && d.im.is_finite()) {
                return Err(FrobeniusError::NonFinite(q));
            }
            coeffs.set(q, d);
        }
        if !incompatible.is_empty() {
            return Err(FrobeniusError::ResonantPoint { hits: incompatible });
        }
    }
    Ok(FrobeniusSolution {
        r0,
        s0,
        order,
        coeffs,
        resonance,
        compatible,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub parabolic_real_type: bool,
    pub elliptic_condition: bool,
    pub hyperbolic_condition: bool,
    pub general_sufficient: bool,
    pub any: bool,
}

/// Sufficient conditions for convergence of the formal solution, as hypotheses
/// on the constants `A`, `B`, `C`. Equalities use a tolerance relative to
/// `max(|A|, |B|, |C|)`.
pub fn convergence_report(ca: Complex, cb: Complex, cc: Complex) -> ConvergenceReport {
    let m = ca.norm().max(cb.norm()).max(cc.norm());
    let eps = 1e-12 * m;
    let root_prod = ca.sqrt() * cc.sqrt();
    // the sign of each root is a free choice; accept either branch of the product
    let parabolic_real_type = m > 0.0
        && [1.0, -1.0]
            .iter()
            .any(|&sg| (cb - root_prod * (2.0 * sg)).norm() <= eps && (root_prod * sg).re > 0.0);
    let b_zero = cb.norm() <= eps;
    let ac = (ca * cc.conj()).re;
    let elliptic_condition = m > 0.0 && b_zero && ac > 0.0;
    let hyperbolic_condition = m > 0.0 && b_zero && ac < 0.0;
    let general_sufficient = cb.norm_sqr() / 2.0 + ac > 0.0 && (ca * cb.conj()).re > 0.0 && (cb * cc.conj()).re > 0.0;
    ConvergenceReport {
        parabolic_real_type,
        elliptic_condition,
        hyperbolic_condition,
        general_sufficient,
        any: parabolic_real_type || elliptic_condition || hyperbolic_condition || general_sufficient,
    }
}

/// Reciprocal of `limsup d_n^(1/n)` over the upper half of the layer sums
/// `d_n = sum_{|Q|=n} |D_Q|`; `f64::INFINITY` when unbounded.
///
/// The root test alone converges slowly when `d_n` carries a factorial factor
/// (`n!^k` moves `d_n^(1/n)` only like `n^k`), so the window is also fitted to
/// `ln d_n = c0 + c1 n + c2 ln n + k ln n!`. A clearly positive `k` means zero
/// radius and a clearly negative one means an entire series. Anything else
/// falls back to the root test.
pub fn radius_estimate(sol: &FrobeniusSolution) -> f64 {
    radius_estimate_series(&sol.coeffs)
}

pub fn radius_estimate_series(coeffs: &CSeries2) -> f64 {
    let sums: Vec<f64> = (0..=coeffs.order()).map(|n| coeffs.layer_sum(n)).collect();
    radius_from_layer_sums(&sums)
}

/// `sums[n]` is the layer sum of degree `n`.
pub fn radius_from_layer_sums(sums: &[f64]) -> f64 {
    if sums.len() < 2 {
        return f64::INFINITY;
    }
    let top = sums.len() - 1;
    let start = top.div_ceil(2).max(1);
    let window: Vec<(f64, f64)> = (start..=top)
        .filter(|&n| sums[n] > 0.0 && sums[n].is_finite())
        .map(|n| (n as f64, sums[n].ln()))
        .collect();
    if window.is_empty() {
        return f64::INFINITY;
    }
    let root = window.iter().map(|&(n, l)| (l / n).exp()).fold(0.0, f64::max);
    if let Some((kappa, se)) = factorial_exponent(&window) {
        if kappa > 0.5 && kappa > 4.0 * se {
            return 0.0;
        }
        if kappa < -0.5 && -kappa > 4.0 * se {
            return f64::INFINITY;
        }
    }
    if root == 0.0 {
        f64::INFINITY
    } else {
        1.0 / root
    }
}

fn ln_factorial(n: f64) -> f64 {
    (2..=n as u64).map(|k| (k as f64).ln()).sum()
}

/// Least-squares `k` and its standard error; needs at least five points.
fn factorial_exponent(window: &[(f64, f64)]) -> Option<(f64, f64)> {
    const P: usize = 4;
    let m = window.len();
    if m <= P {
        return None;
    }
    let x = DMatrix::from_fn(m, P, |i, j| {
        let n = window[i].0;
        match j {
            0 => 1.0,
            1 => n,
            2 => n.ln(),
            _ => ln_factorial(n),
        }
    });
    let y = DVector::from_iterator(m, window.iter().map(|w| w.1));
    let beta = x.clone().svd(true, true).solve(&y, 1e-12).ok()?;
    let resid = &y - &x * &beta;
    let sigma2 = resid.norm_squared() / (m - P) as f64;
    let cov = (x.transpose() * &x).try_inverse()?;
    let var = sigma2 * cov[(P - 1, P - 1)];
    if !var.is_finite() || var < 0.0 {
        return None;
    }
    Some((beta[P - 1], var.sqrt()))
}

/// Series `f(x)`, `g(y)` with unit constant term such that `xi = x f(x)` and
/// `eta = y g(y)` turn `A(x) x^2 z_xx` and `C(y) y^2 z_yy` into terms with
/// constant leading coefficients `A(0)` and `C(0)`.
///
/// With `w = sqrt(A(0) / A(x))`, `f = exp(integral of (w - 1)/x)`, so that
/// `x (x f)' = w x f`.
pub fn prepare_coordinates(a_of_x: &CSeries2, c_of_y: &CSeries2) -> Result<(CSeries2, CSeries2), FrobeniusError> {
    if !a_of_x.is_univariate_x() {
        return Err(FrobeniusError::NotUnivariate("x"));
    }
    if !c_of_y.is_univariate_y() {
        return Err(FrobeniusError::NotUnivariate("y"));
    }
    let f = prepare_one(a_of_x)?;
    let g = prepare_one(&c_of_y.transpose())?.transpose();
    Ok((f, g))
}

fn prepare_one(a: &CSeries2) -> Result<CSeries2, FrobeniusError> {
    let a0 = a.constant_term();
    let w = sqrt(&reciprocal(a)?.scale(a0))?;
    let h = (&w - &CSeries2::one(a.order())).unshift_x();
    Ok(exp(&antiderivative_x(&h)))
}
