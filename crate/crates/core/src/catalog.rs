//! Named regular-singular models with independent coefficient formulas.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr_parser::{series_of, ExprError};
use crate::frobenius::RegularSingularPDE;
use crate::indicial::IndicialConic;
use crate::multiseries::{CSeries2, Complex, MultiIndex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("model `{model}` needs parameter `{param}`")]
    MissingParameter { model: Model, param: &'static str },
    #[error("model `{model}` has no parameter `{param}`")]
    UnexpectedParameter { model: Model, param: String },
    #[error("catalog models need order >= 4, got {0}")]
    OrderTooSmall(u32),
    #[error("({r0}, {s0}) is not on the documented conic of `{model}`")]
    OffConic { model: Model, r0: Complex, s0: Complex },
    #[error("closed form has a vanishing denominator at {0} (resonant point)")]
    Resonant(MultiIndex),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "bessel_I")]
    BesselI,
    #[serde(rename = "bessel_II")]
    BesselII,
    #[serde(rename = "airy_I")]
    AiryI,
    #[serde(rename = "airy_II")]
    AiryII,
    #[serde(rename = "hermite_I")]
    HermiteI,
    #[serde(rename = "hermite_II")]
    HermiteII,
    #[serde(rename = "legendre_I")]
    LegendreI,
    #[serde(rename = "legendre_II")]
    LegendreII,
    #[serde(rename = "chebyshev_I")]
    ChebyshevI,
    #[serde(rename = "chebyshev_II")]
    ChebyshevII,
    #[serde(rename = "laguerre_I")]
    LaguerreI,
    #[serde(rename = "laguerre_II")]
    LaguerreII,
    #[serde(rename = "disturbed_heat")]
    DisturbedHeat,
}

/// Operator text: constants `A, B, C` and the series `a, b, c`.
struct Data {
    abc: [&'static str; 3],
    a: &'static str,
    b: &'static str,
    c: &'static str,
}

const PARABOLIC: [&str; 3] = ["1", "2", "1"];

impl Model {
    pub const ALL: [Model; 13] = [
        Model::BesselI,
        Model::BesselII,
        Model::AiryI,
        Model::AiryII,
        Model::HermiteI,
        Model::HermiteII,
        Model::LegendreI,
        Model::LegendreII,
        Model::ChebyshevI,
        Model::ChebyshevII,
        Model::LaguerreI,
        Model::LaguerreII,
        Model::DisturbedHeat,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::BesselI => "bessel_I",
            Model::BesselII => "bessel_II",
            Model::AiryI => "airy_I",
            Model::AiryII => "airy_II",
            Model::HermiteI => "hermite_I",
            Model::HermiteII => "hermite_II",
            Model::LegendreI => "legendre_I",
            Model::LegendreII => "legendre_II",
            Model::ChebyshevI => "chebyshev_I",
            Model::ChebyshevII => "chebyshev_II",
            Model::LaguerreI => "laguerre_I",
            Model::LaguerreII => "laguerre_II",
            Model::DisturbedHeat => "disturbed_heat",
        }
    }

    pub fn params(self) -> &'static [&'static str] {
        match self {
            Model::BesselI | Model::BesselII => &["nu"],
            Model::AiryI | Model::AiryII => &[],
            Model::HermiteI
            | Model::HermiteII
            | Model::LegendreI
            | Model::LegendreII
            | Model::LaguerreI
            | Model::LaguerreII => &["lam"],
            Model::ChebyshevI | Model::ChebyshevII => &["p"],
            Model::DisturbedHeat => &["a"],
        }
    }

    /// Whether the original equation was divided by a unit factor
    /// `(1 - x^2)` or `(1 - xy)` to reach constant leading coefficients.
    pub fn normalized(self) -> bool {
        matches!(
            self,
            Model::LegendreI | Model::LegendreII | Model::ChebyshevI | Model::ChebyshevII
        )
    }

    /// The equation as usually written, before normalization.
    pub fn equation(self) -> &'static str {
        match self {
            Model::BesselI => "x^2 z_xx + 2xy z_xy + y^2 z_yy + x z_x + y z_y + (x^2 - nu^2) z = 0",
            Model::BesselII => "x^2 z_xx + y^2 z_yy + x z_x + y z_y + (xy - nu^2) z = 0",
            Model::AiryI => "x^2 z_xx + 2xy z_xy + y^2 z_yy - x^3 z = 0",
            Model::AiryII => "x^2 z_xx + 2xy z_xy + y^2 z_yy - x^2 y z = 0",
            Model::HermiteI => "x^2 z_xx + 2xy z_xy + y^2 z_yy - 2x^3 z_x - 2x^2 y z_y + lam x^2 z = 0",
            Model::HermiteII => "x^2 z_xx + 2xy z_xy + y^2 z_yy - 2x^3 z_x - 2y^3 z_y + lam xy z = 0",
            Model::LegendreI => {
                "(1 - x^2)(x^2 z_xx + 2xy z_xy + y^2 z_yy) - 2x^3 z_x - 2x^2 y z_y + lam(lam + 1) x^2 z = 0"
            }
            Model::LegendreII => {
                "(1 - xy)(x^2 z_xx + 2xy z_xy + y^2 z_yy) - 2x^3 z_x - 2y^3 z_y + lam(lam + 1) xy z = 0"
            }
            Model::ChebyshevI => "(1 - x^2)(x^2 z_xx + 2xy z_xy + y^2 z_yy) - x^3 z_x - x^2 y z_y + p^2 x^2 z = 0",
            Model::ChebyshevII => "(1 - xy)(x^2 z_xx + 2xy z_xy + y^2 z_yy) - x^3 z_x - y^3 z_y + p^2 xy z = 0",
            Model::LaguerreI => "x^2 z_xx + 2xy z_xy + y^2 z_yy + (1 - x) x z_x + (1 - x) y z_y + lam x z = 0",
            Model::LaguerreII => "x^2 z_xx + 2xy z_xy + y^2 z_yy + (1 - xy) x z_x + (1 - xy) y z_y + lam xy z = 0",
            Model::DisturbedHeat => "a^2 u^2 z_uu + u (a^2 - uv) z_u - v z_v = 0",
        }
    }

    fn data(self) -> Data {
        let d = |abc, a, b, c| Data { abc, a, b, c };
        match self {
            Model::BesselI => d(PARABOLIC, "1", "1", "x^2 - nu^2"),
            Model::BesselII => d(["1", "0", "1"], "1", "1", "x*y - nu^2"),
            Model::AiryI => d(PARABOLIC, "0", "0", "-x^3"),
            Model::AiryII => d(PARABOLIC, "0", "0", "-x^2*y"),
            Model::HermiteI => d(PARABOLIC, "-2*x^2", "-2*x^2", "lam*x^2"),
            Model::HermiteII => d(PARABOLIC, "-2*x^2", "-2*y^2", "lam*x*y"),
            Model::LegendreI => d(
                PARABOLIC,
                "-2*x^2/(1 - x^2)",
                "-2*x^2/(1 - x^2)",
                "lam*(lam + 1)*x^2/(1 - x^2)",
            ),
            Model::LegendreII => d(
                PARABOLIC,
                "-2*x^2/(1 - x*y)",
                "-2*y^2/(1 - x*y)",
                "lam*(lam + 1)*x*y/(1 - x*y)",
            ),
            Model::ChebyshevI => d(PARABOLIC, "-x^2/(1 - x^2)", "-x^2/(1 - x^2)", "p^2*x^2/(1 - x^2)"),
            Model::ChebyshevII => d(PARABOLIC, "-x^2/(1 - x*y)", "-y^2/(1 - x*y)", "p^2*x*y/(1 - x*y)"),
            Model::LaguerreI => d(PARABOLIC, "1 - x", "1 - x", "lam*x"),
            Model::LaguerreII => d(PARABOLIC, "1 - x*y", "1 - x*y", "lam*x*y"),
            Model::DisturbedHeat => d(["a^2", "0", "0"], "a^2 - x*y", "-1", "0"),
        }
    }

    /// The expressions for `(A, B, C, a, b, c)`.
    pub fn expressions(self) -> [&'static str; 6] {
        let d = self.data();
        [d.abc[0], d.abc[1], d.abc[2], d.a, d.b, d.c]
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Model::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| CatalogError::UnknownModel(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub model: Model,
    pub params: BTreeMap<String, Complex>,
}

impl CatalogEntry {
    pub fn new(model: Model) -> Self {
        CatalogEntry {
            model,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), Complex::new(value, 0.0));
        self
    }

    pub fn with_complex(mut self, name: &str, value: Complex) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn normalized(&self) -> bool {
        self.model.normalized()
    }

    /// Checks the parameter set. `nu` defaults to 0 for the Bessel models.
    fn bound_params(&self) -> Result<HashMap<String, Complex>, CatalogError> {
        let wanted = self.model.params();
        if let Some(extra) = self.params.keys().find(|k| !wanted.contains(&k.as_str())) {
            return Err(CatalogError::UnexpectedParameter {
                model: self.model,
                param: extra.clone(),
            });
        }
        let mut out = HashMap::new();
        for &p in wanted {
            let v = match (self.params.get(p), p) {
                (Some(v), _) => *v,
                (None, "nu") => Complex::default(),
                (None, _) => {
                    return Err(CatalogError::MissingParameter {
                        model: self.model,
                        param: p,
                    })
                }
            };
            out.insert(p.to_string(), v);
        }
        Ok(out)
    }

    fn param(&self, name: &str) -> Complex {
        self.params.get(name).copied().unwrap_or_default()
    }
}

pub fn make_pde(entry: &CatalogEntry, order: u32) -> Result<RegularSingularPDE, CatalogError> {
    if order < 4 {
        return Err(CatalogError::OrderTooSmall(order));
    }
    let params = entry.bound_params()?;
    let d = entry.model.data();
    let constant = |t: &str| -> Result<Complex, CatalogError> { Ok(series_of(t, &params, 0)?.constant_term()) };
    Ok(RegularSingularPDE::new(
        constant(d.abc[0])?,
        constant(d.abc[1])?,
        constant(d.abc[2])?,
        series_of(d.a, &params, order)?,
        series_of(d.b, &params, order)?,
        series_of(d.c, &params, order)?,
    ))
}

/// The indicial conic in its textbook factored form, expanded independently of
/// the operator data.
pub fn documented_conic(entry: &CatalogEntry) -> Result<IndicialConic, CatalogError> {
    entry.bound_params()?;
    let one = Complex::new(1.0, 0.0);
    let z = Complex::default();
    Ok(match entry.model {
        // (r + s)^2 - nu^2
        Model::BesselI => {
            let nu = entry.param("nu");
            IndicialConic::new(one, one * 2.0, one, z, z, -nu * nu)
        }
        // r^2 + s^2 - nu^2
        Model::BesselII => {
            let nu = entry.param("nu");
            IndicialConic::new(one, z, one, z, z, -nu * nu)
        }
        // (r + s)^2
        Model::LaguerreI | Model::LaguerreII => IndicialConic::real(1.0, 2.0, 1.0, 0.0, 0.0, 0.0),
        // a^2 r^2 - s
        Model::DisturbedHeat => {
            let a = entry.param("a");
            IndicialConic::new(a * a, z, z, z, -one, z)
        }
        // (r + s)(r + s - 1)
        _ => IndicialConic::real(1.0, 2.0, 1.0, -1.0, -1.0, 0.0),
    })
}

/// Coefficient `D_Q` from the model's own closed form or bespoke recurrence.
///
/// Product formulas cover every model except Hermite II, Legendre II and
/// Chebyshev II, which use their three-term recurrences in `Q`.
pub fn closed_form_coeff(
    entry: &CatalogEntry,
    r0: Complex,
    s0: Complex,
    q: MultiIndex,
) -> Result<Complex, CatalogError> {
    Ok(closed_form_table(entry, r0, s0, q.norm())?.get(q))
}

/// All closed-form coefficients with `|Q| <= order`.
pub fn closed_form_table(entry: &CatalogEntry, r0: Complex, s0: Complex, order: u32) -> Result<CSeries2, CatalogError> {
    entry.bound_params()?;
    let conic = documented_conic(entry)?;
    let scale = 1.0 + r0.norm_sqr() + s0.norm_sqr();
    if conic.eval(r0, s0).norm() > 1e-9 * scale {
        return Err(CatalogError::OffConic {
            model: entry.model,
            r0,
            s0,
        });
    }
    match entry.model {
        Model::HermiteII | Model::LegendreII | Model::ChebyshevII => three_term_table(entry, r0, s0, order),
        _ => ray_table(entry, r0, s0, order),
    }
}

/// Models whose solution lives on one ray `n * step`.
fn ray_table(entry: &CatalogEntry, r: Complex, s: Complex, order: u32) -> Result<CSeries2, CatalogError> {
    let t = r + s;
    let step = match entry.model {
        Model::BesselI | Model::HermiteI | Model::LegendreI | Model::ChebyshevI => (2, 0),
        Model::BesselII | Model::LaguerreII | Model::DisturbedHeat => (1, 1),
        Model::AiryI => (3, 0),
        Model::AiryII => (2, 1),
        Model::LaguerreI => (1, 0),
        _ => unreachable!("three-term models are handled separately"),
    };
    let one = Complex::new(1.0, 0.0);
    // (numerator, denominator) of D_n / D_{n-1}
    let ratio = |n: f64| -> (Complex, Complex) {
        match entry.model {
            Model::BesselI => {
                let nu = entry.param("nu");
                let u = t + 2.0 * n;
                (-one, u * u - nu * nu)
            }
            Model::BesselII => {
                let nu = entry.param("nu");
                let (u, v) = (r + n, s + n);
                (-one, u * u + v * v - nu * nu)
            }
            Model::AiryI | Model::AiryII => {
                let u = t + 3.0 * n;
                (one, u * (u - 1.0))
            }
            Model::HermiteI => {
                let u = t + 2.0 * n;
                ((u - 2.0) * 2.0 - entry.param("lam"), u * (u - 1.0))
            }
            Model::LegendreI => {
                let (u, lam) = (t + 2.0 * n, entry.param("lam"));
                ((u - 2.0) * (u - 1.0) - lam * (lam + 1.0), u * (u - 1.0))
            }
            Model::ChebyshevI => {
                let (u, p) = (t + 2.0 * n, entry.param("p"));
                ((u - 2.0) * (u - 2.0) - p * p, u * (u - 1.0))
            }
            Model::LaguerreI => {
                let u = t + n;
                (u - 1.0 - entry.param("lam"), u * u)
            }
            Model::LaguerreII => {
                let u = t + 2.0 * n;
                (u - 2.0 - entry.param("lam"), u * u)
            }
            Model::DisturbedHeat => {
                let a = entry.param("a");
                (r + n - 1.0, a * a * (r + n) * (r + n) - (s + n))
            }
            _ => unreachable!(),
        }
    };
    let mut out = CSeries2::one(order);
    let mut d = one;
    let mut n = 1u32;
    while (step.0 + step.1) * n <= order {
        let q = MultiIndex::new(step.0 * n, step.1 * n);
        let (num, den) = ratio(f64::from(n));
        if den.norm() == 0.0 {
            return Err(CatalogError::Resonant(q));
        }
        d = d * num / den;
        out.set(q, d);
        n += 1;
    }
    Ok(out)
}

/// `T(T - 1) d_Q = k (q1 + r - 2) d_{q1-2,q2} + k (q2 + s - 2) d_{q1,q2-2} + g(T) d_{q1-1,q2-1}`
/// with `T = |Q| + r + s`.
fn three_term_table(entry: &CatalogEntry, r: Complex, s: Complex, order: u32) -> Result<CSeries2, CatalogError> {
    let (k, lam_term) = match entry.model {
        Model::HermiteII => (2.0, None),
        Model::LegendreII => {
            let lam = entry.param("lam");
            (2.0, Some(lam * (lam + 1.0)))
        }
        Model::ChebyshevII => {
            let p = entry.param("p");
            (1.0, Some(p * p))
        }
        _ => unreachable!(),
    };
    let mut out = CSeries2::one(order);
    for q in MultiIndex::up_to(order).skip(1) {
        let big_t = r + s + f64::from(q.norm());
        let den = big_t * (big_t - 1.0);
        let mut num = Complex::default();
        if q.q1 >= 2 {
            num += (r + f64::from(q.q1) - 2.0) * k * out.coeff(q.q1 - 2, q.q2);
        }
        if q.q2 >= 2 {
            num += (s + f64::from(q.q2) - 2.0) * k * out.coeff(q.q1, q.q2 - 2);
        }
        if q.q1 >= 1 && q.q2 >= 1 {
            let g = match lam_term {
                None => -entry.param("lam"),
                Some(l) => (big_t - 2.0) * (big_t - 3.0) - l,
            };
            num += g * out.coeff(q.q1 - 1, q.q2 - 1);
        }
        if num.re == 0.0 && num.im == 0.0 {
            continue;
        }
        if den.norm() == 0.0 {
            return Err(CatalogError::Resonant(q));
        }
        out.set(q, num / den);
    }
    Ok(out)
}

/// The aggregated one-variable recurrence `(n^2 - n - 1/2) a_n = (n + 1) a_{n+1}`,
/// `a_0 = 1`, as a series in `x`. Its coefficients grow like `n!`.
pub fn divergent_demo_table(order: u32) -> CSeries2 {
    let mut out = CSeries2::one(order);
    let mut a = 1.0;
    for n in 0..order {
        let nf = f64::from(n);
        a = (nf * nf - nf - 0.5) * a / (nf + 1.0);
        out.set(MultiIndex::new(n + 1, 0), Complex::new(a, 0.0));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecialRelation {
    /// `phi1(x, y) = sqrt(y / x) y2(x)`.
    AiryIVsOde,
    /// `phi2(x, y) = (y / x)^(1/6) y2((x^2 y)^(1/3))`.
    AiryIIVsOde,
}

const RELATION_ORDER: u32 = 60;

/// Second Airy function `y2(t) = t (1 + sum t^{3n} / (3 * 4 * ... * 3n (3n + 1)))`.
pub fn airy_y2(t: f64) -> f64 {
    let t3 = t * t * t;
    let (mut sum, mut term) = (1.0, 1.0);
    for n in 1..200 {
        let m = 3.0 * f64::from(n);
        term *= t3 / (m * (m + 1.0));
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    t * sum
}

/// `|phi(x, y) - relation|` where `phi` is the engine's solution at `(1/2, 1/2)`
/// and the right side is built from the one-variable series. `x, y > 0`.
pub fn special_relation_check(which: SpecialRelation, x: f64, y: f64) -> f64 {
    let model = match which {
        SpecialRelation::AiryIVsOde => Model::AiryI,
        SpecialRelation::AiryIIVsOde => Model::AiryII,
    };
    let pde = make_pde(&CatalogEntry::new(model), RELATION_ORDER).expect("static model data");
    let half = Complex::new(0.5, 0.0);
    let sol = crate::frobenius::solve(&pde, half, half, RELATION_ORDER, 1e-9).expect("(1/2, 1/2) is nonresonant");
    let phi = (x * y).sqrt() * sol.coeffs.eval(Complex::new(x, 0.0), Complex::new(y, 0.0)).re;
    let rhs = match which {
        SpecialRelation::AiryIVsOde => (y / x).sqrt() * airy_y2(x),
        SpecialRelation::AiryIIVsOde => (y / x).powf(1.0 / 6.0) * airy_y2((x * x * y).cbrt()),
    };
    (phi - rhs).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::solve;
    use crate::indicial::{classify, resonance_scan, DiscriminantClass};

    fn c(v: f64) -> Complex {
        Complex::new(v, 0.0)
    }

    #[test]
    fn names_round_trip() {
        for m in Model::ALL {
            assert_eq!(m.name().parse::<Model>().unwrap(), m);
            let j = serde_json::to_string(&m).unwrap();
            assert_eq!(j, format!("\"{}\"", m.name()));
        }
        assert!("bessel_iii".parse::<Model>().is_err());
    }

    #[test]
    fn operator_conic_matches_documented_conic() {
        let entries = [
            CatalogEntry::new(Model::BesselI).with("nu", 0.7),
            CatalogEntry::new(Model::BesselII).with("nu", 1.3),
            CatalogEntry::new(Model::AiryI),
            CatalogEntry::new(Model::AiryII),
            CatalogEntry::new(Model::HermiteI).with("lam", 3.0),
            CatalogEntry::new(Model::HermiteII).with("lam", 3.0),
            CatalogEntry::new(Model::LegendreI).with("lam", 2.5),
            CatalogEntry::new(Model::LegendreII).with("lam", 2.5),
            CatalogEntry::new(Model::ChebyshevI).with("p", 3.0),
            CatalogEntry::new(Model::ChebyshevII).with("p", 3.0),
            CatalogEntry::new(Model::LaguerreI).with("lam", 2.0),
            CatalogEntry::new(Model::LaguerreII).with("lam", 2.0),
            CatalogEntry::new(Model::DisturbedHeat).with("a", 1.5),
        ];
        for e in entries {
            let p = make_pde(&e, 8).unwrap();
            assert_eq!(p.conic(), documented_conic(&e).unwrap(), "{}", e.model);
        }
    }

    #[test]
    fn make_pde_examples() {
        let p = make_pde(&CatalogEntry::new(Model::BesselI), 6).unwrap();
        assert_eq!((p.ca, p.cb, p.cc), (c(1.0), c(2.0), c(1.0)));
        assert_eq!(p.c, CSeries2::monomial(2, 0, c(1.0), 6));

        let p = make_pde(&CatalogEntry::new(Model::LegendreI).with("lam", 2.0), 7).unwrap();
        for k in 1..=3 {
            assert_eq!(p.a.coeff(2 * k, 0), c(-2.0));
            assert_eq!(p.c.coeff(2 * k, 0), c(6.0));
        }

        let p = make_pde(&CatalogEntry::new(Model::DisturbedHeat).with("a", 1.0), 6).unwrap();
        assert_eq!((p.ca, p.cb, p.cc), (c(1.0), c(0.0), c(0.0)));
        assert_eq!(p.a.coeff(1, 1), c(-1.0));
        assert_eq!(p.b, CSeries2::constant(c(-1.0), 6));
        assert!(p.c.is_empty());
        let k = classify(&p.conic()).unwrap();
        assert_eq!(k.discriminant_class, DiscriminantClass::Parabolic);

        assert!(matches!(
            make_pde(&CatalogEntry::new(Model::HermiteI), 6),
            Err(CatalogError::MissingParameter { .. })
        ));
        assert!(matches!(
            make_pde(&CatalogEntry::new(Model::AiryI).with("lam", 1.0), 6),
            Err(CatalogError::UnexpectedParameter { .. })
        ));
        assert!(make_pde(&CatalogEntry::new(Model::AiryI), 3).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let v = closed_form_coeff(
            &CatalogEntry::new(Model::BesselII),
            c(0.0),
            c(0.0),
            MultiIndex::new(3, 3),
        )
        .unwrap();
        assert!((v - c(-1.0 / 288.0)).norm() < 1e-16);
        let v = closed_form_coeff(&CatalogEntry::new(Model::AiryI), c(0.5), c(0.5), MultiIndex::new(3, 0)).unwrap();
        assert!((v - c(1.0 / 12.0)).norm() < 1e-16);
        let v = closed_form_coeff(
            &CatalogEntry::new(Model::HermiteI).with("lam", 10.0),
            c(0.5),
            c(0.5),
            MultiIndex::new(6, 0),
        )
        .unwrap();
        assert_eq!(v, c(0.0));
        assert!(matches!(
            closed_form_coeff(&CatalogEntry::new(Model::AiryI), c(0.2), c(0.2), MultiIndex::new(3, 0)),
            Err(CatalogError::OffConic { .. })
        ));
    }

    #[test]
    fn engine_agrees_with_closed_forms() {
        let half = c(0.5);
        let cases: Vec<(CatalogEntry, Complex, Complex)> = vec![
            (CatalogEntry::new(Model::BesselI), c(0.0), c(0.0)),
            (CatalogEntry::new(Model::BesselI), c(0.3), c(-0.3)),
            (CatalogEntry::new(Model::BesselII), c(0.0), c(0.0)),
            (CatalogEntry::new(Model::AiryI), half, half),
            (CatalogEntry::new(Model::AiryII), c(0.8), c(0.2)),
            (CatalogEntry::new(Model::HermiteI).with("lam", 1.7), half, half),
            (CatalogEntry::new(Model::HermiteII).with("lam", 1.7), half, half),
            (CatalogEntry::new(Model::LegendreI).with("lam", 2.3), half, half),
            (CatalogEntry::new(Model::LegendreII).with("lam", 2.3), half, half),
            (CatalogEntry::new(Model::ChebyshevI).with("p", 0.6), half, half),
            (CatalogEntry::new(Model::ChebyshevII).with("p", 0.6), half, half),
            (CatalogEntry::new(Model::LaguerreI).with("lam", 1.5), c(0.0), c(0.0)),
            (CatalogEntry::new(Model::LaguerreII).with("lam", 1.5), c(0.25), c(-0.25)),
            (
                CatalogEntry::new(Model::DisturbedHeat).with("a", 1.0),
                c(std::f64::consts::FRAC_1_SQRT_2),
                half,
            ),
        ];
        let n = 20;
        for (e, r0, s0) in cases {
            let pde = make_pde(&e, n).unwrap();
            let sol = solve(&pde, r0, s0, n, 1e-9).unwrap_or_else(|err| panic!("{}: {err}", e.model));
            let oracle = closed_form_table(&e, r0, s0, n).unwrap();
            for q in MultiIndex::up_to(n) {
                let (a, b) = (sol.coeffs.get(q), oracle.get(q));
                assert!(
                    (a - b).norm() <= 1e-10 * b.norm().max(1e-300) || (a - b).norm() < 1e-14,
                    "{} at {q}: {a} vs {b}",
                    e.model
                );
            }
        }
    }

    #[test]
    fn bessel_nu_irrational_nonresonant() {
        let nu = 2f64.sqrt();
        let e = CatalogEntry::new(Model::BesselI).with("nu", nu);
        let conic = make_pde(&e, 10).unwrap().conic();
        let rep = resonance_scan(&conic, c(nu), c(0.0), 50, 1e-9).unwrap();
        assert!(rep.is_clean());
    }

    #[test]
    fn divergent_demo_values() {
        let t = divergent_demo_table(4);
        assert_eq!(t.coeff(1, 0), c(-0.5));
        assert_eq!(t.coeff(2, 0), c(0.125));
        // n = 2: (4 - 2 - 1/2) / 3
        assert_eq!(t.coeff(3, 0), c(0.125 * 1.5 / 3.0));
    }

    #[test]
    fn airy_relations() {
        assert!(special_relation_check(SpecialRelation::AiryIVsOde, 0.3, 0.7) < 1e-10);
        assert!(special_relation_check(SpecialRelation::AiryIIVsOde, 0.5, 0.5) < 1e-10);
        assert!(special_relation_check(SpecialRelation::AiryIVsOde, 0.6, 0.6) < 1e-12);
    }
}
