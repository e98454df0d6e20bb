//! Truncated bivariate power series with complex coefficients.
//!
//! A [`CSeries2`] stores every term `c x^q1 y^q2` with `q1 + q2 <= order`
//! in a sparse table. Exact zeros are never stored, so two series with the
//! same order compare equal exactly when their coefficient tables match.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Complex = num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("constant term is zero; the operation needs a unit series")]
    ZeroConstantTerm,
    #[error("non-finite coefficient at ({q1}, {q2})")]
    NonFinite { q1: u32, q2: u32 },
}

/// Exponent pair `Q = (q1, q2)`.
///
/// Ordered by total degree first, then by `q1`. Every layer-by-layer loop in
/// the crate relies on this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub q1: u32,
    pub q2: u32,
}

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex { q1: 0, q2: 0 };

    pub const fn new(q1: u32, q2: u32) -> Self {
        MultiIndex { q1, q2 }
    }

    pub const fn norm(self) -> u32 {
        self.q1 + self.q2
    }

    /// Componentwise `self <= other`.
    pub fn le(self, other: MultiIndex) -> bool {
        self.q1 <= other.q1 && self.q2 <= other.q2
    }

    /// `self - other`, or `None` when a component would go negative.
    pub fn checked_sub(self, other: MultiIndex) -> Option<MultiIndex> {
        Some(MultiIndex::new(
            self.q1.checked_sub(other.q1)?,
            self.q2.checked_sub(other.q2)?,
        ))
    }

    pub fn transpose(self) -> MultiIndex {
        MultiIndex::new(self.q2, self.q1)
    }

    /// All indices of total degree `n`, ascending in `q1`.
    pub fn layer(n: u32) -> impl Iterator<Item = MultiIndex> {
        (0..=n).map(move |q1| MultiIndex::new(q1, n - q1))
    }

    /// All indices with total degree at most `n`, in canonical order.
    pub fn up_to(n: u32) -> impl Iterator<Item = MultiIndex> {
        (0..=n).flat_map(MultiIndex::layer)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.norm(), self.q1).cmp(&(other.norm(), other.q1))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.q1, self.q2)
    }
}

/// Which analytic map [`analytic_transform`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformMode {
    Sqrt,
    Exp,
    AntiderivativeX,
}

#[derive(Clone, PartialEq)]
pub struct CSeries2 {
    order: u32,
    coeffs: BTreeMap<MultiIndex, Complex>,
}

impl fmt::Debug for CSeries2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CSeries2(order={}; ", self.order)?;
        let mut first = true;
        for (q, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)x^{}y^{}", c.re, c.im, q.q1, q.q2)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl CSeries2 {
    pub fn zero(order: u32) -> Self {
        CSeries2 {
            order,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(c: Complex, order: u32) -> Self {
        Self::monomial(0, 0, c, order)
    }

    pub fn one(order: u32) -> Self {
        Self::constant(Complex::new(1.0, 0.0), order)
    }

    pub fn monomial(q1: u32, q2: u32, c: Complex, order: u32) -> Self {
        let mut s = Self::zero(order);
        s.set(MultiIndex::new(q1, q2), c);
        s
    }

    pub fn x(order: u32) -> Self {
        Self::monomial(1, 0, Complex::new(1.0, 0.0), order)
    }

    pub fn y(order: u32) -> Self {
        Self::monomial(0, 1, Complex::new(1.0, 0.0), order)
    }

    /// Builds a series from `(index, value)` pairs. Repeated indices add up;
    /// terms above `order` are dropped.
    pub fn from_terms<I>(order: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Complex)>,
    {
        let mut s = Self::zero(order);
        for (q, c) in terms {
            let v = s.get(q) + c;
            s.set(q, v);
        }
        s
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, q: MultiIndex) -> Complex {
        self.coeffs.get(&q).copied().unwrap_or_default()
    }

    pub fn coeff(&self, q1: u32, q2: u32) -> Complex {
        self.get(MultiIndex::new(q1, q2))
    }

    /// Stores `c` at `q`. Exact zeros remove the entry; indices above the
    /// order are ignored.
    pub fn set(&mut self, q: MultiIndex, c: Complex) {
        if q.norm() > self.order {
            return;
        }
        if c.re == 0.0 && c.im == 0.0 {
            self.coeffs.remove(&q);
        } else {
            self.coeffs.insert(q, c);
        }
    }

    pub fn constant_term(&self) -> Complex {
        self.get(MultiIndex::ZERO)
    }

    /// Nonzero terms in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, Complex)> + '_ {
        self.coeffs.iter().map(|(q, c)| (*q, *c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.values().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// First non-finite coefficient, if any.
    pub fn check_finite(&self) -> Result<(), SeriesError> {
        match self
            .coeffs
            .iter()
            .find(|(_, c)| !(c.re.is_finite() && c.im.is_finite()))
        {
            Some((q, _)) => Err(SeriesError::NonFinite { q1: q.q1, q2: q.q2 }),
            None => Ok(()),
        }
    }

    /// Highest total degree carrying a nonzero coefficient (0 for the zero series).
    pub fn max_degree(&self) -> u32 {
        self.coeffs.keys().map(|q| q.norm()).max().unwrap_or(0)
    }

    pub fn truncate(&self, order: u32) -> Self {
        CSeries2 {
            order,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(q, _)| q.norm() <= order)
                .map(|(q, c)| (*q, *c))
                .collect(),
        }
    }

    pub fn scale(&self, k: Complex) -> Self {
        let mut out = Self::zero(self.order);
        for (q, c) in self.iter() {
            out.set(q, c * k);
        }
        out
    }

    /// Swaps the roles of `x` and `y`.
    pub fn transpose(&self) -> Self {
        Self::from_terms(self.order, self.iter().map(|(q, c)| (q.transpose(), c)))
    }

    /// True when no term involves `y`.
    pub fn is_univariate_x(&self) -> bool {
        self.coeffs.keys().all(|q| q.q2 == 0)
    }

    pub fn is_univariate_y(&self) -> bool {
        self.coeffs.keys().all(|q| q.q1 == 0)
    }

    /// Formal partial derivative in `x`. The result keeps the same order; the
    /// top layer is unknown after differentiation and is left at zero.
    pub fn derivative_x(&self) -> Self {
        let mut out = Self::zero(self.order);
        for (q, c) in self.iter() {
            if q.q1 > 0 && q.norm() <= self.order {
                out.set(MultiIndex::new(q.q1 - 1, q.q2), c * f64::from(q.q1));
            }
        }
        out
    }

    /// Multiplies by `x^k1 y^k2`, dropping terms that leave the order.
    pub fn shift(&self, k1: u32, k2: u32) -> Self {
        Self::from_terms(
            self.order,
            self.iter().map(|(q, c)| (MultiIndex::new(q.q1 + k1, q.q2 + k2), c)),
        )
    }

    /// Divides by `x`, dropping terms with `q1 = 0`.
    pub fn unshift_x(&self) -> Self {
        Self::from_terms(
            self.order,
            self.iter()
                .filter(|(q, _)| q.q1 > 0)
                .map(|(q, c)| (MultiIndex::new(q.q1 - 1, q.q2), c)),
        )
    }

    /// Plain evaluation of the truncated polynomial.
    pub fn eval(&self, x: Complex, y: Complex) -> Complex {
        self.iter().map(|(q, c)| c * x.powu(q.q1) * y.powu(q.q2)).sum()
    }

    /// The `[q1, q2, re, im]` quadruples in canonical order.
    pub fn to_quads(&self) -> Vec<(u32, u32, f64, f64)> {
        self.iter().map(|(q, c)| (q.q1, q.q2, c.re, c.im)).collect()
    }

    pub fn from_quads(order: u32, quads: &[(u32, u32, f64, f64)]) -> Self {
        Self::from_terms(
            order,
            quads
                .iter()
                .map(|&(q1, q2, re, im)| (MultiIndex::new(q1, q2), Complex::new(re, im))),
        )
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Sum of `|c_Q|` over the layer `|Q| = n`.
    pub fn layer_sum(&self, n: u32) -> f64 {
        MultiIndex::layer(n).map(|q| self.get(q).norm()).sum()
    }
}

impl Serialize for CSeries2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let quads: Vec<(u32, u32, f64, f64)> = self.to_quads();
        quads.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CSeries2 {
    /// The order is taken as the largest stored degree; callers that need a
    /// different order should [`CSeries2::truncate`] or rebuild.
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let quads: Vec<(u32, u32, f64, f64)> = Vec::deserialize(deserializer)?;
        let order = quads.iter().map(|q| q.0 + q.1).max().unwrap_or(0);
        let s = CSeries2::from_quads(order, &quads);
        s.check_finite().map_err(D::Error::custom)?;
        Ok(s)
    }
}

fn combine(f: &CSeries2, g: &CSeries2, op: impl Fn(Complex, Complex) -> Complex) -> CSeries2 {
    let order = f.order.min(g.order);
    let mut out = CSeries2::zero(order);
    for q in f.coeffs.keys().chain(g.coeffs.keys()) {
        if q.norm() <= order {
            out.set(*q, op(f.get(*q), g.get(*q)));
        }
    }
    out
}

impl Add for &CSeries2 {
    type Output = CSeries2;
    fn add(self, rhs: &CSeries2) -> CSeries2 {
        combine(self, rhs, |a, b| a + b)
    }
}

impl Sub for &CSeries2 {
    type Output = CSeries2;
    fn sub(self, rhs: &CSeries2) -> CSeries2 {
        combine(self, rhs, |a, b| a - b)
    }
}

impl Neg for &CSeries2 {
    type Output = CSeries2;
    fn neg(self) -> CSeries2 {
        self.scale(Complex::new(-1.0, 0.0))
    }
}

impl Mul for &CSeries2 {
    type Output = CSeries2;
    fn mul(self, rhs: &CSeries2) -> CSeries2 {
        cauchy_mul(self, rhs)
    }
}

/// Full truncated Cauchy product; the result has the smaller of the two orders.
pub fn cauchy_mul(f: &CSeries2, g: &CSeries2) -> CSeries2 {
    let order = f.order.min(g.order);
    let mut acc: BTreeMap<MultiIndex, Complex> = BTreeMap::new();
    for (p, a) in f.iter() {
        if p.norm() > order {
            continue;
        }
        for (q, b) in g.iter() {
            if p.norm() + q.norm() > order {
                continue;
            }
            let k = MultiIndex::new(p.q1 + q.q1, p.q2 + q.q2);
            *acc.entry(k).or_default() += a * b;
        }
    }
    CSeries2::from_terms(order, acc)
}

/// Coefficients of `g` solving `g_Q = (rhs_Q - sum_{0 < P <= Q} f_P g_{Q-P}) / f_0`
/// layer by layer, with `rhs` supplied per index.
fn solve_unit_convolution(
    f: &CSeries2,
    mut rhs: impl FnMut(MultiIndex, &BTreeMap<MultiIndex, Complex>) -> Complex,
    lead: Complex,
) -> CSeries2 {
    let order = f.order;
    let tail: Vec<(MultiIndex, Complex)> = f.iter().filter(|(q, _)| q.norm() > 0).collect();
    let mut g: BTreeMap<MultiIndex, Complex> = BTreeMap::new();
    for q in MultiIndex::up_to(order) {
        let mut acc = rhs(q, &g);
        for &(p, fp) in &tail {
            if let Some(rest) = q.checked_sub(p) {
                if let Some(gr) = g.get(&rest) {
                    acc -= fp * gr;
                }
            }
        }
        let v = acc / lead;
        if v.re != 0.0 || v.im != 0.0 {
            g.insert(q, v);
        }
    }
    CSeries2::from_terms(order, g)
}

/// `1/f` up to the order of `f`.
pub fn reciprocal(f: &CSeries2) -> Result<CSeries2, SeriesError> {
    let f0 = f.constant_term();
    if f0.norm() == 0.0 {
        return Err(SeriesError::ZeroConstantTerm);
    }
    Ok(solve_unit_convolution(
        f,
        |q, _| {
            if q == MultiIndex::ZERO {
                Complex::new(1.0, 0.0)
            } else {
                Complex::default()
            }
        },
        f0,
    ))
}

/// Principal square root, determined by `g_0 = sqrt(f_0)` and `g*g = f`.
pub fn sqrt(f: &CSeries2) -> Result<CSeries2, SeriesError> {
    let f0 = f.constant_term();
    if f0.norm() == 0.0 {
        return Err(SeriesError::ZeroConstantTerm);
    }
    let g0 = f0.sqrt();
    let order = f.order;
    let mut g: BTreeMap<MultiIndex, Complex> = BTreeMap::new();
    g.insert(MultiIndex::ZERO, g0);
    for q in MultiIndex::up_to(order).skip(1) {
        // f_Q = 2 g_0 g_Q + sum over P, Q-P both nonzero of g_P g_{Q-P}
        let mut acc = f.get(q);
        for (p, gp) in g.iter() {
            if *p == MultiIndex::ZERO {
                continue;
            }
            if let Some(rest) = q.checked_sub(*p) {
                if rest != MultiIndex::ZERO {
                    if let Some(gr) = g.get(&rest) {
                        acc -= gp * gr;
                    }
                }
            }
        }
        let v = acc / (g0 * 2.0);
        if v.re != 0.0 || v.im != 0.0 {
            g.insert(q, v);
        }
    }
    Ok(CSeries2::from_terms(order, g))
}

/// Formal exponential.
///
/// With `h = f - f_0` and `g = exp(h)`, the degree operator `E = x d/dx + y d/dy`
/// gives `|Q| g_Q = sum_{0 < P <= Q} |P| h_P g_{Q-P}`.
pub fn exp(f: &CSeries2) -> CSeries2 {
    let order = f.order;
    let h: Vec<(MultiIndex, Complex)> = f.iter().filter(|(q, _)| q.norm() > 0).collect();
    let mut g: BTreeMap<MultiIndex, Complex> = BTreeMap::new();
    g.insert(MultiIndex::ZERO, Complex::new(1.0, 0.0));
    for q in MultiIndex::up_to(order).skip(1) {
        let mut acc = Complex::default();
        for &(p, hp) in &h {
            if let Some(rest) = q.checked_sub(p) {
                if let Some(gr) = g.get(&rest) {
                    acc += hp * gr * f64::from(p.norm());
                }
            }
        }
        let v = acc / f64::from(q.norm());
        if v.re != 0.0 || v.im != 0.0 {
            g.insert(q, v);
        }
    }
    CSeries2::from_terms(order, g).scale(f.constant_term().exp())
}

/// Term-wise integral in `x` from 0; terms pushed above the order are dropped.
pub fn antiderivative_x(f: &CSeries2) -> CSeries2 {
    CSeries2::from_terms(
        f.order,
        f.iter()
            .map(|(q, c)| (MultiIndex::new(q.q1 + 1, q.q2), c / f64::from(q.q1 + 1))),
    )
}

pub fn analytic_transform(f: &CSeries2, mode: TransformMode) -> Result<CSeries2, SeriesError> {
    match mode {
        TransformMode::Sqrt => sqrt(f),
        TransformMode::Exp => Ok(exp(f)),
        TransformMode::AntiderivativeX => Ok(antiderivative_x(f)),
    }
}

/// Integer power by repeated squaring.
pub fn powu(f: &CSeries2, k: u32) -> CSeries2 {
    let mut result = CSeries2::one(f.order);
    let mut base = f.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result = cauchy_mul(&result, &base);
        }
        k >>= 1;
        if k > 0 {
            base = cauchy_mul(&base, &base);
        }
    }
    result
}
