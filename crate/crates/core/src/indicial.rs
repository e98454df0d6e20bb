//! Indicial conics `P(r, s) = A r^2 + B rs + C s^2 + D r + E s + F`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frobenius::RegularSingularPDE;
use crate::multiseries::{Complex, MultiIndex};

pub const DEFAULT_RESONANCE_TOL: f64 = 1e-9;
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IndicialError {
    #[error("conic has complex coefficients; classification needs real input")]
    ComplexCoefficients,
    #[error("no s satisfies P(r, s) = 0 for this r")]
    NoSolution,
    #[error("base point is not on the conic: |P(r0, s0)| = {residual:e}")]
    BasePointNotOnConic { residual: f64 },
    #[error("scan bound must be at least 1")]
    EmptyScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicialConic {
    pub ca: Complex,
    pub cb: Complex,
    pub cc: Complex,
    pub cd: Complex,
    pub ce: Complex,
    pub cf: Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscriminantClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegenerateKind {
    None,
    TwoCrossingLines,
    ParallelOrRepeatedLines,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConicClass {
    pub discriminant_class: DiscriminantClass,
    pub degenerate: bool,
    pub degenerate_kind: DegenerateKind,
    pub discriminant: f64,
    pub determinant: f64,
}

/// Roots of `P(r, s) = 0` in `s` for a fixed `r`.
#[derive(Debug, Clone, PartialEq)]
pub enum SRoots {
    /// Zero, one or two roots; a double root is listed twice.
    Finite(Vec<Complex>),
    /// `P(r, s)` vanishes for every `s`.
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceHit {
    pub q: MultiIndex,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub r0: Complex,
    pub s0: Complex,
    pub bound: u32,
    pub tol: f64,
    pub hits: Vec<ResonanceHit>,
    pub nonresonant_up_to: u32,
}

impl ResonanceReport {
    pub fn is_clean(&self) -> bool {
        self.hits.is_empty()
    }

    pub fn hit_indices(&self) -> Vec<MultiIndex> {
        self.hits.iter().map(|h| h.q).collect()
    }
}

fn re(v: f64) -> Complex {
    Complex::new(v, 0.0)
}

impl IndicialConic {
    pub fn new(ca: Complex, cb: Complex, cc: Complex, cd: Complex, ce: Complex, cf: Complex) -> Self {
        IndicialConic { ca, cb, cc, cd, ce, cf }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Self {
        Self::new(re(a), re(b), re(c), re(d), re(e), re(f))
    }

    pub fn coefficients(&self) -> [Complex; 6] {
        [self.ca, self.cb, self.cc, self.cd, self.ce, self.cf]
    }

    pub fn eval(&self, r: Complex, s: Complex) -> Complex {
        self.ca * r * r + self.cb * r * s + self.cc * s * s + self.cd * r + self.ce * s + self.cf
    }

    /// `P(r0 + q1, s0 + q2)`.
    pub fn eval_shift(&self, r0: Complex, s0: Complex, q: MultiIndex) -> Complex {
        self.eval(r0 + f64::from(q.q1), s0 + f64::from(q.q2))
    }

    pub fn scaled(&self, k: Complex) -> Self {
        let c = self.coefficients().map(|v| v * k);
        Self::new(c[0], c[1], c[2], c[3], c[4], c[5])
    }

    /// Exchanges the roles of `r` and `s`.
    pub fn swapped(&self) -> Self {
        Self::new(self.cc, self.cb, self.ca, self.ce, self.cd, self.cf)
    }

    fn max_abs(&self) -> f64 {
        self.coefficients().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

pub fn indicial_of(pde: &RegularSingularPDE) -> IndicialConic {
    IndicialConic::new(
        pde.ca,
        pde.cb,
        pde.cc,
        pde.a.constant_term() - pde.ca,
        pde.b.constant_term() - pde.cc,
        pde.c.constant_term(),
    )
}

pub fn classify(conic: &IndicialConic) -> Result<ConicClass, IndicialError> {
    classify_with_tol(conic, DEFAULT_DEGENERACY_TOL)
}

/// `tol` is relative: the determinant counts as zero when
/// `|det| <= tol * max|coef|^3`.
pub fn classify_with_tol(conic: &IndicialConic, tol: f64) -> Result<ConicClass, IndicialError> {
    let m = conic.max_abs();
    if conic.coefficients().iter().any(|c| c.im.abs() > 1e-12 * m.max(1e-300)) {
        return Err(IndicialError::ComplexCoefficients);
    }
    let [a, b, c, d, e, f] = conic.coefficients().map(|v| v.re);
    let disc = b * b - 4.0 * a * c;
    let quad_scale = a.abs().max(b.abs()).max(c.abs());
    let disc_zero = disc.abs() <= 1e-12 * quad_scale * quad_scale;
    let discriminant_class = if disc_zero {
        DiscriminantClass::Parabolic
    } else if disc < 0.0 {
        DiscriminantClass::Elliptic
    } else {
        DiscriminantClass::Hyperbolic
    };
    let (h, g, k) = (b / 2.0, d / 2.0, e / 2.0);
    let det = a * (c * f - k * k) - h * (h * f - k * g) + g * (h * k - c * g);
    let degenerate = det.abs() <= tol * m * m * m;
    // rank 2 quadratic part: a pair of lines through one point (complex
    // conjugate when elliptic); rank <= 1: parallel, repeated, or a line
    // paired with the line at infinity
    let degenerate_kind = match (degenerate, disc_zero) {
        (false, _) => DegenerateKind::None,
        (true, false) => DegenerateKind::TwoCrossingLines,
        (true, true) => DegenerateKind::ParallelOrRepeatedLines,
    };
    Ok(ConicClass {
        discriminant_class,
        degenerate,
        degenerate_kind,
        discriminant: disc,
        determinant: det,
    })
}

/// Roots of `C s^2 + (B r + E) s + (A r^2 + D r + F) = 0`.
pub fn solve_for_s(conic: &IndicialConic, r: Complex) -> Result<SRoots, IndicialError> {
    let qa = conic.cc;
    let qb = conic.cb * r + conic.ce;
    let qc = conic.ca * r * r + conic.cd * r + conic.cf;
    let zero = Complex::default();
    if qa == zero {
        if qb == zero {
            return if qc == zero {
                Ok(SRoots::All)
            } else {
                Err(IndicialError::NoSolution)
            };
        }
        return Ok(SRoots::Finite(vec![-qc / qb]));
    }
    let root = (qb * qb - qa * qc * 4.0).sqrt();
    // pick the sign that avoids cancellation
    let sign = if (qb.conj() * root).re >= 0.0 { 1.0 } else { -1.0 };
    let q = -(qb + root * sign) * 0.5;
    if q == zero {
        return Ok(SRoots::Finite(vec![zero, zero]));
    }
    let mut roots = vec![q / qa, qc / q];
    roots.sort_by(|u, v| u.re.total_cmp(&v.re).then(u.im.total_cmp(&v.im)));
    Ok(SRoots::Finite(roots))
}

pub fn resonance_scan(
    conic: &IndicialConic,
    r0: Complex,
    s0: Complex,
    bound: u32,
    tol: f64,
) -> Result<ResonanceReport, IndicialError> {
    if bound < 1 {
        return Err(IndicialError::EmptyScan);
    }
    let base = conic.eval(r0, s0).norm();
    if base >= tol {
        return Err(IndicialError::BasePointNotOnConic { residual: base });
    }
    let hits: Vec<ResonanceHit> = MultiIndex::up_to(bound)
        .skip(1)
        .filter_map(|q| {
            let magnitude = conic.eval_shift(r0, s0, q).norm();
            (magnitude < tol).then_some(ResonanceHit { q, magnitude })
        })
        .collect();
    let nonresonant_up_to = hits.first().map_or(bound, |h| h.q.norm() - 1);
    Ok(ResonanceReport {
        r0,
        s0,
        bound,
        tol,
        hits,
        nonresonant_up_to,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::euler::EulerPDE;
    use proptest::prelude::*;

    fn c(v: f64) -> Complex {
        Complex::new(v, 0.0)
    }

    #[test]
    fn euler_conic_and_point() {
        let p = EulerPDE::real(4.0, 0.0, 9.0, -36.0, 45.0, 100.0).conic();
        assert_eq!(p, IndicialConic::real(4.0, 0.0, 9.0, -40.0, 36.0, 100.0));
        assert_eq!(p.eval(c(8.0), c(-2.0)), c(0.0));
        let laplace = EulerPDE::real(1.0, 0.0, 1.0, 1.0, 1.0, 0.0).conic();
        assert_eq!(laplace, IndicialConic::real(1.0, 0.0, 1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn classification_examples() {
        let item1 = EulerPDE::real(4.0, 0.0, 9.0, -36.0, 45.0, 100.0).conic();
        let k = classify(&item1).unwrap();
        assert_eq!(k.discriminant_class, DiscriminantClass::Elliptic);
        assert!(!k.degenerate);

        let item8 = EulerPDE::real(1.0, 2.0, 1.0, 1.0, 1.0, -1.0).conic();
        let k = classify(&item8).unwrap();
        assert_eq!(k.discriminant_class, DiscriminantClass::Parabolic);
        assert!(k.degenerate);
        assert_eq!(k.degenerate_kind, DegenerateKind::ParallelOrRepeatedLines);

        let item5 = EulerPDE::real(1.0, 0.0, -2.0, 7.0, 2.0, 9.0).conic();
        let k = classify(&item5).unwrap();
        assert_eq!(k.discriminant_class, DiscriminantClass::Hyperbolic);
        assert!(!k.degenerate);

        // (r - s)(r + s) = 0
        let k = classify(&IndicialConic::real(1.0, 0.0, -1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(k.degenerate_kind, DegenerateKind::TwoCrossingLines);

        let complex = IndicialConic::new(Complex::new(1.0, 1.0), c(0.0), c(1.0), c(0.0), c(0.0), c(-1.0));
        assert_eq!(classify(&complex), Err(IndicialError::ComplexCoefficients));
    }

    #[test]
    fn solve_for_s_examples() {
        let heat = IndicialConic::real(1.0, 0.0, 0.0, 0.0, -1.0, 0.0);
        assert_eq!(solve_for_s(&heat, c(3.0)).unwrap(), SRoots::Finite(vec![c(9.0)]));

        let laplace = IndicialConic::real(1.0, 0.0, 1.0, 0.0, 0.0, 0.0);
        match solve_for_s(&laplace, c(2.0)).unwrap() {
            SRoots::Finite(v) => {
                assert_eq!(v.len(), 2);
                assert!((v[0] - Complex::new(0.0, -2.0)).norm() < 1e-15);
                assert!((v[1] - Complex::new(0.0, 2.0)).norm() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            solve_for_s(&laplace, c(0.0)).unwrap(),
            SRoots::Finite(vec![c(0.0), c(0.0)])
        );

        // r^2 - 1 with no s dependence
        let flat = IndicialConic::real(1.0, 0.0, 0.0, 0.0, 0.0, -1.0);
        assert_eq!(solve_for_s(&flat, c(1.0)).unwrap(), SRoots::All);
        assert_eq!(solve_for_s(&flat, c(2.0)), Err(IndicialError::NoSolution));
    }

    #[test]
    fn resonance_examples() {
        let bessel = IndicialConic::real(1.0, 2.0, 1.0, 0.0, 0.0, 0.0);
        let rep = resonance_scan(&bessel, c(0.0), c(0.0), 50, DEFAULT_RESONANCE_TOL).unwrap();
        assert!(rep.is_clean());
        assert_eq!(rep.nonresonant_up_to, 50);

        let airy = IndicialConic::real(1.0, 2.0, 1.0, -1.0, -1.0, 0.0);
        let rep = resonance_scan(&airy, c(0.0), c(0.0), 50, DEFAULT_RESONANCE_TOL).unwrap();
        assert_eq!(rep.hit_indices(), vec![MultiIndex::new(0, 1), MultiIndex::new(1, 0)]);
        assert_eq!(rep.nonresonant_up_to, 0);

        let rep = resonance_scan(&airy, c(0.5), c(0.5), 50, DEFAULT_RESONANCE_TOL).unwrap();
        assert!(rep.is_clean());

        assert!(matches!(
            resonance_scan(&airy, c(0.3), c(0.3), 5, DEFAULT_RESONANCE_TOL),
            Err(IndicialError::BasePointNotOnConic { .. })
        ));
    }

    fn arb_real_conic() -> impl Strategy<Value = IndicialConic> {
        proptest::collection::vec(-6i32..=6, 6).prop_map(|v| {
            IndicialConic::real(
                f64::from(v[0]),
                f64::from(v[1]),
                f64::from(v[2]),
                f64::from(v[3]),
                f64::from(v[4]),
                f64::from(v[5]),
            )
        })
    }

    proptest! {
        #[test]
        fn classification_symmetric_in_r_and_s(p in arb_real_conic()) {
            let a = classify(&p).unwrap();
            let b = classify(&p.swapped()).unwrap();
            prop_assert_eq!(a.discriminant_class, b.discriminant_class);
            prop_assert_eq!(a.degenerate, b.degenerate);
            prop_assert_eq!(a.degenerate_kind, b.degenerate_kind);
        }

        #[test]
        fn classification_scale_invariant(p in arb_real_conic(), k in prop_oneof![-50.0f64..-0.02, 0.02f64..50.0]) {
            let a = classify(&p).unwrap();
            let b = classify(&p.scaled(c(k))).unwrap();
            prop_assert_eq!(a.discriminant_class, b.discriminant_class);
            prop_assert_eq!(a.degenerate, b.degenerate);
        }

        #[test]
        fn hits_monotone_in_tol_and_bound(s0 in -3i32..3, n in 2u32..20) {
            // (r+s)(r+s-1) with integer base points has many resonances
            let p = IndicialConic::real(1.0, 2.0, 1.0, -1.0, -1.0, 0.0);
            let r0 = c(f64::from(-s0));
            let s0 = c(f64::from(s0));
            let small = resonance_scan(&p, r0, s0, n, 1e-9).unwrap();
            let big_tol = resonance_scan(&p, r0, s0, n, 1e-3).unwrap();
            let big_n = resonance_scan(&p, r0, s0, n + 5, 1e-9).unwrap();
            for h in &small.hits {
                prop_assert!(big_tol.hit_indices().contains(&h.q));
                prop_assert!(big_n.hit_indices().contains(&h.q));
            }
        }

        #[test]
        fn hits_scale_invariant(k in 0.5f64..20.0, n in 1u32..15) {
            let p = IndicialConic::real(1.0, 2.0, 1.0, -1.0, -1.0, 0.0);
            let a = resonance_scan(&p, c(0.0), c(0.0), n, 1e-9).unwrap();
            let b = resonance_scan(&p.scaled(c(k)), c(0.0), c(0.0), n, 1e-9).unwrap();
            prop_assert_eq!(a.hit_indices(), b.hit_indices());
        }
    }
}
