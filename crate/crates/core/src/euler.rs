//! Euler PDEs `A x^2 z_xx + B xy z_xy + C y^2 z_yy + D x z_x + E y z_y + F z = 0`.

use std::f64::consts::PI;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::indicial::IndicialConic;
use crate::multiseries::Complex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EulerError {
    #[error("real solution pair is only defined for x > 0 and y > 0")]
    NonPositiveArgument,
    #[error("family constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("classical solution parameters must be positive (n >= 1, L > 0, a > 0)")]
    BadParameters,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerPDE {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
    pub e: Complex,
    pub f: Complex,
}

impl EulerPDE {
    pub fn new(t: [Complex; 6]) -> Self {
        EulerPDE {
            a: t[0],
            b: t[1],
            c: t[2],
            d: t[3],
            e: t[4],
            f: t[5],
        }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64, e: f64, f: f64) -> Self {
        Self::new([a, b, c, d, e, f].map(|v| Complex::new(v, 0.0)))
    }

    pub fn to_array(&self) -> [Complex; 6] {
        [self.a, self.b, self.c, self.d, self.e, self.f]
    }

    /// `P(r, s) = A r^2 + B rs + C s^2 + (D - A) r + (E - C) s + F`.
    pub fn conic(&self) -> IndicialConic {
        IndicialConic::new(self.a, self.b, self.c, self.d - self.a, self.e - self.c, self.f)
    }

    pub fn monomial_check(&self, r: Complex, s: Complex, tol: f64) -> bool {
        self.conic().eval(r, s).norm() < tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordDirection {
    /// Euler operator in `x, y` to the constant-coefficient operator in `u, v`.
    ToConstant,
    /// Constant-coefficient operator back to Euler form.
    ToEuler,
}

/// Coefficient map induced by `x = e^u, y = e^v`. Only `D` and `E` change.
pub fn euler_coords(t: [Complex; 6], direction: CoordDirection) -> [Complex; 6] {
    let [a, b, c, d, e, f] = t;
    match direction {
        CoordDirection::ToConstant => [a, b, c, d - a, e - c, f],
        CoordDirection::ToEuler => [a, b, c, d + a, e + c, f],
    }
}

/// `(Re, Im)` of `x^r y^s` for positive `x, y`, i.e. two real solutions.
pub fn real_monomial_pair(r: Complex, s: Complex, x: f64, y: f64) -> Result<(f64, f64), EulerError> {
    if !(x > 0.0 && y > 0.0) {
        return Err(EulerError::NonPositiveArgument);
    }
    let (lx, ly) = (x.ln(), y.ln());
    let modulus = (r.re * lx + s.re * ly).exp();
    let phase = r.im * lx + s.im * ly;
    Ok((modulus * phase.cos(), modulus * phase.sin()))
}

/// Integer-coefficient families whose conics carry integral points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum Family {
    /// `A^2 x^2 z_xx + C^2 y^2 z_yy + 3A^2 x z_x + 3C^2 y z_y + (C^2 + A^2 - A^2 C^2) z`, `AC > 0`.
    Elliptic { a: i64, c: i64 },
    /// `A x^2 z_xx + B xy z_xy + C y^2 z_yy + 3A x z_x + (C + B) y z_y + A z`, `B^2 = 4AC`.
    Parabolic { a: i64, b: i64, c: i64 },
    /// `A x^2 z_xx + B xy z_xy + A x z_x + B y z_y - A z`, `B != 0`.
    Hyperbolic { a: i64, b: i64 },
}

/// `{ base + t * direction : t in Z }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeLine {
    pub base: (i64, i64),
    pub direction: (i64, i64),
}

impl LatticeLine {
    pub fn point(&self, t: i64) -> (i64, i64) {
        (self.base.0 + t * self.direction.0, self.base.1 + t * self.direction.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralPoints {
    pub points: Vec<(i64, i64)>,
    pub lines: Vec<LatticeLine>,
}

impl Family {
    fn check(&self) -> Result<(), EulerError> {
        match *self {
            Family::Elliptic { a, c } => {
                if i128::from(a) * i128::from(c) <= 0 {
                    return Err(EulerError::ConstraintViolated("elliptic family needs AC > 0".into()));
                }
            }
            Family::Parabolic { a, b, c } => {
                if i128::from(b) * i128::from(b) != 4 * i128::from(a) * i128::from(c) {
                    return Err(EulerError::ConstraintViolated(
                        "parabolic family needs B^2 = 4AC".into(),
                    ));
                }
                if a == 0 && c == 0 {
                    return Err(EulerError::ConstraintViolated(
                        "parabolic family with A = B = C = 0 has no conic".into(),
                    ));
                }
            }
            Family::Hyperbolic { b, .. } => {
                if b == 0 {
                    return Err(EulerError::ConstraintViolated("hyperbolic family needs B != 0".into()));
                }
            }
        }
        Ok(())
    }

    pub fn euler_pde(&self) -> EulerPDE {
        match *self {
            Family::Elliptic { a, c } => {
                let (a2, c2) = ((a * a) as f64, (c * c) as f64);
                EulerPDE::real(a2, 0.0, c2, 3.0 * a2, 3.0 * c2, c2 + a2 - a2 * c2)
            }
            Family::Parabolic { a, b, c } => {
                let (a, b, c) = (a as f64, b as f64, c as f64);
                EulerPDE::real(a, b, c, 3.0 * a, c + b, a)
            }
            Family::Hyperbolic { a, b } => {
                let (a, b) = (a as f64, b as f64);
                EulerPDE::real(a, b, 0.0, a, b, -a)
            }
        }
    }

    /// The family's indicial polynomial evaluated in exact integer arithmetic.
    pub fn conic_value(&self, r: i64, s: i64) -> i128 {
        let (r, s) = (i128::from(r), i128::from(s));
        match *self {
            Family::Elliptic { a, c } => {
                let (a2, c2) = (i128::from(a).pow(2), i128::from(c).pow(2));
                a2 * r * r + c2 * s * s + 2 * a2 * r + 2 * c2 * s + c2 + a2 - a2 * c2
            }
            Family::Parabolic { a, b, c } => {
                let (a, b, c) = (i128::from(a), i128::from(b), i128::from(c));
                a * r * r + b * r * s + c * s * s + 2 * a * r + b * s + a
            }
            Family::Hyperbolic { a, b } => {
                let (a, b) = (i128::from(a), i128::from(b));
                a * r * r + b * r * s + b * s - a
            }
        }
    }
}

/// All integer solutions of `p u + q v = rhs`, assuming `gcd(p, q)` divides `rhs`.
fn linear_solutions(p: i64, q: i64, rhs: i64) -> LatticeLine {
    let eg = p.extended_gcd(&q);
    let h = eg.gcd;
    let k = rhs / h;
    LatticeLine {
        base: (eg.x * k, eg.y * k),
        direction: (q / h, -p / h),
    }
}

pub fn integral_points(family: Family) -> Result<IntegralPoints, EulerError> {
    family.check()?;
    Ok(match family {
        Family::Elliptic { a, c } => IntegralPoints {
            points: vec![(-1 + c, -1), (-1 - c, -1), (-1, -1 + a), (-1, -1 - a)],
            lines: vec![],
        },
        Family::Parabolic { a, b, .. } => {
            if a == 0 {
                // B = 0 too, so the conic is C s^2 = 0
                IntegralPoints {
                    points: vec![],
                    lines: vec![LatticeLine {
                        base: (0, 0),
                        direction: (1, 0),
                    }],
                }
            } else {
                IntegralPoints {
                    points: vec![],
                    lines: vec![linear_solutions(2 * a, b, -2 * a)],
                }
            }
        }
        Family::Hyperbolic { a, b } => IntegralPoints {
            points: vec![],
            lines: vec![
                LatticeLine {
                    base: (-1, 0),
                    direction: (0, 1),
                },
                linear_solutions(a, b, a),
            ],
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalKind {
    Heat,
    WaveSinSin,
    WaveSinCos,
    LaplaceGrow,
    LaplaceDecay,
}

/// Value and the partial derivatives the three classical PDEs need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub z: f64,
    pub z_xx: f64,
    pub z_y: f64,
    pub z_yy: f64,
}

/// Separated solution vanishing at `x = 0` and `x = L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalSolution {
    pub kind: ClassicalKind,
    pub n: u32,
    pub length: f64,
    pub a: f64,
}

pub fn classical_solution(kind: ClassicalKind, n: u32, length: f64, a: f64) -> Result<ClassicalSolution, EulerError> {
    if n < 1 || !(length > 0.0) || !(a > 0.0) {
        return Err(EulerError::BadParameters);
    }
    Ok(ClassicalSolution { kind, n, length, a })
}

/// `sin(pi t)`, exactly zero at integer `t` so the boundary conditions hold
/// without the rounding of `pi`.
fn sin_pi(t: f64) -> f64 {
    let r = t - 2.0 * (t / 2.0).round();
    if r == 0.0 || r.abs() == 1.0 {
        0.0
    } else {
        (PI * r).sin()
    }
}

impl ClassicalSolution {
    fn k(&self) -> f64 {
        f64::from(self.n) * PI / self.length
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.jet(x, y).z
    }

    pub fn jet(&self, x: f64, y: f64) -> Jet {
        let k = self.k();
        let (sx, a) = (sin_pi(f64::from(self.n) * x / self.length), self.a);
        match self.kind {
            ClassicalKind::Heat => {
                let t = (-a * a * k * k * y).exp();
                let z = t * sx;
                Jet {
                    z,
                    z_xx: -k * k * z,
                    z_y: -a * a * k * k * z,
                    z_yy: a.powi(4) * k.powi(4) * z,
                }
            }
            ClassicalKind::WaveSinSin | ClassicalKind::WaveSinCos => {
                let w = k * a;
                let (ty, dty) = if self.kind == ClassicalKind::WaveSinSin {
                    ((w * y).sin(), w * (w * y).cos())
                } else {
                    ((w * y).cos(), -w * (w * y).sin())
                };
                let z = sx * ty;
                Jet {
                    z,
                    z_xx: -k * k * z,
                    z_y: sx * dty,
                    z_yy: -w * w * z,
                }
            }
            ClassicalKind::LaplaceGrow | ClassicalKind::LaplaceDecay => {
                let sign = if self.kind == ClassicalKind::LaplaceGrow {
                    1.0
                } else {
                    -1.0
                };
                let z = (sign * k * y).exp() * sx;
                Jet {
                    z,
                    z_xx: -k * k * z,
                    z_y: sign * k * z,
                    z_yy: k * k * z,
                }
            }
        }
    }

    /// Constant-coefficient operator `(A, B, C, D, E, F)` the family solves.
    pub fn operator(&self) -> [f64; 6] {
        let a2 = self.a * self.a;
        match self.kind {
            ClassicalKind::Heat => [a2, 0.0, 0.0, 0.0, -1.0, 0.0],
            ClassicalKind::WaveSinSin | ClassicalKind::WaveSinCos => [a2, 0.0, -1.0, 0.0, 0.0, 0.0],
            ClassicalKind::LaplaceGrow | ClassicalKind::LaplaceDecay => [1.0, 0.0, 1.0, 0.0, 0.0, 0.0],
        }
    }

    /// Residual of the PDE from the analytic derivatives. No `z_x` or `z_xy`
    /// terms appear in these operators.
    pub fn pde_residual(&self, x: f64, y: f64) -> f64 {
        let [a, _, c, _, e, f] = self.operator();
        let j = self.jet(x, y);
        a * j.z_xx + c * j.z_yy + e * j.z_y + f * j.z
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indicial::{classify, solve_for_s, SRoots};
    use proptest::prelude::*;

    fn c(v: f64) -> Complex {
        Complex::new(v, 0.0)
    }

    #[test]
    fn monomial_checks() {
        let a: f64 = 2.0;
        let heat = EulerPDE::real(a * a, 0.0, 0.0, a * a, -1.0, 0.0);
        assert!(heat.monomial_check(c(1.5), c(a * a * 1.5 * 1.5), 1e-12));
        let a: f64 = 3.0;
        let wave = EulerPDE::real(a * a, 0.0, -1.0, a * a, -1.0, 0.0);
        assert!(wave.monomial_check(c(-2.0), c(a * -2.0), 1e-12));
        let pure = EulerPDE::real(1.0, 2.0, 3.0, 1.0, 3.0, 0.0);
        assert!(pure.monomial_check(c(0.0), c(0.0), 1e-12));
    }

    #[test]
    fn real_pairs_match_complex_exponential() {
        assert_eq!(real_monomial_pair(c(2.0), c(-1.0), 3.0, 2.0).unwrap(), (4.5, 0.0));
        let (u1, u2) = real_monomial_pair(Complex::new(0.0, 1.0), c(0.0), std::f64::consts::E, 7.0).unwrap();
        assert!((u1 - 1f64.cos()).abs() < 1e-15 && (u2 - 1f64.sin()).abs() < 1e-15);
        let (u1, u2) = real_monomial_pair(Complex::new(1.0, 1.0), c(0.0), 2.0, 1.0).unwrap();
        let l2 = 2f64.ln();
        assert!((u1 - 2.0 * l2.cos()).abs() < 1e-15 && (u2 - 2.0 * l2.sin()).abs() < 1e-15);
        assert_eq!(
            real_monomial_pair(c(1.0), c(1.0), 0.0, 1.0),
            Err(EulerError::NonPositiveArgument)
        );
    }

    #[test]
    fn euler_coordinate_examples() {
        let a2 = c(4.0);
        let z = c(0.0);
        let heat = [a2, z, z, z, c(-1.0), z];
        assert_eq!(euler_coords(heat, CoordDirection::ToEuler), [a2, z, z, a2, c(-1.0), z]);
        let wave = [a2, z, c(-1.0), z, z, z];
        assert_eq!(
            euler_coords(wave, CoordDirection::ToEuler),
            [a2, z, c(-1.0), a2, c(-1.0), z]
        );
        let laplace = [c(1.0), z, c(1.0), z, z, z];
        assert_eq!(
            euler_coords(laplace, CoordDirection::ToEuler),
            [c(1.0), z, c(1.0), c(1.0), c(1.0), z]
        );
    }

    #[test]
    fn integral_point_examples() {
        let e = integral_points(Family::Elliptic { a: 1, c: 1 }).unwrap();
        let mut pts = e.points.clone();
        pts.sort();
        assert_eq!(pts, vec![(-2, -1), (-1, -2), (-1, 0), (0, -1)]);
        for (r, s) in pts {
            assert_eq!((r + 1) * (r + 1) + (s + 1) * (s + 1), 1);
        }

        let f = Family::Parabolic { a: 1, b: 2, c: 1 };
        let p = integral_points(f).unwrap();
        let line = p.lines[0];
        assert_eq!(line.direction.0 * 2 + line.direction.1 * 2, 0);
        for t in -5..=5 {
            let (r, s) = line.point(t);
            assert_eq!((r + s + 1) * (r + s + 1), 0);
            assert_eq!(f.conic_value(r, s), 0);
        }

        let f = Family::Hyperbolic { a: 2, b: 1 };
        let h = integral_points(f).unwrap();
        assert_eq!(
            h.lines[0],
            LatticeLine {
                base: (-1, 0),
                direction: (0, 1)
            }
        );
        for t in -5..=5 {
            for l in &h.lines {
                let (r, s) = l.point(t);
                assert_eq!(2 * r * r + r * s + s - 2, 0);
            }
        }
        assert_eq!(f.conic_value(1, 0), 0);
        assert_eq!(f.conic_value(0, 2), 0);

        assert!(matches!(
            integral_points(Family::Parabolic { a: 1, b: 3, c: 1 }),
            Err(EulerError::ConstraintViolated(_))
        ));
        assert!(integral_points(Family::Elliptic { a: 1, c: -2 }).is_err());
        assert!(integral_points(Family::Hyperbolic { a: 1, b: 0 }).is_err());
    }

    #[test]
    fn family_pde_conic_matches_integer_conic() {
        let fams = [
            Family::Elliptic { a: 3, c: 2 },
            Family::Parabolic { a: 2, b: -4, c: 2 },
            Family::Hyperbolic { a: -3, b: 5 },
        ];
        for f in fams {
            let p = f.euler_pde().conic();
            for r in -3..=3 {
                for s in -3..=3 {
                    let v = p.eval(c(r as f64), c(s as f64));
                    assert_eq!(v, c(f.conic_value(r, s) as f64), "{f:?} at ({r},{s})");
                }
            }
        }
    }

    #[test]
    fn classical_examples() {
        let w = classical_solution(ClassicalKind::Heat, 1, PI, 1.0).unwrap();
        for y in [0.1, 1.0, 2.5] {
            assert!((w.eval(0.7, y) - (-y).exp() * 0.7f64.sin()).abs() < 1e-15);
            assert!(w.eval(0.0, y).abs() < 1e-15);
            assert!(w.eval(PI, y).abs() < 1e-15);
        }
        let u = classical_solution(ClassicalKind::WaveSinSin, 2, 1.0, 1.0).unwrap();
        assert!((u.eval(0.3, 0.2) - (2.0 * PI * 0.3).sin() * (2.0 * PI * 0.2).sin()).abs() < 1e-15);
        let v = classical_solution(ClassicalKind::LaplaceDecay, 1, PI, 1.0).unwrap();
        assert!((v.eval(1.1, 0.4) - (-0.4f64).exp() * 1.1f64.sin()).abs() < 1e-15);
        assert!(classical_solution(ClassicalKind::Heat, 0, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn coordinate_round_trip(v in proptest::collection::vec((-50i32..50, -50i32..50), 6)) {
            let t: Vec<Complex> = v.iter().map(|&(a, b)| Complex::new(f64::from(a) / 4.0, f64::from(b) / 8.0)).collect();
            let t: [Complex; 6] = t.try_into().unwrap();
            let there = euler_coords(t, CoordDirection::ToConstant);
            prop_assert_eq!(euler_coords(there, CoordDirection::ToEuler), t);
            let back = euler_coords(t, CoordDirection::ToEuler);
            prop_assert_eq!(euler_coords(back, CoordDirection::ToConstant), t);
            let disc = |u: [Complex; 6]| u[1] * u[1] - u[0] * u[2] * 4.0;
            prop_assert_eq!(disc(there), disc(t));
        }

        #[test]
        fn classification_survives_coordinates(v in proptest::collection::vec(-9i32..9, 6)) {
            let p = EulerPDE::real(f64::from(v[0]), f64::from(v[1]), f64::from(v[2]), f64::from(v[3]), f64::from(v[4]), f64::from(v[5]));
            let moved = EulerPDE::new(euler_coords(p.to_array(), CoordDirection::ToEuler));
            prop_assert_eq!(
                classify(&p.conic()).unwrap().discriminant_class,
                classify(&moved.conic()).unwrap().discriminant_class
            );
        }

        #[test]
        fn conic_points_give_monomial_solutions(v in proptest::collection::vec(-9i32..9, 6), r in -4i32..4) {
            let p = EulerPDE::real(f64::from(v[0]), f64::from(v[1]), f64::from(v[2]), f64::from(v[3]), f64::from(v[4]), f64::from(v[5]));
            let r = c(f64::from(r) / 2.0);
            if let Ok(SRoots::Finite(roots)) = solve_for_s(&p.conic(), r) {
                for s in roots {
                    let scale = 1.0 + s.norm() * s.norm() + r.norm() * r.norm();
                    prop_assert!(p.monomial_check(r, s, 1e-9 * 100.0 * scale));
                }
            }
        }
    }
}
