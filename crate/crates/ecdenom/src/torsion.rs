//! Torsion subgroup computation via a short-model transform and the
//! Nagell-Lutz criterion.
//!
//! The general model is first carried to Y^2 = X^3 + AX + B with
//! A = -27 c4, B = -54 c6 under (X, Y) = (36x + 3 b2, 108(2y + a1 x + a3)).
//! Torsion candidates on that model are O, integral points with Y = 0, and
//! integral points whose Y^2 divides the short-model discriminant. A
//! candidate survives iff some multiple k <= 12 hits O (Mazur's bound), which
//! also filters the false positives the divisibility condition admits.

use num_traits::{One, Signed, Zero};

use crate::arith::{self, Integer, Natural, Rational};
use crate::curve::{rational_i64, Curve, Point};
use crate::error::Error;

/// Y^2 = X^3 + AX + B together with the maps to and from the source model.
#[derive(Debug, Clone)]
pub struct ShortModel {
    a: Integer,
    b: Integer,
    // source-model data needed by the point maps
    b2: Rational,
    a1: Rational,
    a3: Rational,
}

impl ShortModel {
    pub fn a(&self) -> &Integer {
        &self.a
    }

    pub fn b(&self) -> &Integer {
        &self.b
    }

    /// The short model as a curve of its own.
    pub fn curve(&self) -> Curve {
        Curve::new(
            Integer::zero(),
            Integer::zero(),
            Integer::zero(),
            self.a.clone(),
            self.b.clone(),
        )
        .expect("short model of a nonsingular curve is nonsingular")
    }

    /// (x, y) -> (36x + 3 b2, 108(2y + a1 x + a3)).
    pub fn forward(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x, y } => {
                let big_x = rational_i64(36) * x + rational_i64(3) * &self.b2;
                let big_y = rational_i64(108) * ((y + y) + &self.a1 * x + &self.a3);
                Point::Affine { x: big_x, y: big_y }
            }
        }
    }

    /// Inverse of `forward`.
    pub fn inverse(&self, p: &Point) -> Point {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine { x: bx, y: by } => {
                let x = (bx - rational_i64(3) * &self.b2) / rational_i64(36);
                let y = (by / rational_i64(108) - &self.a1 * &x - &self.a3) / rational_i64(2);
                Point::Affine { x, y }
            }
        }
    }
}

/// Transform to the short model; `forward`/`inverse` carry points across.
pub fn to_short(curve: &Curve) -> ShortModel {
    let k = Integer::from;
    ShortModel {
        a: k(-27) * curve.c4(),
        b: k(-54) * curve.c6(),
        b2: Rational::from_integer(curve.b_invariants()[0].clone()),
        a1: Rational::from_integer(curve.a_invariants()[0].clone()),
        a3: Rational::from_integer(curve.a_invariants()[2].clone()),
    }
}

/// Group structure allowed by Mazur's classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TorsionStructure {
    /// Z/n with n in {1..10, 12}.
    Cyclic(u32),
    /// Z/2 x Z/2m with m in {1..4}.
    TwoByTwoM(u32),
}

impl TorsionStructure {
    pub fn order(&self) -> u32 {
        match self {
            TorsionStructure::Cyclic(n) => *n,
            TorsionStructure::TwoByTwoM(m) => 4 * m,
        }
    }
}

impl std::fmt::Display for TorsionStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TorsionStructure::Cyclic(1) => write!(f, "trivial"),
            TorsionStructure::Cyclic(n) => write!(f, "Z/{n}"),
            TorsionStructure::TwoByTwoM(m) => write!(f, "Z/2 x Z/{}", 2 * m),
        }
    }
}

/// The full torsion subgroup: every point of finite order, O included,
/// sorted canonically (O first, then by coordinates).
#[derive(Debug, Clone)]
pub struct TorsionGroup {
    pub points: Vec<Point>,
    pub structure: TorsionStructure,
}

impl TorsionGroup {
    /// The one-element group, for curves with no rational torsion or when a
    /// caller wants to skip torsion translates entirely.
    pub fn trivial() -> TorsionGroup {
        TorsionGroup {
            points: vec![Point::Infinity],
            structure: TorsionStructure::Cyclic(1),
        }
    }

    pub fn order(&self) -> u32 {
        self.points.len() as u32
    }

    /// Index of -points[i] under the canonical ordering.
    pub fn negation_index(&self, curve: &Curve, index: usize) -> usize {
        let neg = curve.negate_unchecked(&self.points[index]);
        self.points
            .iter()
            .position(|p| *p == neg)
            .expect("torsion group is closed under negation")
    }
}

/// Order of `p` under repeated addition: the least k <= cap with kP = O,
/// or None when no such multiple exists.
fn order_up_to(curve: &Curve, p: &Point, cap: u32) -> Option<u32> {
    let mut acc = p.clone();
    for k in 1..=cap {
        if acc.is_infinity() {
            return Some(k);
        }
        acc = curve.add_unchecked(&acc, p);
    }
    None
}

/// Integral roots of the monic cubic X^3 + a X + c, found by rational-root
/// search over the divisors of the constant term.
fn integral_cubic_roots(a: &Integer, c: &Integer) -> Result<Vec<Integer>, Error> {
    let eval = |x: &Integer| x * x * x + a * x + c;
    let mut roots = Vec::new();
    if c.is_zero() {
        roots.push(Integer::zero());
        // remaining quadratic X^2 + a = 0
        if !a.is_positive() {
            let (s, exact) = arith::isqrt_exact((-a).magnitude());
            if exact {
                let s = Integer::from(s);
                if !s.is_zero() {
                    roots.push(s.clone());
                    roots.push(-s);
                }
            }
        }
        return Ok(roots);
    }
    for d in divisors(c.magnitude())? {
        let d = Integer::from(d);
        for cand in [d.clone(), -d] {
            if eval(&cand).is_zero() && !roots.contains(&cand) {
                roots.push(cand);
            }
        }
    }
    Ok(roots)
}

/// All positive divisors from the prime factorization (unsorted).
fn divisors(n: &Natural) -> Result<Vec<Natural>, Error> {
    let mut out = vec![Natural::one()];
    for (p, e) in arith::factor(n)? {
        let base = out.clone();
        let mut power = Natural::one();
        for _ in 0..e {
            power = &power * &p;
            out.extend(base.iter().map(|d| d * &power));
        }
    }
    Ok(out)
}

/// Compute the torsion subgroup by Nagell-Lutz on the short model.
///
/// Errors only when factoring the short-model discriminant (or a candidate
/// constant term) exhausts its budget.
pub fn torsion_subgroup(curve: &Curve) -> Result<TorsionGroup, Error> {
    let short = to_short(curve);
    let short_curve = short.curve();

    // Y candidates: 0 together with every Y whose square divides the
    // short-model discriminant.
    let disc = short_curve.discriminant().magnitude().clone();
    let mut y_square_part = Natural::one();
    for (p, e) in arith::factor(&disc)? {
        y_square_part *= p.pow(e / 2);
    }
    let mut y_candidates = divisors(&y_square_part)?;
    y_candidates.push(Natural::zero());
    y_candidates.sort();
    y_candidates.dedup();

    let mut kept: Vec<Point> = vec![Point::Infinity];
    for y in &y_candidates {
        let y = Integer::from(y.clone());
        let c = short.b() - &y * &y;
        for x in integral_cubic_roots(short.a(), &c)? {
            for yy in [y.clone(), -&y] {
                let cand = Point::affine(
                    Rational::from_integer(x.clone()),
                    Rational::from_integer(yy),
                );
                debug_assert!(short_curve.on_curve(&cand));
                if order_up_to(&short_curve, &cand, 12).is_some() {
                    let back = short.inverse(&cand);
                    debug_assert!(curve.on_curve(&back));
                    if !kept.contains(&back) {
                        kept.push(back);
                    }
                }
            }
        }
    }
    kept.sort();

    let structure = classify(curve, &kept)?;
    Ok(TorsionGroup {
        points: kept,
        structure,
    })
}

/// Identify the group structure from element orders; sanity-checked against
/// Mazur's classification.
fn classify(curve: &Curve, points: &[Point]) -> Result<TorsionStructure, Error> {
    let n = points.len() as u32;
    let mut max_order = 1;
    let mut two_torsion = 0;
    for p in points {
        if p.is_infinity() {
            continue;
        }
        let order = order_up_to(curve, p, 16).ok_or_else(|| {
            Error::Internal("torsion candidate of order > 16 survived".into())
        })?;
        max_order = max_order.max(order);
        if order == 2 {
            two_torsion += 1;
        }
        if n % order != 0 {
            return Err(Error::Internal(format!(
                "element order {order} does not divide group order {n}"
            )));
        }
    }
    let structure = if max_order == n {
        TorsionStructure::Cyclic(n)
    } else if two_torsion == 3 && max_order == n / 2 {
        TorsionStructure::TwoByTwoM(n / 4)
    } else {
        return Err(Error::Internal(format!(
            "torsion of order {n} with exponent {max_order} fits no admissible structure"
        )));
    };
    let admissible = match structure {
        TorsionStructure::Cyclic(k) => (1..=10).contains(&k) || k == 12,
        TorsionStructure::TwoByTwoM(m) => (1..=4).contains(&m),
    };
    if !admissible {
        return Err(Error::Internal(format!(
            "structure {structure} is outside Mazur's classification"
        )));
    }
    Ok(structure)
}
