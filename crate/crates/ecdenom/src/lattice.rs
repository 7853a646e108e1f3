//! Enumeration of all points P = n.P + S with z(P) <= Z from a user-supplied
//! Mordell-Weil basis.
//!
//! Integer vectors n are visited in expanding max-norm shells. Each nonzero n
//! in the half-space (first nonzero component positive) lies on a unique ray
//! k * d with d primitive, and points along a ray are produced by one
//! addition per step instead of a fresh scalar multiple, which is where the
//! running time goes for deep shells. The other half-space is mirrored for
//! free via z(-P) = z(P).
//!
//! Termination is heuristic: denominators are not monotone along a ray
//! (on 37a1, z(15Q) = 314 but z(16Q) = 65), so enumeration stops only after
//! 1 + extra_shells consecutive shells emit nothing. The stopping shell and
//! the smallest observed log z(P) / |n|^2 are reported so callers can audit
//! the margin against the quadratic growth lower bound.

use num_traits::One;
use rayon::prelude::*;

use crate::arith::{self, Natural};
use crate::curve::{Curve, DenomTriple, Point};
use crate::error::Error;
use crate::torsion::TorsionGroup;

/// A curve with free generators of its Mordell-Weil group and its torsion
/// subgroup. The generators are user-supplied and asserted, not proven, to
/// generate the free part.
#[derive(Debug, Clone)]
pub struct MwBasis {
    curve: Curve,
    generators: Vec<Point>,
    torsion: TorsionGroup,
}

impl MwBasis {
    /// Validate and build: every generator must lie on the curve, differ
    /// from O, and have infinite order (no multiple k <= 12 may hit O).
    pub fn new(curve: Curve, generators: Vec<Point>, torsion: TorsionGroup) -> Result<MwBasis, Error> {
        for (index, g) in generators.iter().enumerate() {
            if !curve.on_curve(g) {
                return Err(Error::GeneratorNotOnCurve { index });
            }
            if g.is_infinity() {
                return Err(Error::TorsionGenerator { index, order: 1 });
            }
            let mut acc = g.clone();
            for k in 1..=12u32 {
                if acc.is_infinity() {
                    return Err(Error::TorsionGenerator { index, order: k });
                }
                acc = curve.add_unchecked(&acc, g);
            }
        }
        Ok(MwBasis {
            curve,
            generators,
            torsion,
        })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn generators(&self) -> &[Point] {
        &self.generators
    }

    pub fn torsion(&self) -> &TorsionGroup {
        &self.torsion
    }

    /// n . P = n_1 P_1 + ... + n_r P_r by scalar multiples.
    pub fn combination(&self, nvec: &[i64]) -> Point {
        assert_eq!(nvec.len(), self.rank(), "coefficient count must equal rank");
        let mut acc = Point::Infinity;
        for (n, g) in nvec.iter().zip(&self.generators) {
            if *n != 0 {
                let part = self.curve.scalar_mul_unchecked(*n, g);
                acc = self.curve.add_unchecked(&acc, &part);
            }
        }
        acc
    }
}

/// One enumerated point: its lattice coordinates, torsion translate, and
/// denominator data. log_z is the natural log of z (0 when z = 1).
#[derive(Debug, Clone)]
pub struct EnumRecord {
    pub nvec: Vec<i64>,
    pub torsion_index: usize,
    pub triple: DenomTriple,
    pub log_z: f64,
}

/// Result of an enumeration, with the audit data for the stopping heuristic.
#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Sorted by (nvec, torsion_index).
    pub records: Vec<EnumRecord>,
    /// Number of shells examined, the empty trailing ones included.
    pub shells_visited: u64,
    /// Max-norm of the last shell examined.
    pub stop_shell: u64,
    /// Smallest observed log z / |n|^2 over emitted records with z > 1,
    /// an empirical stand-in for the growth constant c.
    pub c_hat: Option<f64>,
}

/// Every (n, S) with z(n.P + S) <= z_cap, plus mirror records, in canonical
/// order. Stops after 1 + extra_shells consecutive empty shells (shell 0,
/// which holds only the torsion translates, never counts as empty).
pub fn enumerate_up_to(
    basis: &MwBasis,
    z_cap: &Natural,
    extra_shells: u64,
) -> Result<Enumeration, Error> {
    let r = basis.rank();
    let torsion = basis.torsion();
    if r == 0 && torsion.order() == 1 {
        return Err(Error::EmptyBasis);
    }
    let curve = basis.curve();
    let neg_index: Vec<usize> = (0..torsion.points.len())
        .map(|i| torsion.negation_index(curve, i))
        .collect();

    let mut records: Vec<EnumRecord> = Vec::new();

    // Shell 0: pure torsion translates, no mirroring (S and -S both occur).
    for (ti, s) in torsion.points.iter().enumerate() {
        if s.is_infinity() {
            continue; // O itself is never emitted
        }
        let triple = curve.denom_form(s)?;
        if triple.z <= *z_cap {
            let log_z = arith::ln(&triple.z);
            records.push(EnumRecord {
                nvec: vec![0; r],
                torsion_index: ti,
                triple,
                log_z,
            });
        }
    }
    let mut shells_visited = 1u64;
    let mut stop_shell = 0u64;

    if r > 0 {
        let mut rays: Vec<Ray> = Vec::new();
        let mut consecutive_empty = 0u64;
        let mut shell = 0u64;
        loop {
            shell += 1;
            shells_visited += 1;
            for dir in primitive_directions(r, shell) {
                let base = basis.combination(&dir);
                rays.push(Ray {
                    norm: shell,
                    direction: dir,
                    current: base.clone(),
                    base,
                    k: 1,
                });
            }
            // Advance every ray whose next multiple lands in this shell and
            // collect its emissions. Rays are independent work units.
            let emitted: Vec<Vec<EnumRecord>> = rays
                .par_iter_mut()
                .filter(|ray| shell % ray.norm == 0)
                .map(|ray| ray.advance_to(shell, curve, torsion, &neg_index, z_cap))
                .collect::<Result<_, Error>>()?;
            let mut any = false;
            for batch in emitted {
                any |= !batch.is_empty();
                records.extend(batch);
            }
            if any {
                consecutive_empty = 0;
            } else {
                consecutive_empty += 1;
                if consecutive_empty > extra_shells {
                    stop_shell = shell;
                    break;
                }
            }
        }
    }

    records.sort_by(|a, b| {
        a.nvec
            .cmp(&b.nvec)
            .then_with(|| a.torsion_index.cmp(&b.torsion_index))
    });

    let mut c_hat = f64::INFINITY;
    for rec in &records {
        let norm = rec.nvec.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        if rec.log_z > 0.0 && norm > 0 {
            c_hat = c_hat.min(rec.log_z / (norm * norm) as f64);
        }
    }
    let c_hat = c_hat.is_finite().then_some(c_hat);

    Ok(Enumeration {
        records,
        shells_visited,
        stop_shell,
        c_hat,
    })
}

/// Per-ray incremental state: current = k * base, one addition per advance.
struct Ray {
    norm: u64,
    direction: Vec<i64>,
    base: Point,
    current: Point,
    k: u64,
}

impl Ray {
    fn advance_to(
        &mut self,
        shell: u64,
        curve: &Curve,
        torsion: &TorsionGroup,
        neg_index: &[usize],
        z_cap: &Natural,
    ) -> Result<Vec<EnumRecord>, Error> {
        let k = shell / self.norm;
        if k > self.k {
            debug_assert_eq!(k, self.k + 1, "shells visit each ray consecutively");
            self.current = curve.add_unchecked(&self.current, &self.base);
            self.k = k;
        }
        let nvec: Vec<i64> = self.direction.iter().map(|d| d * k as i64).collect();
        let mirror_nvec: Vec<i64> = nvec.iter().map(|v| -v).collect();
        let mut out = Vec::new();
        for (ti, s) in torsion.points.iter().enumerate() {
            let point = if s.is_infinity() {
                self.current.clone()
            } else {
                curve.add_unchecked(&self.current, s)
            };
            if point.is_infinity() {
                // n.P + S = O would mean the generators are not independent
                // of torsion; the basis is user-asserted, so just skip it.
                continue;
            }
            let triple = curve.denom_form(&point)?;
            if triple.z <= *z_cap {
                let log_z = arith::ln(&triple.z);
                // mirror: -(n.P + S) = (-n).P + (-S), same z
                out.push(EnumRecord {
                    nvec: mirror_nvec.clone(),
                    torsion_index: neg_index[ti],
                    triple: mirror_triple(curve, &triple),
                    log_z,
                });
                out.push(EnumRecord {
                    nvec: nvec.clone(),
                    torsion_index: ti,
                    triple,
                    log_z,
                });
            }
        }
        Ok(out)
    }
}

/// The triple of -P from the triple of P without re-reducing: z and x are
/// unchanged, y(-P) = -y - a1 x z - a3 z^3.
fn mirror_triple(curve: &Curve, triple: &DenomTriple) -> DenomTriple {
    let [a1, _, a3, _, _] = curve.a_invariants();
    let z = crate::arith::Integer::from(triple.z.clone());
    let z3 = &z * &z * &z;
    DenomTriple {
        x: triple.x.clone(),
        y: -&triple.y - a1 * &triple.x * &z - a3 * &z3,
        z: triple.z.clone(),
    }
}

/// Primitive lattice directions of exact max-norm `norm` with positive first
/// nonzero component.
fn primitive_directions(rank: usize, norm: u64) -> Vec<Vec<i64>> {
    let m = norm as i64;
    let mut out = Vec::new();
    let mut current = vec![0i64; rank];
    fill_directions(rank, m, 0, false, &mut current, &mut out);
    out
}

fn fill_directions(
    rank: usize,
    m: i64,
    depth: usize,
    seen_nonzero: bool,
    current: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    if depth == rank {
        if current.iter().any(|v| v.abs() == m) && is_primitive(current) {
            out.push(current.clone());
        }
        return;
    }
    // first nonzero component must be positive: until one is placed, only
    // 0..=m are allowed
    let lo = if seen_nonzero { -m } else { 0 };
    for v in lo..=m {
        current[depth] = v;
        fill_directions(rank, m, depth + 1, seen_nonzero || v != 0, current, out);
    }
    current[depth] = 0;
}

fn is_primitive(v: &[i64]) -> bool {
    let mut g = 0u64;
    for &c in v {
        g = num_integer::gcd(g, c.unsigned_abs());
    }
    g == 1
}

/// Points k * (direction . P) for k = 1..=max_steps, each obtained from the
/// previous by a single addition.
///
/// Panics if `direction` is the zero vector or has the wrong length.
pub fn ray_walk(basis: &MwBasis, direction: &[i64], max_steps: u64) -> Vec<(u64, Point)> {
    assert!(
        direction.iter().any(|&v| v != 0),
        "ray direction must be nonzero"
    );
    let base = basis.combination(direction);
    let curve = basis.curve();
    let mut out = Vec::with_capacity(max_steps as usize);
    let mut current = base.clone();
    for k in 1..=max_steps {
        out.push((k, current.clone()));
        if k < max_steps {
            current = curve.add_unchecked(&current, &base);
        }
    }
    out
}

/// Empirical growth-rate estimates from log z(nQ) against n^2.
///
/// The slope is the least-squares fit through the origin, so it always lies
/// between the extreme per-sample ratios.
#[derive(Debug, Clone, Copy)]
pub struct GrowthFit {
    /// Minimum of log z(nQ) / n^2 over the sample (estimate of c).
    pub c_lower: f64,
    /// Maximum of log z(nQ) / n^2 over the sample (estimate of C).
    pub c_upper: f64,
    /// Least-squares slope of log z(nQ) against n^2, through the origin.
    pub slope: f64,
    pub n_min: u64,
    pub n_max: u64,
    /// Number of usable samples (multiples with z > 1).
    pub samples: usize,
}

/// Fit growth constants over n in [n_min, n_max] for one generator.
/// Integral multiples (z = 1) carry no information and are skipped; fewer
/// than 3 usable samples is an error.
pub fn fit_growth(
    basis: &MwBasis,
    generator_index: usize,
    n_min: u64,
    n_max: u64,
) -> Result<GrowthFit, Error> {
    if generator_index >= basis.rank() {
        return Err(Error::Parse(format!(
            "generator index {generator_index} out of range (rank {})",
            basis.rank()
        )));
    }
    if n_min < 2 || n_max < n_min {
        return Err(Error::Parse(format!(
            "invalid sample range [{n_min}, {n_max}]"
        )));
    }
    let q = &basis.generators()[generator_index];
    let zs = basis.curve().denominator_sequence(q, n_max)?;
    let mut c_lower = f64::INFINITY;
    let mut c_upper = f64::NEG_INFINITY;
    let mut sum_xy = 0.0;
    let mut sum_xx = 0.0;
    let mut samples = 0usize;
    for n in n_min..=n_max {
        let z = &zs[(n - 1) as usize];
        if z.is_one() {
            continue;
        }
        let y = arith::ln(z);
        let x = (n * n) as f64;
        c_lower = c_lower.min(y / x);
        c_upper = c_upper.max(y / x);
        sum_xy += x * y;
        sum_xx += x * x;
        samples += 1;
    }
    if samples < 3 {
        return Err(Error::InsufficientData);
    }
    Ok(GrowthFit {
        c_lower,
        c_upper,
        slope: sum_xy / sum_xx,
        n_min,
        n_max,
        samples,
    })
}

trait IsOneValue {
    fn is_one_value(&self) -> bool;
}

impl IsOneValue for Natural {
    fn is_one_value(&self) -> bool {
        use num_traits::One;
        self.is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torsion::torsion_subgroup;

    fn e37_basis() -> MwBasis {
        let curve = Curve::from_small([0, 0, 1, -1, 0]).unwrap();
        let torsion = torsion_subgroup(&curve).unwrap();
        MwBasis::new(curve, vec![Point::from_integers(0, 0)], torsion).unwrap()
    }

    fn nat(v: u64) -> Natural {
        Natural::from(v)
    }

    #[test]
    fn basis_rejects_bad_generators() {
        let curve = Curve::from_small([0, 0, 1, -1, 0]).unwrap();
        let t = TorsionGroup::trivial();
        assert!(matches!(
            MwBasis::new(curve.clone(), vec![Point::from_integers(1, 1)], t.clone()),
            Err(Error::GeneratorNotOnCurve { index: 0 })
        ));
        assert!(matches!(
            MwBasis::new(curve.clone(), vec![Point::Infinity], t.clone()),
            Err(Error::TorsionGenerator { .. })
        ));
        // torsion point as generator
        let c6 = Curve::from_small([0, 0, 0, 0, 1]).unwrap();
        assert!(matches!(
            MwBasis::new(c6, vec![Point::from_integers(2, 3)], TorsionGroup::trivial()),
            Err(Error::TorsionGenerator { index: 0, order: 6 })
        ));
    }

    #[test]
    fn enumerate_rank1_golden() {
        let basis = e37_basis();
        let e = enumerate_up_to(&basis, &nat(10), 2).unwrap();
        assert_eq!(e.records.len(), 20);
        let ns: Vec<i64> = e.records.iter().map(|r| r.nvec[0]).collect();
        let mut want: Vec<i64> = (1..=10).chain((-10..=-1).rev()).collect();
        want.sort_unstable();
        let mut got = ns.clone();
        got.sort_unstable();
        assert_eq!(got, want);
        // z-sequence along positive n
        let zs: Vec<u64> = (1..=10)
            .map(|n| {
                let rec = e.records.iter().find(|r| r.nvec[0] == n).unwrap();
                u64::try_from(&rec.triple.z).unwrap()
            })
            .collect();
        assert_eq!(zs, vec![1, 1, 1, 1, 2, 1, 3, 5, 7, 4]);
    }

    #[test]
    fn enumerate_z1_integral_only() {
        let basis = e37_basis();
        let e = enumerate_up_to(&basis, &nat(1), 2).unwrap();
        let mut ns: Vec<i64> = e.records.iter().map(|r| r.nvec[0]).collect();
        ns.sort_unstable();
        assert_eq!(ns, vec![-6, -4, -3, -2, -1, 1, 2, 3, 4, 6]);
    }

    #[test]
    fn enumerate_matches_brute_force_scan() {
        let basis = e37_basis();
        let e = enumerate_up_to(&basis, &nat(100), 2).unwrap();
        let mut got: Vec<i64> = e.records.iter().map(|r| r.nvec[0]).collect();
        got.sort_unstable();
        // brute force over a generous range
        let curve = basis.curve();
        let q = Point::from_integers(0, 0);
        let zs = curve.denominator_sequence(&q, 40).unwrap();
        let mut want = Vec::new();
        for (i, z) in zs.iter().enumerate() {
            if *z <= nat(100) {
                want.push(i as i64 + 1);
                want.push(-(i as i64 + 1));
            }
        }
        want.sort_unstable();
        assert_eq!(got, want, "non-monotone dips must be caught (n = 16)");
        assert!(got.contains(&16));
    }

    #[test]
    fn enumerate_rank0_torsion_only() {
        let curve = Curve::from_small([0, 0, 0, 0, 1]).unwrap();
        let torsion = torsion_subgroup(&curve).unwrap();
        let basis = MwBasis::new(curve, vec![], torsion).unwrap();
        let e = enumerate_up_to(&basis, &nat(1_000_000), 2).unwrap();
        assert_eq!(e.records.len(), 5); // five non-O torsion points
        assert_eq!(e.shells_visited, 1);
        assert!(e.records.iter().all(|r| r.triple.z == nat(1)));
    }

    #[test]
    fn enumerate_empty_basis() {
        let curve = Curve::from_small([0, 0, 1, -1, 0]).unwrap();
        let basis = MwBasis::new(curve, vec![], TorsionGroup::trivial()).unwrap();
        assert!(matches!(
            enumerate_up_to(&basis, &nat(100), 2),
            Err(Error::EmptyBasis)
        ));
    }

    #[test]
    fn records_unique_and_mirrored() {
        let basis = e37_basis();
        let e = enumerate_up_to(&basis, &nat(100), 2).unwrap();
        let mut keys: Vec<(Vec<i64>, usize)> = e
            .records
            .iter()
            .map(|r| (r.nvec.clone(), r.torsion_index))
            .collect();
        let before = keys.len();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), before, "duplicate (nvec, torsion_index)");
        for rec in &e.records {
            let mirror_key: Vec<i64> = rec.nvec.iter().map(|v| -v).collect();
            let mirror = e
                .records
                .iter()
                .find(|r| r.nvec == mirror_key && r.torsion_index == rec.torsion_index)
                .expect("mirror record present");
            assert_eq!(mirror.triple.z, rec.triple.z);
        }
    }

    #[test]
    fn all_triples_verify(){
        let basis = e37_basis();
        let e = enumerate_up_to(&basis, &nat(100), 2).unwrap();
        for rec in &e.records {
            assert!(rec.triple.verify(basis.curve()));
        }
        assert!(e.c_hat.unwrap() > 0.0);
    }

    #[test]
    fn ray_walk_golden() {
        let basis = e37_basis();
        let walk = ray_walk(&basis, &[1], 5);
        let want = [
            Point::from_integers(0, 0),
            Point::from_integers(1, 0),
            Point::from_integers(-1, -1),
            Point::from_integers(2, -3),
            Point::affine(
                crate::arith::Rational::new(1.into(), 4.into()),
                crate::arith::Rational::new((-5).into(), 8.into()),
            ),
        ];
        for (i, (k, p)) in walk.iter().enumerate() {
            assert_eq!(*k, i as u64 + 1);
            assert_eq!(p, &want[i]);
            // coherence with scalar multiples
            assert_eq!(
                *p,
                basis
                    .curve()
                    .scalar_mul(*k as i64, &Point::from_integers(0, 0))
                    .unwrap()
            );
        }
    }

    #[test]
    #[should_panic(expected = "nonzero")]
    fn ray_walk_zero_direction_panics() {
        let basis = e37_basis();
        ray_walk(&basis, &[0], 3);
    }

    #[test]
    fn primitive_direction_counts() {
        // rank 1: the only primitive direction is (1), at norm 1
        assert_eq!(primitive_directions(1, 1), vec![vec![1]]);
        assert!(primitive_directions(1, 2).is_empty());
        // rank 2, norm 1: (1,0), (0,1), (1,1), (1,-1)
        let d = primitive_directions(2, 1);
        assert_eq!(d.len(), 4);
        // rank 2, norm 2: (1,2),(1,-2),(2,1),(2,-1) are primitive with norm 2
        let d = primitive_directions(2, 2);
        assert_eq!(d.len(), 4);
        for v in &d {
            assert_eq!(v.iter().map(|x| x.abs()).max().unwrap(), 2);
            assert!(is_primitive(v));
        }
    }

    #[test]
    fn fit_growth_invariants() {
        let basis = e37_basis();
        let fit = fit_growth(&basis, 0, 20, 60).unwrap();
        assert!(0.0 < fit.c_lower);
        assert!(fit.c_lower <= fit.slope);
        assert!(fit.slope <= fit.c_upper);
        assert_eq!(fit.samples as u64, 60 - 20 + 1); // no integral multiples past n = 6
    }

    #[test]
    fn fit_growth_insufficient_data() {
        let basis = e37_basis();
        // n in [2, 4]: all multiples integral, z = 1 throughout
        assert!(matches!(
            fit_growth(&basis, 0, 2, 4),
            Err(Error::InsufficientData)
        ));
    }
}
