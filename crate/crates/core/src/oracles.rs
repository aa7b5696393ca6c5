//! Brute-force oracles built from evaluation and enumeration only: a grid
//! Legendre transform, an exhaustive vertex/ray enumerator, and a definitional
//! membership audit for epsilon-subdifferentials and epsilon-normal sets.

use serde::{Deserialize, Serialize};

use crate::certificate::Counterexample;
use crate::error::{check_dim, Error, Result};
use crate::function::PolyhedralFunction;
use crate::polyhedron::{HalfSpace, Polyhedron};
use crate::rational::{q, ExtendedRational, Rational};
use crate::report::{digest_of, CheckReport, Checker};
use crate::sampling::sobol_points;
use crate::vector::QVector;

/// Largest number of grid points a `GridSpec` may describe.
pub const MAX_GRID_POINTS: u64 = 1_000_000;

/// Largest number of row subsets the enumerator will visit.
pub const MAX_ENUMERATION_NODES: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub lower: QVector,
    pub upper: QVector,
    pub step: Rational,
}

impl GridSpec {
    pub fn new(lower: QVector, upper: QVector, step: Rational) -> Result<Self> {
        check_dim(lower.dim(), upper.dim())?;
        if !step.is_positive() {
            return Err(Error::InvalidInput("grid step must be positive".into()));
        }
        let g = GridSpec { lower, upper, step };
        let mut total: u64 = 1;
        for k in g.counts()? {
            total = total.saturating_mul(k);
        }
        if total > MAX_GRID_POINTS {
            return Err(Error::InvalidInput(format!("grid has {total} points, above {MAX_GRID_POINTS}")));
        }
        Ok(g)
    }

    /// A cube `[c - r, c + r]^n`.
    pub fn cube(center: &QVector, radius: &Rational, step: Rational) -> Result<Self> {
        let lo = center.iter().map(|c| c - radius).collect();
        let hi = center.iter().map(|c| c + radius).collect();
        GridSpec::new(lo, hi, step)
    }

    fn counts(&self) -> Result<Vec<u64>> {
        self.lower
            .iter()
            .zip(self.upper.iter())
            .map(|(l, u)| {
                let k = &(u - l) / &self.step;
                if k.is_negative() || !k.is_integer() {
                    return Err(Error::InvalidInput("grid extent must be a nonnegative multiple of the step".into()));
                }
                k.as_small().map(|(k, _)| k as u64 + 1).ok_or_else(|| Error::InvalidInput("grid too large".into()))
            })
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = QVector> + '_ {
        let counts = self.counts().expect("validated");
        let total: u64 = counts.iter().product();
        (0..total).map(move |mut idx| {
            self.lower
                .iter()
                .zip(&counts)
                .map(|(l, &c)| {
                    let k = idx % c;
                    idx /= c;
                    l + &(&self.step * &Rational::from_int(k as i64))
                })
                .collect()
        })
    }
}

/// `max { <x*, x> - f(x) : x on the grid }`, a lower bound on `f*(x*)`.
pub fn grid_legendre(f: &PolyhedralFunction, grid: &GridSpec, xstar: &QVector) -> Result<Rational> {
    check_dim(f.dim(), grid.lower.dim())?;
    check_dim(f.dim(), xstar.dim())?;
    let mut best: Option<Rational> = None;
    for x in grid.points() {
        if let ExtendedRational::Finite(v) = f.eval(&x) {
            let val = &xstar.dot(&x) - &v;
            if best.as_ref().is_none_or(|b| val > *b) {
                best = Some(val);
            }
        }
    }
    best.ok_or_else(|| Error::EmptySet("the grid misses dom f".into()))
}

/// Generators found by exhaustive enumeration of tight row subsets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Enumeration {
    pub points: Vec<QVector>,
    pub rays: Vec<QVector>,
    pub lines: Vec<QVector>,
}

// Row reduction kept separate from the kernel's so the two never share a bug.
fn echelon(rows: &[QVector], width: usize) -> (Vec<QVector>, Vec<usize>) {
    let mut m: Vec<QVector> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Rational::one() / &m[r][c];
        m[r] = m[r].scale(&inv);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                m[i] = m[i].axpy(&-f, &m[r]);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

fn kernel(rows: &[QVector], width: usize) -> Vec<QVector> {
    let (m, pivots) = echelon(rows, width);
    (0..width)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = QVector::zeros(width);
            v[free] = Rational::one();
            for (row, &p) in m.iter().zip(&pivots) {
                v[p] = -&row[free];
            }
            v
        })
        .collect()
}

/// Unique solution of a square-rank system, if any.
fn solve_unique(rows: &[QVector], rhs: &[Rational], width: usize) -> Option<QVector> {
    let aug: Vec<QVector> = rows.iter().zip(rhs).map(|(r, b)| r.with(b.clone())).collect();
    let (m, pivots) = echelon(&aug, width + 1);
    if pivots.len() != width || pivots.contains(&width) {
        return None;
    }
    Some(m.iter().map(|r| r[width].clone()).collect())
}

fn rank(rows: &[QVector], width: usize) -> usize {
    echelon(rows, width).1.len()
}

fn normalize(v: &QVector) -> QVector {
    let i = v.iter().position(|c| !c.is_zero()).expect("nonzero");
    let s = Rational::one() / &v[i].abs();
    v.scale(&s)
}

struct Enumerator<'a> {
    dim: usize,
    ineqs: &'a [(QVector, Rational)],
    base: Vec<(QVector, Rational)>,
    nodes: u64,
}

impl Enumerator<'_> {
    fn feasible(&self, y: &QVector) -> bool {
        self.ineqs.iter().all(|(a, b)| a.dot(y) <= *b)
    }

    /// Visits every rank-increasing subset of inequality rows whose rank with
    /// the base reaches `target`.
    fn walk(&mut self, start: usize, chosen: &mut Vec<usize>, rank_now: usize, target: usize, out: &mut dyn FnMut(&[usize])) -> Result<()> {
        self.nodes += 1;
        if self.nodes > MAX_ENUMERATION_NODES {
            return Err(Error::InvalidInput("enumeration exceeds its node budget".into()));
        }
        if rank_now == target {
            out(chosen);
            return Ok(());
        }
        for i in start..self.ineqs.len() {
            if self.ineqs.len() - i < target - rank_now {
                break;
            }
            chosen.push(i);
            let rows: Vec<QVector> = self.base.iter().map(|r| r.0.clone()).chain(chosen.iter().map(|&k| self.ineqs[k].0.clone())).collect();
            let r = rank(&rows, self.dim);
            if r > rank_now {
                self.walk(i + 1, chosen, r, target, out)?;
            }
            chosen.pop();
        }
        Ok(())
    }
}

/// Vertices of `P ∩ L^⊥`, extreme rays of `rec P ∩ L^⊥` and a basis of the
/// lineality space `L`, for `P = {y : A y <= b, E y = e}`.
pub fn enumerate(dim: usize, ineqs: &[(QVector, Rational)], eqs: &[(QVector, Rational)]) -> Result<Enumeration> {
    let all: Vec<QVector> = ineqs.iter().chain(eqs).map(|r| r.0.clone()).collect();
    let lines = kernel(&all, dim);
    let mut base: Vec<(QVector, Rational)> = eqs.to_vec();
    base.extend(lines.iter().map(|l| (l.clone(), Rational::zero())));
    let base_rows: Vec<QVector> = base.iter().map(|r| r.0.clone()).collect();
    let r0 = rank(&base_rows, dim);
    let mut en = Enumerator { dim, ineqs, base, nodes: 0 };

    let mut points = Vec::new();
    let mut subsets = Vec::new();
    en.walk(0, &mut Vec::new(), r0, dim, &mut |s| subsets.push(s.to_vec()))?;
    for s in &subsets {
        let (rows, rhs): (Vec<QVector>, Vec<Rational>) =
            en.base.iter().cloned().chain(s.iter().map(|&k| ineqs[k].clone())).unzip();
        if let Some(y) = solve_unique(&rows, &rhs, dim) {
            if en.feasible(&y) && eqs.iter().all(|(a, b)| a.dot(&y) == *b) {
                points.push(y);
            }
        }
    }
    points.sort();
    points.dedup();

    let mut rays = Vec::new();
    if points.is_empty() {
        return Ok(Enumeration { points, rays, lines });
    }
    if r0 < dim {
        let mut subsets = Vec::new();
        en.walk(0, &mut Vec::new(), r0, dim - 1, &mut |s| subsets.push(s.to_vec()))?;
        for s in &subsets {
            let rows: Vec<QVector> = en.base.iter().map(|r| r.0.clone()).chain(s.iter().map(|&k| ineqs[k].0.clone())).collect();
            let ker = kernel(&rows, dim);
            if ker.len() != 1 {
                continue;
            }
            for d in [ker[0].clone(), ker[0].neg()] {
                if ineqs.iter().all(|(a, _)| !a.dot(&d).is_positive()) {
                    rays.push(normalize(&d));
                }
            }
        }
    }
    rays.sort();
    rays.dedup();
    Ok(Enumeration { points, rays, lines })
}

fn rows_of(p: &Polyhedron) -> (Vec<(QVector, Rational)>, Vec<(QVector, Rational)>) {
    let conv = |h: &HalfSpace| (h.normal.clone(), h.offset.clone());
    (p.ineqs().iter().map(conv).collect(), p.eqs().iter().map(conv).collect())
}

/// Exhaustive generators of a polyhedron from its rows.
pub fn enumerate_polyhedron(p: &Polyhedron) -> Result<Enumeration> {
    let (i, e) = rows_of(p);
    enumerate(p.dim(), &i, &e)
}

/// Exhaustive generators of `epi f ⊂ R^{n+1}`.
pub fn enumerate_epigraph(f: &PolyhedralFunction) -> Result<Enumeration> {
    let n = f.dim();
    let mut ineqs: Vec<(QVector, Rational)> =
        f.pieces().iter().map(|p| (p.a.with(-Rational::one()), -&p.b)).collect();
    let (di, de) = rows_of(f.domain());
    ineqs.extend(di.into_iter().map(|(a, b)| (a.with(Rational::zero()), b)));
    let eqs: Vec<_> = de.into_iter().map(|(a, b)| (a.with(Rational::zero()), b)).collect();
    ineqs.sort();
    ineqs.dedup();
    enumerate(n + 1, &ineqs, &eqs)
}

/// What the audited set is supposed to be.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditKind {
    /// `∂_eps f(x)`.
    Subdiff,
    /// `N^eps_C(x)`, audited as the eps-subdifferential of the indicator of `C`.
    Normal,
}

#[derive(Clone, Debug)]
pub struct AuditContext {
    pub function: PolyhedralFunction,
    pub x: QVector,
    pub eps: Rational,
    pub kind: AuditKind,
}

impl AuditContext {
    pub fn subdiff(f: &PolyhedralFunction, x: &QVector, eps: &Rational) -> Self {
        AuditContext { function: f.clone(), x: x.clone(), eps: eps.clone(), kind: AuditKind::Subdiff }
    }

    pub fn normal(c: &Polyhedron, x: &QVector, eps: &Rational) -> Self {
        AuditContext { function: PolyhedralFunction::indicator(c.clone()), x: x.clone(), eps: eps.clone(), kind: AuditKind::Normal }
    }
}

/// `sup { <y*, y> - t : (y, t) in epi f }` from the generators.
fn sup_over(gens: &Enumeration, ystar: &QVector) -> ExtendedRational {
    let lift = ystar.with(-Rational::one());
    if gens.lines.iter().any(|l| !lift.dot(l).is_zero()) || gens.rays.iter().any(|r| lift.dot(r).is_positive()) {
        return ExtendedRational::PosInfinity;
    }
    gens.points.iter().map(|p| ExtendedRational::Finite(lift.dot(p))).max().unwrap_or(ExtendedRational::NegInfinity)
}

fn sample_points(p: &Enumeration, dim: usize, samples: usize, seed: u64) -> Vec<QVector> {
    let mut pts = Vec::new();
    let h = q(1, 16);
    for v in &p.points {
        pts.push(v.clone());
        for i in 0..dim {
            let e = QVector::unit(dim, i);
            pts.push(v.axpy(&h, &e));
            pts.push(v.axpy(&-&h, &e));
        }
    }
    pts.truncate(samples / 2);
    let mut lo = QVector::new(vec![Rational::from_int(-3); dim]);
    let mut hi = QVector::new(vec![Rational::from_int(3); dim]);
    for v in &p.points {
        for i in 0..dim {
            lo[i] = lo[i].clone().min(&v[i] - &Rational::one());
            hi[i] = hi[i].clone().max(&v[i] + &Rational::one());
        }
    }
    let rest = samples.saturating_sub(pts.len());
    pts.extend(sobol_points(&lo, &hi, rest, seed));
    pts
}

/// Cross-examines `P` against the defining inequality
/// `<y*, y - x> <= f(y) - f(x) + eps` evaluated on an exhaustive generator
/// list of `epi f`, at vertex perturbations of `P` and box samples.
pub fn membership_audit(p: &Polyhedron, ctx: &AuditContext, samples: usize, seed: u64) -> CheckReport {
    let (pi, pe) = rows_of(p);
    let digest = digest_of(&(
        &pi,
        &pe,
        ctx.function.to_json(),
        &ctx.x,
        &ctx.eps,
        ctx.kind,
        samples,
        seed,
    ));
    let mut ck = Checker::new("membership-audit", digest);
    let n = ctx.function.dim();
    if p.dim() != n || ctx.x.dim() != n {
        ck.fail(Counterexample::point(QVector::zeros(0), "dimension mismatch between set and context"));
        return ck.finish();
    }
    let ExtendedRational::Finite(fx) = ctx.function.eval(&ctx.x) else {
        return ck.trivial("x lies outside dom f: the set is empty by definition");
    };
    let (epi, own) = match (enumerate_epigraph(&ctx.function), enumerate(n, &pi, &pe)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return ck.trivial(format!("enumeration skipped: {e}")),
    };
    let pts = sample_points(&own, n, samples, seed);
    let (mut inside, mut outside) = (0, 0);
    for y in &pts {
        let bound = ExtendedRational::Finite(&(&ctx.x.dot(y) - &fx) + &ctx.eps);
        let definitional = sup_over(&epi, y) <= bound;
        let claimed = p.contains(y);
        if definitional {
            inside += 1;
        } else {
            outside += 1;
        }
        ck.require_that("definitional membership", definitional == claimed, || {
            let why = if claimed { "in the set but violates the defining inequality" } else { "satisfies the defining inequality but is not in the set" };
            Counterexample::point(y.clone(), why)
        });
    }
    ck.note(format!("{} samples: {inside} inside, {outside} outside", pts.len()));
    ck.finish()
}

/// `P` translated by a tenth of the normal of its first row that is tight at an
/// enumerated vertex; `None` when no such row exists.
pub fn inject_fault(p: &Polyhedron) -> Result<Option<Polyhedron>> {
    let own = enumerate_polyhedron(p)?;
    let tight = p
        .eqs()
        .iter()
        .chain(p.ineqs().iter().filter(|h| own.points.iter().any(|v| h.slack(v).is_zero())))
        .find(|h| !h.normal.is_zero());
    match tight {
        Some(h) => Ok(Some(p.translate(&h.normal.scale(&q(1, 10)))?)),
        None => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::AffinePiece;
    use crate::rational::qi;
    use crate::report::CheckStatus;

    fn interval(a: Rational, b: Rational) -> Polyhedron {
        Polyhedron::boxed(&QVector::new(vec![a]), &QVector::new(vec![b])).unwrap()
    }

    fn kinked() -> PolyhedralFunction {
        PolyhedralFunction::new(
            1,
            vec![AffinePiece::new(QVector::from_ints(&[1]), qi(0)), AffinePiece::new(QVector::from_ints(&[2]), qi(-1))],
            interval(qi(0), qi(5)),
        )
        .unwrap()
    }

    #[test]
    fn grid_legendre_examples() {
        let abs = PolyhedralFunction::l1_norm(1, &qi(1));
        let g = GridSpec::new(QVector::from_ints(&[-2]), QVector::from_ints(&[2]), q(1, 4)).unwrap();
        assert_eq!(g.points().count(), 17);
        assert_eq!(grid_legendre(&abs, &g, &QVector::new(vec![q(1, 2)])).unwrap(), qi(0));
        assert_eq!(grid_legendre(&abs, &g, &QVector::from_ints(&[0])).unwrap(), qi(0));
        let g = GridSpec::new(QVector::from_ints(&[0]), QVector::from_ints(&[5]), q(1, 8)).unwrap();
        let v = grid_legendre(&kinked(), &g, &QVector::new(vec![q(3, 2)])).unwrap();
        // 3x/2 - max(x, 2x - 1) peaks at the kink x = 1, which is on the grid
        assert_eq!(v, q(1, 2));
    }

    #[test]
    fn grid_errors() {
        assert!(GridSpec::new(QVector::from_ints(&[0]), QVector::from_ints(&[1]), q(2, 3)).is_err());
        assert!(GridSpec::new(QVector::from_ints(&[0, 0]), QVector::from_ints(&[100, 100]), q(1, 100)).is_err());
        let g = GridSpec::new(QVector::from_ints(&[10]), QVector::from_ints(&[11]), qi(1)).unwrap();
        assert!(matches!(grid_legendre(&kinked(), &g, &QVector::from_ints(&[0])), Err(Error::EmptySet(_))));
    }

    #[test]
    fn enumeration_of_square_and_strip() {
        let sq = Polyhedron::boxed(&QVector::from_ints(&[0, 0]), &QVector::from_ints(&[1, 1])).unwrap();
        let e = enumerate_polyhedron(&sq).unwrap();
        assert_eq!(e.points.len(), 4);
        assert!(e.rays.is_empty() && e.lines.is_empty());
        let strip = Polyhedron::new(
            2,
            vec![
                HalfSpace::new(QVector::from_ints(&[1, 0]), qi(1)),
                HalfSpace::new(QVector::from_ints(&[-1, 0]), qi(0)),
            ],
            vec![],
        )
        .unwrap();
        let e = enumerate_polyhedron(&strip).unwrap();
        assert_eq!(e.points, vec![QVector::from_ints(&[0, 0]), QVector::from_ints(&[1, 0])]);
        assert_eq!(e.lines.len(), 1);
        let abs = enumerate_epigraph(&PolyhedralFunction::l1_norm(1, &qi(1))).unwrap();
        assert_eq!(abs.points, vec![QVector::from_ints(&[0, 0])]);
        assert_eq!(abs.rays, vec![QVector::from_ints(&[-1, 1]), QVector::from_ints(&[1, 1])]);
    }

    #[test]
    fn audit_examples() {
        let abs = PolyhedralFunction::l1_norm(1, &qi(1));
        let ctx = AuditContext::subdiff(&abs, &QVector::from_ints(&[0]), &qi(0));
        let r = membership_audit(&interval(qi(-1), qi(1)), &ctx, 50, 3);
        assert_eq!(r.status, CheckStatus::Pass, "{r:?}");
        let bad = inject_fault(&interval(qi(-1), qi(1))).unwrap().unwrap();
        assert_eq!(membership_audit(&bad, &ctx, 50, 3).status, CheckStatus::Fail);

        let f = kinked();
        let x = QVector::new(vec![q(1, 2)]);
        let s = f.eps_subdifferential(&x, &q(1, 4)).unwrap();
        let ctx = AuditContext::subdiff(&f, &x, &q(1, 4));
        assert_eq!(membership_audit(&s, &ctx, 50, 1).status, CheckStatus::Pass);
        let c = interval(qi(0), qi(1));
        let ctx = AuditContext::normal(&c, &QVector::from_ints(&[0]), &q(1, 2));
        let n = crate::function::eps_normal_set(&c, &QVector::from_ints(&[0]), &q(1, 2)).unwrap();
        assert_eq!(membership_audit(&n, &ctx, 50, 1).status, CheckStatus::Pass);
        assert_eq!(membership_audit(&inject_fault(&n).unwrap().unwrap(), &ctx, 50, 1).status, CheckStatus::Fail);
    }
}
