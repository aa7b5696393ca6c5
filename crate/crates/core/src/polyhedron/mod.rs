//! Closed convex polyhedra with inequality and generator representations.

mod dd;
mod project;

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::certificate::{Counterexample, Inclusion};
use crate::error::{check_dim, Error, Result};
use crate::linalg::rref;
use crate::lp::{Constraint, LinearProgram, LpBuilder, LpResult, LpStatus, Relation, Sense};
use crate::rational::{ExtendedRational, Rational};
use crate::vector::QVector;

pub use project::LiftedPolyhedron;

/// Default dimension cap for double description.
pub const DEFAULT_DD_CAP: usize = 6;

/// The active cap: `SUPCALC_DD_CAP` when set to an integer, otherwise the default.
pub fn dd_cap() -> usize {
    std::env::var("SUPCALC_DD_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_DD_CAP)
}

fn check_cap(dim: usize) -> Result<()> {
    let cap = dd_cap();
    if dim > cap {
        Err(Error::CapacityExceeded { dim, cap })
    } else {
        Ok(())
    }
}

/// `normal . x <= offset` (or `=` when stored as an equality).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfSpace {
    pub normal: QVector,
    pub offset: Rational,
}

impl HalfSpace {
    pub fn new(normal: QVector, offset: Rational) -> Self {
        HalfSpace { normal, offset }
    }

    pub(crate) fn infeasible(dim: usize) -> Self {
        HalfSpace { normal: QVector::zeros(dim), offset: -Rational::one() }
    }

    pub fn row(&self) -> QVector {
        self.normal.with(self.offset.clone())
    }

    pub fn from_row(row: &QVector) -> Self {
        let n = row.dim() - 1;
        HalfSpace { normal: row.head(n), offset: row[n].clone() }
    }

    pub fn slack(&self, x: &QVector) -> Rational {
        &self.offset - self.normal.dot(x)
    }
}

/// Points, extreme rays and a lineality basis.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Generators {
    pub points: Vec<QVector>,
    pub rays: Vec<QVector>,
    pub lines: Vec<QVector>,
}

impl Generators {
    /// Rays with every line entered in both orientations.
    pub fn all_rays(&self) -> Vec<QVector> {
        let mut out = self.rays.clone();
        for l in &self.lines {
            out.push(l.clone());
            out.push(l.neg());
        }
        out
    }
}

/// A closed convex polyhedron in `R^dim`.
///
/// The inequality form is always present. Generators are computed on demand by
/// double description and cached, as is emptiness.
#[derive(Clone, Debug)]
pub struct Polyhedron {
    dim: usize,
    ineqs: Vec<HalfSpace>,
    eqs: Vec<HalfSpace>,
    gens: OnceLock<Result<Generators>>,
    empty: OnceLock<bool>,
}

impl PartialEq for Polyhedron {
    /// Structural equality of the stored inequality form; use [`Polyhedron::equals`]
    /// for set equality.
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.ineqs == other.ineqs && self.eqs == other.eqs
    }
}

impl Polyhedron {
    /// Builds from inequalities `a . x <= b` and equalities `a . x = b`.
    pub fn new(dim: usize, ineqs: Vec<HalfSpace>, eqs: Vec<HalfSpace>) -> Result<Self> {
        for h in ineqs.iter().chain(&eqs) {
            check_dim(dim, h.normal.dim())?;
        }
        let (ineqs, eqs) = normalize(dim, ineqs, eqs);
        Ok(Polyhedron { dim, ineqs, eqs, gens: OnceLock::new(), empty: OnceLock::new() })
    }

    /// Builds from constraint rows of any relation.
    pub fn from_constraints(dim: usize, rows: &[Constraint]) -> Result<Self> {
        let mut ineqs = Vec::new();
        let mut eqs = Vec::new();
        for c in rows {
            match c.relation {
                Relation::Le => ineqs.push(HalfSpace::new(c.coeffs.clone(), c.rhs.clone())),
                Relation::Ge => ineqs.push(HalfSpace::new(c.coeffs.neg(), -&c.rhs)),
                Relation::Eq => eqs.push(HalfSpace::new(c.coeffs.clone(), c.rhs.clone())),
            }
        }
        Self::new(dim, ineqs, eqs)
    }

    /// `conv(points) + cone(rays) + span(lines)`, converted to inequalities by
    /// double description.
    pub fn from_generators(dim: usize, points: Vec<QVector>, rays: Vec<QVector>, lines: Vec<QVector>) -> Result<Self> {
        for v in points.iter().chain(&rays).chain(&lines) {
            check_dim(dim, v.dim())?;
        }
        check_cap(dim)?;
        if points.is_empty() {
            return Ok(Self::empty(dim));
        }
        let (ineqs, eqs) = dd::v_to_h(dim, &points, &rays, &lines);
        let p = Self::new(dim, ineqs, eqs)?;
        let _ = p.empty.set(false);
        Ok(p)
    }

    pub fn universe(dim: usize) -> Self {
        Polyhedron { dim, ineqs: Vec::new(), eqs: Vec::new(), gens: OnceLock::new(), empty: OnceLock::new() }
    }

    pub fn empty(dim: usize) -> Self {
        let p = Polyhedron {
            dim,
            ineqs: vec![HalfSpace::infeasible(dim)],
            eqs: Vec::new(),
            gens: OnceLock::new(),
            empty: OnceLock::new(),
        };
        let _ = p.empty.set(true);
        let _ = p.gens.set(Ok(Generators::default()));
        p
    }

    pub fn point(x: &QVector) -> Self {
        let n = x.dim();
        let eqs = (0..n).map(|i| HalfSpace::new(QVector::unit(n, i), x[i].clone())).collect();
        Self::new(n, Vec::new(), eqs).expect("consistent dimensions")
    }

    /// The box `lower <= x <= upper`.
    pub fn boxed(lower: &QVector, upper: &QVector) -> Result<Self> {
        check_dim(lower.dim(), upper.dim())?;
        let n = lower.dim();
        let mut ineqs = Vec::with_capacity(2 * n);
        for i in 0..n {
            ineqs.push(HalfSpace::new(QVector::unit(n, i), upper[i].clone()));
            ineqs.push(HalfSpace::new(QVector::unit(n, i).neg(), -&lower[i]));
        }
        Self::new(n, ineqs, Vec::new())
    }

    /// The cone generated by `rays` (and `lines`) with apex at the origin.
    pub fn cone(dim: usize, rays: Vec<QVector>, lines: Vec<QVector>) -> Result<Self> {
        Self::from_generators(dim, vec![QVector::zeros(dim)], rays, lines)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ineqs(&self) -> &[HalfSpace] {
        &self.ineqs
    }

    pub fn eqs(&self) -> &[HalfSpace] {
        &self.eqs
    }

    /// The inequality form as LP rows.
    pub fn constraints(&self) -> Vec<Constraint> {
        let mut rows: Vec<Constraint> =
            self.ineqs.iter().map(|h| Constraint::le(h.normal.clone(), h.offset.clone())).collect();
        rows.extend(self.eqs.iter().map(|h| Constraint::eq(h.normal.clone(), h.offset.clone())));
        rows
    }

    /// Appends this polyhedron's rows acting on variables `first..first + dim`
    /// of `lp`, with right-hand sides multiplied by variable `scale` when given
    /// (the homogenized form `A y <= b t`).
    pub fn push_rows(&self, lp: &mut LpBuilder, first: usize, scale: Option<usize>) {
        for (h, rel) in self
            .ineqs
            .iter()
            .map(|h| (h, Relation::Le))
            .chain(self.eqs.iter().map(|h| (h, Relation::Eq)))
        {
            let mut terms = Vec::new();
            LpBuilder::dense_terms(&mut terms, first, &h.normal);
            match scale {
                Some(t) => {
                    if !h.offset.is_zero() {
                        terms.push((t, -&h.offset));
                    }
                    lp.row(terms, rel, Rational::zero());
                }
                None => lp.row(terms, rel, h.offset.clone()),
            }
        }
    }

    fn lp(&self, objective: &QVector, sense: Sense) -> LinearProgram {
        LinearProgram::new(objective.clone(), self.constraints(), sense)
    }

    /// LP over this polyhedron.
    pub fn optimize(&self, objective: &QVector, sense: Sense) -> Result<LpResult> {
        check_dim(self.dim, objective.dim())?;
        self.lp(objective, sense).solve()
    }

    /// Support function `sup {c . x : x in P}`; `-inf` when `P` is empty.
    pub fn support(&self, c: &QVector) -> Result<ExtendedRational> {
        Ok(self.optimize(c, Sense::Maximize)?.optimum)
    }

    pub fn is_empty(&self) -> bool {
        *self.empty.get_or_init(|| {
            if let Some(Ok(g)) = self.gens.get() {
                return g.points.is_empty();
            }
            if self.ineqs.iter().any(|h| h.normal.is_zero() && h.offset.is_negative()) {
                return true;
            }
            let res = self.lp(&QVector::zeros(self.dim), Sense::Minimize).solve().expect("consistent LP");
            res.status == LpStatus::Infeasible
        })
    }

    /// A feasible point, if any.
    pub fn some_point(&self) -> Option<QVector> {
        if let Some(Ok(g)) = self.gens.get() {
            return g.points.first().cloned();
        }
        let res = self.lp(&QVector::zeros(self.dim), Sense::Minimize).solve().ok()?;
        {
            let ok = res.is_optimal();
            res.primal_point.filter(|_| ok)
        }
    }

    /// Irredundant generators, computed once.
    pub fn generators(&self) -> Result<&Generators> {
        self.gens
            .get_or_init(|| {
                check_cap(self.dim)?;
                if self.is_empty() {
                    return Ok(Generators::default());
                }
                Ok(dd::h_to_v(self.dim, &self.ineqs, &self.eqs))
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn has_generators(&self) -> bool {
        matches!(self.gens.get(), Some(Ok(_)))
    }

    pub fn vertices(&self) -> Result<Vec<QVector>> {
        Ok(self.generators()?.points.clone())
    }

    /// Equivalent polyhedron with an irredundant inequality form recomputed from
    /// the generators; both representations are present.
    pub fn canonical(&self) -> Result<Polyhedron> {
        if self.is_empty() {
            return Ok(Self::empty(self.dim));
        }
        let g = self.generators()?.clone();
        let mut p = Self::from_generators(self.dim, g.points.clone(), g.rays.clone(), g.lines.clone())?;
        p.gens = OnceLock::new();
        let _ = p.gens.set(Ok(g));
        Ok(p)
    }

    pub fn contains(&self, x: &QVector) -> bool {
        x.dim() == self.dim
            && self.ineqs.iter().all(|h| h.normal.dot(x) <= h.offset)
            && self.eqs.iter().all(|h| h.normal.dot(x) == h.offset)
    }

    /// Whether `d` lies in `{d : A d <= 0, E d = 0}`.
    pub fn contains_direction(&self, d: &QVector) -> bool {
        d.dim() == self.dim
            && self.ineqs.iter().all(|h| !h.normal.dot(d).is_positive())
            && self.eqs.iter().all(|h| h.normal.dot(d).is_zero())
    }

    pub fn recession_cone(&self) -> Result<Polyhedron> {
        if self.is_empty() {
            return Err(Error::EmptySet("recession cone".into()));
        }
        let ineqs = self.ineqs.iter().map(|h| HalfSpace::new(h.normal.clone(), Rational::zero())).collect();
        let eqs = self.eqs.iter().map(|h| HalfSpace::new(h.normal.clone(), Rational::zero())).collect();
        Self::new(self.dim, ineqs, eqs)
    }

    /// `{d : A d = 0, E d = 0}`, the largest subspace `L` with `P + L = P`.
    pub fn lineality_space(&self) -> Polyhedron {
        let eqs = self
            .ineqs
            .iter()
            .chain(&self.eqs)
            .map(|h| HalfSpace::new(h.normal.clone(), Rational::zero()))
            .collect();
        Self::new(self.dim, Vec::new(), eqs).expect("consistent dimensions")
    }

    /// A basis of the lineality space.
    pub fn lineality_basis(&self) -> Vec<QVector> {
        let rows: Vec<QVector> = self.ineqs.iter().chain(&self.eqs).map(|h| h.normal.clone()).collect();
        crate::linalg::nullspace(&rows, self.dim)
    }

    /// Whether the polyhedron is an affine subspace (no inequality rows after
    /// normalization) of dimension zero.
    pub fn is_singleton(&self) -> bool {
        !self.is_empty() && self.lineality_basis().is_empty() && self.ineqs.iter().all(|h| h.normal.is_zero())
    }

    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        check_dim(self.dim, other.dim)?;
        let mut ineqs = self.ineqs.clone();
        ineqs.extend(other.ineqs.iter().cloned());
        let mut eqs = self.eqs.clone();
        eqs.extend(other.eqs.iter().cloned());
        Self::new(self.dim, ineqs, eqs)
    }

    /// Cartesian product `P x Q`.
    pub fn product(&self, other: &Polyhedron) -> Polyhedron {
        let n = self.dim + other.dim;
        let left = |h: &HalfSpace| HalfSpace::new(h.normal.concat(&QVector::zeros(other.dim)), h.offset.clone());
        let right = |h: &HalfSpace| HalfSpace::new(QVector::zeros(self.dim).concat(&h.normal), h.offset.clone());
        let ineqs = self.ineqs.iter().map(left).chain(other.ineqs.iter().map(right)).collect();
        let eqs = self.eqs.iter().map(left).chain(other.eqs.iter().map(right)).collect();
        Self::new(n, ineqs, eqs).expect("consistent dimensions")
    }

    /// `{y in R^k : M y + c in P}` where `M` is given by its `dim` rows of length `k`.
    pub fn affine_preimage(&self, m_rows: &[QVector], c: &QVector, k: usize) -> Result<Polyhedron> {
        check_dim(self.dim, m_rows.len())?;
        check_dim(self.dim, c.dim())?;
        let pull = |h: &HalfSpace| {
            let mut a = QVector::zeros(k);
            for (ai, row) in h.normal.iter().zip(m_rows) {
                if !ai.is_zero() {
                    a = a.axpy(ai, row);
                }
            }
            HalfSpace::new(a, &h.offset - h.normal.dot(c))
        };
        Self::new(k, self.ineqs.iter().map(pull).collect(), self.eqs.iter().map(pull).collect())
    }

    /// `P + v`.
    pub fn translate(&self, v: &QVector) -> Result<Polyhedron> {
        check_dim(self.dim, v.dim())?;
        let shift = |h: &HalfSpace| HalfSpace::new(h.normal.clone(), &h.offset + h.normal.dot(v));
        Self::new(self.dim, self.ineqs.iter().map(shift).collect(), self.eqs.iter().map(shift).collect())
    }

    /// Largest common slack `s <= 1` over the inequality rows, with a maximizer.
    fn max_slack(&self, only: Option<&[bool]>) -> Result<Option<(Rational, QVector)>> {
        let n = self.dim;
        let mut lp = LpBuilder::new();
        let x = lp.vars(n, false);
        let s = lp.var(false);
        for (i, h) in self.ineqs.iter().enumerate() {
            let mut terms = Vec::new();
            LpBuilder::dense_terms(&mut terms, x, &h.normal);
            if only.is_none_or(|o| o[i]) {
                terms.push((s, Rational::one()));
            }
            lp.row(terms, Relation::Le, h.offset.clone());
        }
        for h in &self.eqs {
            let mut terms = Vec::new();
            LpBuilder::dense_terms(&mut terms, x, &h.normal);
            lp.row(terms, Relation::Eq, h.offset.clone());
        }
        lp.row(vec![(s, Rational::one())], Relation::Le, Rational::one());
        let res = lp.solve(&[(s, Rational::one())], Sense::Maximize)?;
        if !res.is_optimal() {
            return Ok(None);
        }
        let pt = res.primal_point.unwrap();
        Ok(Some((pt[s].clone(), pt.head(n))))
    }

    /// A point with strictly positive slack on every inequality, or `None` when
    /// the polyhedron has empty interior.
    pub fn interior_point(&self) -> Result<Option<QVector>> {
        if self.eqs.iter().any(|h| !h.normal.is_zero()) {
            return Ok(None);
        }
        Ok(self.max_slack(None)?.filter(|(s, _)| s.is_positive()).map(|(_, x)| x))
    }

    /// Whether the interior is nonempty.
    pub fn has_interior(&self) -> Result<bool> {
        Ok(self.interior_point()?.is_some())
    }

    /// A point in the relative interior, or `None` when empty.
    pub fn relative_interior_point(&self) -> Result<Option<QVector>> {
        if self.is_empty() {
            return Ok(None);
        }
        let mut pts = Vec::new();
        for h in &self.ineqs {
            let res = self.optimize(&h.normal, Sense::Minimize)?;
            match res.status {
                LpStatus::Optimal => {
                    let p = res.primal_point.unwrap();
                    if h.slack(&p).is_positive() {
                        pts.push(p);
                    }
                }
                LpStatus::Unbounded => {
                    let p = res.primal_point.unwrap();
                    let d = res.direction.unwrap();
                    pts.push(p.add(&d));
                }
                LpStatus::Infeasible => return Ok(None),
            }
        }
        if pts.is_empty() {
            return Ok(self.some_point());
        }
        let k = Rational::from(pts.len());
        let mut acc = QVector::zeros(self.dim);
        for p in &pts {
            acc = acc.add(p);
        }
        Ok(Some(acc.scale(&k.recip())))
    }

    /// Decides `self ⊆ other`, returning a violating point or direction otherwise.
    pub fn is_subset_of(&self, other: &Polyhedron) -> Result<Inclusion> {
        check_dim(self.dim, other.dim)?;
        if self.is_empty() {
            return Ok(Inclusion::Holds);
        }
        if let Some(Ok(g)) = self.gens.get() {
            for p in &g.points {
                if !other.contains(p) {
                    return Ok(Inclusion::Violated(Counterexample::point(p.clone(), "generator point outside")));
                }
            }
            for r in g.all_rays() {
                if !other.contains_direction(&r) {
                    return Ok(Inclusion::Violated(Counterexample::direction(r, "generator ray outside")));
                }
            }
            return Ok(Inclusion::Holds);
        }
        for h in &other.ineqs {
            if let Some(cx) = self.violation(&h.normal, &h.offset)? {
                return Ok(Inclusion::Violated(cx));
            }
        }
        for h in &other.eqs {
            if let Some(cx) = self.violation(&h.normal, &h.offset)? {
                return Ok(Inclusion::Violated(cx));
            }
            if let Some(cx) = self.violation(&h.normal.neg(), &-&h.offset)? {
                return Ok(Inclusion::Violated(cx));
            }
        }
        Ok(Inclusion::Holds)
    }

    /// A point or direction of `self` violating `a . x <= b`, with the LP dual.
    fn violation(&self, a: &QVector, b: &Rational) -> Result<Option<Counterexample>> {
        let res = self.optimize(a, Sense::Maximize)?;
        Ok(match res.status {
            LpStatus::Unbounded => Some(Counterexample::direction(
                res.direction.unwrap(),
                format!("unbounded along a normal exceeding offset {b}"),
            )),
            LpStatus::Optimal if res.value().unwrap() > b => {
                let mut cx = Counterexample::point(
                    res.primal_point.clone().unwrap(),
                    format!("value {} exceeds offset {b}", res.value().unwrap()),
                );
                cx.lp_certificate = res.dual_certificate;
                Some(cx)
            }
            _ => None,
        })
    }

    /// Set equality by double inclusion.
    pub fn equals(&self, other: &Polyhedron) -> Result<bool> {
        Ok(self.is_subset_of(other)?.holds() && other.is_subset_of(self)?.holds())
    }

    /// Set equality with the first violation found.
    pub fn compare(&self, other: &Polyhedron) -> Result<Inclusion> {
        match self.is_subset_of(other)? {
            Inclusion::Holds => other.is_subset_of(self),
            v => Ok(v),
        }
    }

    pub fn to_json(&self) -> PolyhedronJson {
        let row = |h: &HalfSpace| h.row().into_inner();
        let (vertices, rays) = match self.generators() {
            Ok(g) => (Some(g.points.clone()), Some(g.all_rays())),
            Err(_) => (None, None),
        };
        PolyhedronJson {
            dim: self.dim,
            ineqs: self.ineqs.iter().map(row).collect(),
            eqs: self.eqs.iter().map(row).collect(),
            vertices,
            rays,
        }
    }

    pub fn from_json(j: &PolyhedronJson) -> Result<Polyhedron> {
        let parse = |rows: &[Vec<Rational>]| -> Result<Vec<HalfSpace>> {
            rows.iter()
                .map(|r| {
                    check_dim(j.dim + 1, r.len())?;
                    Ok(HalfSpace::from_row(&QVector::new(r.clone())))
                })
                .collect()
        };
        let ineqs = parse(&j.ineqs)?;
        let eqs = parse(&j.eqs)?;
        if ineqs.is_empty() && eqs.is_empty() {
            if let Some(vs) = &j.vertices {
                return Self::from_generators(j.dim, vs.clone(), j.rays.clone().unwrap_or_default(), Vec::new());
            }
        }
        Self::new(j.dim, ineqs, eqs)
    }
}

impl Serialize for Polyhedron {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polyhedron {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolyhedronJson::deserialize(d)?;
        Polyhedron::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// Wire format: rows are `[a..., b]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyhedronJson {
    pub dim: usize,
    #[serde(default)]
    pub ineqs: Vec<Vec<Rational>>,
    #[serde(default)]
    pub eqs: Vec<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<QVector>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rays: Option<Vec<QVector>>,
}

/// Canonical rows: equalities in reduced echelon form with primitive integer
/// entries, inequalities reduced modulo the equalities, scaled to primitive
/// integers, deduplicated by normal keeping the tightest offset, and sorted.
fn normalize(dim: usize, ineqs: Vec<HalfSpace>, eqs: Vec<HalfSpace>) -> (Vec<HalfSpace>, Vec<HalfSpace>) {
    let eq_rows: Vec<QVector> = eqs.iter().map(HalfSpace::row).collect();
    let (ech, pivots) = rref(&eq_rows, dim + 1);
    if pivots.last() == Some(&dim) {
        return (vec![HalfSpace::infeasible(dim)], Vec::new());
    }
    let eqs: Vec<HalfSpace> = ech.iter().map(|r| HalfSpace::from_row(&r.primitive())).collect();
    let mut out: Vec<HalfSpace> = Vec::with_capacity(ineqs.len());
    for h in ineqs {
        let mut row = h.row();
        for (e, &p) in ech.iter().zip(&pivots) {
            if !row[p].is_zero() {
                let f = -&row[p];
                row = row.axpy(&f, e);
            }
        }
        let normal = row.head(dim);
        if normal.is_zero() {
            if row[dim].is_negative() {
                return (vec![HalfSpace::infeasible(dim)], Vec::new());
            }
            continue;
        }
        // scale so the normal is primitive; the offset follows
        let prim = normal.primitive();
        let idx = normal.leading().unwrap();
        let factor = &prim[idx] / &normal[idx];
        out.push(HalfSpace::new(prim, &row[dim] * &factor));
    }
    out.sort();
    let mut dedup: Vec<HalfSpace> = Vec::with_capacity(out.len());
    for h in out {
        match dedup.last_mut() {
            Some(last) if last.normal == h.normal => {
                if h.offset < last.offset {
                    last.offset = h.offset;
                }
            }
            _ => dedup.push(h),
        }
    }
    (dedup, eqs)
}

/// Closed convex hull of a union: generated by all inputs' generators.
pub fn cco_union(ps: &[Polyhedron]) -> Result<Polyhedron> {
    let Some(first) = ps.first() else {
        return Err(Error::InvalidInput("cco_union of no sets".into()));
    };
    let dim = first.dim;
    let mut points = Vec::new();
    let mut rays = Vec::new();
    let mut lines = Vec::new();
    let mut any = false;
    for p in ps {
        check_dim(dim, p.dim)?;
        if p.is_empty() {
            continue;
        }
        any = true;
        let g = p.generators()?;
        points.extend(g.points.iter().cloned());
        rays.extend(g.rays.iter().cloned());
        lines.extend(g.lines.iter().cloned());
    }
    if !any {
        return Err(Error::EmptySet("cco_union needs a nonempty input".into()));
    }
    Polyhedron::from_generators(dim, points, rays, lines)
}

/// Exact Minkowski sum of two nonempty polyhedra.
pub fn minkowski_sum(p: &Polyhedron, q: &Polyhedron) -> Result<Polyhedron> {
    check_dim(p.dim, q.dim)?;
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptySet("Minkowski sum operand".into()));
    }
    let gp = p.generators()?;
    let gq = q.generators()?;
    let mut points = Vec::with_capacity(gp.points.len() * gq.points.len());
    for a in &gp.points {
        for b in &gq.points {
            points.push(a.add(b));
        }
    }
    let rays = gp.rays.iter().chain(&gq.rays).cloned().collect();
    let lines = gp.lines.iter().chain(&gq.lines).cloned().collect();
    Polyhedron::from_generators(p.dim, points, rays, lines)
}

pub fn polyhedron_equal(p: &Polyhedron, q: &Polyhedron) -> Result<bool> {
    p.equals(q)
}

pub fn interior_point(p: &Polyhedron) -> Result<Option<QVector>> {
    p.interior_point()
}

pub fn contains(p: &Polyhedron, x: &QVector) -> bool {
    p.contains(x)
}

pub fn lineality_space(p: &Polyhedron) -> Polyhedron {
    p.lineality_space()
}

pub fn recession_cone(p: &Polyhedron) -> Result<Polyhedron> {
    p.recession_cone()
}

/// Conversion in the requested direction; the result carries both forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    HToV,
    VToH,
}

pub fn dd_convert(p: &Polyhedron, direction: Direction) -> Result<Polyhedron> {
    match direction {
        Direction::HToV => {
            p.generators()?;
            Ok(p.clone())
        }
        Direction::VToH => p.canonical(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn hs(a: &[i64], b: i64) -> HalfSpace {
        HalfSpace::new(QVector::from_ints(a), qi(b))
    }

    #[test]
    fn unit_square_vertices() {
        let p = Polyhedron::boxed(&QVector::from_ints(&[0, 0]), &QVector::from_ints(&[1, 1])).unwrap();
        let g = p.generators().unwrap();
        assert_eq!(
            g.points,
            vec![
                QVector::from_ints(&[0, 0]),
                QVector::from_ints(&[0, 1]),
                QVector::from_ints(&[1, 0]),
                QVector::from_ints(&[1, 1])
            ]
        );
        assert!(g.rays.is_empty() && g.lines.is_empty());
    }

    #[test]
    fn half_line() {
        let p = Polyhedron::new(1, vec![hs(&[-1], 0)], vec![]).unwrap();
        let g = p.generators().unwrap();
        assert_eq!(g.points, vec![QVector::from_ints(&[0])]);
        assert_eq!(g.rays, vec![QVector::from_ints(&[1])]);
    }

    #[test]
    fn halfplane_with_line() {
        let p = Polyhedron::new(2, vec![hs(&[1, 1], 1)], vec![]).unwrap();
        let g = p.generators().unwrap();
        assert_eq!(g.points, vec![QVector::new(vec![q(1, 2), q(1, 2)])]);
        assert_eq!(g.rays, vec![QVector::from_ints(&[-1, -1])]);
        assert_eq!(g.lines, vec![QVector::from_ints(&[1, -1])]);
        let back = p.canonical().unwrap();
        assert!(back.equals(&p).unwrap());
        assert_eq!(back.ineqs(), p.ineqs());
    }

    #[test]
    fn recession_of_abs_epigraph() {
        // epi |x| = {(x, r) : x - r <= 0, -x - r <= 0}
        let epi = Polyhedron::new(2, vec![hs(&[1, -1], 0), hs(&[-1, -1], 0)], vec![]).unwrap();
        let rc = epi.recession_cone().unwrap();
        let g = rc.generators().unwrap();
        assert_eq!(g.rays, vec![QVector::from_ints(&[-1, 1]), QVector::from_ints(&[1, 1])]);
    }

    #[test]
    fn cco_of_halflines_and_point() {
        let up = |u: i64| Polyhedron::new(2, vec![hs(&[0, -1], 0)], vec![hs(&[1, 0], u)]).unwrap();
        let hull = cco_union(&[up(1), up(-1)]).unwrap();
        let expect = Polyhedron::new(2, vec![hs(&[1, 0], 1), hs(&[-1, 0], 1), hs(&[0, -1], 0)], vec![]).unwrap();
        assert!(hull.equals(&expect).unwrap());
        let neg = Polyhedron::new(1, vec![hs(&[1], 0)], vec![]).unwrap();
        let two = Polyhedron::point(&QVector::from_ints(&[2]));
        let hull = cco_union(&[neg, two]).unwrap();
        assert_eq!(hull.ineqs(), &[hs(&[1], 2)]);
    }

    #[test]
    fn minkowski_intervals() {
        let unit = Polyhedron::boxed(&QVector::from_ints(&[0]), &QVector::from_ints(&[1])).unwrap();
        let s = minkowski_sum(&unit, &unit).unwrap();
        let expect = Polyhedron::boxed(&QVector::from_ints(&[0]), &QVector::from_ints(&[2])).unwrap();
        assert!(s.equals(&expect).unwrap());
    }

    #[test]
    fn interior_and_lineality() {
        let tri = Polyhedron::new(2, vec![hs(&[1, 1], 1), hs(&[-1, 0], 0), hs(&[0, -1], 0)], vec![]).unwrap();
        assert_eq!(tri.interior_point().unwrap(), Some(QVector::new(vec![q(1, 3), q(1, 3)])));
        let ray = Polyhedron::new(1, vec![hs(&[-1], 0)], vec![]).unwrap();
        assert!(ray.lineality_basis().is_empty());
        let axis = Polyhedron::new(2, vec![], vec![hs(&[0, 1], 0)]).unwrap();
        assert_eq!(axis.lineality_basis(), vec![QVector::from_ints(&[1, 0])]);
        assert_eq!(axis.interior_point().unwrap(), None);
    }

    #[test]
    fn empty_detection_and_errors() {
        let p = Polyhedron::new(1, vec![hs(&[1], 0), hs(&[-1], -1)], vec![]).unwrap();
        assert!(p.is_empty());
        assert!(p.recession_cone().is_err());
        assert!(p.generators().unwrap().points.is_empty());
    }
}
