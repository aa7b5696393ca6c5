//! Polyhedral convex functions: `max_i <a_i, x> + b_i` on a polyhedral domain.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::certificate::{Counterexample, Inclusion};
use crate::error::{check_dim, Error, Result};
use crate::lp::{LpBuilder, LpResult, LpStatus, Relation, Sense};
use crate::polyhedron::{HalfSpace, Polyhedron, PolyhedronJson};
use crate::rational::{ExtendedRational, Rational};
use crate::report::{digest_of, CheckReport, Checker, Witness};
use crate::vector::QVector;

/// The affine form `<a, x> + b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffinePiece {
    pub a: QVector,
    pub b: Rational,
}

impl AffinePiece {
    pub fn new(a: QVector, b: Rational) -> Self {
        AffinePiece { a, b }
    }

    pub fn eval(&self, x: &QVector) -> Rational {
        self.a.dot(x) + &self.b
    }
}

/// Certifies `f(x) >= <x*, x> + alpha |x|_1 + r` for every `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpiPointedCertificate {
    pub minorant_slope: QVector,
    pub margin: Rational,
    pub offset: Rational,
}

impl EpiPointedCertificate {
    /// Re-checks the minorant by LP: `f*(x* + alpha s) <= -r` for every sign vector `s`.
    pub fn verify(&self, f: &PolyhedralFunction) -> Result<bool> {
        if !self.margin.is_positive() {
            return Ok(false);
        }
        for s in sign_vectors(f.dim()) {
            let y = self.minorant_slope.axpy(&self.margin, &s);
            match f.conjugate_eval(&y)? {
                ExtendedRational::Finite(v) if v <= -&self.offset => {}
                _ => return Ok(false),
            }
        }
        Ok(true)
    }
}

pub(crate) fn sign_vectors(n: usize) -> Vec<QVector> {
    (0..1u32 << n)
        .map(|mask| {
            (0..n)
                .map(|i| if mask >> i & 1 == 1 { -Rational::one() } else { Rational::one() })
                .collect()
        })
        .collect()
}

/// A proper or improper polyhedral convex function; improper exactly when the
/// domain is empty.
#[derive(Clone, Debug)]
pub struct PolyhedralFunction {
    dim: usize,
    pieces: Vec<AffinePiece>,
    domain: Polyhedron,
    epi: OnceLock<Polyhedron>,
    conj: OnceLock<Result<Box<PolyhedralFunction>>>,
}

impl PartialEq for PolyhedralFunction {
    /// Structural equality; [`PolyhedralFunction::equals`] decides equality as functions.
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.pieces == other.pieces && self.domain == other.domain
    }
}

impl PolyhedralFunction {
    /// Pieces are sorted and deduplicated.
    pub fn new(dim: usize, mut pieces: Vec<AffinePiece>, domain: Polyhedron) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidInput("a polyhedral function needs at least one piece".into()));
        }
        check_dim(dim, domain.dim())?;
        for p in &pieces {
            check_dim(dim, p.a.dim())?;
        }
        pieces.sort();
        pieces.dedup();
        Ok(PolyhedralFunction { dim, pieces, domain, epi: OnceLock::new(), conj: OnceLock::new() })
    }

    pub fn max_affine(dim: usize, pieces: Vec<AffinePiece>) -> Result<Self> {
        Self::new(dim, pieces, Polyhedron::universe(dim))
    }

    pub fn affine(a: QVector, b: Rational) -> Self {
        let n = a.dim();
        Self::new(n, vec![AffinePiece::new(a, b)], Polyhedron::universe(n)).expect("one piece")
    }

    pub fn indicator(domain: Polyhedron) -> Self {
        let n = domain.dim();
        Self::new(n, vec![AffinePiece::new(QVector::zeros(n), Rational::zero())], domain).expect("one piece")
    }

    /// `s |x|_1` on `R^n`.
    pub fn l1_norm(n: usize, s: &Rational) -> Self {
        let pieces = sign_vectors(n).into_iter().map(|v| AffinePiece::new(v.scale(s), Rational::zero())).collect();
        Self::max_affine(n, pieces).expect("nonempty")
    }

    /// The support function `d -> sup {<d, x> : x in P}` of a nonempty polyhedron.
    pub fn support_function(p: &Polyhedron) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::EmptySet("support function of the empty set".into()));
        }
        let g = p.generators()?;
        let n = p.dim();
        let pieces = g.points.iter().map(|v| AffinePiece::new(v.clone(), Rational::zero())).collect();
        let ineqs = g.rays.iter().map(|r| HalfSpace::new(r.clone(), Rational::zero())).collect();
        let eqs = g.lines.iter().map(|l| HalfSpace::new(l.clone(), Rational::zero())).collect();
        Self::new(n, pieces, Polyhedron::new(n, ineqs, eqs)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn domain(&self) -> &Polyhedron {
        &self.domain
    }

    pub fn is_proper(&self) -> bool {
        !self.domain.is_empty()
    }

    fn require_proper(&self, what: &str) -> Result<()> {
        if self.is_proper() {
            Ok(())
        } else {
            Err(Error::ImproperFunction(format!("{what} needs a nonempty domain")))
        }
    }

    pub fn eval(&self, x: &QVector) -> ExtendedRational {
        if x.dim() != self.dim || !self.domain.contains(x) {
            return ExtendedRational::PosInfinity;
        }
        ExtendedRational::Finite(self.finite_max(x))
    }

    /// `max_i <a_i, x> + b_i`, ignoring the domain.
    pub fn finite_max(&self, x: &QVector) -> Rational {
        self.pieces.iter().map(|p| p.eval(x)).max().expect("nonempty pieces")
    }

    /// `{(x, rho) : x in D, rho >= <a_i, x> + b_i}` in `R^(n+1)`, last coordinate `rho`.
    pub fn epigraph(&self) -> &Polyhedron {
        self.epi.get_or_init(|| {
            let mut ineqs: Vec<HalfSpace> = self
                .pieces
                .iter()
                .map(|p| HalfSpace::new(p.a.with(-Rational::one()), -&p.b))
                .collect();
            ineqs.extend(self.domain.ineqs().iter().map(|h| HalfSpace::new(h.normal.with(Rational::zero()), h.offset.clone())));
            let eqs = self.domain.eqs().iter().map(|h| HalfSpace::new(h.normal.with(Rational::zero()), h.offset.clone())).collect();
            Polyhedron::new(self.dim + 1, ineqs, eqs).expect("consistent dimensions")
        })
    }

    /// `sup_x <y, x> - f(x)` with the LP that attains it.
    pub fn conjugate_lp(&self, y: &QVector) -> Result<LpResult> {
        check_dim(self.dim, y.dim())?;
        self.require_proper("conjugate")?;
        self.epigraph().optimize(&y.with(-Rational::one()), Sense::Maximize)
    }

    pub fn conjugate_eval(&self, y: &QVector) -> Result<ExtendedRational> {
        Ok(self.conjugate_lp(y)?.optimum)
    }

    /// The conjugate as an explicit polyhedral function, computed once from the
    /// generators of the epigraph.
    pub fn conjugate(&self) -> Result<&PolyhedralFunction> {
        self.conj
            .get_or_init(|| {
                self.require_proper("conjugate")?;
                let n = self.dim;
                let g = self.epigraph().generators()?;
                let pieces = g
                    .points
                    .iter()
                    .map(|v| AffinePiece::new(v.head(n), -&v[n]))
                    .collect();
                let ineqs = g.rays.iter().map(|r| HalfSpace::new(r.head(n), r[n].clone())).collect();
                let eqs = g.lines.iter().map(|l| HalfSpace::new(l.head(n), l[n].clone())).collect();
                Ok(Box::new(Self::new(n, pieces, Polyhedron::new(n, ineqs, eqs)?)?))
            })
            .as_ref()
            .map(|b| &**b)
            .map_err(Clone::clone)
    }

    pub fn biconjugate(&self) -> Result<PolyhedralFunction> {
        Ok(self.conjugate()?.conjugate()?.clone())
    }

    /// `{y : f(y) - <y, x> <= r}`.
    pub fn shifted_sublevel(&self, x: &QVector, r: &Rational) -> Result<Polyhedron> {
        check_dim(self.dim, x.dim())?;
        let mut ineqs: Vec<HalfSpace> =
            self.pieces.iter().map(|p| HalfSpace::new(p.a.sub(x), r - &p.b)).collect();
        ineqs.extend(self.domain.ineqs().iter().cloned());
        Polyhedron::new(self.dim, ineqs, self.domain.eqs().to_vec())
    }

    pub fn sublevel(&self, r: &Rational) -> Result<Polyhedron> {
        self.shifted_sublevel(&QVector::zeros(self.dim), r)
    }

    /// `{x* : f*(x*) + f(x) - <x*, x> <= eps}`; empty when `f(x) = +inf`.
    pub fn eps_subdifferential(&self, x: &QVector, eps: &Rational) -> Result<Polyhedron> {
        check_dim(self.dim, x.dim())?;
        if eps.is_negative() {
            return Err(Error::InvalidInput(format!("negative epsilon {eps}")));
        }
        let fx = match self.eval(x) {
            ExtendedRational::Finite(v) => v,
            _ => return Ok(Polyhedron::empty(self.dim)),
        };
        self.conjugate()?.shifted_sublevel(x, &(eps - &fx))
    }

    /// `f^inf`, the support function of `dom f*`.
    pub fn recession_function(&self) -> Result<PolyhedralFunction> {
        Self::support_function(self.conjugate()?.domain())
    }

    /// Evaluates `f^inf(d) = max_i <a_i, d>` on the recession cone of the domain.
    pub fn recession_eval(&self, d: &QVector) -> ExtendedRational {
        if !self.domain.contains_direction(d) {
            return ExtendedRational::PosInfinity;
        }
        ExtendedRational::Finite(self.pieces.iter().map(|p| p.a.dot(d)).max().expect("nonempty"))
    }

    /// `inf f` with a minimizer when attained.
    pub fn infimum(&self) -> Result<(ExtendedRational, Option<QVector>)> {
        self.require_proper("infimum")?;
        let n = self.dim;
        let res = self.epigraph().optimize(&QVector::unit(n + 1, n), Sense::Minimize)?;
        Ok(match res.status {
            LpStatus::Optimal => (res.optimum, res.primal_point.map(|p| p.head(n))),
            _ => (ExtendedRational::NegInfinity, None),
        })
    }

    /// An epi-pointedness certificate when `dom f*` has nonempty interior.
    pub fn is_epi_pointed(&self) -> Result<Option<EpiPointedCertificate>> {
        if !self.is_proper() {
            return Ok(None);
        }
        let g = self.conjugate()?;
        let dom = g.domain();
        if dom.is_empty() || dom.eqs().iter().any(|h| !h.normal.is_zero()) {
            return Ok(None);
        }
        let n = self.dim;
        let mut lp = LpBuilder::new();
        let xs = lp.vars(n, false);
        let alpha = lp.var(true);
        for h in dom.ineqs() {
            let mut terms = Vec::new();
            LpBuilder::dense_terms(&mut terms, xs, &h.normal);
            terms.push((alpha, h.normal.l1_norm()));
            lp.row(terms, Relation::Le, h.offset.clone());
        }
        lp.row(vec![(alpha, Rational::one())], Relation::Le, Rational::one());
        let res = lp.solve(&[(alpha, Rational::one())], Sense::Maximize)?;
        let Some(v) = res.value() else {
            return Ok(None);
        };
        if !v.is_positive() {
            return Ok(None);
        }
        let pt = res.primal_point.clone().unwrap();
        let slope = pt.head(n);
        let margin = pt[alpha].clone();
        let mut worst: Option<Rational> = None;
        for s in sign_vectors(n) {
            let y = slope.axpy(&margin, &s);
            let ExtendedRational::Finite(val) = self.conjugate_eval(&y)? else {
                return Err(Error::InvalidInput("box corner outside the conjugate domain".into()));
            };
            worst = Some(match worst {
                None => val,
                Some(w) => w.max(val),
            });
        }
        let cert = EpiPointedCertificate { minorant_slope: slope, margin, offset: -worst.unwrap() };
        debug_assert!(cert.verify(self).unwrap_or(false));
        Ok(Some(cert))
    }

    /// `f + <c, .>`.
    pub fn add_linear(&self, c: &QVector) -> PolyhedralFunction {
        let pieces = self.pieces.iter().map(|p| AffinePiece::new(p.a.add(c), p.b.clone())).collect();
        Self::new(self.dim, pieces, self.domain.clone()).expect("same shape")
    }

    /// `s f + c` for `s > 0`.
    pub fn scale_shift(&self, s: &Rational, c: &Rational) -> Result<PolyhedralFunction> {
        if !s.is_positive() {
            return Err(Error::InvalidInput("scale must be positive".into()));
        }
        let pieces = self.pieces.iter().map(|p| AffinePiece::new(p.a.scale(s), &p.b * s + c)).collect();
        Self::new(self.dim, pieces, self.domain.clone())
    }

    /// `f + delta_P`.
    pub fn restrict(&self, p: &Polyhedron) -> Result<PolyhedralFunction> {
        Self::new(self.dim, self.pieces.clone(), self.domain.intersect(p)?)
    }

    /// Whether `self <= other` everywhere, with a violating point otherwise.
    pub fn le(&self, other: &PolyhedralFunction) -> Result<Inclusion> {
        check_dim(self.dim, other.dim)?;
        if !other.is_proper() {
            return Ok(Inclusion::Holds);
        }
        if let Inclusion::Violated(cx) = other.domain.is_subset_of(&self.domain)? {
            return Ok(Inclusion::Violated(cx.with_reason("domain of the larger function escapes")));
        }
        let n = self.dim;
        for p in &self.pieces {
            let res = other.epigraph().optimize(&p.a.with(-Rational::one()), Sense::Maximize)?;
            match res.status {
                LpStatus::Unbounded => {
                    return Ok(Inclusion::Violated(Counterexample::direction(
                        res.direction.unwrap().head(n),
                        "piece grows faster along a direction",
                    )))
                }
                LpStatus::Optimal => {
                    if res.value().unwrap() + &p.b > Rational::zero() {
                        return Ok(Inclusion::Violated(Counterexample::point(
                            res.primal_point.unwrap().head(n),
                            "pointwise order violated",
                        )));
                    }
                }
                LpStatus::Infeasible => {}
            }
        }
        Ok(Inclusion::Holds)
    }

    /// Equality as functions (epigraph equality).
    pub fn equals(&self, other: &PolyhedralFunction) -> Result<bool> {
        check_dim(self.dim, other.dim)?;
        self.epigraph().equals(other.epigraph())
    }

    /// `f_1 + ... + f_N` as a polyhedral function: pieces are sums over tuples,
    /// pruned by LP so that each kept piece is strictly maximal somewhere.
    pub fn sum(fs: &[PolyhedralFunction], max_pieces: usize) -> Result<PolyhedralFunction> {
        let Some(first) = fs.first() else {
            return Err(Error::InvalidInput("empty sum".into()));
        };
        let n = first.dim;
        let mut domain = first.domain.clone();
        let mut pieces = first.pieces.clone();
        for f in &fs[1..] {
            check_dim(n, f.dim)?;
            domain = domain.intersect(&f.domain)?;
            let mut next = Vec::with_capacity(pieces.len() * f.pieces.len());
            for p in &pieces {
                for q in &f.pieces {
                    next.push(AffinePiece::new(p.a.add(&q.a), &p.b + &q.b));
                }
            }
            next.sort();
            next.dedup();
            pieces = prune_pieces(next, &domain)?;
        }
        if pieces.len() > max_pieces {
            return Err(Error::InvalidInput(format!("sum has {} pieces, above the cap {max_pieces}", pieces.len())));
        }
        Self::new(n, pieces, domain)
    }

    pub fn to_json(&self) -> FunctionJson {
        FunctionJson {
            dim: self.dim,
            pieces: self.pieces.clone(),
            domain: DomainJson {
                ineqs: self.domain.ineqs().iter().map(|h| h.normal.with(h.offset.clone()).into_inner()).collect(),
                eqs: self.domain.eqs().iter().map(|h| h.normal.with(h.offset.clone()).into_inner()).collect(),
            },
        }
    }

    pub fn from_json(j: &FunctionJson) -> Result<Self> {
        let domain = Polyhedron::from_json(&PolyhedronJson {
            dim: j.dim,
            ineqs: j.domain.ineqs.clone(),
            eqs: j.domain.eqs.clone(),
            vertices: None,
            rays: None,
        })?;
        Self::new(j.dim, j.pieces.clone(), domain)
    }
}

/// Drops pieces that are nowhere strictly above all remaining ones on `domain`.
fn prune_pieces(mut pieces: Vec<AffinePiece>, domain: &Polyhedron) -> Result<Vec<AffinePiece>> {
    if domain.is_empty() {
        pieces.truncate(1);
        return Ok(pieces);
    }
    let n = domain.dim();
    let mut i = 0;
    while i < pieces.len() && pieces.len() > 1 {
        let mut lp = LpBuilder::new();
        let x = lp.vars(n, false);
        let t = lp.var(false);
        domain.push_rows(&mut lp, x, None);
        for (j, q) in pieces.iter().enumerate() {
            if j == i {
                continue;
            }
            // <a_i - a_j, x> + b_i - b_j >= t
            let mut terms = Vec::new();
            LpBuilder::dense_terms(&mut terms, x, &pieces[i].a.sub(&q.a));
            terms.push((t, -Rational::one()));
            lp.row(terms, Relation::Ge, &q.b - &pieces[i].b);
        }
        lp.row(vec![(t, Rational::one())], Relation::Le, Rational::one());
        let res = lp.solve(&[(t, Rational::one())], Sense::Maximize)?;
        let keep = res.value().is_some_and(|v| v.is_positive());
        if keep {
            i += 1;
        } else {
            pieces.remove(i);
        }
    }
    Ok(pieces)
}

impl Serialize for PolyhedralFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyhedralFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = FunctionJson::deserialize(d)?;
        PolyhedralFunction::from_json(&j).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainJson {
    #[serde(default)]
    pub ineqs: Vec<Vec<Rational>>,
    #[serde(default)]
    pub eqs: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionJson {
    pub dim: usize,
    pub pieces: Vec<AffinePiece>,
    #[serde(default = "DomainJson::full")]
    pub domain: DomainJson,
}

impl DomainJson {
    fn full() -> Self {
        DomainJson { ineqs: Vec::new(), eqs: Vec::new() }
    }
}

/// `N^eps_C(x)`, the epsilon-subdifferential of the indicator of `C` at `x`.
pub fn eps_normal_set(c: &Polyhedron, x: &QVector, eps: &Rational) -> Result<Polyhedron> {
    PolyhedralFunction::indicator(c.clone()).eps_subdifferential(x, eps)
}

const DENSITY_GAMMAS: [(i64, i64); 4] = [(1, 1), (1, 2), (1, 4), (1, 8)];

/// Checks that `∂_eta g(x)` is the closure of its intersection with `int dom g*`
/// (for `eta > 0`) or the intersection over a gamma grid of such closures (for
/// `eta = 0`).
pub fn verify_subdiff_density(g: &PolyhedralFunction, x: &QVector, eta: &Rational) -> Result<CheckReport> {
    let digest = digest_of(&(g, x, eta));
    let mut ck = Checker::new("subdiff-density", digest);
    if eta.is_negative() {
        return Err(Error::InvalidInput("negative eta".into()));
    }
    if g.is_epi_pointed()?.is_none() {
        return Ok(ck.hypotheses_not_met("function is not epi-pointed"));
    }
    if !g.eval(x).is_finite() {
        return Ok(ck.trivial("point outside the domain: both sides empty"));
    }
    let q = g.conjugate()?.domain().clone();
    let meets_interior = |p: &Polyhedron| -> Result<Option<QVector>> {
        // max s with p's rows and q's inequalities shifted by s
        let n = g.dim();
        let mut lp = LpBuilder::new();
        let y = lp.vars(n, false);
        let s = lp.var(false);
        p.push_rows(&mut lp, y, None);
        for h in q.ineqs() {
            let mut terms = Vec::new();
            LpBuilder::dense_terms(&mut terms, y, &h.normal);
            terms.push((s, Rational::one()));
            lp.row(terms, Relation::Le, h.offset.clone());
        }
        lp.row(vec![(s, Rational::one())], Relation::Le, Rational::one());
        let res = lp.solve(&[(s, Rational::one())], Sense::Maximize)?;
        Ok(match res.value() {
            Some(v) if v.is_positive() => res.primal_point.map(|pt| pt.head(n)),
            _ => None,
        })
    };
    if eta.is_positive() {
        let p = g.eps_subdifferential(x, eta)?;
        match meets_interior(&p)? {
            Some(pt) => ck.set_witness(Witness::Point { point: pt }),
            None => ck.fail(Counterexample::point(x.clone(), "subdifferential misses the interior of dom g*")),
        }
        ck.note("closure of P ∩ int Q equals P ∩ Q = P once the intersection is nonempty");
        return Ok(ck.finish());
    }
    let exact = g.eps_subdifferential(x, &Rational::zero())?;
    let mut prev: Option<Polyhedron> = None;
    for (a, b) in DENSITY_GAMMAS {
        let gamma = Rational::new(a, b);
        let p = g.eps_subdifferential(x, &gamma)?;
        ck.require_that(&format!("interior meets ∂_{gamma}"), meets_interior(&p)?.is_some(), || {
            Counterexample::point(x.clone(), format!("∂_{gamma} g(x) misses int dom g*"))
        });
        ck.require(&format!("∂_0 ⊆ ∂_{gamma}"), exact.is_subset_of(&p)?);
        if let Some(prev) = &prev {
            ck.require(&format!("nested at {gamma}"), p.is_subset_of(prev)?);
        }
        prev = Some(p);
    }
    ck.note("exactness: the gamma-intersection equals the eps = 0 set by lower semicontinuity");
    Ok(ck.finish())
}

/// Checks `{h <= r} = ∩_gamma cl{h < r + gamma}` and, when `r > inf h`,
/// `{h <= r} = cl{h < r}`.
pub fn verify_sublevel_closure(h: &PolyhedralFunction, r: &Rational) -> Result<CheckReport> {
    let digest = digest_of(&(h, r));
    let mut ck = Checker::new("sublevel-closure", digest);
    let (inf, argmin) = h.infimum()?;
    if let ExtendedRational::Finite(m) = &inf {
        if r < m {
            return Ok(ck.trivial("r is below inf h: both sides empty"));
        }
    }
    let s = h.sublevel(r)?;
    let mut prev: Option<Polyhedron> = None;
    for (a, b) in DENSITY_GAMMAS {
        let gamma = Rational::new(a, b);
        let level = h.sublevel(&(r + &gamma))?;
        ck.require(&format!("{{h <= r}} ⊆ {{h <= r + {gamma}}}"), s.is_subset_of(&level)?);
        if let Some(prev) = &prev {
            ck.require(&format!("nested at {gamma}"), level.is_subset_of(prev)?);
        }
        prev = Some(level);
    }
    let strict_nonempty = match &inf {
        ExtendedRational::Finite(m) => r > m,
        _ => true,
    };
    if !strict_nonempty {
        ck.note("r = inf h: only the gamma-intersection form applies");
        return Ok(ck.finish());
    }
    let x0 = match (&inf, argmin) {
        (ExtendedRational::Finite(_), Some(x0)) => x0,
        _ => {
            let n = h.dim();
            let res = h.epigraph().optimize(&QVector::unit(n + 1, n), Sense::Minimize)?;
            let p = res.primal_point.unwrap();
            let d = res.direction.unwrap();
            let drop = -&d[n];
            let t = ((&p[n] - r + Rational::one()) / drop).ceil().max(Rational::zero());
            p.axpy(&t, &d).head(n)
        }
    };
    let below = |v: &QVector| matches!(h.eval(v), ExtendedRational::Finite(val) if val < *r);
    ck.require_that("strict point", below(&x0), || Counterexample::point(x0.clone(), "not strictly below r"));
    let g = s.generators()?;
    let half = Rational::new(1, 2);
    for v in &g.points {
        let mid = x0.add(v).scale(&half);
        ck.require_that("midpoint strictly below", below(&mid), || Counterexample::point(mid.clone(), "midpoint not strict"));
    }
    for d in g.all_rays() {
        let step = x0.add(&d);
        ck.require_that("ray step strictly below", below(&step), || Counterexample::direction(d.clone(), "ray leaves the strict set"));
    }
    Ok(ck.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};
    use crate::report::CheckStatus;

    pub(crate) fn abs() -> PolyhedralFunction {
        PolyhedralFunction::l1_norm(1, &qi(1))
    }

    pub(crate) fn max_two_on_box() -> PolyhedralFunction {
        // max(x, 2x - 1) on [0, 5]
        let dom = Polyhedron::boxed(&QVector::from_ints(&[0]), &QVector::from_ints(&[5])).unwrap();
        PolyhedralFunction::new(
            1,
            vec![
                AffinePiece::new(QVector::from_ints(&[1]), qi(0)),
                AffinePiece::new(QVector::from_ints(&[2]), qi(-1)),
            ],
            dom,
        )
        .unwrap()
    }

    fn interval(a: Rational, b: Rational) -> Polyhedron {
        Polyhedron::boxed(&QVector::new(vec![a]), &QVector::new(vec![b])).unwrap()
    }

    fn pt(v: Rational) -> QVector {
        QVector::new(vec![v])
    }

    #[test]
    fn evaluation() {
        assert_eq!(abs().eval(&pt(qi(0))), ExtendedRational::Finite(qi(0)));
        assert_eq!(abs().eval(&pt(qi(-3))), ExtendedRational::Finite(qi(3)));
        assert_eq!(max_two_on_box().eval(&pt(qi(2))), ExtendedRational::Finite(qi(3)));
        assert_eq!(max_two_on_box().eval(&pt(qi(6))), ExtendedRational::PosInfinity);
    }

    #[test]
    fn conjugate_values() {
        let f = abs();
        assert_eq!(f.conjugate_eval(&pt(qi(0))).unwrap(), ExtendedRational::Finite(qi(0)));
        assert_eq!(f.conjugate_eval(&pt(qi(2))).unwrap(), ExtendedRational::PosInfinity);
        // sup_x 3x/2 - max(x, 2x-1) over [0,5] is attained at x = 1
        assert_eq!(max_two_on_box().conjugate_eval(&pt(q(3, 2))).unwrap(), ExtendedRational::Finite(q(1, 2)));
    }

    #[test]
    fn conjugate_functions() {
        let g = abs().conjugate().unwrap().clone();
        assert!(g.equals(&PolyhedralFunction::indicator(interval(qi(-1), qi(1)))).unwrap());
        let back = PolyhedralFunction::indicator(interval(qi(-1), qi(1))).conjugate().unwrap().clone();
        assert!(back.equals(&abs()).unwrap());
        let h = max_two_on_box().conjugate().unwrap().clone();
        // epigraph vertices (0,0), (1,1), (5,9) give max(0, y - 1, 5y - 9)
        let expect = PolyhedralFunction::max_affine(
            1,
            vec![
                AffinePiece::new(QVector::from_ints(&[0]), qi(0)),
                AffinePiece::new(QVector::from_ints(&[1]), qi(-1)),
                AffinePiece::new(QVector::from_ints(&[5]), qi(-9)),
            ],
        )
        .unwrap();
        assert_eq!(h.pieces(), expect.pieces());
        assert!(h.domain().equals(&Polyhedron::universe(1)).unwrap());
        for y in [qi(-1), qi(0), q(1, 2), q(3, 2), qi(3)] {
            assert_eq!(h.eval(&pt(y.clone())), max_two_on_box().conjugate_eval(&pt(y)).unwrap());
        }
    }

    #[test]
    fn biconjugate_of_point_indicator() {
        let f = PolyhedralFunction::indicator(Polyhedron::point(&pt(qi(0))));
        assert!(f.biconjugate().unwrap().equals(&f).unwrap());
    }

    #[test]
    fn subdifferentials() {
        let s = abs().eps_subdifferential(&pt(qi(0)), &qi(0)).unwrap();
        assert!(s.equals(&interval(qi(-1), qi(1))).unwrap());
        for n in 2..=6i64 {
            let f = abs().scale_shift(&(qi(1) - q(1, n)), &qi(0)).unwrap();
            for eps in [qi(0), q(1, 2), qi(1)] {
                let s = f.eps_subdifferential(&pt(qi(0)), &eps).unwrap();
                assert!(s.equals(&interval(q(1, n) - qi(1), qi(1) - q(1, n))).unwrap());
            }
        }
        assert!(abs().eps_subdifferential(&pt(qi(0)), &qi(-1)).is_err());
    }

    #[test]
    fn normal_sets() {
        let half_line = Polyhedron::new(1, vec![HalfSpace::new(QVector::from_ints(&[-1]), qi(0))], vec![]).unwrap();
        let n = eps_normal_set(&half_line, &pt(qi(0)), &qi(0)).unwrap();
        let expect = Polyhedron::new(1, vec![HalfSpace::new(QVector::from_ints(&[1]), qi(0))], vec![]).unwrap();
        assert!(n.equals(&expect).unwrap());
        let n = eps_normal_set(&interval(qi(0), qi(1)), &pt(qi(0)), &q(1, 2)).unwrap();
        let expect = Polyhedron::new(1, vec![HalfSpace::new(QVector::from_ints(&[1]), q(1, 2))], vec![]).unwrap();
        assert!(n.equals(&expect).unwrap());
        assert!(eps_normal_set(&interval(qi(0), qi(1)), &pt(qi(2)), &qi(0)).unwrap().is_empty());
    }

    #[test]
    fn recession_functions() {
        assert!(abs().recession_function().unwrap().equals(&abs()).unwrap());
        let ind = PolyhedralFunction::indicator(interval(qi(0), qi(1)));
        let rec = ind.recession_function().unwrap();
        assert!(rec.equals(&PolyhedralFunction::indicator(Polyhedron::point(&pt(qi(0))))).unwrap());
        let dom = Polyhedron::new(1, vec![HalfSpace::new(QVector::from_ints(&[-1]), qi(0))], vec![]).unwrap();
        let f = PolyhedralFunction::new(1, max_two_on_box().pieces().to_vec(), dom.clone()).unwrap();
        let expect = PolyhedralFunction::new(1, vec![AffinePiece::new(QVector::from_ints(&[2]), qi(0))], dom).unwrap();
        assert!(f.recession_function().unwrap().equals(&expect).unwrap());
        assert!(f.recession_function().unwrap().epigraph().equals(&f.epigraph().recession_cone().unwrap()).unwrap());
    }

    #[test]
    fn epi_pointedness() {
        let c = abs().is_epi_pointed().unwrap().unwrap();
        assert_eq!((c.minorant_slope.clone(), c.margin.clone(), c.offset.clone()), (pt(qi(0)), qi(1), qi(0)));
        let d = PolyhedralFunction::indicator(Polyhedron::point(&pt(qi(0)))).is_epi_pointed().unwrap().unwrap();
        assert_eq!((d.minorant_slope, d.margin, d.offset), (pt(qi(0)), qi(1), qi(0)));
        let flat = PolyhedralFunction::max_affine(
            2,
            vec![
                AffinePiece::new(QVector::from_ints(&[1, 0]), qi(0)),
                AffinePiece::new(QVector::from_ints(&[-1, 0]), qi(0)),
            ],
        )
        .unwrap();
        assert!(flat.is_epi_pointed().unwrap().is_none());
    }

    #[test]
    fn density_and_closure_reports() {
        let r = verify_subdiff_density(&abs(), &pt(qi(0)), &qi(1)).unwrap();
        assert_eq!(r.status, CheckStatus::Pass);
        let r = verify_subdiff_density(&abs(), &pt(qi(0)), &qi(0)).unwrap();
        assert_eq!(r.status, CheckStatus::Pass);
        let flat = PolyhedralFunction::l1_norm(1, &qi(1)).restrict(&Polyhedron::universe(1)).unwrap();
        assert_eq!(verify_subdiff_density(&flat, &pt(qi(0)), &qi(0)).unwrap().status, CheckStatus::Pass);
        let line = PolyhedralFunction::affine(QVector::from_ints(&[1, 0]), qi(0));
        let r = verify_subdiff_density(&line, &QVector::from_ints(&[0, 0]), &qi(0)).unwrap();
        assert_eq!(r.status, CheckStatus::HypothesesNotMet);

        assert_eq!(verify_sublevel_closure(&abs(), &qi(1)).unwrap().status, CheckStatus::Pass);
        assert_eq!(verify_sublevel_closure(&abs(), &qi(0)).unwrap().status, CheckStatus::Pass);
        assert_eq!(verify_sublevel_closure(&abs(), &qi(-1)).unwrap().status, CheckStatus::TrivialPass);
        let h = PolyhedralFunction::max_affine(
            1,
            vec![
                AffinePiece::new(QVector::from_ints(&[1]), qi(0)),
                AffinePiece::new(QVector::from_ints(&[2]), qi(-1)),
            ],
        )
        .unwrap();
        // {h <= 2} = (-inf, 3/2]
        let s = h.sublevel(&qi(2)).unwrap();
        let expect = Polyhedron::new(1, vec![HalfSpace::new(QVector::from_ints(&[2]), qi(3))], vec![]).unwrap();
        assert!(s.equals(&expect).unwrap());
        assert_eq!(verify_sublevel_closure(&h, &qi(2)).unwrap().status, CheckStatus::Pass);
    }

    #[test]
    fn finite_sums() {
        let s = PolyhedralFunction::sum(&[abs(), abs().add_linear(&pt(qi(1)))], 200).unwrap();
        // |x| + |x| + x = max(3x, -x)
        let expect = PolyhedralFunction::max_affine(
            1,
            vec![
                AffinePiece::new(QVector::from_ints(&[3]), qi(0)),
                AffinePiece::new(QVector::from_ints(&[-1]), qi(0)),
            ],
        )
        .unwrap();
        assert_eq!(s.pieces(), expect.pieces());
    }
}
