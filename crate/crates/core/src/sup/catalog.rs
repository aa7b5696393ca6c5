//! Executable checks for every identity of the supremum calculus.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certificate::Counterexample;
use crate::error::{check_dim, Error, Result};
use crate::function::{eps_normal_set, PolyhedralFunction};
use crate::linalg::project_out;
use crate::lp::{LpBuilder, Relation, Sense};
use crate::polyhedron::{cco_union, minkowski_sum, HalfSpace, LiftedPolyhedron, Polyhedron};
use crate::rational::{q, ExtendedRational, Rational};
use crate::report::{digest_of, CheckReport, Checker, Witness};
use crate::sampling::sobol_points;
use crate::vector::QVector;

use super::decompose::{decompose, DecompositionMode};
use super::perspective::{
    check_qc1, check_qc2, co_hull_conjugates, conjugate_on_interior, eps_normal_intersection_lifted,
    eps_subdiff_rhs_basic, eps_subdiff_rhs_lifted, inf_convolution, strictly_inside, sum_zero_cone_is_trivial,
};
use super::{FamilyOrder, FunctionFamily};

/// The gamma grid used when none is given.
pub const DEFAULT_GAMMA_GRID: [(i64, i64); 5] = [(1, 1), (1, 2), (1, 4), (1, 8), (1, 16)];

/// Piece cap for explicit finite sums.
const SUM_PIECE_CAP: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Identity {
    L2A,
    L2B,
    L2C,
    L2D,
    L2E,
    L2F,
    P34,
    T41,
    C42,
    T44,
    C46,
    T52,
    T53,
    R54,
    T54A,
    T54B,
    L57,
    RINF,
}

impl Identity {
    pub const ALL: [Identity; 18] = [
        Identity::L2A,
        Identity::L2B,
        Identity::L2C,
        Identity::L2D,
        Identity::L2E,
        Identity::L2F,
        Identity::P34,
        Identity::T41,
        Identity::C42,
        Identity::T44,
        Identity::C46,
        Identity::T52,
        Identity::T53,
        Identity::R54,
        Identity::T54A,
        Identity::T54B,
        Identity::L57,
        Identity::RINF,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Identity::L2A => "L2A",
            Identity::L2B => "L2B",
            Identity::L2C => "L2C",
            Identity::L2D => "L2D",
            Identity::L2E => "L2E",
            Identity::L2F => "L2F",
            Identity::P34 => "P34",
            Identity::T41 => "T41",
            Identity::C42 => "C42",
            Identity::T44 => "T44",
            Identity::C46 => "C46",
            Identity::T52 => "T52",
            Identity::T53 => "T53",
            Identity::R54 => "R54",
            Identity::T54A => "T54A",
            Identity::T54B => "T54B",
            Identity::L57 => "L57",
            Identity::RINF => "RINF",
        }
    }

    /// The mathematical statement being checked.
    pub fn statement(&self) -> &'static str {
        match self {
            Identity::L2A => "epi f* = cl co of the union of the epi f*_t",
            Identity::L2B => "the co-hull of the f*_t is attained with #supp(lambda) <= min{n+1, #T}",
            Identity::L2C => "f* = cl co {f*_t}, pointwise and as epigraphs",
            Identity::L2D => "for an increasing family the epi f*_t are nested, so inf_t f*_t is convex",
            Identity::L2E => "f_t <= f_s, f_t epi-pointed and f*_s proper imply f_s epi-pointed",
            Identity::L2F => "dom f*_t is inside dom f*; for increasing epi-pointed families the interiors cover int dom f*",
            Identity::P34 => "∂_eps f(x) is the gamma-intersection of the perspective sets built from the ∂ f_t(x)",
            Identity::T41 => "for increasing epi-pointed families f*(x*) = min_t f*_t(x*) on int dom f*",
            Identity::C42 => "(f_1 + ... + f_N)* is the inf-convolution of the f*_k on the interior of its domain",
            Identity::T44 => "for increasing families ∂_eps f(x) is the gamma-intersection of cl U_{s >= t} ∂_{eps+gamma} f_s(x)",
            Identity::C46 => "N^eps of an intersection is the sum of N^{eta_t}_{C_t} with sum eta_t = eps",
            Identity::T52 => "under a pointed normal cone of dom f, ∂_eps f(x) splits into member subgradients plus N^{eps_2}_{dom f}(x)",
            Identity::T53 => "under the zero-sum normal condition, ∂_eps f(x) splits into member subgradients plus member normals",
            Identity::R54 => "the splitting needs disjoint supports T_1, T_2 with #T_1 + #T_2 <= n + 1",
            Identity::T54A => "if f* is epi-pointed, epi f* = cl co U epi f*_t + (epi f*)_inf",
            Identity::T54B => "under the zero-sum recession condition, epi f* = co U epi f*_t + co U (epi f*_t)_inf",
            Identity::L57 => "N^eps_{dom f}(x) is the slice at height <x*, x> + eps of four recession-cone descriptions",
            Identity::RINF => "sup_t inf_B f_t <= inf_B f, with equality for increasing families with an inf-compact member, and the robust-infimum subgradient test",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .iter()
            .copied()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownIdentity(s.to_string()))
    }
}

/// A family with the optional sets and robust-infimum region some checks use.
#[derive(Clone, Debug)]
pub struct CheckInstance {
    pub family: FunctionFamily,
    pub sets: Vec<(String, Polyhedron)>,
    pub robust_b: Option<Polyhedron>,
}

#[derive(Serialize)]
struct InstanceView {
    family: super::FamilyJson,
    sets: Vec<(String, Vec<QVector>, Vec<QVector>)>,
    robust_b: Option<(Vec<QVector>, Vec<QVector>)>,
}

fn rows(p: &Polyhedron) -> (Vec<QVector>, Vec<QVector>) {
    (p.ineqs().iter().map(HalfSpace::row).collect(), p.eqs().iter().map(HalfSpace::row).collect())
}

impl CheckInstance {
    pub fn new(family: FunctionFamily) -> Self {
        CheckInstance { family, sets: Vec::new(), robust_b: None }
    }

    /// Content digest of the instance data.
    pub fn digest(&self) -> String {
        digest_of(&self.view())
    }

    fn view(&self) -> InstanceView {
        InstanceView {
            family: self.family.to_json(),
            sets: self.sets.iter().map(|(l, p)| {
                let (i, e) = rows(p);
                (l.clone(), i, e)
            }).collect(),
            robust_b: self.robust_b.as_ref().map(rows),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckParams {
    /// Base point; defaults to a minimizer of the supremum or a domain point.
    pub x: Option<QVector>,
    pub eps: Rational,
    pub gamma_grid: Vec<Rational>,
    /// Number of low-discrepancy dual sample points.
    pub dual_samples: usize,
    pub seed: u64,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            x: None,
            eps: Rational::zero(),
            gamma_grid: DEFAULT_GAMMA_GRID.iter().map(|&(a, b)| q(a, b)).collect(),
            dual_samples: 6,
            seed: 0,
        }
    }
}

/// The base point used when none is given: a minimizer of the supremum when
/// attained, else a point of its domain.
pub fn default_point(f: &FunctionFamily) -> Result<Option<QVector>> {
    let sup = f.sup_function();
    if !sup.is_proper() {
        return Ok(None);
    }
    if let (ExtendedRational::Finite(_), Some(x)) = sup.infimum()? {
        return Ok(Some(x));
    }
    Ok(sup.domain().some_point())
}

/// Runs one identity check on one instance at one base point.
pub fn check_identity(id: Identity, inst: &CheckInstance, params: &CheckParams) -> Result<CheckReport> {
    let f = &inst.family;
    if let Some(x) = &params.x {
        check_dim(f.dim(), x.dim())?;
    }
    if params.eps.is_negative() {
        return Err(Error::InvalidInput("negative epsilon".into()));
    }
    if params.gamma_grid.iter().any(|g| !g.is_positive()) {
        return Err(Error::InvalidInput("gamma grid entries must be positive".into()));
    }
    let x = match &params.x {
        Some(x) => Some(x.clone()),
        None => default_point(f)?,
    };
    let digest = digest_of(&(inst.view(), &x, &params.eps));
    let mut ck = Checker::new(id.as_str(), digest);
    let Some(x) = x else {
        return Ok(ck.hypotheses_not_met("supremum has empty domain"));
    };
    let mut grid = params.gamma_grid.clone();
    grid.sort();
    grid.dedup();
    grid.reverse();
    let cx = Ctx { f, inst, x, eps: params.eps.clone(), grid, params };
    if !f.sup_function().is_proper() {
        return Ok(ck.hypotheses_not_met("supremum has empty domain"));
    }
    ck.note(format!("x = {}, eps = {}", cx.x, cx.eps));
    match id {
        Identity::L2A => l2a(&cx, ck),
        Identity::L2B => l2b(&cx, ck),
        Identity::L2C => l2c(&cx, ck),
        Identity::L2D => l2d(&cx, ck),
        Identity::L2E => l2e(&cx, ck),
        Identity::L2F => l2f(&cx, ck),
        Identity::P34 => p34(&cx, ck),
        Identity::T41 => t41(&cx, ck),
        Identity::C42 => c42(&cx, ck),
        Identity::T44 => t44(&cx, ck),
        Identity::C46 => c46(&cx, ck),
        Identity::T52 => decomposition(&cx, ck, DecompositionMode::T52),
        Identity::T53 => decomposition(&cx, ck, DecompositionMode::T53),
        Identity::R54 => decomposition(&cx, ck, DecompositionMode::R54),
        Identity::T54A => t54a(&cx, ck),
        Identity::T54B => t54b(&cx, ck),
        Identity::L57 => l57(&cx, ck),
        Identity::RINF => rinf(&cx, ck),
    }
}

struct Ctx<'a> {
    f: &'a FunctionFamily,
    inst: &'a CheckInstance,
    x: QVector,
    eps: Rational,
    grid: Vec<Rational>,
    params: &'a CheckParams,
}

fn not_met(ck: Checker, why: &str) -> Result<CheckReport> {
    if ck.failed() {
        return Ok(ck.finish());
    }
    Ok(ck.hypotheses_not_met(why))
}

fn member_conj_epis(f: &FunctionFamily) -> Result<Vec<Polyhedron>> {
    f.members().map(|(_, g)| Ok(g.conjugate()?.epigraph().clone())).collect()
}

fn sample_box(n: usize, r: i64) -> (QVector, QVector) {
    (QVector::new(vec![Rational::from_int(-r); n]), QVector::new(vec![Rational::from_int(r); n]))
}

/// Dual points: slopes of the pieces, domain vertices of f*, and box samples.
fn dual_samples(cx: &Ctx) -> Result<Vec<QVector>> {
    let sup = cx.f.sup_function();
    let n = cx.f.dim();
    let mut pts: Vec<QVector> = sup.pieces().iter().map(|p| p.a.clone()).collect();
    let dom = sup.conjugate()?.domain();
    if let Some(c) = dom.relative_interior_point()? {
        pts.push(c);
    }
    pts.extend(dom.vertices()?);
    let (lo, hi) = sample_box(n, 3);
    pts.extend(sobol_points(&lo, &hi, cx.params.dual_samples, cx.params.seed));
    pts.sort();
    pts.dedup();
    Ok(pts)
}

/// Points strictly inside `dom`: an interior point, inward-pulled vertices, and
/// box samples that land inside.
pub(crate) fn interior_samples(dom: &Polyhedron, count: usize, seed: u64) -> Result<Vec<QVector>> {
    let Some(c) = dom.interior_point()? else {
        return Ok(Vec::new());
    };
    let mut pts = vec![c.clone()];
    let g = dom.generators()?;
    for v in &g.points {
        for k in [2, 8] {
            pts.push(v.axpy(&q(1, k), &c.sub(v)));
        }
    }
    for r in g.all_rays() {
        pts.push(c.add(&r));
    }
    let (lo, hi) = sample_box(dom.dim(), 3);
    pts.extend(sobol_points(&lo, &hi, 4 * count, seed).into_iter().filter(|p| strictly_inside(dom, p)).take(count));
    pts.retain(|p| strictly_inside(dom, p));
    pts.sort();
    pts.dedup();
    Ok(pts)
}

fn l2a(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let epi = cx.f.sup_function().conjugate()?.epigraph();
    let hull = cco_union(&member_conj_epis(cx.f)?)?;
    ck.require("epi f* = cco U epi f*_t", epi.compare(&hull)?);
    Ok(ck.finish())
}

fn l2b(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let cap = (cx.f.dim() + 1).min(cx.f.len());
    let pts = dual_samples(cx)?;
    for y in &pts {
        let full = co_hull_conjugates(cx.f, y, None)?;
        let capped = co_hull_conjugates(cx.f, y, Some(cap))?;
        ck.require_that("support cap", full.value == capped.value, || {
            Counterexample::point(y.clone(), format!("uncapped {} vs capped {}", full.value, capped.value))
        });
    }
    ck.note(format!("{} dual points, cap {cap}", pts.len()));
    Ok(ck.finish())
}

fn l2c(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let sup = cx.f.sup_function();
    let hull = cco_union(&member_conj_epis(cx.f)?)?;
    ck.require("epi f* = epi cco{f*_t}", sup.conjugate()?.epigraph().compare(&hull)?);
    let pts = dual_samples(cx)?;
    for y in &pts {
        let direct = sup.conjugate_eval(y)?;
        let hull = co_hull_conjugates(cx.f, y, None)?.value;
        ck.require_that("pointwise co-hull", direct == hull, || {
            Counterexample::point(y.clone(), format!("f* = {direct} but cco = {hull}"))
        });
    }
    ck.note(format!("{} dual points", pts.len()));
    Ok(ck.finish())
}

fn increasing_or_reason(f: &FunctionFamily) -> Result<Option<String>> {
    let Some(order) = f.order() else {
        return Ok(Some("no order asserted".into()));
    };
    if !order.increasing {
        return Ok(Some("order is not asserted increasing".into()));
    }
    Ok(f.audit_increasing()?.counterexample().map(|c| format!("order audit failed: {}", c.reason)))
}

fn l2d(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let f = cx.f;
    if let Some(why) = increasing_or_reason(f)? {
        return not_met(ck, &why);
    }
    let epis = member_conj_epis(f)?;
    for (a, b) in &f.order().unwrap().edges {
        let (i, j) = (f.index_of(a).unwrap(), f.index_of(b).unwrap());
        ck.require(&format!("epi f*_{a} ⊆ epi f*_{b}"), epis[i].is_subset_of(&epis[j])?);
    }
    let top = f.top().expect("audited");
    let hull = cco_union(&epis)?;
    ck.require("union of nested epigraphs is the top epigraph", hull.compare(&epis[top])?);
    ck.require("epi f* = epi f*_top", f.sup_function().conjugate()?.epigraph().compare(&epis[top])?);
    Ok(ck.finish())
}

fn l2e(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let f = cx.f;
    let m = f.len();
    let certs: Vec<_> = (0..m).map(|t| f.member(t).is_epi_pointed()).collect::<Result<_>>()?;
    let mut pairs = 0;
    for t in 0..m {
        if certs[t].is_none() {
            continue;
        }
        for s in 0..m {
            if s == t || !f.member(s).is_proper() || !f.member(t).le(f.member(s))?.holds() {
                continue;
            }
            pairs += 1;
            let ok = match &certs[s] {
                Some(c) => c.verify(f.member(s))?,
                None => false,
            };
            ck.require_that(&format!("f_{} epi-pointed", f.labels()[s]), ok, || {
                Counterexample::point(QVector::zeros(f.dim()), "no epi-pointedness certificate")
            });
        }
    }
    if pairs == 0 {
        return not_met(ck, "no ordered pair with an epi-pointed lower member");
    }
    ck.note(format!("{pairs} ordered pairs"));
    Ok(ck.finish())
}

fn l2f(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let f = cx.f;
    let dom = f.sup_function().conjugate()?.domain().clone();
    let doms: Vec<Polyhedron> = f.members().map(|(_, g)| Ok(g.conjugate()?.domain().clone())).collect::<Result<_>>()?;
    for (t, d) in doms.iter().enumerate() {
        ck.require(&format!("dom f*_{} ⊆ dom f*", f.labels()[t]), d.is_subset_of(&dom)?);
    }
    if let Some(why) = increasing_or_reason(f)? {
        return not_met(ck, &why);
    }
    for (label, g) in f.members() {
        if g.is_epi_pointed()?.is_none() {
            return not_met(ck, &format!("member {label} is not epi-pointed"));
        }
    }
    let top = f.top().expect("audited");
    ck.require("dom f* = dom f*_top", dom.compare(&doms[top])?);
    let pts = interior_samples(&dom, cx.params.dual_samples, cx.params.seed)?;
    for y in &pts {
        let covered = doms.iter().any(|d| strictly_inside(d, y));
        ck.require_that("interior coverage", covered, || Counterexample::point(y.clone(), "no member interior contains it"));
    }
    ck.note(format!("{} interior points", pts.len()));
    Ok(ck.finish())
}

fn p34(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let sup = cx.f.sup_function();
    let exact = sup.eps_subdifferential(&cx.x, &cx.eps)?;
    let mut prev: Option<Polyhedron> = None;
    for gamma in &cx.grid {
        let rhs = eps_subdiff_rhs_basic(cx.f, &cx.x, &cx.eps, gamma)?;
        ck.require(&format!("∂_eps f(x) ⊆ R({gamma})"), exact.is_subset_of(&rhs)?);
        let wide = sup.eps_subdifferential(&cx.x, &(&cx.eps + gamma))?;
        ck.require(&format!("R({gamma}) = ∂_(eps+{gamma}) f(x)"), rhs.compare(&wide)?);
        if let Some(prev) = &prev {
            ck.require(&format!("R nested at {gamma}"), rhs.is_subset_of(prev)?);
        }
        prev = Some(rhs);
    }
    let limit = eps_subdiff_rhs_lifted(cx.f, &cx.x, &cx.eps, &Rational::zero())?;
    ck.require("gamma = 0 limit is exact", limit.compare(&exact)?);
    Ok(ck.finish())
}

fn epi_pointed_reason(f: &FunctionFamily) -> Result<Option<String>> {
    for (label, g) in f.members() {
        if g.is_epi_pointed()?.is_none() {
            return Ok(Some(format!("member {label} is not epi-pointed")));
        }
    }
    Ok(None)
}

fn t41(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let f = cx.f;
    if let Some(why) = increasing_or_reason(f)? {
        return not_met(ck, &why);
    }
    if let Some(why) = epi_pointed_reason(f)? {
        return not_met(ck, &why);
    }
    let dom = f.sup_function().conjugate()?.domain().clone();
    let pts = interior_samples(&dom, cx.params.dual_samples, cx.params.seed)?;
    if pts.is_empty() {
        return not_met(ck, "dom f* has empty interior");
    }
    for y in &pts {
        let r = conjugate_on_interior(f, y)?.report;
        if let Some(c) = r.counterexample {
            ck.fail(c);
        }
    }
    ck.note(format!("{} interior dual points", pts.len()));
    Ok(ck.finish())
}

fn c42(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let f = cx.f;
    if f.len() > 3 {
        return not_met(ck, "finite sums are limited to three terms");
    }
    if let Some(why) = epi_pointed_reason(f)? {
        return not_met(ck, &why);
    }
    let members: Vec<PolyhedralFunction> = f.members().map(|(_, g)| g.clone()).collect();
    let sum = match PolyhedralFunction::sum(&members, SUM_PIECE_CAP) {
        Ok(s) => s,
        Err(Error::InvalidInput(why)) => return not_met(ck, &why),
        Err(e) => return Err(e),
    };
    if !sum.is_proper() {
        return not_met(ck, "sum has empty domain");
    }
    if sum.is_epi_pointed()?.is_none() {
        return not_met(ck, "sum is not epi-pointed");
    }
    let dom = sum.conjugate()?.domain().clone();
    let pts = interior_samples(&dom, cx.params.dual_samples, cx.params.seed)?;
    for y in &pts {
        let direct = sum.conjugate_eval(y)?;
        let conv = inf_convolution(&members, y)?;
        ck.require_that("inf-convolution", direct == conv, || {
            Counterexample::point(y.clone(), format!("(sum)* = {direct} but inf-convolution = {conv}"))
        });
    }
    ck.note(format!("{} pieces in the sum, {} interior dual points", sum.pieces().len(), pts.len()));
    Ok(ck.finish())
}

/// Vertices of `∂_eps f(x)` outside every `∂_eps f_s(x)` with `s` below the top:
/// the points only the closure reaches in an increasing sequence.
pub fn closure_gap_vertices(f: &FunctionFamily, x: &QVector, eps: &Rational) -> Result<Vec<QVector>> {
    let top = f.top().ok_or_else(|| Error::InvalidInput("family has no greatest element".into()))?;
    let exact = f.sup_function().eps_subdifferential(x, eps)?;
    let lower: Vec<Polyhedron> = (0..f.len())
        .filter(|&s| s != top)
        .map(|s| f.member(s).eps_subdifferential(x, eps))
        .collect::<Result<_>>()?;
    Ok(exact.vertices()?.into_iter().filter(|v| !lower.iter().any(|p| p.contains(v))).collect())
}

fn t44(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let f = cx.f;
    if let Some(why) = increasing_or_reason(f)? {
        return not_met(ck, &why);
    }
    let top = f.top().expect("audited");
    let sup = f.sup_function();
    let ftop = f.member(top);
    ck.require_that("f = f_top", sup.equals(ftop)?, || Counterexample::point(cx.x.clone(), "supremum differs from the top member"));
    let exact = sup.eps_subdifferential(&cx.x, &cx.eps)?;
    ck.require("∂_eps f_top(x) = ∂_eps f(x)", ftop.eps_subdifferential(&cx.x, &cx.eps)?.compare(&exact)?);
    let mut prev: Option<Polyhedron> = None;
    for gamma in &cx.grid {
        let wide = &cx.eps + gamma;
        let tail = ftop.eps_subdifferential(&cx.x, &wide)?;
        ck.require(&format!("∂_eps f(x) ⊆ ∂_(eps+{gamma}) f_top(x)"), exact.is_subset_of(&tail)?);
        if let Some(prev) = &prev {
            ck.require(&format!("nested at {gamma}"), tail.is_subset_of(prev)?);
        }
        prev = Some(tail);
        let double = &wide + gamma;
        for label in f.active_indices(&cx.x, gamma)? {
            let s1 = f.index_of(&label).unwrap();
            let lower = f.member(s1).eps_subdifferential(&cx.x, &wide)?;
            for s2 in f.successors(s1) {
                let upper = f.member(s2).eps_subdifferential(&cx.x, &double)?;
                ck.require(
                    &format!("∂_(eps+{gamma}) f_{label}(x) ⊆ ∂_(eps+2·{gamma}) f_{}(x)", f.labels()[s2]),
                    lower.is_subset_of(&upper)?,
                );
            }
        }
    }
    let gap = closure_gap_vertices(f, &cx.x, &cx.eps)?;
    ck.note(format!(
        "closure: {} vertices of ∂_eps f(x) lie outside the union over members below the top",
        gap.len()
    ));
    Ok(ck.finish())
}

fn c46(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let sets: Vec<Polyhedron> = if cx.inst.sets.is_empty() {
        cx.f.members().map(|(_, g)| g.domain().clone()).collect()
    } else {
        cx.inst.sets.iter().map(|(_, p)| p.clone()).collect()
    };
    let mut c = Polyhedron::universe(cx.f.dim());
    for s in &sets {
        check_dim(cx.f.dim(), s.dim())?;
        c = c.intersect(s)?;
    }
    if !c.contains(&cx.x) {
        return not_met(ck, "x lies outside the intersection");
    }
    let lifted = eps_normal_intersection_lifted(&sets, &cx.x, &cx.eps, &Rational::zero())?.expect("x in every set");
    ck.require("gamma = 0 form is exact", lifted.compare(&eps_normal_set(&c, &cx.x, &cx.eps)?)?);
    for gamma in cx.grid.iter().take(2) {
        let wide = &cx.eps + gamma;
        let lifted = eps_normal_intersection_lifted(&sets, &cx.x, &cx.eps, gamma)?.expect("x in every set");
        ck.require(&format!("relaxed form at {gamma}"), lifted.compare(&eps_normal_set(&c, &cx.x, &wide)?)?);
    }
    ck.note(format!("{} sets", sets.len()));
    Ok(ck.finish())
}

fn decomposition(cx: &Ctx, mut ck: Checker, mode: DecompositionMode) -> Result<CheckReport> {
    let f = cx.f;
    let qc = match mode {
        DecompositionMode::T52 => check_qc1(f, &cx.x)?,
        _ => check_qc2(f, &cx.x)?,
    };
    if !qc {
        let which = if mode == DecompositionMode::T52 { "normal cone of dom f contains a line" } else { "member normal cones admit a nonzero zero-sum" };
        return not_met(ck, which);
    }
    let s = f.sup_function().eps_subdifferential(&cx.x, &cx.eps)?;
    let g = s.generators()?;
    let mut witnesses = Vec::new();
    for v in &g.points {
        match decompose(f, &cx.x, &cx.eps, v, mode, &Rational::zero())? {
            None => ck.fail(Counterexample::point(v.clone(), "no decomposition for every admissible pattern")),
            Some(w) => {
                ck.require("witness", w.verify(f, &cx.x, v, &cx.eps)?);
                witnesses.push(w);
            }
        }
    }
    ck.note(format!("{} generator points of ∂_eps f(x)", g.points.len()));
    ck.set_witness(Witness::Decompositions { witnesses });
    Ok(ck.finish())
}

fn t54a(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let f = cx.f;
    let g = f.sup_function().conjugate()?;
    if g.is_epi_pointed()?.is_none() {
        return not_met(ck, "f* is not epi-pointed");
    }
    let epi = g.epigraph();
    let rec = epi.recession_cone()?;
    let hull = cco_union(&member_conj_epis(f)?)?;
    ck.require("epi f* = cco U epi f*_t + (epi f*)_inf", epi.compare(&minkowski_sum(&hull, &rec)?)?);
    let primal: Vec<Polyhedron> = f.members().map(|(_, h)| h.epigraph().clone()).collect();
    let literal = minkowski_sum(&cco_union(&primal)?, &rec)?;
    ck.note(format!(
        "primal-epigraph reading: {}",
        if epi.equals(&literal)? { "agrees" } else { "differs" }
    ));
    Ok(ck.finish())
}

fn t54b(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let f = cx.f;
    let n = f.dim();
    let epis = member_conj_epis(f)?;
    let mut cones = Vec::new();
    let (mut points, mut rays, mut lines) = (Vec::new(), Vec::new(), Vec::new());
    for e in &epis {
        let g = e.generators()?;
        cones.push((g.rays.clone(), g.lines.clone()));
        points.extend(g.points.iter().cloned());
        rays.extend(g.rays.iter().cloned());
        lines.extend(g.lines.iter().cloned());
    }
    if !sum_zero_cone_is_trivial(&cones, n + 1)? {
        return not_met(ck, "recession cones of the epi f*_t admit a nonzero zero-sum");
    }
    let assembled = Polyhedron::from_generators(n + 1, points, rays, lines)?;
    ck.require("epi f* = co U epi f*_t + co U (epi f*_t)_inf", f.sup_function().conjugate()?.epigraph().compare(&assembled)?);
    Ok(ck.finish())
}

/// `{x* : (x*, <x*, x> + eps) in k}`.
fn slice(k: &Polyhedron, x: &QVector, eps: &Rational) -> Result<Polyhedron> {
    let n = x.dim();
    let cut = |h: &HalfSpace| {
        let beta = &h.normal[n];
        HalfSpace::new(h.normal.head(n).axpy(beta, x), &h.offset - &(beta * eps))
    };
    Polyhedron::new(n, k.ineqs().iter().map(cut).collect(), k.eqs().iter().map(cut).collect())
}

/// `{x* : (x*, <x*, x> + eps) in k + {0} x [0, eps]}` for a cone `k`.
fn slice_with_band(k: &Polyhedron, x: &QVector, eps: &Rational) -> Result<LiftedPolyhedron> {
    let n = x.dim();
    let mut lp = LpBuilder::new();
    let y = lp.vars(n, false);
    let tau = lp.var(true);
    lp.row(vec![(tau, Rational::one())], Relation::Le, eps.clone());
    for (h, rel) in k.ineqs().iter().map(|h| (h, Relation::Le)).chain(k.eqs().iter().map(|h| (h, Relation::Eq))) {
        let beta = &h.normal[n];
        let mut terms = Vec::new();
        LpBuilder::dense_terms(&mut terms, y, &h.normal.head(n).axpy(beta, x));
        if !beta.is_zero() {
            terms.push((tau, -beta));
        }
        lp.row(terms, rel, &h.offset - &(beta * eps));
    }
    LiftedPolyhedron::new(n, lp)
}

/// Generators of the graph part of an epigraph: its points and the rays and
/// lines other than the vertical one.
fn graph_generators(e: &Polyhedron) -> Result<(Vec<QVector>, Vec<QVector>, Vec<QVector>)> {
    let g = e.generators()?;
    let m = e.dim();
    let up = project_out(&QVector::unit(m, m - 1), &g.lines);
    let vertical = |r: &QVector| {
        let p = project_out(r, &g.lines);
        let Some(i) = up.leading() else { return false };
        let s = &p[i] / &up[i];
        s.is_positive() && up.scale(&s) == p
    };
    let rays = g.rays.iter().filter(|r| !vertical(r)).cloned().collect();
    Ok((g.points.clone(), rays, g.lines.clone()))
}

fn l57(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let f = cx.f;
    let n = f.dim();
    let sup = f.sup_function();
    let dom = sup.domain();
    if !dom.contains(&cx.x) {
        return not_met(ck, "x lies outside dom f");
    }
    let target = eps_normal_set(dom, &cx.x, &cx.eps)?;
    let sigma = PolyhedralFunction::support_function(dom)?;
    ck.require("slice of epi sigma_dom f", slice(sigma.epigraph(), &cx.x, &cx.eps)?.compare(&target)?);
    let rec = sup.conjugate()?.epigraph().recession_cone()?;
    ck.require("slice of (epi f*)_inf", slice(&rec, &cx.x, &cx.eps)?.compare(&target)?);
    let epis = member_conj_epis(f)?;
    let hull_rec = cco_union(&epis)?.recession_cone()?;
    ck.require("slice of [cco U epi f*_t]_inf", slice(&hull_rec, &cx.x, &cx.eps)?.compare(&target)?);
    let (mut points, mut rays, mut lines) = (Vec::new(), Vec::new(), Vec::new());
    for e in &epis {
        let (p, r, l) = graph_generators(e)?;
        points.extend(p);
        rays.extend(r);
        lines.extend(l);
    }
    let graph_rec = Polyhedron::cone(n + 1, rays.clone(), lines.clone())?;
    ck.require("band slice of [cco U graph f*_t]_inf", slice_with_band(&graph_rec, &cx.x, &cx.eps)?.compare(&target)?);
    // the whole space as the subspace: its annihilator is {0}
    let mut with_axis = epis.clone();
    with_axis.push(Polyhedron::cone(n + 1, vec![QVector::unit(n + 1, n)], Vec::new())?);
    let axis_rec = cco_union(&with_axis)?.recession_cone()?;
    ck.require("slice with {0} x R_+ adjoined", slice(&axis_rec, &cx.x, &cx.eps)?.compare(&target)?);
    points.push(QVector::zeros(n + 1));
    let origin_rec = Polyhedron::from_generators(n + 1, points, rays, lines)?.recession_cone()?;
    ck.require("band slice with {0} x {0} adjoined", slice_with_band(&origin_rec, &cx.x, &cx.eps)?.compare(&target)?);
    Ok(ck.finish())
}

/// `{d in rec dom g : g^inf(d) <= 0} = {0}`, the inf-compactness of `g`.
fn inf_compact(g: &PolyhedralFunction) -> Result<bool> {
    let n = g.dim();
    let rec = g.domain().recession_cone()?;
    let mut lp = LpBuilder::new();
    let d = lp.vars(n, false);
    rec.push_rows(&mut lp, d, None);
    for p in g.pieces() {
        let mut terms = Vec::new();
        LpBuilder::dense_terms(&mut terms, d, &p.a);
        lp.row(terms, Relation::Le, Rational::zero());
    }
    for i in 0..n {
        lp.row(vec![(d + i, Rational::one())], Relation::Le, Rational::one());
        lp.row(vec![(d + i, Rational::one())], Relation::Ge, -Rational::one());
    }
    for i in 0..n {
        for sign in [Rational::one(), -Rational::one()] {
            let res = lp.solve(&[(d + i, sign)], Sense::Maximize)?;
            if res.value().is_some_and(|v| v.is_positive()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn rinf(cx: &Ctx, mut ck: Checker) -> Result<CheckReport> {
    let f = cx.f;
    let n = f.dim();
    let b = cx.inst.robust_b.clone().unwrap_or_else(|| Polyhedron::universe(n));
    check_dim(n, b.dim())?;
    let restricted: Vec<PolyhedralFunction> = f.members().map(|(_, g)| g.restrict(&b)).collect::<Result<_>>()?;
    if restricted.iter().any(|g| !g.is_proper()) {
        return not_met(ck, "B misses the domain of some member");
    }
    let h = f.sup_function().restrict(&b)?;
    if !h.is_proper() {
        return not_met(ck, "B misses dom f");
    }
    let mut sup_inf = ExtendedRational::NegInfinity;
    for g in &restricted {
        sup_inf = sup_inf.max(g.infimum()?.0);
    }
    let (inf_sup, argmin) = h.infimum()?;
    ck.require_that("sup inf <= inf sup", sup_inf <= inf_sup, || {
        Counterexample::point(QVector::zeros(n), format!("sup inf = {sup_inf} > inf sup = {inf_sup}"))
    });
    let increasing = increasing_or_reason(f)?.is_none();
    let compact = increasing && restricted.iter().map(inf_compact).collect::<Result<Vec<_>>>()?.into_iter().any(|c| c);
    if compact {
        ck.require_that("robust minimum", sup_inf == inf_sup, || {
            Counterexample::point(QVector::zeros(n), format!("sup inf = {sup_inf} but inf sup = {inf_sup}"))
        });
        ck.note("increasing family with an inf-compact member: equality asserted");
    } else {
        ck.note("sufficient condition not met: only the inequality is asserted");
    }
    let xbar = match (&cx.params.x, argmin) {
        (Some(x), _) if h.eval(x).is_finite() => x.clone(),
        (_, Some(a)) => a,
        _ => {
            ck.note("no base point in B with finite value");
            return Ok(ck.finish());
        }
    };
    let ExtendedRational::Finite(fx) = h.eval(&xbar) else { unreachable!() };
    let zero = QVector::zeros(n);
    let mut zero_in_some = false;
    for g in &restricted {
        if g.eps_subdifferential(&xbar, &cx.eps)?.contains(&zero) {
            zero_in_some = true;
            break;
        }
    }
    let robust = match &sup_inf {
        ExtendedRational::Finite(s) => fx <= s + &cx.eps,
        ExtendedRational::PosInfinity => true,
        ExtendedRational::NegInfinity => false,
    };
    if robust {
        ck.require_that("robust infimum gives 0 in some ∂_eps(f_t + delta_B)(x)", zero_in_some, || {
            Counterexample::point(xbar.clone(), "no member has 0 in its eps-subdifferential")
        });
    } else {
        ck.note("base point is not an eps-robust infimum: forward direction vacuous");
    }
    let equal_values = restricted.iter().all(|g| g.eval(&xbar) == ExtendedRational::Finite(fx.clone()));
    if equal_values {
        if zero_in_some {
            ck.require_that("equal values: 0 in some ∂_eps gives the robust infimum", robust, || {
                Counterexample::point(xbar.clone(), "0 is a member subgradient but x is not an eps-robust infimum")
            });
        }
        ck.note("all members agree at the base point: converse checked");
    }
    ck.set_witness(Witness::Point { point: xbar });
    Ok(ck.finish())
}

/// The chain `f_n = (1 - 1/n) |x|` on the line for `n = first..=last`.
pub fn scaled_abs_chain(first: i64, last: i64) -> FunctionFamily {
    let members: Vec<(String, PolyhedralFunction)> = (first..=last)
        .map(|n| (format!("f{n}"), PolyhedralFunction::l1_norm(1, &(Rational::one() - q(1, n)))))
        .collect();
    let labels: Vec<String> = members.iter().map(|(l, _)| l.clone()).collect();
    FunctionFamily::new(members, Some(FamilyOrder::chain(&labels, true))).expect("valid chain")
}
