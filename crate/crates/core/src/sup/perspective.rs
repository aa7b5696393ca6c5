//! Perspective-form LP encodings: co-hulls of conjugates, lifted
//! subdifferential sets, joint epsilon-normal sets and qualification cones.

use std::collections::BTreeMap;

use crate::certificate::Counterexample;
use crate::error::{check_dim, Error, Result};
use crate::function::PolyhedralFunction;
use crate::lp::{LpBuilder, LpStatus, Relation, Sense};
use crate::polyhedron::{LiftedPolyhedron, Polyhedron};
use crate::rational::{ExtendedRational, Rational};
use crate::report::{digest_of, CheckReport, Checker, Witness};
use crate::vector::QVector;

use super::{FunctionFamily, SimplexWeights};

/// How the perspective variable enters: fixed at one or a decision variable.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Scale {
    One,
    Var(usize),
}

/// Rows for `lambda g(y / lambda) <= s` (closed perspective) on variables
/// `y_first..y_first + dim`; `s = None` means `s = 0`.
pub(crate) fn push_perspective(lp: &mut LpBuilder, g: &PolyhedralFunction, y_first: usize, scale: Scale, s: Option<usize>) {
    let scaled = |terms: &mut Vec<(usize, Rational)>, c: &Rational| -> Rational {
        match scale {
            Scale::One => -c,
            Scale::Var(l) => {
                if !c.is_zero() {
                    terms.push((l, c.clone()));
                }
                Rational::zero()
            }
        }
    };
    for p in g.pieces() {
        let mut terms = Vec::new();
        LpBuilder::dense_terms(&mut terms, y_first, &p.a);
        if let Some(s) = s {
            terms.push((s, -Rational::one()));
        }
        let rhs = scaled(&mut terms, &p.b);
        lp.row(terms, Relation::Le, rhs);
    }
    for (h, rel) in g
        .domain()
        .ineqs()
        .iter()
        .map(|h| (h, Relation::Le))
        .chain(g.domain().eqs().iter().map(|h| (h, Relation::Eq)))
    {
        let mut terms = Vec::new();
        LpBuilder::dense_terms(&mut terms, y_first, &h.normal);
        let rhs = scaled(&mut terms, &-&h.offset);
        lp.row(terms, rel, rhs);
    }
}

/// Rows for `z in N^eta_C(x)`, i.e. `sigma_C(z) <= <z, x> + eta`, through the
/// dual of the support LP: `z = A^T u + E^T w`, `u >= 0`, `b u + e w <= <z, x> + eta`.
/// `eta = None` means `eta = 0`.
pub(crate) fn push_eps_normal(lp: &mut LpBuilder, c: &Polyhedron, x: &QVector, z_first: usize, eta: Option<usize>) {
    let n = c.dim();
    // free multipliers for the equations are allocated right after `u`
    let u = lp.vars(c.ineqs().len(), true);
    lp.vars(c.eqs().len(), false);
    let rows: Vec<_> = c.ineqs().iter().chain(c.eqs()).collect();
    for i in 0..n {
        let mut terms = vec![(z_first + i, -Rational::one())];
        for (k, h) in rows.iter().enumerate() {
            if !h.normal[i].is_zero() {
                terms.push((u + k, h.normal[i].clone()));
            }
        }
        lp.row(terms, Relation::Eq, Rational::zero());
    }
    let mut terms = Vec::new();
    for (k, h) in rows.iter().enumerate() {
        if !h.offset.is_zero() {
            terms.push((u + k, h.offset.clone()));
        }
    }
    for (i, xi) in x.iter().enumerate() {
        if !xi.is_zero() {
            terms.push((z_first + i, -xi));
        }
    }
    if let Some(e) = eta {
        terms.push((e, -Rational::one()));
    }
    lp.row(terms, Relation::Le, Rational::zero());
}

fn sum_rows(lp: &mut LpBuilder, n: usize, firsts: &[usize], target: Option<usize>, rhs: &QVector) {
    for i in 0..n {
        let mut terms: Vec<(usize, Rational)> = firsts.iter().map(|&f| (f + i, Rational::one())).collect();
        if let Some(t) = target {
            terms.push((t + i, -Rational::one()));
        }
        lp.row(terms, Relation::Eq, rhs[i].clone());
    }
}

fn conjugates(f: &FunctionFamily) -> Result<Vec<&PolyhedralFunction>> {
    if !f.all_proper() {
        return Err(Error::ImproperFunction("family has a member with empty domain".into()));
    }
    f.members().map(|(_, g)| g.conjugate()).collect()
}

/// Value and minimizer of the co-hull LP.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoHull {
    pub value: ExtendedRational,
    pub lambda: Option<SimplexWeights>,
    /// `y_t = lambda_t x_t` for every label of the support used.
    pub scaled_points: BTreeMap<String, QVector>,
}

fn co_hull_on(f: &FunctionFamily, conj: &[&PolyhedralFunction], xstar: &QVector, subset: &[usize]) -> Result<CoHull> {
    let n = f.dim();
    let mut lp = LpBuilder::new();
    let mut ys = Vec::new();
    let mut obj = Vec::new();
    let mut lambdas = Vec::new();
    for &t in subset {
        let y = lp.vars(n, false);
        let l = lp.var(true);
        let s = lp.var(false);
        push_perspective(&mut lp, conj[t], y, Scale::Var(l), Some(s));
        ys.push(y);
        lambdas.push((l, Rational::one()));
        obj.push((s, Rational::one()));
    }
    sum_rows(&mut lp, n, &ys, None, xstar);
    lp.row(lambdas.clone(), Relation::Eq, Rational::one());
    let res = lp.solve(&obj, Sense::Minimize)?;
    Ok(match res.status {
        LpStatus::Infeasible => CoHull { value: ExtendedRational::PosInfinity, lambda: None, scaled_points: BTreeMap::new() },
        LpStatus::Unbounded => CoHull { value: ExtendedRational::NegInfinity, lambda: None, scaled_points: BTreeMap::new() },
        LpStatus::Optimal => {
            let p = res.primal_point.unwrap();
            let mut weights = BTreeMap::new();
            let mut scaled = BTreeMap::new();
            for (k, &t) in subset.iter().enumerate() {
                let label = f.labels()[t].clone();
                weights.insert(label.clone(), p[lambdas[k].0].clone());
                let y = p.slice(ys[k], ys[k] + n);
                if !y.is_zero() {
                    scaled.insert(label, y);
                }
            }
            CoHull { value: res.optimum, lambda: Some(SimplexWeights::new(weights)), scaled_points: scaled }
        }
    })
}

fn subsets_up_to(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << m) {
        if mask.count_ones() as usize <= k {
            out.push((0..m).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    out.sort_by_key(|s: &Vec<usize>| (s.len(), s.clone()));
    out
}

/// `cl co{f*_t}(x*)` as one perspective LP; with `support_cap`, the least value
/// over label subsets of at most that size.
pub fn co_hull_conjugates(f: &FunctionFamily, xstar: &QVector, support_cap: Option<usize>) -> Result<CoHull> {
    check_dim(f.dim(), xstar.dim())?;
    let conj = conjugates(f)?;
    let m = f.len();
    let all: Vec<usize> = (0..m).collect();
    let cap = match support_cap {
        Some(k) if k < m => k,
        _ => return co_hull_on(f, &conj, xstar, &all),
    };
    let mut best: Option<CoHull> = None;
    for s in subsets_up_to(m, cap) {
        let r = co_hull_on(f, &conj, xstar, &s)?;
        if r.value.is_neg_infinite() {
            return Ok(r);
        }
        if best.as_ref().is_none_or(|b| r.value < b.value) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one subset"))
}

/// `x` lies in the interior of `p`: no proper equalities and every nonzero row slack.
pub(crate) fn strictly_inside(p: &Polyhedron, x: &QVector) -> bool {
    !p.is_empty()
        && p.eqs().iter().all(|h| h.normal.is_zero())
        && p.ineqs().iter().all(|h| h.normal.is_zero() || h.slack(x).is_positive())
}

/// Result of the interior min-formula check.
#[derive(Clone, Debug)]
pub struct InteriorConjugate {
    /// `min_t f*_t(x*)` when the hypotheses hold.
    pub value: Option<ExtendedRational>,
    pub report: CheckReport,
}

/// For an increasing family of epi-pointed functions and `x*` interior to
/// `dom f*`, compares `min_t f*_t(x*)` with `f*(x*)`.
pub fn conjugate_on_interior(f: &FunctionFamily, xstar: &QVector) -> Result<InteriorConjugate> {
    check_dim(f.dim(), xstar.dim())?;
    let mut ck = Checker::new("T41", digest_of(&(f, xstar)));
    let not_met = |ck: Checker, why: &str| Ok(InteriorConjugate { value: None, report: ck.hypotheses_not_met(why) });
    if !f.is_increasing()? {
        return not_met(ck, "family is not audited increasing");
    }
    for (label, g) in f.members() {
        if g.is_epi_pointed()?.is_none() {
            return not_met(ck, &format!("member {label} is not epi-pointed"));
        }
    }
    let sup = f.sup_function();
    if !sup.is_proper() {
        return not_met(ck, "supremum has empty domain");
    }
    if !strictly_inside(sup.conjugate()?.domain(), xstar) {
        return not_met(ck, "point is not interior to the conjugate domain");
    }
    let mut min = ExtendedRational::PosInfinity;
    for (_, g) in f.members() {
        min = min.min(g.conjugate_eval(xstar)?);
    }
    let exact = sup.conjugate_eval(xstar)?;
    ck.require_that("min formula", min == exact, || {
        Counterexample::point(xstar.clone(), format!("min_t f*_t = {min} but f* = {exact}"))
    });
    ck.set_witness(Witness::Point { point: xstar.clone() });
    Ok(InteriorConjugate { value: Some(min), report: ck.finish() })
}

/// The lifted set `{x* = sum y_t : sum lambda_t = 1, lambda_t f*_t(y_t / lambda_t) + lambda_t f_t(x)
/// - <x, y_t> <= e_t, sum e_t <= eps + gamma, sum lambda_t f_t(x) - sum e_t >= f(x) - eps - gamma}`.
pub fn eps_subdiff_rhs_lifted(f: &FunctionFamily, x: &QVector, eps: &Rational, gamma: &Rational) -> Result<LiftedPolyhedron> {
    check_dim(f.dim(), x.dim())?;
    if eps.is_negative() || gamma.is_negative() {
        return Err(Error::InvalidInput("negative epsilon or gamma".into()));
    }
    let ExtendedRational::Finite(fx) = f.eval(x) else {
        return Err(Error::InvalidInput("point outside the domain of the supremum".into()));
    };
    let conj = conjugates(f)?;
    let n = f.dim();
    let budget = eps + gamma;
    let mut lp = LpBuilder::new();
    let xs = lp.vars(n, false);
    let mut ys = Vec::new();
    let mut lambdas = Vec::new();
    let mut errs = Vec::new();
    let mut activity = Vec::new();
    for (t, g) in conj.iter().enumerate() {
        let ft = f.member(t).finite_max(x);
        let y = lp.vars(n, false);
        let l = lp.var(true);
        let s = lp.var(false);
        let e = lp.var(true);
        push_perspective(&mut lp, g, y, Scale::Var(l), Some(s));
        // s + lambda f_t(x) - <x, y> - e <= 0
        let mut terms = vec![(s, Rational::one()), (e, -Rational::one())];
        if !ft.is_zero() {
            terms.push((l, ft.clone()));
        }
        LpBuilder::dense_terms(&mut terms, y, &x.neg());
        lp.row(terms, Relation::Le, Rational::zero());
        ys.push(y);
        lambdas.push((l, Rational::one()));
        errs.push((e, Rational::one()));
        activity.push((l, ft));
        activity.push((e, -Rational::one()));
    }
    sum_rows(&mut lp, n, &ys, Some(xs), &QVector::zeros(n));
    lp.row(lambdas, Relation::Eq, Rational::one());
    lp.row(errs, Relation::Le, budget.clone());
    lp.row(activity, Relation::Ge, &fx - &budget);
    LiftedPolyhedron::new(n, lp)
}

/// The projection of [`eps_subdiff_rhs_lifted`] as an explicit polyhedron; `gamma > 0`.
pub fn eps_subdiff_rhs_basic(f: &FunctionFamily, x: &QVector, eps: &Rational, gamma: &Rational) -> Result<Polyhedron> {
    if !gamma.is_positive() {
        return Err(Error::InvalidInput("gamma must be positive".into()));
    }
    eps_subdiff_rhs_lifted(f, x, eps, gamma)?.to_polyhedron()
}

/// `{sum z_t : z_t in N^{eta_t}_{C_t}(x), sum eta_t = eps + gamma}` as a lifted set;
/// `None` when `x` lies outside some `C_t`.
pub fn eps_normal_intersection_lifted(
    cs: &[Polyhedron],
    x: &QVector,
    eps: &Rational,
    gamma: &Rational,
) -> Result<Option<LiftedPolyhedron>> {
    let Some(first) = cs.first() else {
        return Err(Error::InvalidInput("no sets given".into()));
    };
    let n = first.dim();
    check_dim(n, x.dim())?;
    if eps.is_negative() || gamma.is_negative() {
        return Err(Error::InvalidInput("negative epsilon or gamma".into()));
    }
    for c in cs {
        check_dim(n, c.dim())?;
        if !c.contains(x) {
            return Ok(None);
        }
    }
    let mut lp = LpBuilder::new();
    let zs = lp.vars(n, false);
    let mut parts = Vec::new();
    let mut etas = Vec::new();
    for c in cs {
        let z = lp.vars(n, false);
        let eta = lp.var(true);
        push_eps_normal(&mut lp, c, x, z, Some(eta));
        parts.push(z);
        etas.push((eta, Rational::one()));
    }
    sum_rows(&mut lp, n, &parts, Some(zs), &QVector::zeros(n));
    lp.row(etas, Relation::Eq, eps + gamma);
    Ok(Some(LiftedPolyhedron::new(n, lp)?))
}

/// The set of [`eps_normal_intersection_lifted`] as an explicit polyhedron, with
/// a note when it is empty because `x` misses some set.
pub fn eps_normal_intersection(
    cs: &[Polyhedron],
    x: &QVector,
    eps: &Rational,
    gamma: &Rational,
) -> Result<(Polyhedron, Option<String>)> {
    match eps_normal_intersection_lifted(cs, x, eps, gamma)? {
        Some(l) => Ok((l.to_polyhedron()?, None)),
        None => Ok((Polyhedron::empty(x.dim()), Some("point lies outside some set".into()))),
    }
}

/// A finitely generated cone `cone(rays) + span(lines)`.
#[derive(Clone, Debug, Default)]
pub(crate) struct ConeGens {
    pub rays: Vec<QVector>,
    pub lines: Vec<QVector>,
}

impl ConeGens {
    /// `N_C(x)`: active inequality normals and equality normals.
    pub(crate) fn normal_cone(c: &Polyhedron, x: &QVector) -> Self {
        ConeGens {
            rays: c
                .ineqs()
                .iter()
                .filter(|h| !h.normal.is_zero() && h.slack(x).is_zero())
                .map(|h| h.normal.clone())
                .collect(),
            lines: c.eqs().iter().filter(|h| !h.normal.is_zero()).map(|h| h.normal.clone()).collect(),
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.rays.iter().all(QVector::is_zero) && self.lines.iter().all(QVector::is_zero)
    }
}

/// Whether `{(z_t) : z_t in K_t, sum z_t = 0} = {0}`, decided by bounded
/// coordinate LPs; otherwise returns a nonzero member `z_t` of the cone.
pub(crate) fn sum_zero_cone_witness(cones: &[ConeGens], n: usize) -> Result<Option<(usize, QVector)>> {
    let live: Vec<usize> = (0..cones.len()).filter(|&t| !cones[t].is_zero()).collect();
    if live.len() < 2 {
        return Ok(None);
    }
    let mut lp = LpBuilder::new();
    let mut zs = Vec::new();
    for &t in &live {
        let k = &cones[t];
        let z = lp.vars(n, false);
        let u = lp.vars(k.rays.len(), true);
        let w = lp.vars(k.lines.len(), false);
        for i in 0..n {
            let mut terms = vec![(z + i, -Rational::one())];
            for (j, r) in k.rays.iter().enumerate() {
                if !r[i].is_zero() {
                    terms.push((u + j, r[i].clone()));
                }
            }
            for (j, l) in k.lines.iter().enumerate() {
                if !l[i].is_zero() {
                    terms.push((w + j, l[i].clone()));
                }
            }
            lp.row(terms, Relation::Eq, Rational::zero());
            lp.row(vec![(z + i, Rational::one())], Relation::Le, Rational::one());
            lp.row(vec![(z + i, Rational::one())], Relation::Ge, -Rational::one());
        }
        zs.push(z);
    }
    sum_rows(&mut lp, n, &zs, None, &QVector::zeros(n));
    for (k, &z) in zs.iter().enumerate() {
        for i in 0..n {
            for sign in [Rational::one(), -Rational::one()] {
                let res = lp.solve(&[(z + i, sign)], Sense::Maximize)?;
                if res.value().is_some_and(|v| v.is_positive()) {
                    let p = res.primal_point.unwrap();
                    return Ok(Some((live[k], p.slice(z, z + n))));
                }
            }
        }
    }
    Ok(None)
}

/// A nonzero `z` with `z, -z` in the cone, if any.
fn lineality_witness(k: &ConeGens, n: usize) -> Result<Option<QVector>> {
    Ok(sum_zero_cone_witness(&[k.clone(), k.clone()], n)?.map(|(_, z)| z))
}

/// Whether the cones `K_t` admit only the trivial zero-sum selection.
pub fn sum_zero_cone_is_trivial(cones: &[(Vec<QVector>, Vec<QVector>)], n: usize) -> Result<bool> {
    let cones: Vec<ConeGens> = cones.iter().map(|(r, l)| ConeGens { rays: r.clone(), lines: l.clone() }).collect();
    Ok(sum_zero_cone_witness(&cones, n)?.is_none())
}

/// `N_{dom f}(x)` contains no line.
pub fn check_qc1(f: &FunctionFamily, x: &QVector) -> Result<bool> {
    check_dim(f.dim(), x.dim())?;
    let dom = f.sup_function().domain();
    if !dom.contains(x) {
        return Err(Error::InvalidInput("qualification check needs x in dom f".into()));
    }
    let k = ConeGens::normal_cone(dom, x);
    Ok(lineality_witness(&k, f.dim())?.is_none())
}

/// Zero is the only way to write `0 = sum z_t` with `z_t in N_{dom f_t}(x)`.
pub fn check_qc2(f: &FunctionFamily, x: &QVector) -> Result<bool> {
    check_dim(f.dim(), x.dim())?;
    let mut cones = Vec::new();
    for (label, g) in f.members() {
        if !g.domain().contains(x) {
            return Err(Error::InvalidInput(format!("qualification check needs x in dom f_{label}")));
        }
        cones.push(ConeGens::normal_cone(g.domain(), x));
    }
    Ok(sum_zero_cone_witness(&cones, f.dim())?.is_none())
}

/// `(f_1 + ... + f_N)*(x*)` as the inf-convolution `min {sum f*_k(y_k) : sum y_k = x*}`.
pub fn inf_convolution(fs: &[PolyhedralFunction], xstar: &QVector) -> Result<ExtendedRational> {
    let Some(first) = fs.first() else {
        return Err(Error::InvalidInput("empty inf-convolution".into()));
    };
    let n = first.dim();
    check_dim(n, xstar.dim())?;
    let mut lp = LpBuilder::new();
    let mut ys = Vec::new();
    let mut obj = Vec::new();
    for f in fs {
        check_dim(n, f.dim())?;
        let g = f.conjugate()?;
        let y = lp.vars(n, false);
        let s = lp.var(false);
        push_perspective(&mut lp, g, y, Scale::One, Some(s));
        ys.push(y);
        obj.push((s, Rational::one()));
    }
    sum_rows(&mut lp, n, &ys, None, xstar);
    Ok(lp.solve(&obj, Sense::Minimize)?.optimum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::AffinePiece;
    use crate::polyhedron::HalfSpace;
    use crate::rational::{q, qi};

    fn pm_x() -> FunctionFamily {
        FunctionFamily::new(
            vec![
                ("plus".into(), PolyhedralFunction::affine(QVector::from_ints(&[1]), qi(0))),
                ("minus".into(), PolyhedralFunction::affine(QVector::from_ints(&[-1]), qi(0))),
            ],
            None,
        )
        .unwrap()
    }

    fn interval(a: i64, b: i64) -> Polyhedron {
        Polyhedron::boxed(&QVector::from_ints(&[a]), &QVector::from_ints(&[b])).unwrap()
    }

    fn half(normal: &[i64], off: i64) -> HalfSpace {
        HalfSpace::new(QVector::from_ints(normal), qi(off))
    }

    #[test]
    fn co_hull_examples() {
        let f = pm_x();
        let r = co_hull_conjugates(&f, &QVector::from_ints(&[0]), None).unwrap();
        assert_eq!(r.value, ExtendedRational::Finite(qi(0)));
        let lam = r.lambda.unwrap();
        assert_eq!((lam.get("plus"), lam.get("minus")), (q(1, 2), q(1, 2)));
        let r = co_hull_conjugates(&f, &QVector::from_ints(&[2]), None).unwrap();
        assert_eq!(r.value, ExtendedRational::PosInfinity);
        let r = co_hull_conjugates(&f, &QVector::from_ints(&[0]), Some(1)).unwrap();
        assert_eq!(r.value, ExtendedRational::PosInfinity);
    }

    #[test]
    fn co_hull_two_level_oracle() {
        // max(x, 2x - 1) on [0, 5] and |x| at x* = 1/2
        let g = PolyhedralFunction::new(
            1,
            vec![
                AffinePiece::new(QVector::from_ints(&[1]), qi(0)),
                AffinePiece::new(QVector::from_ints(&[2]), qi(-1)),
            ],
            interval(0, 5),
        )
        .unwrap();
        let abs = PolyhedralFunction::l1_norm(1, &qi(1));
        let f = FunctionFamily::new(vec![("g".into(), g.clone()), ("abs".into(), abs.clone())], None).unwrap();
        let xs = QVector::new(vec![q(1, 2)]);
        let r = co_hull_conjugates(&f, &xs, None).unwrap();
        // brute force: lambda on a 1/8 grid, inner minimization of
        // lambda g*(u) + (1 - lambda) abs*(v) over lambda u + (1 - lambda) v = 1/2
        // with u on a 1/16 grid of [-2, 2]
        let mut best: Option<Rational> = None;
        for i in 0..=8 {
            let lam = q(i, 8);
            for j in -32..=32 {
                let u = q(j, 16);
                let rest = &q(1, 2) - &(&lam * &u);
                let one_minus = qi(1) - &lam;
                let (gu, av) = if one_minus.is_zero() {
                    if !rest.is_zero() {
                        continue;
                    }
                    (g.conjugate_eval(&QVector::new(vec![u.clone()])).unwrap(), ExtendedRational::Finite(qi(0)))
                } else {
                    let v = &rest / &one_minus;
                    (
                        g.conjugate_eval(&QVector::new(vec![u.clone()])).unwrap(),
                        abs.conjugate_eval(&QVector::new(vec![v])).unwrap(),
                    )
                };
                if let (ExtendedRational::Finite(a), ExtendedRational::Finite(b)) = (gu, av) {
                    let val = &lam * &a + &one_minus * &b;
                    if best.as_ref().is_none_or(|c| val < *c) {
                        best = Some(val);
                    }
                }
            }
        }
        assert_eq!(r.value, ExtendedRational::Finite(best.unwrap()));
        assert_eq!(r.value, f.sup_function().conjugate_eval(&xs).unwrap());
    }

    #[test]
    fn rhs_examples() {
        let f = pm_x();
        let zero = QVector::from_ints(&[0]);
        let p = eps_subdiff_rhs_basic(&f, &zero, &qi(0), &q(1, 4)).unwrap();
        assert!(p.equals(&interval(-1, 1)).unwrap());
        let one = QVector::from_ints(&[1]);
        let p = eps_subdiff_rhs_basic(&f, &one, &qi(0), &q(1, 8)).unwrap();
        let exact = f.sup_function().eps_subdifferential(&one, &qi(0)).unwrap();
        assert!(exact.is_subset_of(&p).unwrap().holds());
        let wide = f.sup_function().eps_subdifferential(&one, &q(1, 8)).unwrap();
        assert!(p.equals(&wide).unwrap());
        assert!(eps_subdiff_rhs_basic(&f, &zero, &qi(0), &qi(0)).is_err());
        let single =
            FunctionFamily::new(vec![("abs".into(), PolyhedralFunction::l1_norm(1, &qi(1)))], None).unwrap();
        let p = eps_subdiff_rhs_basic(&single, &one, &q(1, 2), &q(1, 2)).unwrap();
        let exact = single.sup_function().eps_subdifferential(&one, &qi(1)).unwrap();
        assert!(p.equals(&exact).unwrap());
    }

    #[test]
    fn normal_intersections() {
        let x = QVector::from_ints(&[0]);
        let neg = Polyhedron::new(1, vec![half(&[1], 0)], vec![]).unwrap();
        let pos = Polyhedron::new(1, vec![half(&[-1], 0)], vec![]).unwrap();
        let (p, _) = eps_normal_intersection(&[neg, pos], &x, &qi(0), &qi(0)).unwrap();
        assert!(p.equals(&Polyhedron::universe(1)).unwrap());
        let (p, _) = eps_normal_intersection(&[interval(0, 1), interval(0, 1)], &x, &qi(0), &qi(0)).unwrap();
        assert!(p.equals(&Polyhedron::new(1, vec![half(&[1], 0)], vec![]).unwrap()).unwrap());
        let c1 = Polyhedron::new(2, vec![half(&[1, -1], 0)], vec![]).unwrap();
        let c2 = Polyhedron::new(2, vec![half(&[-1, -1], 0)], vec![]).unwrap();
        let o = QVector::from_ints(&[0, 0]);
        let (p, _) = eps_normal_intersection(&[c1.clone(), c2.clone()], &o, &q(1, 2), &qi(0)).unwrap();
        let direct = crate::function::eps_normal_set(&c1.intersect(&c2).unwrap(), &o, &q(1, 2)).unwrap();
        assert!(p.equals(&direct).unwrap());
        let (p, note) = eps_normal_intersection(&[interval(1, 2)], &x, &qi(0), &qi(0)).unwrap();
        assert!(p.is_empty() && note.is_some());
    }

    #[test]
    fn qualification_conditions() {
        assert!(check_qc1(&pm_x(), &QVector::from_ints(&[3])).unwrap());
        let neg = Polyhedron::new(1, vec![half(&[1], 0)], vec![]).unwrap();
        let pos = Polyhedron::new(1, vec![half(&[-1], 0)], vec![]).unwrap();
        let f = FunctionFamily::new(
            vec![("a".into(), PolyhedralFunction::indicator(neg)), ("b".into(), PolyhedralFunction::indicator(pos))],
            None,
        )
        .unwrap();
        let x = QVector::from_ints(&[0]);
        assert!(!check_qc2(&f, &x).unwrap());
        assert!(!check_qc1(&f, &x).unwrap());
        let sq = Polyhedron::boxed(&QVector::from_ints(&[0, 0]), &QVector::from_ints(&[1, 1])).unwrap();
        let f = FunctionFamily::new(
            vec![
                ("box".into(), PolyhedralFunction::indicator(sq)),
                ("l1".into(), PolyhedralFunction::l1_norm(2, &qi(1))),
            ],
            None,
        )
        .unwrap();
        let o = QVector::from_ints(&[0, 0]);
        assert!(check_qc2(&f, &o).unwrap());
        assert!(check_qc1(&f, &o).unwrap());
    }

    #[test]
    fn interior_min_formula() {
        let f = super::super::scaled_abs_chain(2, 5);
        let v = conjugate_on_interior(&f, &QVector::from_ints(&[0])).unwrap();
        assert_eq!(v.value, Some(ExtendedRational::Finite(qi(0))));
        let v = conjugate_on_interior(&f, &QVector::new(vec![q(7, 10)])).unwrap();
        assert_eq!(v.value, Some(ExtendedRational::Finite(qi(0))));
        assert_eq!(v.report.status, crate::report::CheckStatus::Pass);
        let v = conjugate_on_interior(&f, &QVector::new(vec![q(4, 5)])).unwrap();
        assert_eq!(v.report.status, crate::report::CheckStatus::HypothesesNotMet);
    }

    #[test]
    fn inf_convolution_of_norms() {
        let abs = PolyhedralFunction::l1_norm(1, &qi(1));
        let v = inf_convolution(&[abs.clone(), abs.clone()], &QVector::from_ints(&[1])).unwrap();
        assert_eq!(v, ExtendedRational::Finite(qi(0)));
        let v = inf_convolution(&[abs.clone(), abs], &QVector::from_ints(&[3])).unwrap();
        assert_eq!(v, ExtendedRational::PosInfinity);
    }
}
