//! Decomposition of epsilon-subgradients of a supremum into member
//! subgradients and normal parts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::certificate::{Counterexample, Inclusion};
use crate::error::{check_dim, Error, Result};
use crate::lp::{LpBuilder, Relation};
use crate::rational::{ExtendedRational, Rational};
use crate::vector::QVector;

use super::perspective::{push_eps_normal, push_perspective, Scale};
use super::{FunctionFamily, SimplexWeights};

/// Which normal part and support pattern a decomposition uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DecompositionMode {
    /// One normal vector in `N^{eps_2}_{dom f}(x)`, with gamma relaxation.
    T52,
    /// Member normal vectors `z_t in N^{eta_t}_{dom f_t}(x)`, exact.
    T53,
    /// As `T53` with disjoint supports `T_1`, `T_2` and `#T_1 + #T_2 <= n + 1`.
    R54,
}

/// `x* = sum_t lambda_t x*_t + z*` with per-member certificates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionWitness {
    pub mode: DecompositionMode,
    pub gamma: Rational,
    pub split: (Rational, Rational),
    pub lambda: SimplexWeights,
    pub eps_t: SimplexWeights,
    pub points: BTreeMap<String, QVector>,
    pub scaled_points: BTreeMap<String, QVector>,
    pub normal_part: QVector,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub normal_parts: BTreeMap<String, QVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_t: Option<SimplexWeights>,
}

impl DecompositionWitness {
    /// Re-checks every claim exactly, ending with `x* in ∂_{eps + gamma} f(x)`.
    pub fn verify(&self, f: &FunctionFamily, x: &QVector, xstar: &QVector, eps: &Rational) -> Result<Inclusion> {
        let bad = |why: String| Ok(Inclusion::Violated(Counterexample::point(xstar.clone(), why)));
        let n = f.dim();
        let ExtendedRational::Finite(fx) = f.eval(x) else {
            return bad("x outside dom f".into());
        };
        let mut total = self.normal_part.clone();
        for y in self.scaled_points.values() {
            total = total.add(y);
        }
        if total != *xstar {
            return bad(format!("reconstruction gives {total}"));
        }
        if self.lambda.mass != Rational::one() || !self.lambda.is_valid() {
            return bad("lambda is not a probability vector".into());
        }
        if self.eps_t.mass != self.split.0 || !self.eps_t.is_valid() {
            return bad("eps_t does not add up to eps_1".into());
        }
        if self.split.0.is_negative() || self.split.1.is_negative() || &self.split.0 + &self.split.1 > *eps {
            return bad("split exceeds eps".into());
        }
        for (label, lam) in &self.lambda.weights {
            let Some(t) = f.index_of(label) else {
                return bad(format!("unknown label {label}"));
            };
            let g = f.member(t);
            let (Some(pt), Some(y)) = (self.points.get(label), self.scaled_points.get(label).cloned().or(Some(QVector::zeros(n))))
            else {
                return bad(format!("missing point for {label}"));
            };
            if pt.scale(lam) != y {
                return bad(format!("scaled point of {label} is not lambda x*_t"));
            }
            let et = self.eps_t.get(label);
            let ExtendedRational::Finite(conj) = g.conjugate_eval(pt)? else {
                return bad(format!("x*_{label} outside dom f*_{label}"));
            };
            let ft = g.finite_max(x);
            let cert = lam * &conj + lam * &ft - y.dot(x);
            if cert > &et + &(lam * &self.gamma) {
                return bad(format!("certificate of {label} is {cert}"));
            }
            if &ft + &(&et / lam) + &self.gamma < fx {
                return bad(format!("{label} is not active"));
            }
        }
        for label in self.scaled_points.keys() {
            if self.lambda.get(label).is_zero() {
                return bad(format!("scaled point for {label} without weight"));
            }
        }
        match self.mode {
            DecompositionMode::T52 => {
                let dom = f.sup_function().domain();
                if !in_eps_normal(dom, x, &self.normal_part, &self.split.1)? {
                    return bad("normal part outside N^{eps_2}_{dom f}(x)".into());
                }
            }
            DecompositionMode::T53 | DecompositionMode::R54 => {
                let eta = self.eta_t.clone().unwrap_or_default();
                if eta.mass != self.split.1 || !eta.is_valid() {
                    return bad("eta_t does not add up to eps_2".into());
                }
                let mut z = QVector::zeros(n);
                for (label, zt) in &self.normal_parts {
                    let Some(t) = f.index_of(label) else {
                        return bad(format!("unknown label {label}"));
                    };
                    if !in_eps_normal(f.member(t).domain(), x, zt, &eta.get(label))? {
                        return bad(format!("normal part of {label} outside its eps-normal set"));
                    }
                    z = z.add(zt);
                }
                if z != self.normal_part {
                    return bad("member normal parts do not add up".into());
                }
                if self.mode == DecompositionMode::R54 {
                    let t1 = self.lambda.support();
                    let t2: Vec<&str> = self.normal_parts.keys().map(String::as_str).collect();
                    if t2.iter().any(|l| t1.contains(l)) || t1.len() + t2.len() > n + 1 {
                        return bad("support pattern exceeds the cardinality bound".into());
                    }
                }
            }
        }
        let budget = eps + &self.gamma;
        let gap = match f.sup_function().conjugate_eval(xstar)? {
            ExtendedRational::Finite(v) => v + &fx - xstar.dot(x),
            _ => return bad("x* outside dom f*".into()),
        };
        if gap > budget {
            return bad(format!("forward inclusion fails with gap {gap}"));
        }
        Ok(Inclusion::Holds)
    }
}

/// `sigma_C(z) <= <z, x> + eta`.
fn in_eps_normal(c: &crate::polyhedron::Polyhedron, x: &QVector, z: &QVector, eta: &Rational) -> Result<bool> {
    Ok(match c.support(z)? {
        ExtendedRational::Finite(s) => s <= z.dot(x) + eta,
        ExtendedRational::NegInfinity => true,
        ExtendedRational::PosInfinity => false,
    })
}

struct Layout {
    y: Vec<usize>,
    lambda: Vec<usize>,
    e: Vec<usize>,
    z: Vec<Option<(usize, usize)>>,
    z_single: Option<usize>,
    eps2: usize,
}

fn solve_pattern(
    f: &FunctionFamily,
    x: &QVector,
    eps: &Rational,
    xstar: &QVector,
    mode: DecompositionMode,
    gamma: &Rational,
    t1: &[bool],
    t2: &[bool],
) -> Result<Option<DecompositionWitness>> {
    let n = f.dim();
    let fx = f.eval(x).finite().cloned().expect("checked by caller");
    let mut lp = LpBuilder::new();
    let mut lay = Layout { y: Vec::new(), lambda: Vec::new(), e: Vec::new(), z: Vec::new(), z_single: None, eps2: 0 };
    let mut recon: Vec<usize> = Vec::new();
    let mut lambda_terms = Vec::new();
    let mut eps_terms = Vec::new();
    for t in 0..f.len() {
        let g = f.member(t);
        let ft = g.finite_max(x);
        let y = lp.vars(n, false);
        let l = lp.var(true);
        let s = lp.var(false);
        let e = lp.var(true);
        lay.y.push(y);
        lay.lambda.push(l);
        lay.e.push(e);
        if !t1[t] {
            for i in 0..n {
                lp.row(vec![(y + i, Rational::one())], Relation::Eq, Rational::zero());
            }
            lp.row(vec![(l, Rational::one())], Relation::Eq, Rational::zero());
            lp.row(vec![(e, Rational::one())], Relation::Eq, Rational::zero());
        }
        push_perspective(&mut lp, g.conjugate()?, y, Scale::Var(l), Some(s));
        // s + lambda (f_t(x) - gamma) - <x, y> - e <= 0
        let mut terms = vec![(s, Rational::one()), (e, -Rational::one())];
        let c = &ft - gamma;
        if !c.is_zero() {
            terms.push((l, c));
        }
        LpBuilder::dense_terms(&mut terms, y, &x.neg());
        lp.row(terms, Relation::Le, Rational::zero());
        // lambda (f(x) - f_t(x) - gamma) - e <= 0
        let c = &fx - &ft - gamma;
        let mut terms = vec![(e, -Rational::one())];
        if !c.is_zero() {
            terms.push((l, c));
        }
        lp.row(terms, Relation::Le, Rational::zero());
        recon.push(y);
        lambda_terms.push((l, Rational::one()));
        eps_terms.push((e, Rational::one()));
    }
    let eps2 = lp.var(true);
    lay.eps2 = eps2;
    match mode {
        DecompositionMode::T52 => {
            let z = lp.vars(n, false);
            push_eps_normal(&mut lp, f.sup_function().domain(), x, z, Some(eps2));
            lay.z_single = Some(z);
            recon.push(z);
        }
        DecompositionMode::T53 | DecompositionMode::R54 => {
            let mut eta_terms = vec![(eps2, -Rational::one())];
            for t in 0..f.len() {
                if !t2[t] {
                    lay.z.push(None);
                    continue;
                }
                let z = lp.vars(n, false);
                let eta = lp.var(true);
                push_eps_normal(&mut lp, f.member(t).domain(), x, z, Some(eta));
                lay.z.push(Some((z, eta)));
                eta_terms.push((eta, Rational::one()));
                recon.push(z);
            }
            lp.row(eta_terms, Relation::Eq, Rational::zero());
        }
    }
    for i in 0..n {
        let terms = recon.iter().map(|&v| (v + i, Rational::one())).collect();
        lp.row(terms, Relation::Eq, xstar[i].clone());
    }
    lp.row(lambda_terms, Relation::Eq, Rational::one());
    let mut budget = eps_terms.clone();
    budget.push((eps2, Rational::one()));
    lp.row(budget, Relation::Le, eps.clone());
    let Some(p) = lp.feasible_point()? else {
        return Ok(None);
    };
    Ok(Some(assemble(f, &p, &lay, mode, gamma, eps)))
}

/// Reads the LP point, moves zero-weight members into the normal part and pads
/// the first error so that `eps_1 + eps_2 = eps`.
fn assemble(
    f: &FunctionFamily,
    p: &QVector,
    lay: &Layout,
    mode: DecompositionMode,
    gamma: &Rational,
    eps: &Rational,
) -> DecompositionWitness {
    let n = f.dim();
    let mut lambda = BTreeMap::new();
    let mut eps_t = BTreeMap::new();
    let mut points = BTreeMap::new();
    let mut scaled = BTreeMap::new();
    let mut normal_parts: BTreeMap<String, QVector> = BTreeMap::new();
    let mut eta_t: BTreeMap<String, Rational> = BTreeMap::new();
    let mut z = lay.z_single.map(|z| p.slice(z, z + n)).unwrap_or_else(|| QVector::zeros(n));
    let mut eps2 = p[lay.eps2].clone();
    for (t, label) in f.labels().iter().enumerate() {
        if let Some(Some((zt, eta))) = lay.z.get(t) {
            let v = p.slice(*zt, zt + n);
            if !v.is_zero() || !p[*eta].is_zero() {
                normal_parts.insert(label.clone(), v.clone());
                eta_t.insert(label.clone(), p[*eta].clone());
            }
            z = z.add(&v);
        }
    }
    for (t, label) in f.labels().iter().enumerate() {
        let l = p[lay.lambda[t]].clone();
        let y = p.slice(lay.y[t], lay.y[t] + n);
        let e = p[lay.e[t]].clone();
        if l.is_zero() {
            if y.is_zero() && e.is_zero() {
                continue;
            }
            // a recession term: y in N^e_{dom f_t}(x)
            z = z.add(&y);
            eps2 += &e;
            if mode != DecompositionMode::T52 {
                let slot = normal_parts.entry(label.clone()).or_insert_with(|| QVector::zeros(n));
                *slot = slot.add(&y);
                *eta_t.entry(label.clone()).or_insert_with(Rational::zero) += &e;
            }
            continue;
        }
        points.insert(label.clone(), y.scale(&l.recip()));
        if !y.is_zero() {
            scaled.insert(label.clone(), y);
        }
        lambda.insert(label.clone(), l);
        eps_t.insert(label.clone(), e);
    }
    let eps1: Rational = eps_t.values().sum();
    let pad = eps - &eps1 - &eps2;
    if pad.is_positive() {
        let first = lambda.keys().next().cloned().expect("some positive weight");
        *eps_t.get_mut(&first).unwrap() += &pad;
    }
    let eps_t = SimplexWeights::new(eps_t);
    let eta = (mode != DecompositionMode::T52).then(|| SimplexWeights::new(eta_t));
    DecompositionWitness {
        mode,
        gamma: gamma.clone(),
        split: (eps_t.mass.clone(), eps2),
        lambda: SimplexWeights::new(lambda),
        eps_t,
        points,
        scaled_points: scaled,
        normal_part: z,
        normal_parts,
        eta_t: eta,
    }
}

/// Finds a decomposition of `x* in ∂_eps f(x)`. Qualification conditions are
/// the caller's responsibility; `R54` searches support patterns in increasing size.
pub fn decompose(
    f: &FunctionFamily,
    x: &QVector,
    eps: &Rational,
    xstar: &QVector,
    mode: DecompositionMode,
    gamma: &Rational,
) -> Result<Option<DecompositionWitness>> {
    check_dim(f.dim(), x.dim())?;
    check_dim(f.dim(), xstar.dim())?;
    if eps.is_negative() || gamma.is_negative() {
        return Err(Error::InvalidInput("negative epsilon or gamma".into()));
    }
    let sup = f.sup_function();
    if !sup.eps_subdifferential(x, eps)?.contains(xstar) {
        return Err(Error::InvalidInput(format!("x* = {xstar} is not in the eps-subdifferential")));
    }
    let gamma = if mode == DecompositionMode::T52 { gamma.clone() } else { Rational::zero() };
    let m = f.len();
    let all = vec![true; m];
    match mode {
        DecompositionMode::T52 => solve_pattern(f, x, eps, xstar, mode, &gamma, &all, &all),
        DecompositionMode::T53 => solve_pattern(f, x, eps, xstar, mode, &gamma, &all, &all),
        DecompositionMode::R54 => {
            let bound = f.dim() + 1;
            let mut patterns: Vec<(Vec<bool>, Vec<bool>)> = Vec::new();
            // each member is outside, in T_1, or in T_2
            let total = 3usize.pow(m as u32);
            for code in 0..total {
                let mut c = code;
                let mut t1 = vec![false; m];
                let mut t2 = vec![false; m];
                for t in 0..m {
                    match c % 3 {
                        1 => t1[t] = true,
                        2 => t2[t] = true,
                        _ => {}
                    }
                    c /= 3;
                }
                let k1 = t1.iter().filter(|b| **b).count();
                let k2 = t2.iter().filter(|b| **b).count();
                if k1 >= 1 && k1 + k2 <= bound {
                    patterns.push((t1, t2));
                }
            }
            patterns.sort_by_key(|(a, b)| {
                let size = a.iter().chain(b).filter(|v| **v).count();
                (size, a.iter().rev().map(|v| !v).collect::<Vec<_>>(), b.iter().rev().map(|v| !v).collect::<Vec<_>>())
            });
            for (t1, t2) in patterns {
                if let Some(w) = solve_pattern(f, x, eps, xstar, mode, &gamma, &t1, &t2)? {
                    return Ok(Some(w));
                }
            }
            Ok(None)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{AffinePiece, PolyhedralFunction};
    use crate::polyhedron::Polyhedron;
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

    #[test]
    fn midpoint_decomposition() {
        let f = pm_x();
        let x = QVector::from_ints(&[0]);
        let xs = QVector::new(vec![q(1, 2)]);
        let w = decompose(&f, &x, &qi(0), &xs, DecompositionMode::T53, &qi(0)).unwrap().unwrap();
        assert_eq!(w.lambda.get("plus"), q(3, 4));
        assert_eq!(w.lambda.get("minus"), q(1, 4));
        assert_eq!(w.points["plus"], QVector::from_ints(&[1]));
        assert_eq!(w.points["minus"], QVector::from_ints(&[-1]));
        assert!(w.normal_part.is_zero());
        assert_eq!(w.split, (qi(0), qi(0)));
        assert!(w.verify(&f, &x, &xs, &qi(0)).unwrap().holds());
    }

    #[test]
    fn indicator_decomposition() {
        let unit = Polyhedron::boxed(&QVector::from_ints(&[0]), &QVector::from_ints(&[1])).unwrap();
        let f = FunctionFamily::new(vec![("c".into(), PolyhedralFunction::indicator(unit))], None).unwrap();
        let x = QVector::from_ints(&[0]);
        let xs = QVector::from_ints(&[-5]);
        for mode in [DecompositionMode::T52, DecompositionMode::T53, DecompositionMode::R54] {
            let w = decompose(&f, &x, &qi(0), &xs, mode, &qi(0)).unwrap().unwrap();
            assert_eq!(w.scaled_points["c"].add(&w.normal_part), xs);
            assert!(w.verify(&f, &x, &xs, &qi(0)).unwrap().holds());
        }
    }

    #[test]
    fn cardinality_bounded_vertices() {
        let g = PolyhedralFunction::new(
            1,
            vec![
                AffinePiece::new(QVector::from_ints(&[1]), qi(0)),
                AffinePiece::new(QVector::from_ints(&[2]), qi(-1)),
            ],
            Polyhedron::boxed(&QVector::from_ints(&[0]), &QVector::from_ints(&[5])).unwrap(),
        )
        .unwrap();
        let f = FunctionFamily::new(
            vec![("g".into(), g), ("abs".into(), PolyhedralFunction::l1_norm(1, &qi(1)))],
            None,
        )
        .unwrap();
        let x = QVector::from_ints(&[0]);
        let eps = q(1, 2);
        let s = f.sup_function().eps_subdifferential(&x, &eps).unwrap();
        let verts = s.vertices().unwrap();
        assert!(!verts.is_empty());
        for v in verts {
            let w = decompose(&f, &x, &eps, &v, DecompositionMode::R54, &qi(0)).unwrap().unwrap();
            assert!(w.lambda.support().len() + w.normal_parts.len() <= 2);
            assert!(w.verify(&f, &x, &v, &eps).unwrap().holds());
        }
    }

    #[test]
    fn rejects_points_outside() {
        let f = pm_x();
        let r = decompose(&f, &QVector::from_ints(&[0]), &qi(0), &QVector::from_ints(&[2]), DecompositionMode::T53, &qi(0));
        assert!(r.is_err());
    }
}
