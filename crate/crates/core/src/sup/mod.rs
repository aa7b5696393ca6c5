//! Pointwise suprema of finite families of polyhedral functions.

mod catalog;
mod decompose;
mod perspective;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::certificate::{Counterexample, Inclusion};
use crate::error::{check_dim, Error, Result};
use crate::function::{AffinePiece, PolyhedralFunction};
use crate::polyhedron::Polyhedron;
use crate::rational::{ExtendedRational, Rational};
use crate::vector::QVector;

pub use catalog::{
    check_identity, closure_gap_vertices, default_point, scaled_abs_chain, CheckInstance, CheckParams, Identity,
    DEFAULT_GAMMA_GRID,
};
pub use decompose::{decompose, DecompositionMode, DecompositionWitness};
pub use perspective::{
    check_qc1, check_qc2, co_hull_conjugates, conjugate_on_interior, eps_normal_intersection,
    eps_normal_intersection_lifted, eps_subdiff_rhs_basic, eps_subdiff_rhs_lifted, inf_convolution,
    sum_zero_cone_is_trivial, CoHull, InteriorConjugate,
};

/// Order edges `(t, s)` meaning `t ⪯ s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyOrder {
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub increasing: bool,
}

impl FamilyOrder {
    /// The chain `labels[0] ⪯ labels[1] ⪯ ...`.
    pub fn chain(labels: &[String], increasing: bool) -> Self {
        let edges = labels.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        FamilyOrder { edges, increasing }
    }
}

/// Nonnegative weights indexed by label with a fixed total mass.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexWeights {
    pub weights: BTreeMap<String, Rational>,
    pub mass: Rational,
}

impl SimplexWeights {
    /// Zero entries are dropped; the mass is the sum.
    pub fn new(weights: BTreeMap<String, Rational>) -> Self {
        let weights: BTreeMap<String, Rational> = weights.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        let mass = weights.values().sum();
        SimplexWeights { weights, mass }
    }

    pub fn get(&self, label: &str) -> Rational {
        self.weights.get(label).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> BTreeSet<&str> {
        self.weights.keys().map(String::as_str).collect()
    }

    /// Every weight lies in `[0, mass]` and the weights add up to `mass`.
    pub fn is_valid(&self) -> bool {
        self.weights.values().all(|w| !w.is_negative() && *w <= self.mass)
            && self.weights.values().sum::<Rational>() == self.mass
    }
}

/// A finite labeled family `{f_t}` together with its supremum.
#[derive(Clone, Debug)]
pub struct FunctionFamily {
    dim: usize,
    labels: Vec<String>,
    members: Vec<PolyhedralFunction>,
    order: Option<FamilyOrder>,
    sup: PolyhedralFunction,
    increasing: OnceLock<Result<Inclusion>>,
}

impl FunctionFamily {
    pub fn new(members: Vec<(String, PolyhedralFunction)>, order: Option<FamilyOrder>) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(Error::InvalidInput("a family needs at least one member".into()));
        };
        let dim = first.dim();
        let mut seen = BTreeSet::new();
        for (label, f) in &members {
            check_dim(dim, f.dim())?;
            if !seen.insert(label.clone()) {
                return Err(Error::InvalidInput(format!("duplicate label {label}")));
            }
        }
        if let Some(o) = &order {
            for (a, b) in &o.edges {
                if !seen.contains(a) || !seen.contains(b) {
                    return Err(Error::InvalidInput(format!("order edge ({a}, {b}) names an unknown label")));
                }
            }
        }
        let (labels, members): (Vec<String>, Vec<PolyhedralFunction>) = members.into_iter().unzip();
        let sup = sup_of(dim, &members)?;
        Ok(FunctionFamily { dim, labels, members, order, sup, increasing: OnceLock::new() })
    }

    /// An increasing chain in the given order.
    pub fn chain(members: Vec<(String, PolyhedralFunction)>) -> Result<Self> {
        let labels: Vec<String> = members.iter().map(|(l, _)| l.clone()).collect();
        Self::new(members, Some(FamilyOrder::chain(&labels, true)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn members(&self) -> impl Iterator<Item = (&str, &PolyhedralFunction)> {
        self.labels.iter().map(String::as_str).zip(&self.members)
    }

    pub fn member(&self, i: usize) -> &PolyhedralFunction {
        &self.members[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn order(&self) -> Option<&FamilyOrder> {
        self.order.as_ref()
    }

    /// The pointwise supremum: all pieces, intersected domains.
    pub fn sup_function(&self) -> &PolyhedralFunction {
        &self.sup
    }

    pub fn eval(&self, x: &QVector) -> ExtendedRational {
        self.members.iter().map(|f| f.eval(x)).max().expect("nonempty family")
    }

    /// `T_eps(x) = {t : f_t(x) >= f(x) - eps}`.
    pub fn active_indices(&self, x: &QVector, eps: &Rational) -> Result<Vec<String>> {
        check_dim(self.dim, x.dim())?;
        let ExtendedRational::Finite(fx) = self.eval(x) else {
            return Err(Error::InvalidInput("active indices need f(x) finite".into()));
        };
        let level = &fx - eps;
        Ok(self
            .members()
            .filter(|(_, f)| matches!(f.eval(x), ExtendedRational::Finite(v) if v >= level))
            .map(|(l, _)| l.to_string())
            .collect())
    }

    /// Whether every member is proper.
    pub fn all_proper(&self) -> bool {
        self.members.iter().all(PolyhedralFunction::is_proper)
    }

    /// Exact audit of the asserted order: `f_t <= f_s` on every edge and a
    /// greatest element exists. Holds vacuously when no increasing order is
    /// asserted.
    pub fn audit_increasing(&self) -> Result<Inclusion> {
        self.increasing
            .get_or_init(|| {
                let Some(order) = self.order.as_ref().filter(|o| o.increasing) else {
                    return Ok(Inclusion::Holds);
                };
                for (a, b) in &order.edges {
                    let fa = &self.members[self.index_of(a).unwrap()];
                    let fb = &self.members[self.index_of(b).unwrap()];
                    if let Inclusion::Violated(cx) = fa.le(fb)? {
                        return Ok(Inclusion::Violated(cx.with_reason(&format!("order edge {a} ⪯ {b}"))));
                    }
                }
                if self.top().is_none() {
                    return Ok(Inclusion::Violated(Counterexample::point(
                        QVector::zeros(self.dim),
                        "asserted order has no greatest element",
                    )));
                }
                Ok(Inclusion::Holds)
            })
            .clone()
    }

    /// Whether an increasing order is asserted and passes the audit.
    pub fn is_increasing(&self) -> Result<bool> {
        Ok(self.order.as_ref().is_some_and(|o| o.increasing) && self.audit_increasing()?.holds())
    }

    /// Index of the greatest element of the asserted order.
    pub fn top(&self) -> Option<usize> {
        let order = self.order.as_ref()?;
        let m = self.members.len();
        let mut reach = vec![vec![false; m]; m];
        for (i, row) in reach.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in &order.edges {
            reach[self.index_of(a)?][self.index_of(b)?] = true;
        }
        for k in 0..m {
            for i in 0..m {
                if reach[i][k] {
                    for j in 0..m {
                        if reach[k][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        (0..m).find(|&t| (0..m).all(|s| reach[s][t]))
    }

    /// Indices `s` with `t ⪯ s`.
    pub fn successors(&self, t: usize) -> Vec<usize> {
        let m = self.members.len();
        let mut seen = vec![false; m];
        seen[t] = true;
        let mut stack = vec![t];
        if let Some(order) = &self.order {
            while let Some(u) = stack.pop() {
                for (a, b) in &order.edges {
                    if self.index_of(a) == Some(u) {
                        let v = self.index_of(b).unwrap();
                        if !seen[v] {
                            seen[v] = true;
                            stack.push(v);
                        }
                    }
                }
            }
        }
        (0..m).filter(|&i| seen[i]).collect()
    }

    /// `{f_t + <c, .>}` with the same labels and order.
    pub fn add_linear(&self, c: &QVector) -> Result<Self> {
        let members = self.members().map(|(l, f)| (l.to_string(), f.add_linear(c))).collect();
        Self::new(members, self.order.clone())
    }

    /// `{f_t + delta_B}`.
    pub fn restrict(&self, b: &Polyhedron) -> Result<Self> {
        let members = self
            .members()
            .map(|(l, f)| Ok((l.to_string(), f.restrict(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(members, self.order.clone())
    }

    pub fn to_json(&self) -> FamilyJson {
        FamilyJson {
            dim: self.dim,
            functions: self
                .members()
                .map(|(l, f)| LabeledFunction { label: l.to_string(), function: f.to_json() })
                .collect(),
            order: self.order.clone(),
        }
    }
}

fn sup_of(dim: usize, members: &[PolyhedralFunction]) -> Result<PolyhedralFunction> {
    let mut pieces: Vec<AffinePiece> = Vec::new();
    let mut domain = Polyhedron::universe(dim);
    for f in members {
        pieces.extend(f.pieces().iter().cloned());
        domain = domain.intersect(f.domain())?;
    }
    PolyhedralFunction::new(dim, pieces, domain)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledFunction {
    pub label: String,
    pub function: crate::function::FunctionJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyJson {
    pub dim: usize,
    pub functions: Vec<LabeledFunction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<FamilyOrder>,
}

impl Serialize for FunctionFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl FamilyJson {
    pub fn build(&self) -> Result<FunctionFamily> {
        let members = self
            .functions
            .iter()
            .map(|lf| {
                check_dim(self.dim, lf.function.dim)?;
                Ok((lf.label.clone(), PolyhedralFunction::from_json(&lf.function)?))
            })
            .collect::<Result<Vec<_>>>()?;
        FunctionFamily::new(members, self.order.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    pub(crate) fn pm_x() -> FunctionFamily {
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
    fn sup_examples() {
        let abs = PolyhedralFunction::l1_norm(1, &qi(1));
        assert!(pm_x().sup_function().equals(&abs).unwrap());
        let ind = |a, b| {
            PolyhedralFunction::indicator(Polyhedron::boxed(&QVector::from_ints(&[a]), &QVector::from_ints(&[b])).unwrap())
        };
        let f = FunctionFamily::new(vec![("a".into(), ind(0, 2)), ("b".into(), ind(1, 3))], None).unwrap();
        assert!(f.sup_function().equals(&ind(1, 2)).unwrap());
        let f = scaled_abs_chain(1, 5);
        assert!(f.sup_function().equals(&PolyhedralFunction::l1_norm(1, &q(4, 5))).unwrap());
        assert!(f.is_increasing().unwrap());
        assert_eq!(f.top(), Some(4));
    }

    #[test]
    fn active_sets() {
        let f = pm_x();
        let at = |x: i64, e: Rational| f.active_indices(&QVector::from_ints(&[x]), &e).unwrap();
        assert_eq!(at(0, qi(0)), vec!["plus", "minus"]);
        assert_eq!(at(1, qi(0)), vec!["plus"]);
        assert_eq!(at(1, qi(2)), vec!["plus", "minus"]);
    }

    #[test]
    fn order_audit_rejects_false_claims() {
        let f = FunctionFamily::chain(vec![
            ("a".into(), PolyhedralFunction::l1_norm(1, &qi(2))),
            ("b".into(), PolyhedralFunction::l1_norm(1, &qi(1))),
        ])
        .unwrap();
        assert!(!f.is_increasing().unwrap());
    }
}
