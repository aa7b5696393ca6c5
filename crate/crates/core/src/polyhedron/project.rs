//! Projections of lifted polyhedra, materialized with the convex hull method.

use std::collections::HashSet;

use crate::certificate::{Counterexample, Inclusion};
use crate::error::{check_dim, Error, Result};
use crate::linalg::nullspace;
use crate::lp::{LpBuilder, LpResult, LpStatus, Relation, Sense};
use crate::rational::{ExtendedRational, Rational};
use crate::vector::QVector;

use super::{check_cap, Polyhedron};

/// The image of `{z : rows(z)}` under `z -> (z_0, ..., z_{dim-1})`.
#[derive(Clone, Debug)]
pub struct LiftedPolyhedron {
    dim: usize,
    lp: LpBuilder,
}

impl LiftedPolyhedron {
    /// The first `dim` variables of `lp` are the projected coordinates.
    pub fn new(dim: usize, lp: LpBuilder) -> Result<Self> {
        if lp.num_vars() < dim {
            return Err(Error::InvalidInput("lifted system has fewer variables than the projection".into()));
        }
        Ok(LiftedPolyhedron { dim, lp })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn builder(&self) -> &LpBuilder {
        &self.lp
    }

    pub fn optimize(&self, c: &QVector, sense: Sense) -> Result<LpResult> {
        check_dim(self.dim, c.dim())?;
        let obj: Vec<(usize, Rational)> =
            c.iter().enumerate().filter(|(_, a)| !a.is_zero()).map(|(i, a)| (i, a.clone())).collect();
        let mut res = self.lp.solve(&obj, sense)?;
        res.primal_point = res.primal_point.map(|p| p.head(self.dim));
        res.direction = res.direction.map(|d| d.head(self.dim));
        Ok(res)
    }

    pub fn support(&self, c: &QVector) -> Result<ExtendedRational> {
        Ok(self.optimize(c, Sense::Maximize)?.optimum)
    }

    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.optimize(&QVector::zeros(self.dim), Sense::Minimize)?.is_infeasible())
    }

    pub fn some_point(&self) -> Result<Option<QVector>> {
        let res = self.optimize(&QVector::zeros(self.dim), Sense::Minimize)?;
        let ok = res.is_optimal();
        Ok(res.primal_point.filter(|_| ok))
    }

    /// The projection of the recession cone of the lifted set.
    pub fn recession(&self) -> LiftedPolyhedron {
        LiftedPolyhedron { dim: self.dim, lp: self.lp.homogenized() }
    }

    /// A lift of `x`, if `x` belongs to the projection.
    pub fn lift(&self, x: &QVector) -> Result<Option<QVector>> {
        check_dim(self.dim, x.dim())?;
        let mut lp = self.lp.clone();
        for (i, v) in x.iter().enumerate() {
            lp.row(vec![(i, Rational::one())], Relation::Eq, v.clone());
        }
        lp.feasible_point()
    }

    pub fn contains(&self, x: &QVector) -> Result<bool> {
        Ok(self.lift(x)?.is_some())
    }

    pub fn contains_direction(&self, d: &QVector) -> Result<bool> {
        self.recession().contains(d)
    }

    /// Decides `proj ⊆ p` row by row.
    pub fn is_subset_of(&self, p: &Polyhedron) -> Result<Inclusion> {
        check_dim(self.dim, p.dim())?;
        let mut rows: Vec<(QVector, Rational)> =
            p.ineqs().iter().map(|h| (h.normal.clone(), h.offset.clone())).collect();
        for h in p.eqs() {
            rows.push((h.normal.clone(), h.offset.clone()));
            rows.push((h.normal.neg(), -&h.offset));
        }
        for (a, b) in rows {
            let res = self.optimize(&a, Sense::Maximize)?;
            match res.status {
                LpStatus::Infeasible => return Ok(Inclusion::Holds),
                LpStatus::Unbounded => {
                    return Ok(Inclusion::Violated(Counterexample::direction(
                        res.direction.unwrap(),
                        format!("projection unbounded beyond offset {b}"),
                    )))
                }
                LpStatus::Optimal => {
                    let v = res.value().unwrap();
                    if *v > b {
                        let mut cx = Counterexample::point(
                            res.primal_point.clone().unwrap(),
                            format!("projected value {v} exceeds offset {b}"),
                        );
                        cx.lp_certificate = res.dual_certificate.clone();
                        return Ok(Inclusion::Violated(cx));
                    }
                }
            }
        }
        Ok(Inclusion::Holds)
    }

    /// Decides `p ⊆ proj` through the generators of `p`.
    pub fn contains_polyhedron(&self, p: &Polyhedron) -> Result<Inclusion> {
        check_dim(self.dim, p.dim())?;
        let g = p.generators()?;
        for v in &g.points {
            if !self.contains(v)? {
                return Ok(Inclusion::Violated(Counterexample::point(v.clone(), "generator point outside projection")));
            }
        }
        let rec = self.recession();
        for r in g.all_rays() {
            if !rec.contains(&r)? {
                return Ok(Inclusion::Violated(Counterexample::direction(r, "generator ray outside projection")));
            }
        }
        Ok(Inclusion::Holds)
    }

    /// Both inclusions against `p`.
    pub fn compare(&self, p: &Polyhedron) -> Result<Inclusion> {
        match self.is_subset_of(p)? {
            Inclusion::Holds => self.contains_polyhedron(p),
            v => Ok(v),
        }
    }

    /// Explicit inequality and generator form of the projection.
    pub fn to_polyhedron(&self) -> Result<Polyhedron> {
        check_cap(self.dim)?;
        let Some(p0) = self.some_point()? else {
            return Ok(Polyhedron::empty(self.dim));
        };
        let rays = self.recession_rays()?;
        self.hull(p0, rays)
    }

    fn recession_rays(&self) -> Result<Vec<QVector>> {
        let mut rec = self.recession();
        for i in 0..self.dim {
            rec.lp.row(vec![(i, Rational::one())], Relation::Le, Rational::one());
            rec.lp.row(vec![(i, Rational::one())], Relation::Ge, -Rational::one());
        }
        let bounded = rec.hull(QVector::zeros(self.dim), Vec::new())?;
        let g = bounded.generators()?;
        Ok(g.points.iter().filter(|v| !v.is_zero()).map(QVector::primitive).collect())
    }

    fn hull(&self, p0: QVector, rays: Vec<QVector>) -> Result<Polyhedron> {
        let k = self.dim;
        let mut points = vec![p0.clone()];
        loop {
            let mut span: Vec<QVector> = points[1..].iter().map(|p| p.sub(&p0)).collect();
            span.extend(rays.iter().cloned());
            let comp = nullspace(&span, k);
            let mut grew = false;
            for w in &comp {
                let base = w.dot(&p0);
                for sense in [Sense::Maximize, Sense::Minimize] {
                    let res = self.optimize(w, sense)?;
                    let Some(v) = res.value() else {
                        return Err(Error::InvalidInput("projection recession cone inconsistent".into()));
                    };
                    if *v != base {
                        points.push(res.primal_point.unwrap());
                        grew = true;
                        break;
                    }
                }
                if grew {
                    break;
                }
            }
            if !grew {
                break;
            }
        }
        let mut verified: HashSet<super::HalfSpace> = HashSet::new();
        loop {
            let p = Polyhedron::from_generators(k, points.clone(), rays.clone(), Vec::new())?;
            let mut grew = false;
            for h in p.ineqs() {
                if verified.contains(h) {
                    continue;
                }
                let res = self.optimize(&h.normal, Sense::Maximize)?;
                let Some(v) = res.value() else {
                    return Err(Error::InvalidInput("projection recession cone inconsistent".into()));
                };
                if *v > h.offset {
                    points.push(res.primal_point.unwrap());
                    grew = true;
                } else {
                    verified.insert(h.clone());
                }
            }
            if !grew {
                return Ok(p);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    #[test]
    fn shadow_of_a_cube_edge_system() {
        // {(x, y, z) : 0 <= z <= 1, x = z, y = 1 - z} projects to the segment from (0,1) to (1,0)
        let mut lp = LpBuilder::new();
        let x = lp.vars(3, false);
        lp.row(vec![(x + 2, qi(1))], Relation::Le, qi(1));
        lp.row(vec![(x + 2, qi(1))], Relation::Ge, qi(0));
        lp.row(vec![(x, qi(1)), (x + 2, qi(-1))], Relation::Eq, qi(0));
        lp.row(vec![(x + 1, qi(1)), (x + 2, qi(1))], Relation::Eq, qi(1));
        let proj = LiftedPolyhedron::new(2, lp).unwrap();
        let p = proj.to_polyhedron().unwrap();
        let g = p.generators().unwrap();
        assert_eq!(g.points, vec![QVector::from_ints(&[0, 1]), QVector::from_ints(&[1, 0])]);
        assert!(proj.compare(&p).unwrap().holds());
    }

    #[test]
    fn projection_with_rays() {
        // {(x, t) : t >= 0, x <= t} projects to all of R
        let mut lp = LpBuilder::new();
        let x = lp.var(false);
        let t = lp.var(true);
        lp.row(vec![(x, qi(1)), (t, qi(-1))], Relation::Le, qi(0));
        let proj = LiftedPolyhedron::new(1, lp).unwrap();
        let p = proj.to_polyhedron().unwrap();
        assert!(p.equals(&Polyhedron::universe(1)).unwrap());
    }
}
