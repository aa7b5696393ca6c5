//! Double description conversion between inequality and generator forms.

use crate::linalg::{nullspace, project_out, rref};
use crate::rational::Rational;
use crate::vector::QVector;

use super::{Generators, HalfSpace};

#[derive(Clone)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet(vec![0; bits.div_ceil(64).max(1)])
    }

    fn full(upto: usize, bits: usize) -> Self {
        let mut s = Self::new(bits);
        for k in 0..upto {
            s.insert(k);
        }
        s
    }

    fn insert(&mut self, k: usize) {
        self.0[k / 64] |= 1 << (k % 64);
    }

    fn and(&self, other: &BitSet) -> BitSet {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn contains_all(&self, other: &BitSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }
}

/// Extreme rays and a lineality basis of `{y : h . y <= 0 for h in ineqs, e . y = 0 for e in eqs}`.
pub(crate) fn dd_cone(dim: usize, ineqs: &[QVector], eqs: &[QVector]) -> (Vec<QVector>, Vec<QVector>) {
    let mut lines = nullspace(eqs, dim);
    let space_dim = lines.len();
    let nbits = ineqs.len();
    let mut rays: Vec<(QVector, BitSet)> = Vec::new();
    for (k, h) in ineqs.iter().enumerate() {
        if let Some(li) = lines.iter().position(|l| !h.dot(l).is_zero()) {
            let l = lines.remove(li);
            let r0 = if h.dot(&l).is_negative() { l } else { l.neg() };
            let hr0 = h.dot(&r0);
            for lj in lines.iter_mut() {
                let hl = h.dot(lj);
                if !hl.is_zero() {
                    *lj = lj.axpy(&-(&hl / &hr0), &r0).primitive();
                }
            }
            for (r, tight) in rays.iter_mut() {
                let hr = h.dot(r);
                if !hr.is_zero() {
                    *r = r.axpy(&-(&hr / &hr0), &r0).primitive();
                }
                tight.insert(k);
            }
            rays.push((r0, BitSet::full(k, nbits)));
            continue;
        }
        let s: Vec<Rational> = rays.iter().map(|(r, _)| h.dot(r)).collect();
        if !s.iter().any(Rational::is_positive) {
            for (i, (_, tight)) in rays.iter_mut().enumerate() {
                if s[i].is_zero() {
                    tight.insert(k);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| s[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| s[i].is_negative()).collect();
        let d_eff = space_dim.saturating_sub(lines.len());
        let need = d_eff.saturating_sub(2);
        let mut created = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let z = rays[p].1.and(&rays[n].1);
                if z.count() < need {
                    continue;
                }
                let blocked = (0..rays.len()).any(|r| r != p && r != n && rays[r].1.contains_all(&z));
                if blocked {
                    continue;
                }
                let v = rays[n].0.scale(&s[p]).axpy(&-&s[n], &rays[p].0).primitive();
                let mut t = z;
                t.insert(k);
                created.push((v, t));
            }
        }
        let mut next = Vec::with_capacity(rays.len() + created.len());
        for (i, (r, mut tight)) in rays.into_iter().enumerate() {
            if s[i].is_positive() {
                continue;
            }
            if s[i].is_zero() {
                tight.insert(k);
            }
            next.push((r, tight));
        }
        next.extend(created);
        rays = next;
    }
    let mut out: Vec<QVector> = rays.into_iter().map(|(r, _)| r).collect();
    out.sort();
    out.dedup();
    (out, lines)
}

/// Canonical lineality basis: reduced echelon rows scaled to primitive integers.
pub(crate) fn canonical_lines(lines: &[QVector], dim: usize) -> Vec<QVector> {
    let (m, _) = rref(lines, dim);
    m.iter().map(QVector::primitive).collect()
}

pub(crate) fn h_to_v(dim: usize, ineqs: &[HalfSpace], eqs: &[HalfSpace]) -> Generators {
    let mut hom_ineqs = Vec::with_capacity(ineqs.len() + 1);
    let mut t_row = QVector::zeros(dim + 1);
    t_row[dim] = -Rational::one();
    hom_ineqs.push(t_row);
    for h in ineqs {
        hom_ineqs.push(h.normal.with(-&h.offset));
    }
    let hom_eqs: Vec<QVector> = eqs.iter().map(|h| h.normal.with(-&h.offset)).collect();
    let (rays, lines) = dd_cone(dim + 1, &hom_ineqs, &hom_eqs);
    let mut points = Vec::new();
    let mut dirs = Vec::new();
    for r in rays {
        let t = r[dim].clone();
        let x = r.head(dim);
        if t.is_positive() {
            points.push(x.scale(&t.recip()));
        } else {
            dirs.push(x);
        }
    }
    if points.is_empty() {
        return Generators::default();
    }
    let lines: Vec<QVector> = lines.iter().map(|l| l.head(dim)).collect();
    Generators::canonical(dim, points, dirs, lines)
}

/// Irredundant inequalities and equalities of `conv(points) + cone(rays) + span(lines)`.
pub(crate) fn v_to_h(
    dim: usize,
    points: &[QVector],
    rays: &[QVector],
    lines: &[QVector],
) -> (Vec<HalfSpace>, Vec<HalfSpace>) {
    if points.is_empty() {
        return (vec![HalfSpace::infeasible(dim)], Vec::new());
    }
    let mut rows = Vec::with_capacity(points.len() + rays.len());
    for v in points {
        rows.push(v.with(Rational::one()));
    }
    for r in rays {
        rows.push(r.with(Rational::zero()));
    }
    let eq_rows: Vec<QVector> = lines.iter().map(|l| l.with(Rational::zero())).collect();
    let (polar_rays, polar_lines) = dd_cone(dim + 1, &rows, &eq_rows);
    let mut ineqs = Vec::new();
    for r in polar_rays {
        let a = r.head(dim);
        if a.is_zero() {
            continue;
        }
        ineqs.push(HalfSpace { normal: a, offset: -&r[dim] });
    }
    let eqs = polar_lines
        .into_iter()
        .map(|l| HalfSpace { normal: l.head(dim), offset: -&l[dim] })
        .collect();
    (ineqs, eqs)
}

impl Generators {
    /// Projects points and rays onto the orthogonal complement of the lineality
    /// space and sorts everything.
    pub(crate) fn canonical(dim: usize, points: Vec<QVector>, rays: Vec<QVector>, lines: Vec<QVector>) -> Self {
        let lines = canonical_lines(&lines, dim);
        let mut points: Vec<QVector> = points.iter().map(|p| project_out(p, &lines)).collect();
        let mut rays: Vec<QVector> = rays
            .iter()
            .map(|r| project_out(r, &lines).primitive())
            .filter(|r| !r.is_zero())
            .collect();
        points.sort();
        points.dedup();
        rays.sort();
        rays.dedup();
        Generators { points, rays, lines }
    }
}
