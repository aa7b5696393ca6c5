//! Dense exact linear algebra on row lists.

use crate::rational::Rational;
use crate::vector::QVector;

/// Reduced row echelon form of `rows` (each of length `width`). Returns the nonzero
/// rows and their pivot columns.
pub fn rref(rows: &[QVector], width: usize) -> (Vec<QVector>, Vec<usize>) {
    let mut m: Vec<QVector> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        m[r] = m[r].scale(&inv);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = -&m[i][c];
                m[i] = m[i].axpy(&f, &m[r]);
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[QVector], width: usize) -> usize {
    rref(rows, width).1.len()
}

/// Basis of `{x : row . x = 0 for every row}` in `R^width`.
pub fn nullspace(rows: &[QVector], width: usize) -> Vec<QVector> {
    let (m, pivots) = rref(rows, width);
    let mut basis = Vec::new();
    let mut is_pivot = vec![false; width];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    for free in 0..width {
        if is_pivot[free] {
            continue;
        }
        let mut v = QVector::zeros(width);
        v[free] = Rational::one();
        for (row, &p) in m.iter().zip(&pivots) {
            v[p] = -&row[free];
        }
        basis.push(v.primitive());
    }
    basis
}

/// A solution of `A x = b` if one exists (any solution when not unique).
pub fn solve(a: &[QVector], b: &[Rational], width: usize) -> Option<QVector> {
    let aug: Vec<QVector> = a.iter().zip(b).map(|(r, bi)| r.with(bi.clone())).collect();
    let (m, pivots) = rref(&aug, width + 1);
    if pivots.last() == Some(&width) {
        return None;
    }
    let mut x = QVector::zeros(width);
    for (row, &p) in m.iter().zip(&pivots) {
        x[p] = row[width].clone();
    }
    Some(x)
}

/// Orthogonal projection of `v` onto the complement of `span(basis)`.
pub fn project_out(v: &QVector, basis: &[QVector]) -> QVector {
    if basis.is_empty() {
        return v.clone();
    }
    let k = basis.len();
    let gram: Vec<QVector> = (0..k)
        .map(|i| (0..k).map(|j| basis[i].dot(&basis[j])).collect())
        .collect();
    let rhs: Vec<Rational> = basis.iter().map(|b| b.dot(v)).collect();
    let coef = solve(&gram, &rhs, k).expect("gram matrix of a basis is invertible");
    let mut out = v.clone();
    for (c, b) in coef.iter().zip(basis) {
        if !c.is_zero() {
            out = out.axpy(&-c, b);
        }
    }
    out
}

/// Basis of the orthogonal complement of `span(vectors)` in `R^width`.
pub fn complement(vectors: &[QVector], width: usize) -> Vec<QVector> {
    nullspace(vectors, width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn nullspace_of_plane() {
        let rows = vec![QVector::from_ints(&[1, 1, 1])];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(rows[0].dot(v).is_zero());
        }
    }

    #[test]
    fn solve_and_project() {
        let a = vec![QVector::from_ints(&[2, 1]), QVector::from_ints(&[1, 3])];
        let x = solve(&a, &[qi(3), qi(5)], 2).unwrap();
        assert_eq!(x, QVector::new(vec![q(4, 5), q(7, 5)]));
        let p = project_out(&QVector::from_ints(&[1, 0]), &[QVector::from_ints(&[1, -1])]);
        assert_eq!(p, QVector::new(vec![q(1, 2), q(1, 2)]));
        assert!(solve(&[QVector::from_ints(&[0, 0])], &[qi(1)], 2).is_none());
    }
}
