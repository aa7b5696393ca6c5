//! Exact two-phase primal simplex with Bland's rule and certificates.
//!
//! Certificates use one sign convention for both senses. On `Optimal` the dual
//! vector `y` satisfies `sum_i y_i a_i = c` on free variables, `y . b = optimum`,
//! and `y_i` has the sign of the sense on `<=` rows (`>= 0` when maximizing,
//! `<= 0` when minimizing; the opposite on `>=` rows). For nonnegative variables
//! the equality becomes `<= c_j` when minimizing and `>= c_j` when maximizing.
//! On `Infeasible` the Farkas vector `z` is `>= 0` on `<=` rows, `<= 0` on `>=`
//! rows, has `sum_i z_i a_i` zero on free and nonnegative on nonnegative variables,
//! and `z . b < 0`.

use crate::error::{check_dim, Result};
use crate::rational::{ExtendedRational, Rational};
use crate::vector::QVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: QVector,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn le(coeffs: QVector, rhs: Rational) -> Self {
        Constraint { coeffs, relation: Relation::Le, rhs }
    }

    pub fn ge(coeffs: QVector, rhs: Rational) -> Self {
        Constraint { coeffs, relation: Relation::Ge, rhs }
    }

    pub fn eq(coeffs: QVector, rhs: Rational) -> Self {
        Constraint { coeffs, relation: Relation::Eq, rhs }
    }

    pub fn satisfied_by(&self, x: &QVector) -> bool {
        let lhs = self.coeffs.dot(x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpResult {
    pub status: LpStatus,
    pub optimum: ExtendedRational,
    pub primal_point: Option<QVector>,
    /// Optimality multipliers or, when infeasible, a Farkas witness.
    pub dual_certificate: Option<QVector>,
    /// Improving recession direction when unbounded.
    pub direction: Option<QVector>,
}

impl LpResult {
    pub fn value(&self) -> Option<&Rational> {
        self.optimum.finite()
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn is_infeasible(&self) -> bool {
        self.status == LpStatus::Infeasible
    }

    pub fn is_unbounded(&self) -> bool {
        self.status == LpStatus::Unbounded
    }
}

/// A linear program with free or nonnegative variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub objective: QVector,
    pub constraints: Vec<Constraint>,
    pub nonneg: Vec<bool>,
    pub sense: Sense,
}

/// Solves an LP over free variables.
pub fn lp_solve(objective: &QVector, constraints: &[Constraint], sense: Sense) -> Result<LpResult> {
    LinearProgram {
        objective: objective.clone(),
        constraints: constraints.to_vec(),
        nonneg: vec![false; objective.dim()],
        sense,
    }
    .solve()
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    reduced: Vec<Rational>,
    value: Rational,
    artificial_from: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        if !inv.is_one() {
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let nz: Vec<usize> = (0..self.rows[r].len())
            .filter(|&j| !self.rows[r][j].is_zero())
            .collect();
        let prow = std::mem::take(&mut self.rows[r]);
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &nz {
                let delta = &f * &prow[j];
                self.rows[i][j] -= delta;
            }
            if !prhs.is_zero() {
                self.rhs[i] -= &f * &prhs;
            }
        }
        if !self.reduced[c].is_zero() {
            let f = self.reduced[c].clone();
            for &j in &nz {
                let delta = &f * &prow[j];
                self.reduced[j] -= delta;
            }
            // objective row stores -value in the rhs position
            self.value += &f * &prhs;
        }
        self.rows[r] = prow;
        self.basis[r] = c;
    }

    fn set_costs(&mut self, costs: &[Rational]) {
        self.reduced = costs.to_vec();
        self.value = Rational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in self.rows[r].iter().enumerate() {
                if !a.is_zero() {
                    self.reduced[j] -= cb * a;
                }
            }
            self.value += cb * &self.rhs[r];
        }
    }

    /// Runs Bland's rule; returns the entering column on unboundedness.
    fn run(&mut self) -> Option<usize> {
        loop {
            let Some(c) = (0..self.artificial_from).find(|&j| self.reduced[j].is_negative()) else {
                return None;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                None => return Some(c),
                Some((r, _)) => self.pivot(r, c),
            }
        }
    }

    fn column_values(&self, ncols: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); ncols];
        for (r, &b) in self.basis.iter().enumerate() {
            v[b] = self.rhs[r].clone();
        }
        v
    }
}

impl LinearProgram {
    pub fn new(objective: QVector, constraints: Vec<Constraint>, sense: Sense) -> Self {
        let n = objective.dim();
        LinearProgram { objective, constraints, nonneg: vec![false; n], sense }
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn solve(&self) -> Result<LpResult> {
        let n = self.dim();
        check_dim(n, self.nonneg.len())?;
        for c in &self.constraints {
            check_dim(n, c.coeffs.dim())?;
        }
        let res = self.solve_inner();
        debug_assert!(self.verify(&res), "LP certificate failed verification");
        Ok(res)
    }

    fn solve_inner(&self) -> LpResult {
        let n = self.dim();
        let m = self.constraints.len();
        // column layout: variables (one or two columns each), slacks, artificials
        let mut var_cols: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
        let mut ncols = 0;
        for j in 0..n {
            if self.nonneg[j] {
                var_cols.push((ncols, None));
                ncols += 1;
            } else {
                var_cols.push((ncols, Some(ncols + 1)));
                ncols += 2;
            }
        }
        let nvar_cols = ncols;
        let mut slack_col = vec![None; m];
        for (i, c) in self.constraints.iter().enumerate() {
            if c.relation != Relation::Eq {
                slack_col[i] = Some(ncols);
                ncols += 1;
            }
        }
        let artificial_from = ncols;
        let mut sigma = vec![false; m]; // true when the row was negated
        let mut flipped_ge = vec![false; m];
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut init_col = vec![0; m];
        let mut basis = vec![0; m];
        let mut needs_art = Vec::new();
        for (i, c) in self.constraints.iter().enumerate() {
            let ge = c.relation == Relation::Ge;
            flipped_ge[i] = ge;
            let mut b = if ge { -&c.rhs } else { c.rhs.clone() };
            let neg = (b.is_negative()) ^ false;
            sigma[i] = neg;
            let flip = ge ^ neg;
            let mut row = vec![Rational::zero(); ncols];
            for (j, a) in c.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let v = if flip { -a } else { a.clone() };
                let (p, mcol) = var_cols[j];
                if let Some(mc) = mcol {
                    row[mc] = -&v;
                }
                row[p] = v;
            }
            if let Some(s) = slack_col[i] {
                row[s] = if neg { -Rational::one() } else { Rational::one() };
            }
            if neg {
                b = -b;
            }
            if slack_col[i].is_some() && !neg {
                init_col[i] = slack_col[i].unwrap();
                basis[i] = init_col[i];
            } else {
                needs_art.push(i);
            }
            rows.push(row);
            rhs.push(b);
        }
        let total = ncols + needs_art.len();
        for row in rows.iter_mut() {
            row.resize(total, Rational::zero());
        }
        for (k, &i) in needs_art.iter().enumerate() {
            let col = ncols + k;
            rows[i][col] = Rational::one();
            init_col[i] = col;
            basis[i] = col;
        }
        let mut t = Tableau {
            rows,
            rhs,
            basis,
            reduced: vec![Rational::zero(); total],
            value: Rational::zero(),
            artificial_from,
        };

        // maps a normalized-row multiplier back to the caller's row orientation
        let orient = |i: usize, y: Rational| -> Rational {
            if sigma[i] ^ flipped_ge[i] {
                -y
            } else {
                y
            }
        };

        if !needs_art.is_empty() {
            let mut costs = vec![Rational::zero(); total];
            for c in costs.iter_mut().skip(ncols) {
                *c = Rational::one();
            }
            t.set_costs(&costs);
            let unb = t.run();
            debug_assert!(unb.is_none());
            if t.value.is_positive() {
                // y'_i = c_init - d_init; Farkas z = -y
                let z: QVector = (0..m)
                    .map(|i| {
                        let yi = &costs[init_col[i]] - &t.reduced[init_col[i]];
                        orient(i, -yi)
                    })
                    .collect();
                return LpResult {
                    status: LpStatus::Infeasible,
                    optimum: match self.sense {
                        Sense::Minimize => ExtendedRational::PosInfinity,
                        Sense::Maximize => ExtendedRational::NegInfinity,
                    },
                    primal_point: None,
                    dual_certificate: Some(z),
                    direction: None,
                };
            }
            for r in 0..m {
                if t.basis[r] >= ncols {
                    if let Some(j) = (0..ncols).find(|&j| !t.rows[r][j].is_zero()) {
                        t.pivot(r, j);
                    }
                }
            }
        }

        let mut costs = vec![Rational::zero(); total];
        for (j, &(p, mc)) in var_cols.iter().enumerate() {
            let cj = match self.sense {
                Sense::Minimize => self.objective[j].clone(),
                Sense::Maximize => -&self.objective[j],
            };
            if let Some(mc) = mc {
                costs[mc] = -&cj;
            }
            costs[p] = cj;
        }
        t.set_costs(&costs);
        let to_x = |cols: &[Rational]| -> QVector {
            var_cols
                .iter()
                .map(|&(p, mc)| match mc {
                    Some(mc) => &cols[p] - &cols[mc],
                    None => cols[p].clone(),
                })
                .collect()
        };
        let _ = nvar_cols;
        if let Some(c) = t.run() {
            let point = to_x(&t.column_values(total));
            let mut d = vec![Rational::zero(); total];
            d[c] = Rational::one();
            for r in 0..m {
                let a = &t.rows[r][c];
                if !a.is_zero() {
                    d[t.basis[r]] = -a;
                }
            }
            return LpResult {
                status: LpStatus::Unbounded,
                optimum: match self.sense {
                    Sense::Minimize => ExtendedRational::NegInfinity,
                    Sense::Maximize => ExtendedRational::PosInfinity,
                },
                primal_point: Some(point),
                dual_certificate: None,
                direction: Some(to_x(&d)),
            };
        }
        let point = to_x(&t.column_values(total));
        let (value, flip) = match self.sense {
            Sense::Minimize => (t.value.clone(), false),
            Sense::Maximize => (-&t.value, true),
        };
        let y: QVector = (0..m)
            .map(|i| {
                let yi = &costs[init_col[i]] - &t.reduced[init_col[i]];
                let yi = if sigma[i] { -yi } else { yi };
                let yi = if flip { -yi } else { yi };
                if flipped_ge[i] {
                    -yi
                } else {
                    yi
                }
            })
            .collect();
        LpResult {
            status: LpStatus::Optimal,
            optimum: ExtendedRational::Finite(value),
            primal_point: Some(point),
            dual_certificate: Some(y),
            direction: None,
        }
    }

    /// Checks every certificate carried by `res` exactly.
    pub fn verify(&self, res: &LpResult) -> bool {
        let n = self.dim();
        let feasible = |x: &QVector| {
            x.dim() == n
                && self.constraints.iter().all(|c| c.satisfied_by(x))
                && (0..n).all(|j| !self.nonneg[j] || !x[j].is_negative())
        };
        let combo = |y: &QVector| -> QVector {
            let mut acc = QVector::zeros(n);
            for (yi, c) in y.iter().zip(&self.constraints) {
                if !yi.is_zero() {
                    acc = acc.axpy(yi, &c.coeffs);
                }
            }
            acc
        };
        let yb = |y: &QVector| -> Rational {
            y.iter().zip(&self.constraints).map(|(a, c)| a * &c.rhs).sum()
        };
        match res.status {
            LpStatus::Optimal => {
                let (Some(x), Some(y), Some(v)) = (&res.primal_point, &res.dual_certificate, res.value()) else {
                    return false;
                };
                if !feasible(x) || self.objective.dot(x) != *v || y.dim() != self.constraints.len() {
                    return false;
                }
                let max = self.sense == Sense::Maximize;
                let signs_ok = y.iter().zip(&self.constraints).all(|(yi, c)| match c.relation {
                    Relation::Eq => true,
                    Relation::Le => (max && !yi.is_negative()) || (!max && !yi.is_positive()),
                    Relation::Ge => (max && !yi.is_positive()) || (!max && !yi.is_negative()),
                });
                let ya = combo(y);
                let cols_ok = (0..n).all(|j| {
                    if !self.nonneg[j] {
                        ya[j] == self.objective[j]
                    } else if max {
                        ya[j] >= self.objective[j]
                    } else {
                        ya[j] <= self.objective[j]
                    }
                });
                signs_ok && cols_ok && yb(y) == *v
            }
            LpStatus::Infeasible => {
                let Some(z) = &res.dual_certificate else {
                    return false;
                };
                if z.dim() != self.constraints.len() {
                    return false;
                }
                let signs_ok = z.iter().zip(&self.constraints).all(|(zi, c)| match c.relation {
                    Relation::Eq => true,
                    Relation::Le => !zi.is_negative(),
                    Relation::Ge => !zi.is_positive(),
                });
                let za = combo(z);
                let cols_ok = (0..n).all(|j| {
                    if self.nonneg[j] {
                        !za[j].is_negative()
                    } else {
                        za[j].is_zero()
                    }
                });
                signs_ok && cols_ok && yb(z).is_negative()
            }
            LpStatus::Unbounded => {
                let (Some(x), Some(d)) = (&res.primal_point, &res.direction) else {
                    return false;
                };
                if !feasible(x) || d.dim() != n {
                    return false;
                }
                let rec_ok = self.constraints.iter().all(|c| {
                    let v = c.coeffs.dot(d);
                    match c.relation {
                        Relation::Le => !v.is_positive(),
                        Relation::Ge => !v.is_negative(),
                        Relation::Eq => v.is_zero(),
                    }
                }) && (0..n).all(|j| !self.nonneg[j] || !d[j].is_negative());
                let gain = self.objective.dot(d);
                rec_ok
                    && match self.sense {
                        Sense::Minimize => gain.is_negative(),
                        Sense::Maximize => gain.is_positive(),
                    }
            }
        }
    }
}

/// Incremental LP construction over sparse rows.
#[derive(Clone, Debug, Default)]
pub struct LpBuilder {
    nonneg: Vec<bool>,
    rows: Vec<(Vec<(usize, Rational)>, Relation, Rational)>,
}

impl LpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.nonneg.len()
    }

    pub fn var(&mut self, nonneg: bool) -> usize {
        self.nonneg.push(nonneg);
        self.nonneg.len() - 1
    }

    /// Adds `k` consecutive variables and returns the index of the first.
    pub fn vars(&mut self, k: usize, nonneg: bool) -> usize {
        let first = self.nonneg.len();
        self.nonneg.extend(std::iter::repeat(nonneg).take(k));
        first
    }

    pub fn row(&mut self, terms: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        self.rows.push((terms, relation, rhs));
    }

    /// Adds dense coefficients `coeffs` on variables `first..first + coeffs.dim()`
    /// to `terms`.
    pub fn dense_terms(terms: &mut Vec<(usize, Rational)>, first: usize, coeffs: &[Rational]) {
        for (k, a) in coeffs.iter().enumerate() {
            if !a.is_zero() {
                terms.push((first + k, a.clone()));
            }
        }
    }

    pub fn build(&self, objective: &[(usize, Rational)], sense: Sense) -> LinearProgram {
        let n = self.nonneg.len();
        let dense = |terms: &[(usize, Rational)]| {
            let mut v = QVector::zeros(n);
            for (j, a) in terms {
                v[*j] += a;
            }
            v
        };
        LinearProgram {
            objective: dense(objective),
            constraints: self
                .rows
                .iter()
                .map(|(t, rel, b)| Constraint { coeffs: dense(t), relation: *rel, rhs: b.clone() })
                .collect(),
            nonneg: self.nonneg.clone(),
            sense,
        }
    }

    pub fn solve(&self, objective: &[(usize, Rational)], sense: Sense) -> Result<LpResult> {
        self.build(objective, sense).solve()
    }

    /// The same rows with zero right-hand sides: the recession cone.
    pub fn homogenized(&self) -> LpBuilder {
        LpBuilder {
            nonneg: self.nonneg.clone(),
            rows: self.rows.iter().map(|(t, r, _)| (t.clone(), *r, Rational::zero())).collect(),
        }
    }

    pub fn feasible_point(&self) -> Result<Option<QVector>> {
        let res = self.solve(&[], Sense::Minimize)?;
        Ok(if res.is_optimal() { res.primal_point } else { None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn c(a: &[i64], rel: Relation, b: i64) -> Constraint {
        Constraint { coeffs: QVector::from_ints(a), relation: rel, rhs: qi(b) }
    }

    #[test]
    fn single_bound() {
        let res = lp_solve(&QVector::from_ints(&[1]), &[c(&[1], Relation::Ge, 1)], Sense::Minimize).unwrap();
        assert_eq!(res.optimum, ExtendedRational::Finite(qi(1)));
    }

    #[test]
    fn unbounded_direction() {
        let res = lp_solve(&QVector::from_ints(&[1]), &[c(&[1], Relation::Le, 0)], Sense::Minimize).unwrap();
        assert_eq!(res.status, LpStatus::Unbounded);
        assert_eq!(res.direction.unwrap()[0], qi(-1));
    }

    #[test]
    fn two_dimensional_minimum() {
        // oracle: vertices of the feasible region are (0,3), (4/5,3/5), (2,0);
        // objective values 3, 7/5, 2
        let cons = vec![
            c(&[1, 2], Relation::Ge, 2),
            c(&[3, 1], Relation::Ge, 3),
            c(&[1, 0], Relation::Ge, 0),
            c(&[0, 1], Relation::Ge, 0),
        ];
        let res = lp_solve(&QVector::from_ints(&[1, 1]), &cons, Sense::Minimize).unwrap();
        assert_eq!(res.optimum, ExtendedRational::Finite(q(7, 5)));
        assert_eq!(res.primal_point.unwrap(), QVector::new(vec![q(4, 5), q(3, 5)]));
    }

    #[test]
    fn farkas_witness() {
        let cons = vec![c(&[1, 1], Relation::Le, 1), c(&[1, 1], Relation::Ge, 2)];
        let lp = LinearProgram::new(QVector::from_ints(&[0, 0]), cons, Sense::Maximize);
        let res = lp.solve().unwrap();
        assert_eq!(res.status, LpStatus::Infeasible);
        assert!(lp.verify(&res));
    }

    #[test]
    fn equality_and_nonneg_vars() {
        let mut b = LpBuilder::new();
        let x = b.var(true);
        let y = b.var(true);
        b.row(vec![(x, qi(1)), (y, qi(1))], Relation::Eq, qi(1));
        let res = b.solve(&[(x, qi(2)), (y, qi(3))], Sense::Maximize).unwrap();
        assert_eq!(res.optimum, ExtendedRational::Finite(qi(3)));
    }

    #[test]
    fn degenerate_cycling_example() {
        // cycles under the largest-coefficient rule; optimum 1 at (1, 0, 1, 0)
        let cons = vec![
            Constraint::le(QVector::new(vec![q(1, 2), q(-11, 2), q(-5, 2), qi(9)]), qi(0)),
            Constraint::le(QVector::new(vec![q(1, 2), q(-3, 2), q(-1, 2), qi(1)]), qi(0)),
            Constraint::le(QVector::from_ints(&[1, 0, 0, 0]), qi(1)),
        ];
        let mut lp = LinearProgram::new(QVector::from_ints(&[10, -57, -9, -24]), cons, Sense::Maximize);
        lp.nonneg = vec![true; 4];
        let res = lp.solve().unwrap();
        assert_eq!(res.optimum, ExtendedRational::Finite(qi(1)));
        assert!(lp.verify(&res));
    }
}
