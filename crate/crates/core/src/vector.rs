use std::fmt;
use std::ops::{Deref, DerefMut};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{big_gcd, big_is_one, big_lcm, Rational};

/// A dense vector of exact rationals.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QVector(Vec<Rational>);

impl QVector {
    pub fn new(v: Vec<Rational>) -> Self {
        QVector(v)
    }

    pub fn zeros(n: usize) -> Self {
        QVector(vec![Rational::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Rational::one();
        v
    }

    pub fn from_ints(v: &[i64]) -> Self {
        QVector(v.iter().map(|&x| Rational::from_int(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    pub fn dot(&self, other: &QVector) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        let mut acc = Rational::zero();
        for (a, b) in self.0.iter().zip(&other.0) {
            if !a.is_zero() && !b.is_zero() {
                acc += a * b;
            }
        }
        acc
    }

    pub fn add(&self, other: &QVector) -> QVector {
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &QVector) -> QVector {
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: &Rational) -> QVector {
        QVector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn neg(&self) -> QVector {
        QVector(self.0.iter().map(|a| -a).collect())
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: &Rational, other: &QVector) -> QVector {
        QVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| if b.is_zero() { a.clone() } else { a + s * b })
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rational::is_zero)
    }

    pub fn l1_norm(&self) -> Rational {
        self.0.iter().map(Rational::abs).sum()
    }

    pub fn concat(&self, other: &QVector) -> QVector {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        QVector(v)
    }

    pub fn with(&self, extra: Rational) -> QVector {
        let mut v = self.0.clone();
        v.push(extra);
        QVector(v)
    }

    pub fn head(&self, k: usize) -> QVector {
        QVector(self.0[..k].to_vec())
    }

    pub fn slice(&self, from: usize, to: usize) -> QVector {
        QVector(self.0[from..to].to_vec())
    }

    /// Index of the first nonzero entry.
    pub fn leading(&self) -> Option<usize> {
        self.0.iter().position(|a| !a.is_zero())
    }

    /// Positive multiple with coprime integer entries; the zero vector is returned as is.
    pub fn primitive(&self) -> QVector {
        if self.is_zero() {
            return self.clone();
        }
        if let Some(v) = self.primitive_small() {
            return v;
        }
        let mut l = BigInt::from(1);
        for a in &self.0 {
            l = big_lcm(&l, &a.denom());
        }
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|a| a.numer() * (&l / a.denom()))
            .collect();
        let mut g = BigInt::zero();
        for x in &ints {
            if !x.is_zero() {
                g = big_gcd(&g, &x.abs());
                if big_is_one(&g) {
                    break;
                }
            }
        }
        QVector(ints.into_iter().map(|x| Rational::from_bigint(x / &g)).collect())
    }

    fn primitive_small(&self) -> Option<QVector> {
        let mut l: i128 = 1;
        for a in &self.0 {
            let (_, d) = a.as_small()?;
            let d = d as i128;
            l = l.checked_mul(d / gcd(l, d))?;
            if l > i64::MAX as i128 {
                return None;
            }
        }
        let mut ints = Vec::with_capacity(self.0.len());
        let mut g: i128 = 0;
        for a in &self.0 {
            let (n, d) = a.as_small()?;
            let x = (n as i128).checked_mul(l / d as i128)?;
            g = gcd(g, x.abs());
            ints.push(x);
        }
        let mut out = Vec::with_capacity(ints.len());
        for x in ints {
            let y = x / g;
            if y <= i64::MIN as i128 || y > i64::MAX as i128 {
                return None;
            }
            out.push(Rational::from_int(y as i64));
        }
        Some(QVector(out))
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Deref for QVector {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

impl DerefMut for QVector {
    fn deref_mut(&mut self) -> &mut [Rational] {
        &mut self.0
    }
}

impl From<Vec<Rational>> for QVector {
    fn from(v: Vec<Rational>) -> Self {
        QVector(v)
    }
}

impl FromIterator<Rational> for QVector {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        QVector(iter.into_iter().collect())
    }
}

impl fmt::Debug for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Builds a `QVector` from rational literals: `qv![1, (1, 2), -3]`.
#[macro_export]
macro_rules! qv {
    () => { $crate::QVector::new(Vec::new()) };
    ($($x:expr),+ $(,)?) => {
        $crate::QVector::new(vec![$($crate::rational::IntoRational::into_rational($x)),+])
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn primitive_scaling() {
        let v = QVector::new(vec![q(1, 2), q(-3, 4), q(0, 1)]);
        assert_eq!(v.primitive(), QVector::from_ints(&[2, -3, 0]));
        let w = QVector::from_ints(&[-4, 6]);
        assert_eq!(w.primitive(), QVector::from_ints(&[-2, 3]));
    }

    #[test]
    fn dot_and_axpy() {
        let a = QVector::from_ints(&[1, 2]);
        let b = QVector::new(vec![q(1, 2), q(1, 4)]);
        assert_eq!(a.dot(&b), q(1, 1));
        assert_eq!(a.axpy(&q(2, 1), &b), QVector::new(vec![q(2, 1), q(5, 2)]));
    }
}
