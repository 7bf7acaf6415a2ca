//! Exact sparse linear algebra over Q.
//!
//! Ranks are computed by fraction-free elimination over the integers (each
//! column is cleared of denominators first, and every reduced row is divided by
//! the gcd of its entries). Kernels, quotient bases and coordinate solves use a
//! tagged rational echelon form.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::Rational;

/// Sparse vector indexed by coordinate.
pub type SparseVec<T> = BTreeMap<usize, T>;

fn primitive(v: &mut SparseVec<BigInt>) {
    let mut g = BigInt::zero();
    for x in v.values() {
        g = g.gcd(x);
        if g.is_one() {
            break;
        }
    }
    let lead_negative = v.values().next().is_some_and(|x| x.is_negative());
    if g.is_zero() {
        return;
    }
    if lead_negative {
        g = -g;
    }
    if !g.is_one() {
        for x in v.values_mut() {
            *x = &*x / &g;
        }
    }
}

/// Clears denominators of a rational vector, producing a primitive integer vector.
pub fn integer_vector(v: &SparseVec<Rational>) -> SparseVec<BigInt> {
    let mut l = BigInt::one();
    for x in v.values() {
        l = l.lcm(x.denom());
    }
    let mut out: SparseVec<BigInt> = v
        .iter()
        .filter(|(_, x)| !x.is_zero())
        .map(|(&i, x)| (i, x.numer() * (&l / x.denom())))
        .collect();
    primitive(&mut out);
    out
}

/// Incremental fraction-free row echelon form over the integers.
#[derive(Debug, Default, Clone)]
pub struct IntegerEchelon {
    pivots: BTreeMap<usize, SparseVec<BigInt>>,
}

impl IntegerEchelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Inserts a vector; returns true when it increased the rank.
    pub fn insert(&mut self, mut v: SparseVec<BigInt>) -> bool {
        v.retain(|_, x| !x.is_zero());
        loop {
            let Some((&lead, lead_val)) = v.iter().next() else {
                return false;
            };
            let Some(p) = self.pivots.get(&lead) else {
                primitive(&mut v);
                self.pivots.insert(lead, v);
                return true;
            };
            // v <- p_lead * v - v_lead * p, which cancels the leading entry
            let a = p[&lead].clone();
            let b = lead_val.clone();
            let g = a.gcd(&b);
            let (a, b) = (&a / &g, &b / &g);
            let mut next: SparseVec<BigInt> = SparseVec::new();
            for (&i, x) in &v {
                next.insert(i, x * &a);
            }
            for (&i, y) in p {
                let e = next.entry(i).or_insert_with(BigInt::zero);
                *e -= y * &b;
            }
            next.retain(|_, x| !x.is_zero());
            primitive(&mut next);
            v = next;
        }
    }
}

/// Rank of the matrix whose columns are given, by fraction-free elimination.
pub fn rank(columns: &[SparseVec<Rational>]) -> usize {
    let mut ech = IntegerEchelon::new();
    for c in columns {
        ech.insert(integer_vector(c));
    }
    ech.rank()
}

/// Rational echelon form whose rows carry a tag vector recording the
/// combination of inserted vectors they came from.
#[derive(Debug, Default, Clone)]
pub struct Echelon {
    rows: BTreeMap<usize, (SparseVec<Rational>, SparseVec<Rational>)>,
}

fn axpy(target: &mut SparseVec<Rational>, a: &Rational, x: &SparseVec<Rational>) {
    for (&i, v) in x {
        let e = target.entry(i).or_insert_with(Rational::zero);
        *e += a * v;
        if e.is_zero() {
            target.remove(&i);
        }
    }
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the rows. Returns the residual and
    /// `tag - Σ c_i * tag(row_i)`, where `v = residual + Σ c_i * row_i`.
    pub fn reduce(
        &self,
        mut v: SparseVec<Rational>,
        mut tag: SparseVec<Rational>,
    ) -> (SparseVec<Rational>, SparseVec<Rational>) {
        v.retain(|_, x| !x.is_zero());
        let mut cursor = 0usize;
        loop {
            let next = v.range(cursor..).map(|(&i, _)| i).find(|i| self.rows.contains_key(i));
            let Some(i) = next else { break };
            let (row, row_tag) = &self.rows[&i];
            let coeff = v[&i].clone();
            axpy(&mut v, &-coeff.clone(), row);
            axpy(&mut tag, &-coeff, row_tag);
            cursor = i + 1;
        }
        (v, tag)
    }

    /// Inserts `v` carrying `tag`. Returns `None` if `v` was independent of the
    /// current rows, otherwise `Some(dependency)` where `dependency` is a tag
    /// combination whose inserted vectors sum to zero.
    pub fn insert(
        &mut self,
        v: SparseVec<Rational>,
        tag: SparseVec<Rational>,
    ) -> Option<SparseVec<Rational>> {
        let (mut r, mut t) = self.reduce(v, tag);
        let Some((&lead, lead_val)) = r.iter().next() else {
            return Some(t);
        };
        let inv = lead_val.recip();
        for x in r.values_mut() {
            *x *= &inv;
        }
        for x in t.values_mut() {
            *x *= &inv;
        }
        self.rows.insert(lead, (r, t));
        None
    }
}

/// Rank over Q through the rational echelon form; used to cross-check [`rank`].
pub fn rank_rational(columns: &[SparseVec<Rational>]) -> usize {
    let mut e = Echelon::new();
    for c in columns {
        e.insert(c.clone(), SparseVec::new());
    }
    e.rank()
}

/// A basis of the null space of the matrix with the given columns, expressed
/// as coefficient vectors over the column indices.
pub fn kernel_basis(columns: &[SparseVec<Rational>]) -> Vec<SparseVec<Rational>> {
    let mut e = Echelon::new();
    let mut out = Vec::new();
    for (j, c) in columns.iter().enumerate() {
        let mut tag = SparseVec::new();
        tag.insert(j, Rational::one());
        if let Some(dep) = e.insert(c.clone(), tag) {
            out.push(dep);
        }
    }
    out
}

/// Dense rational matrix, used for small reported matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Rational>>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            entries: vec![vec![Rational::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i][i] = Rational::one();
        }
        m
    }

    pub fn columns(&self) -> Vec<SparseVec<Rational>> {
        (0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .filter(|&i| !self.entries[i][j].is_zero())
                    .map(|i| (i, self.entries[i][j].clone()))
                    .collect()
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        rank(&self.columns())
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.entries[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let p = &self.entries[i][k] * &other.entries[k][j];
                    out.entries[i][j] += p;
                }
            }
        }
        out
    }
}
