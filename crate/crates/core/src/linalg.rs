//! Fraction-free exact row reduction over `Z[i]`.
//!
//! Vectors arrive with Gaussian-rational entries, are scaled to Gaussian
//! integers, and are reduced against an echelon basis by cross-multiplication
//! followed by removal of the integer content. No division by a pivot ever
//! happens, so entries stay integral and the result does not depend on hash
//! order.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{GaussInt, GaussianRational};

type SparseRow = BTreeMap<usize, GaussInt>;

/// Incrementally maintained echelon basis of a subspace of `Q(i)^N`.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: BTreeMap<usize, SparseRow>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v`; returns `true` if it was independent of the current basis.
    pub fn insert(&mut self, v: &BTreeMap<usize, GaussianRational>) -> bool {
        let reduced = self.reduce(to_integral(v));
        match reduced.keys().next() {
            Some(&pivot) => {
                self.rows.insert(pivot, reduced);
                true
            }
            None => false,
        }
    }

    /// Whether `v` lies in the span of the basis.
    pub fn contains(&self, v: &BTreeMap<usize, GaussianRational>) -> bool {
        self.reduce(to_integral(v)).is_empty()
    }

    fn reduce(&self, mut v: SparseRow) -> SparseRow {
        for (pivot, row) in &self.rows {
            if v.is_empty() {
                break;
            }
            let Some(coef) = v.get(pivot).cloned() else { continue };
            let lead = &row[pivot];
            // v <- lead·v - coef·row
            let mut out = SparseRow::new();
            for (&k, x) in &v {
                let y = lead.mul(x);
                if !y.is_zero() {
                    out.insert(k, y);
                }
            }
            for (&k, r) in row {
                let t = coef.mul(r);
                let e = out.entry(k).or_default();
                *e = e.sub(&t);
                if e.is_zero() {
                    out.remove(&k);
                }
            }
            v = primitive(out);
        }
        v
    }
}

fn to_integral(v: &BTreeMap<usize, GaussianRational>) -> SparseRow {
    let mut scale = BigInt::one();
    for x in v.values() {
        scale = scale.lcm(&x.denom_lcm());
    }
    let row: SparseRow = v
        .iter()
        .filter(|(_, x)| !num_traits::Zero::is_zero(*x))
        .map(|(&k, x)| (k, x.to_gauss_int(&scale)))
        .collect();
    primitive(row)
}

fn primitive(row: SparseRow) -> SparseRow {
    let mut g = BigInt::zero();
    for x in row.values() {
        g = g.gcd(&x.int_content());
        if g.is_one() {
            return row;
        }
    }
    if g.is_zero() || g.abs().is_one() {
        return row;
    }
    row.into_iter().map(|(k, x)| (k, x.div_int(&g))).collect()
}

/// Assigns dense column indices to arbitrary ordered coordinate keys.
/// Columns follow the key order, independent of insertion order.
pub fn index_columns<K: Ord + Clone>(vectors: &[BTreeMap<K, GaussianRational>]) -> Vec<BTreeMap<usize, GaussianRational>> {
    let mut keys: BTreeMap<K, usize> = BTreeMap::new();
    for v in vectors {
        for k in v.keys() {
            keys.entry(k.clone()).or_insert(0);
        }
    }
    for (i, slot) in keys.values_mut().enumerate() {
        *slot = i;
    }
    vectors
        .iter()
        .map(|v| v.iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (keys[k], c.clone())).collect())
        .collect()
}

/// Rank of a family of keyed vectors.
pub fn rank<K: Ord + Clone>(vectors: &[BTreeMap<K, GaussianRational>]) -> usize {
    let mut basis = EchelonBasis::new();
    for v in index_columns(vectors) {
        basis.insert(&v);
    }
    basis.rank()
}

/// Indices of a maximal independent subfamily, scanning in order.
pub fn independent_subset<K: Ord + Clone>(vectors: &[BTreeMap<K, GaussianRational>]) -> Vec<usize> {
    let mut basis = EchelonBasis::new();
    index_columns(vectors)
        .iter()
        .enumerate()
        .filter_map(|(i, v)| basis.insert(v).then_some(i))
        .collect()
}

/// Whether `target` lies in the span of `family`.
pub fn in_span<K: Ord + Clone>(family: &[BTreeMap<K, GaussianRational>], target: &BTreeMap<K, GaussianRational>) -> bool {
    let mut all = family.to_vec();
    all.push(target.clone());
    let cols = index_columns(&all);
    let (last, rest) = cols.split_last().unwrap();
    let mut basis = EchelonBasis::new();
    for v in rest {
        basis.insert(v);
    }
    basis.contains(last)
}
