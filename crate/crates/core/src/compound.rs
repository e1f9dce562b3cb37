//! Lexicographic index tuples, minors and the integer-order compounds.
//!
//! Index tuples use 1-based indices on the public surface. Rows and columns of
//! a compound matrix are ordered by the strict lexicographic order of
//! increasing tuples, so row `ℓ` of `A^(k)` corresponds to the `ℓ`-th tuple of
//! [`lex_tuples`]`(n, k)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, C64, ZERO};

/// Strictly increasing tuple of 1-based indices drawn from `{1, ..., n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LexTuple {
    indices: Vec<usize>,
    n: usize,
}

impl LexTuple {
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::arg("empty index tuple"));
        }
        if indices.iter().any(|&i| i == 0 || i > n) {
            return Err(Error::arg(format!("tuple {indices:?} has an index outside 1..={n}")));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg(format!("tuple {indices:?} is not strictly increasing")));
        }
        Ok(Self { indices, n })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub(crate) fn zero_based(&self) -> Vec<usize> {
        self.indices.iter().map(|i| i - 1).collect()
    }
}

impl fmt::Display for LexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (p, i) in self.indices.iter().enumerate() {
            if p > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Order `k` of a compound of an `n`-dimensional matrix, `1 <= k <= n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KSelector {
    k: usize,
    n: usize,
}

impl KSelector {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::arg(format!("compound order {k} outside 1..={n}")));
        }
        Ok(Self { k, n })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension `binom(n, k)` of the compound.
    pub fn compound_dim(&self) -> usize {
        binomial(self.n, self.k)
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Zero-based k-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, k));
    if k == 0 || k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // rightmost position that can still advance
        let Some(pos) = (0..k).rev().find(|&p| cur[p] < n - k + p) else {
            break;
        };
        cur[pos] += 1;
        for q in pos + 1..k {
            cur[q] = cur[q - 1] + 1;
        }
    }
    out
}

/// The sequence `Q^{k,n}` of k-tuples from `{1..n}` in lexicographic order.
pub fn lex_tuples(n: usize, k: usize) -> Result<Vec<LexTuple>> {
    KSelector::new(k, n)?;
    Ok(combinations(n, k)
        .into_iter()
        .map(|c| LexTuple { indices: c.into_iter().map(|i| i + 1).collect(), n })
        .collect())
}

/// Determinant of the submatrix of `a` selected by `rows` and `cols`.
pub fn minor(a: &Matrix, rows: &LexTuple, cols: &LexTuple) -> Result<C64> {
    if rows.len() != cols.len() {
        return Err(Error::arg(format!(
            "row tuple has {} indices, column tuple {}",
            rows.len(),
            cols.len()
        )));
    }
    let r = rows.zero_based();
    let c = cols.zero_based();
    if r.iter().any(|&i| i >= a.rows()) || c.iter().any(|&j| j >= a.cols()) {
        return Err(Error::arg(format!(
            "tuples {rows} / {cols} exceed a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    Ok(minor_unchecked(a, &r, &c))
}

pub(crate) fn minor_unchecked(a: &Matrix, rows: &[usize], cols: &[usize]) -> C64 {
    match rows.len() {
        1 => a[(rows[0], cols[0])],
        2 => {
            a[(rows[0], cols[0])] * a[(rows[1], cols[1])]
                - a[(rows[0], cols[1])] * a[(rows[1], cols[0])]
        }
        _ => {
            let sub = a.submatrix(rows, cols);
            sub.lu().map(|lu| lu.det()).unwrap_or(ZERO)
        }
    }
}

/// The k multiplicative compound `A^(k)`: all k×k minors in lexicographic
/// order, of size `binom(rows, k) × binom(cols, k)`.
pub fn mult_compound(a: &Matrix, k: usize) -> Result<Matrix> {
    let limit = a.rows().min(a.cols());
    if k == 0 || k > limit {
        return Err(Error::arg(format!(
            "compound order {k} outside 1..={limit} for a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    if k == 1 {
        return Ok(a.clone());
    }
    let row_sets = combinations(a.rows(), k);
    let col_sets = combinations(a.cols(), k);
    let mut out = Matrix::zeros(row_sets.len(), col_sets.len());
    for (l, r) in row_sets.iter().enumerate() {
        for (j, c) in col_sets.iter().enumerate() {
            out[(l, j)] = minor_unchecked(a, r, c);
        }
    }
    Ok(out)
}

/// Where two equal-length increasing tuples differ, if they differ in exactly
/// one position: returns `(l, m)` such that `rows[l]` is the index missing
/// from `cols` and `cols[m]` the index missing from `rows`.
fn single_substitution(rows: &[usize], cols: &[usize]) -> Option<(usize, usize)> {
    let mut only_row = None;
    let mut only_col = None;
    let (mut p, mut q) = (0, 0);
    while p < rows.len() || q < cols.len() {
        let take_row = q == cols.len() || (p < rows.len() && rows[p] < cols[q]);
        let take_col = p == rows.len() || (q < cols.len() && cols[q] < rows[p]);
        if take_row {
            if only_row.replace(p).is_some() {
                return None;
            }
            p += 1;
        } else if take_col {
            if only_col.replace(q).is_some() {
                return None;
            }
            q += 1;
        } else {
            p += 1;
            q += 1;
        }
    }
    Some((only_row?, only_col?))
}

/// The k additive compound `A^[k]`, assembled entrywise: index sums on the
/// diagonal, signed entries where the tuples differ by one substitution, zero
/// elsewhere.
pub fn add_compound(a: &Matrix, k: usize) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::arg(format!(
            "additive compound of non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    KSelector::new(k, n)?;
    if k == 1 {
        return Ok(a.clone());
    }
    let sets = combinations(n, k);
    let mut out = Matrix::zeros(sets.len(), sets.len());
    for (r, rs) in sets.iter().enumerate() {
        for (c, cs) in sets.iter().enumerate() {
            out[(r, c)] = if r == c {
                rs.iter().map(|&i| a[(i, i)]).sum()
            } else if let Some((l, m)) = single_substitution(rs, cs) {
                let sign = if (l + m) % 2 == 0 { 1.0 } else { -1.0 };
                a[(rs[l], cs[m])] * sign
            } else {
                ZERO
            };
        }
    }
    Ok(out)
}

/// Wedge product of `k` vectors in `C^n`: the k-compound of the `n × k`
/// matrix whose columns are the vectors, returned as a `binom(n, k)` vector.
pub fn wedge<V: AsRef<[C64]>>(vectors: &[V]) -> Result<Vec<C64>> {
    let k = vectors.len();
    let n = vectors.first().map(|v| v.as_ref().len()).ok_or_else(|| Error::arg("no vectors"))?;
    if let Some(bad) = vectors.iter().find(|v| v.as_ref().len() != n) {
        return Err(Error::arg(format!(
            "vector of length {} among vectors of length {n}",
            bad.as_ref().len()
        )));
    }
    if k > n {
        return Err(Error::arg(format!("{k} vectors in dimension {n}")));
    }
    let m = Matrix::from_fn(n, k, |i, j| vectors[j].as_ref()[i]);
    Ok(mult_compound(&m, k)?.as_slice().to_vec())
}
