//! Increasing multi-indices, their lexicographic ranking, and the sign
//! bookkeeping behind the wedge product.
//!
//! Indices are 1-based as in the usual notation `e^{i_1} ∧ … ∧ e^{i_k}`.

use crate::error::{Error, Result};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// A strictly increasing list of indices in `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    n: usize,
    indices: Vec<usize>,
}

impl MultiIndex {
    pub fn new(n: usize, indices: Vec<usize>) -> Result<Self> {
        let ok = indices.len() <= n
            && indices.iter().all(|&i| (1..=n).contains(&i))
            && indices.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::InvalidIndex { indices, n });
        }
        Ok(Self { n, indices })
    }

    /// Sort `indices`, returning the multi-index and whether the sorting
    /// permutation is odd. Repeated indices give `Ok(None)`.
    pub fn from_unsorted(n: usize, indices: &[usize]) -> Result<Option<(Self, bool)>> {
        let mut v = indices.to_vec();
        let odd = inversion_count(&v) % 2 == 1;
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Ok(None);
        }
        Ok(Some((Self::new(n, v)?, odd)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Position of this multi-index in the lexicographic basis of `Λ^k(ℝⁿ)`.
    pub fn rank(&self) -> usize {
        lex_rank(self.n, &self.indices)
    }

    /// The complementary multi-index `{1..n} \ I`.
    pub fn complement(&self) -> Self {
        let indices = (1..=self.n).filter(|i| !self.indices.contains(i)).collect();
        Self { n: self.n, indices }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

fn inversion_count(v: &[usize]) -> usize {
    let mut count = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                count += 1;
            }
        }
    }
    count
}

/// Lexicographic rank of an increasing index list among `k`-subsets of `1..=n`.
pub fn lex_rank(n: usize, indices: &[usize]) -> usize {
    let k = indices.len();
    let mut rank = 0;
    let mut prev = 0;
    for (j, &i) in indices.iter().enumerate() {
        for v in prev + 1..i {
            rank += binomial(n - v, k - j - 1);
        }
        prev = i;
    }
    rank
}

/// All increasing multi-indices of length `k` in lexicographic order.
pub fn basis(n: usize, k: usize) -> Arc<Vec<Vec<usize>>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Vec<Vec<usize>>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(b) = cache.lock().unwrap().get(&(n, k)) {
        return b.clone();
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            if n - i + 1 < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    if k <= n {
        rec(1, n, k, &mut cur, &mut out);
    }
    let b = Arc::new(out);
    cache.lock().unwrap().insert((n, k), b.clone());
    b
}

/// Merge two increasing index lists. Returns `None` when they share an index,
/// otherwise the merged list and whether the shuffle permutation is odd.
///
/// The parity is obtained by counting, during the merge, how many entries of
/// `a` each entry of `b` has to jump over.
pub fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut transpositions = 0usize;
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                transpositions += a.len() - i;
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((out, transpositions % 2 == 1))
}

/// Precomputed structure constants of `Λ^p × Λ^q → Λ^{p+q}`.
#[derive(Debug)]
pub struct WedgeTable {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    /// `(left index, right index, output index, negative sign)`.
    pub entries: Vec<(usize, usize, usize, bool)>,
}

impl WedgeTable {
    fn build(n: usize, p: usize, q: usize) -> Self {
        let left = basis(n, p);
        let right = basis(n, q);
        let mut entries = Vec::new();
        for (a, ia) in left.iter().enumerate() {
            for (b, ib) in right.iter().enumerate() {
                if let Some((merged, odd)) = merge_sign(ia, ib) {
                    entries.push((a, b, lex_rank(n, &merged), odd));
                }
            }
        }
        Self { n, p, q, entries }
    }

    /// `out += x ∧ y` on raw `f64` coefficient slices.
    pub fn accumulate(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        for &(a, b, o, neg) in &self.entries {
            let v = x[a] * y[b];
            if neg {
                out[o] -= v;
            } else {
                out[o] += v;
            }
        }
    }
}

/// Cached wedge table for `(n, p, q)`; requires `p + q <= n`.
pub fn wedge_table(n: usize, p: usize, q: usize) -> Arc<WedgeTable> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize, usize), Arc<WedgeTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(n, p, q)) {
        return t.clone();
    }
    let t = Arc::new(WedgeTable::build(n, p, q));
    cache.lock().unwrap().insert((n, p, q), t.clone());
    t
}
