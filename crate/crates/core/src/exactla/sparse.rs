//! Sorted sparse vectors.

use super::scalar::Scalar;

/// Sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec { entries: vec![(i, Scalar::one())] }
    }

    /// Accepts unsorted pairs with repeats; repeats are summed.
    pub fn from_pairs(mut pairs: Vec<(usize, Scalar)>) -> Self {
        pairs.sort_by_key(|p| p.0);
        let mut entries: Vec<(usize, Scalar)> = Vec::with_capacity(pairs.len());
        for (i, v) in pairs {
            match entries.last_mut() {
                Some((j, w)) if *j == i => *w += &v,
                _ => entries.push((i, v)),
            }
        }
        entries.retain(|(_, v)| !v.is_zero());
        SparseVec { entries }
    }

    /// Pairs must already be strictly increasing in index.
    pub fn from_sorted_pairs(mut pairs: Vec<(usize, Scalar)>) -> Self {
        debug_assert!(pairs.windows(2).all(|w| w[0].0 < w[1].0));
        pairs.retain(|(_, v)| !v.is_zero());
        SparseVec { entries: pairs }
    }

    pub fn from_dense(v: &[Scalar]) -> Self {
        SparseVec {
            entries: v.iter().enumerate().filter(|(_, s)| !s.is_zero()).map(|(i, s)| (i, s.clone())).collect(),
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); n];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn get(&self, i: usize) -> Scalar {
        match self.entries.binary_search_by_key(&i, |p| p.0) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, (usize, Scalar)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|p| p.0)
    }

    pub fn first(&self) -> Option<&(usize, Scalar)> {
        self.entries.first()
    }

    /// Append an entry whose index exceeds every stored index.
    pub fn push_back(&mut self, i: usize, v: Scalar) {
        debug_assert!(self.max_index().is_none_or(|m| m < i));
        if !v.is_zero() {
            self.entries.push((i, v));
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec { entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect() }
    }

    pub fn negated(&self) -> Self {
        SparseVec { entries: self.entries.iter().map(|(i, v)| (*i, -v)).collect() }
    }

    /// `self += c · other`
    pub fn add_scaled(&mut self, other: &SparseVec, c: &Scalar) {
        if c.is_zero() || other.is_empty() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, _)), Some((j, _))) if i < j => out.push(a.next().unwrap().clone()),
                (Some((i, _)), Some((j, _))) if i > j => {
                    let (j, w) = b.next().unwrap();
                    out.push((*j, w * c));
                }
                (Some(_), Some(_)) => {
                    let (i, v) = a.next().unwrap();
                    let (_, w) = b.next().unwrap();
                    let s = v + &(w * c);
                    if !s.is_zero() {
                        out.push((*i, s));
                    }
                }
                (Some(_), None) => out.push(a.next().unwrap().clone()),
                (None, Some(_)) => {
                    let (j, w) = b.next().unwrap();
                    out.push((*j, w * c));
                }
                (None, None) => break,
            }
        }
        self.entries = out;
    }

    pub fn dot_dense(&self, v: &[Scalar]) -> Scalar {
        let mut acc = Scalar::zero();
        for (i, a) in &self.entries {
            acc += &(a * &v[*i]);
        }
        acc
    }

    /// Re-index entries through `f`, which must be strictly increasing.
    pub fn map_indices(&self, f: impl Fn(usize) -> usize) -> Self {
        SparseVec { entries: self.entries.iter().map(|(i, v)| (f(*i), v.clone())).collect() }
    }

    pub fn into_pairs(self) -> Vec<(usize, Scalar)> {
        self.entries
    }

    /// Convert all entries into the given field.
    pub fn in_field(&self, modulus: Option<u64>) -> Self {
        SparseVec::from_sorted_pairs(self.entries.iter().map(|(i, v)| (*i, v.in_field(modulus))).collect())
    }
}

/// Dense accumulator that can be emptied into a [`SparseVec`].
pub struct Accumulator {
    values: Vec<Scalar>,
    touched: Vec<usize>,
    mark: Vec<bool>,
}

impl Accumulator {
    pub fn new(n: usize) -> Self {
        Accumulator { values: vec![Scalar::zero(); n], touched: Vec::new(), mark: vec![false; n] }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add(&mut self, i: usize, v: &Scalar) {
        if !self.mark[i] {
            self.mark[i] = true;
            self.touched.push(i);
        }
        self.values[i] += v;
    }

    pub fn add_scaled(&mut self, v: &SparseVec, c: &Scalar) {
        for (i, a) in v.iter() {
            self.add(*i, &(a * c));
        }
    }

    pub fn get(&self, i: usize) -> &Scalar {
        &self.values[i]
    }

    pub fn drain(&mut self) -> SparseVec {
        self.touched.sort_unstable();
        let mut pairs = Vec::with_capacity(self.touched.len());
        for &i in &self.touched {
            self.mark[i] = false;
            let v = std::mem::take(&mut self.values[i]);
            if !v.is_zero() {
                pairs.push((i, v));
            }
        }
        self.touched.clear();
        SparseVec::from_sorted_pairs(pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_pairs_merges_and_drops_zeros() {
        let v = SparseVec::from_pairs(vec![(3, Scalar::one()), (1, Scalar::from_i64(2)), (3, -Scalar::one())]);
        assert_eq!(v.into_pairs(), vec![(1, Scalar::from_i64(2))]);
    }

    #[test]
    fn add_scaled_cancels() {
        let mut a = SparseVec::from_pairs(vec![(0, Scalar::one()), (2, Scalar::from_i64(3))]);
        let b = SparseVec::from_pairs(vec![(2, Scalar::one()), (5, Scalar::one())]);
        a.add_scaled(&b, &Scalar::from_i64(-3));
        assert_eq!(a.to_dense(6), [1, 0, 0, 0, 0, -3].map(Scalar::from_i64).to_vec());
    }

    #[test]
    fn accumulator_roundtrip() {
        let mut acc = Accumulator::new(4);
        acc.add(2, &Scalar::one());
        acc.add(0, &Scalar::from_i64(5));
        acc.add(2, &-Scalar::one());
        assert_eq!(acc.drain().into_pairs(), vec![(0, Scalar::from_i64(5))]);
        assert!(acc.drain().is_empty());
    }
}
