//! Dense bit-vector labelings over a dataset's point positions.
//!
//! Hypotheses are compared through the labelings they induce on a fixed
//! dataset, so most set algebra (distance, disagreement region, balls)
//! reduces to word-parallel xor/or/popcount on these vectors.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Labeling {
    words: Vec<u64>,
    n: usize,
}

impl Labeling {
    pub fn zeros(n: usize) -> Self {
        Labeling {
            words: vec![0; n.div_ceil(64)],
            n,
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut l = Labeling::zeros(n);
        for i in 0..n {
            if f(i) {
                l.set(i, true);
            }
        }
        l
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: bool) {
        debug_assert!(i < self.n);
        let w = &mut self.words[i / 64];
        if v {
            *w |= 1 << (i % 64);
        } else {
            *w &= !(1 << (i % 64));
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of positions where `self` and `other` disagree.
    pub fn xor_count(&self, other: &Labeling) -> usize {
        debug_assert_eq!(self.n, other.n);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// acc |= self ^ other, returning the popcount of acc afterwards.
    pub fn accumulate_xor(&self, other: &Labeling, acc: &mut [u64]) -> usize {
        debug_assert_eq!(self.n, other.n);
        let mut total = 0usize;
        for ((a, b), c) in self.words.iter().zip(&other.words).zip(acc.iter_mut()) {
            *c |= a ^ b;
            total += c.count_ones() as usize;
        }
        total
    }

    pub fn or_assign(&mut self, other: &Labeling) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Positions set to 1, ascending.
    pub fn ones(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.get(i)).collect()
    }
}

impl fmt::Debug for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_count_counts_disagreements() {
        let a = Labeling::from_fn(130, |i| i % 2 == 0);
        let b = Labeling::from_fn(130, |i| i % 3 == 0);
        let expect = (0..130).filter(|i| (i % 2 == 0) != (i % 3 == 0)).count();
        assert_eq!(a.xor_count(&b), expect);
        assert_eq!(a.xor_count(&a), 0);
    }

    #[test]
    fn accumulate_xor_unions_disagreements() {
        let a = Labeling::from_fn(70, |i| i < 10);
        let b = Labeling::from_fn(70, |i| i < 20);
        let c = Labeling::from_fn(70, |i| i >= 65);
        let mut acc = vec![0u64; 2];
        a.accumulate_xor(&b, &mut acc);
        let total = a.accumulate_xor(&c, &mut acc);
        // (10..20) from b, plus (0..10) and (65..70) from c
        assert_eq!(total, 10 + 10 + 5);
    }
}
