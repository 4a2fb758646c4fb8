//! Dense bit-vectors over the exhaustive input space, packed 64 vectors per word.

use crate::netlist::VectorId;

/// Fixed-length bit-vector. Bits past `len` in the last word are always zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

pub(crate) fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            words: vec![0; word_count(len)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVector {
            words: vec![!0; word_count(len)],
            len,
        };
        v.clear_padding();
        v
    }

    pub fn from_words(words: Vec<u64>, len: usize) -> Self {
        assert_eq!(words.len(), word_count(len));
        let mut v = BitVector { words, len };
        v.clear_padding();
        v
    }

    pub fn from_indices<I: IntoIterator<Item = VectorId>>(len: usize, indices: I) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.set(i as usize, true);
        }
        v
    }

    pub(crate) fn clear_padding(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn none(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersection_count(&self, other: &BitVector) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn intersects(&self, other: &BitVector) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &BitVector) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn or_assign(&mut self, other: &BitVector) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn and_not(&self, other: &BitVector) -> BitVector {
        BitVector {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
            len: self.len,
        }
    }

    pub fn complement(&self) -> BitVector {
        let mut v = BitVector {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        v.clear_padding();
        v
    }

    /// Indices of set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = VectorId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros();
                rest &= rest - 1;
                Some((wi * 64) as VectorId + b)
            })
        })
    }
}
