//! Word-parallel bit vectors with a fixed length.
//!
//! Bit `i` stands for the integer `i`. Shifts move every member up or down
//! by the same amount, which is what translates `A` into `A + x`.

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl std::fmt::Debug for Bits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.ones()).finish()
    }
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        i < self.len && (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        if i < self.len {
            self.words[i / WORD] &= !(1 << (i % WORD));
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> Ones<'_> {
        Ones {
            bits: self,
            word: 0,
            cur: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn first_one(&self) -> Option<usize> {
        self.ones().next()
    }

    pub fn last_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + (WORD - 1 - w.leading_zeros() as usize))
    }

    fn trim(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    /// `self |= other << shift`, dropping bits that land at or past `len`.
    pub fn or_shl(&mut self, other: &Bits, shift: usize) {
        let wshift = shift / WORD;
        let bshift = shift % WORD;
        for i in (wshift..self.words.len()).rev() {
            let src = i - wshift;
            let mut v = other.words.get(src).copied().unwrap_or(0) << bshift;
            if bshift != 0 && src > 0 {
                v |= other.words.get(src - 1).copied().unwrap_or(0) >> (WORD - bshift);
            }
            self.words[i] |= v;
        }
        self.trim();
    }

    /// `self |= other >> shift`; bits shifted below zero are dropped.
    pub fn or_shr(&mut self, other: &Bits, shift: usize) {
        let wshift = shift / WORD;
        let bshift = shift % WORD;
        for i in 0..self.words.len() {
            let src = i + wshift;
            let mut v = other.words.get(src).copied().unwrap_or(0) >> bshift;
            if bshift != 0 {
                v |= other.words.get(src + 1).copied().unwrap_or(0) << (WORD - bshift);
            }
            self.words[i] |= v;
        }
        self.trim();
    }

    pub fn or_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        self.trim();
    }

    pub fn and_assign(&mut self, other: &Bits) {
        for (i, a) in self.words.iter_mut().enumerate() {
            *a &= other.words.get(i).copied().unwrap_or(0);
        }
    }

    pub fn is_disjoint(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// True when every member of `self` is also in `other`.
    pub fn is_subset(&self, other: &Bits) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, a)| a & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    /// Cyclic rotation within `[0, len)`: member `x` moves to `(x + shift) mod len`.
    pub fn rotate_left(&self, shift: usize) -> Bits {
        let shift = shift % self.len.max(1);
        let mut out = Bits::new(self.len);
        out.or_shl(self, shift);
        if shift != 0 {
            out.or_shr(self, self.len - shift);
        }
        out
    }

    /// Copy into a bit vector of a different length, truncating if shorter.
    pub fn resized(&self, len: usize) -> Bits {
        let mut out = Bits::new(len);
        for (a, b) in out.words.iter_mut().zip(&self.words) {
            *a = *b;
        }
        out.trim();
        out
    }
}

pub struct Ones<'a> {
    bits: &'a Bits,
    word: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let tz = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.word * WORD + tz);
            }
            self.word += 1;
            if self.word >= self.bits.words.len() {
                return None;
            }
            self.cur = self.bits.words[self.word];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn from(len: usize, xs: &BTreeSet<usize>) -> Bits {
        let mut b = Bits::new(len);
        for &x in xs {
            b.set(x);
        }
        b
    }

    #[test]
    fn last_and_first() {
        let mut b = Bits::new(200);
        assert_eq!(b.first_one(), None);
        assert_eq!(b.last_one(), None);
        b.set(3);
        b.set(130);
        assert_eq!(b.first_one(), Some(3));
        assert_eq!(b.last_one(), Some(130));
    }

    #[test]
    fn rotation_wraps() {
        let mut b = Bits::new(31);
        b.set(30);
        b.set(0);
        let r = b.rotate_left(2);
        assert_eq!(r.ones().collect::<Vec<_>>(), vec![1, 2]);
    }

    proptest! {
        #[test]
        fn shifts_match_sets(
            xs in proptest::collection::btree_set(0usize..190, 0..40),
            shift in 0usize..200,
        ) {
            let len = 190;
            let b = from(len, &xs);
            let mut up = Bits::new(len);
            up.or_shl(&b, shift);
            let want: BTreeSet<usize> = xs.iter().map(|x| x + shift).filter(|&x| x < len).collect();
            prop_assert_eq!(up.ones().collect::<BTreeSet<_>>(), want);

            let mut down = Bits::new(len);
            down.or_shr(&b, shift);
            let want: BTreeSet<usize> = xs.iter().filter(|&&x| x >= shift).map(|x| x - shift).collect();
            prop_assert_eq!(down.ones().collect::<BTreeSet<_>>(), want);
        }

        #[test]
        fn rotation_matches_modular_shift(
            xs in proptest::collection::btree_set(0usize..97, 0..30),
            shift in 0usize..97,
        ) {
            let b = from(97, &xs);
            let want: BTreeSet<usize> = xs.iter().map(|x| (x + shift) % 97).collect();
            prop_assert_eq!(b.rotate_left(shift).ones().collect::<BTreeSet<_>>(), want);
        }
    }
}
