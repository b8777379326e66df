//! Fixed-width bit masks for the search engines' hot loops.

pub trait Mask: Copy + Eq + Send + Sync + std::fmt::Debug + 'static {
    const BITS: usize;

    fn zero() -> Self;
    fn bit(i: usize) -> Self;
    fn test(self, i: usize) -> bool;
    fn or(self, other: Self) -> Self;
    fn andnot(self, other: Self) -> Self;
    /// Logical right shift; shifting by `BITS` or more yields zero.
    fn shr(self, k: usize) -> Self;
    fn count(self) -> u32;
    /// Bits `[0, i)`.
    fn below(i: usize) -> Self;

    fn ones(self) -> Vec<usize> {
        (0..Self::BITS).filter(|&i| self.test(i)).collect()
    }
}

macro_rules! prim_mask {
    ($t:ty) => {
        impl Mask for $t {
            const BITS: usize = <$t>::BITS as usize;

            #[inline]
            fn zero() -> Self {
                0
            }
            #[inline]
            fn bit(i: usize) -> Self {
                1 << i
            }
            #[inline]
            fn test(self, i: usize) -> bool {
                i < <Self as Mask>::BITS && (self >> i) & 1 == 1
            }
            #[inline]
            fn or(self, other: Self) -> Self {
                self | other
            }
            #[inline]
            fn andnot(self, other: Self) -> Self {
                self & !other
            }
            #[inline]
            fn shr(self, k: usize) -> Self {
                if k >= <Self as Mask>::BITS {
                    0
                } else {
                    self >> k
                }
            }
            #[inline]
            fn count(self) -> u32 {
                self.count_ones()
            }
            #[inline]
            fn below(i: usize) -> Self {
                if i >= <Self as Mask>::BITS {
                    !0
                } else {
                    (1 << i) - 1
                }
            }
        }
    };
}

prim_mask!(u64);
prim_mask!(u128);

/// 256-bit mask as four little-endian words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct W256(pub [u64; 4]);

impl Mask for W256 {
    const BITS: usize = 256;

    #[inline]
    fn zero() -> Self {
        W256([0; 4])
    }
    #[inline]
    fn bit(i: usize) -> Self {
        let mut w = [0; 4];
        w[i / 64] = 1 << (i % 64);
        W256(w)
    }
    #[inline]
    fn test(self, i: usize) -> bool {
        i < 256 && (self.0[i / 64] >> (i % 64)) & 1 == 1
    }
    #[inline]
    fn or(self, o: Self) -> Self {
        W256(std::array::from_fn(|i| self.0[i] | o.0[i]))
    }
    #[inline]
    fn andnot(self, o: Self) -> Self {
        W256(std::array::from_fn(|i| self.0[i] & !o.0[i]))
    }
    #[inline]
    fn shr(self, k: usize) -> Self {
        if k >= 256 {
            return Self::zero();
        }
        let (ws, bs) = (k / 64, k % 64);
        let mut out = [0u64; 4];
        for (i, slot) in out.iter_mut().enumerate() {
            let src = i + ws;
            if src < 4 {
                let mut v = self.0[src] >> bs;
                if bs != 0 && src + 1 < 4 {
                    v |= self.0[src + 1] << (64 - bs);
                }
                *slot = v;
            }
        }
        W256(out)
    }
    #[inline]
    fn count(self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    #[inline]
    fn below(i: usize) -> Self {
        W256(std::array::from_fn(|w| {
            let base = w * 64;
            if i >= base + 64 {
                !0
            } else if i <= base {
                0
            } else {
                (1u64 << (i - base)) - 1
            }
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_u128(x: u128) -> W256 {
        W256([x as u64, (x >> 64) as u64, 0, 0])
    }

    proptest! {
        #[test]
        fn wide_shift_agrees_with_u128(x in any::<u128>(), k in 0usize..140) {
            prop_assert_eq!(from_u128(x).shr(k), from_u128(x.shr(k)));
        }

        #[test]
        fn wide_below(i in 0usize..=256) {
            let m = W256::below(i);
            prop_assert_eq!(m.count() as usize, i);
            prop_assert!(i == 0 || m.test(i - 1));
            prop_assert!(!m.test(i));
        }
    }
}
