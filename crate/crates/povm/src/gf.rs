//! Arithmetic in GF(2^k) for k <= 4, used by the mutually unbiased basis
//! construction. GF(16) uses the irreducible polynomial x^4 + x + 1 so that
//! basis vectors are bit-reproducible across implementations.

/// Binary field of order 2^k with a fixed reduction polynomial.
#[derive(Debug, Clone, Copy)]
pub struct BinaryField {
    pub k: u32,
    /// Reduction polynomial including the leading bit, e.g. 0b10011.
    pub poly: u16,
}

impl BinaryField {
    pub fn new(order: usize) -> Option<BinaryField> {
        match order {
            2 => Some(BinaryField { k: 1, poly: 0b10 }),
            4 => Some(BinaryField { k: 2, poly: 0b111 }),
            8 => Some(BinaryField { k: 3, poly: 0b1011 }),
            16 => Some(BinaryField { k: 4, poly: 0b10011 }),
            _ => None,
        }
    }

    pub fn order(&self) -> usize {
        1 << self.k
    }

    /// Carry-less product reduced by the field polynomial.
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        let mut acc: u32 = 0;
        let aa = a as u32;
        for bit in 0..self.k {
            if (b >> bit) & 1 == 1 {
                acc ^= aa << bit;
            }
        }
        // Reduce.
        let deg = self.k;
        for bit in (deg..2 * deg).rev() {
            if (acc >> bit) & 1 == 1 {
                acc ^= (self.poly as u32) << (bit - deg);
            }
        }
        acc as u16
    }

    /// Absolute trace tr(x) = sum_j x^(2^j) in GF(2).
    pub fn trace(&self, x: u16) -> u16 {
        let mut acc = 0u16;
        let mut cur = x;
        for _ in 0..self.k {
            acc ^= cur;
            cur = self.mul(cur, cur);
        }
        // acc is an element equal to 0 or 1 after summing the orbit.
        acc & 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf16_basics() {
        let f = BinaryField::new(16).unwrap();
        // alpha^4 = alpha + 1 with alpha = 0b10 under x^4 + x + 1.
        let alpha = 0b10;
        let a2 = f.mul(alpha, alpha);
        let a4 = f.mul(a2, a2);
        assert_eq!(a4, 0b11);
        // Multiplicative order of alpha is 15 (primitive).
        let mut p = 1u16;
        let mut order = 0;
        loop {
            p = f.mul(p, alpha);
            order += 1;
            if p == 1 {
                break;
            }
        }
        assert_eq!(order, 15);
    }

    #[test]
    fn trace_is_additive_and_balanced() {
        for n in [2usize, 4, 8, 16] {
            let f = BinaryField::new(n).unwrap();
            let mut zeros = 0;
            for x in 0..n as u16 {
                for y in 0..n as u16 {
                    assert_eq!(f.trace(x ^ y), f.trace(x) ^ f.trace(y));
                }
                if f.trace(x) == 0 {
                    zeros += 1;
                }
            }
            assert_eq!(zeros, n / 2, "trace must be balanced on GF({n})");
        }
    }

    #[test]
    fn trace_bilinear_form_nondegenerate() {
        let f = BinaryField::new(16).unwrap();
        for a in 1..16u16 {
            // x -> tr(a x) must not vanish identically.
            let all_zero = (0..16u16).all(|x| f.trace(f.mul(a, x)) == 0);
            assert!(!all_zero, "tr(a x) degenerate for a = {a}");
        }
    }
}
