//! Prime fields F_p with p ≡ 1 (mod N), used as a fast rank backend.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_prime::nt_funcs::{factorize64, is_prime64};
use num_traits::{ToPrimitive, Zero};

use crate::linalg::FieldOps;
use crate::scalar::{CycNumber, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fp {
    v: u64,
    p: u64,
}

impl Fp {
    pub fn new(v: u64, p: u64) -> Fp {
        Fp { v: v % p, p }
    }

    pub fn value(&self) -> u64 {
        self.v
    }

    pub fn pow(&self, mut e: u64) -> Fp {
        let mut acc = Fp::new(1, self.p);
        let mut b = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        acc
    }
}

impl FieldOps for Fp {
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn zero_like(&self) -> Self {
        Fp { v: 0, p: self.p }
    }
    fn one_like(&self) -> Self {
        Fp { v: 1, p: self.p }
    }
    fn add(&self, o: &Self) -> Self {
        let s = self.v + o.v;
        Fp { v: if s >= self.p { s - self.p } else { s }, p: self.p }
    }
    fn sub(&self, o: &Self) -> Self {
        Fp { v: if self.v >= o.v { self.v - o.v } else { self.v + self.p - o.v }, p: self.p }
    }
    fn mul(&self, o: &Self) -> Self {
        Fp { v: self.v * o.v % self.p, p: self.p }
    }
    fn neg(&self) -> Self {
        Fp { v: if self.v == 0 { 0 } else { self.p - self.v }, p: self.p }
    }
    fn inv(&self) -> Self {
        assert!(self.v != 0, "inverse of zero");
        self.pow(self.p - 2)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.v, self.p)
    }
}

/// F_p together with a fixed primitive N-th root of unity w, the image of ζ_N.
#[derive(Debug, Clone)]
pub struct ModField {
    pub p: u64,
    pub n: u32,
    w: Fp,
}

const PRIME_CEILING: u64 = 1 << 31;

impl ModField {
    /// The `index`-th prime below 2^31 with p ≡ 1 (mod n), counting downward.
    pub fn new(n: u32, index: usize) -> ModField {
        let n64 = n.max(1) as u64;
        let mut k = (PRIME_CEILING - 1) / n64;
        let mut seen = 0;
        let p = loop {
            let cand = k * n64 + 1;
            if is_prime64(cand) {
                if seen == index {
                    break cand;
                }
                seen += 1;
            }
            k -= 1;
        };
        ModField { p, n: n.max(1), w: primitive_root_of_unity(p, n64) }
    }

    pub fn rat(&self, r: &Rat) -> Option<Fp> {
        let den = residue(r.denom(), self.p);
        if den == 0 {
            return None;
        }
        Some(Fp::new(residue(r.numer(), self.p), self.p).mul(&Fp::new(den, self.p).inv()))
    }

    /// Image of a cyclotomic number whose conductor divides n. `None` when a
    /// denominator vanishes mod p.
    pub fn cyc(&self, c: &CycNumber) -> Option<Fp> {
        let m = c.conductor().max(1);
        assert!(self.n.is_multiple_of(m), "conductor {m} does not divide {}", self.n);
        let wm = self.w.pow((self.n / m) as u64);
        let mut acc = Fp::new(0, self.p);
        let mut pw = Fp::new(1, self.p);
        for k in c.coeffs() {
            if !k.is_zero() {
                acc = acc.add(&self.rat(k)?.mul(&pw));
            }
            pw = pw.mul(&wm);
        }
        Some(acc)
    }
}

fn residue(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

fn primitive_root_of_unity(p: u64, n: u64) -> Fp {
    let primes: Vec<u64> = factorize64(n).into_keys().collect();
    (2..p)
        .map(|g| Fp::new(g, p).pow((p - 1) / n))
        .find(|w| primes.iter().all(|&l| w.pow(n / l).v != 1))
        .expect("p ≡ 1 mod n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_has_exact_order() {
        let f = ModField::new(36, 0);
        assert_eq!(f.p % 36, 1);
        assert!(f.p < PRIME_CEILING);
        assert_eq!(f.w.pow(36).value(), 1);
        assert_ne!(f.w.pow(18).value(), 1);
        assert_ne!(f.w.pow(12).value(), 1);
    }

    #[test]
    fn cyclotomic_image_is_a_homomorphism() {
        let f = ModField::new(9, 1);
        let a = CycNumber::root(9, 2).add(&CycNumber::from_int(9, 3));
        let b = CycNumber::root(9, 7).sub(&CycNumber::from_rat(9, Rat::new(1.into(), 4.into())));
        let (fa, fb) = (f.cyc(&a).unwrap(), f.cyc(&b).unwrap());
        assert_eq!(f.cyc(&a.mul(&b)).unwrap(), fa.mul(&fb));
        assert_eq!(f.cyc(&a.inv().unwrap()).unwrap(), fa.inv());
        // ζ₃ embedded in Q(ζ₉) maps consistently
        assert_eq!(f.cyc(&CycNumber::root(3, 1)).unwrap(), f.cyc(&CycNumber::root(9, 3)).unwrap());
    }
}
