//! Elements of the cyclotomic field Q(ζ_N) in the reduced power basis.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

/// Precomputed reduction data for one conductor.
#[derive(Debug)]
pub struct CycField {
    n: u32,
    phi: usize,
    /// `pow[k]` holds x^k mod Φ_n for 0 <= k < max(n, 2φ - 1).
    pow: Vec<Vec<i64>>,
    /// Φ_n coefficients, lowest degree first.
    minpoly: Vec<i64>,
}

impl CycField {
    pub fn get(n: u32) -> &'static CycField {
        assert!(n > 0, "conductor must be positive");
        static REG: OnceLock<Mutex<HashMap<u32, &'static CycField>>> = OnceLock::new();
        let reg = REG.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = reg.lock().unwrap();
        map.entry(n).or_insert_with(|| Box::leak(Box::new(CycField::build(n))))
    }

    fn build(n: u32) -> CycField {
        let minpoly = cyclotomic_poly(n);
        let phi = minpoly.len() - 1;
        let count = (n as usize).max(2 * phi);
        let mut pow = Vec::with_capacity(count);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..count {
            pow.push(cur.clone());
            // multiply by x and reduce with the monic minimal polynomial
            let top = cur[phi - 1];
            let mut next = vec![0i64; phi];
            for j in (1..phi).rev() {
                next[j] = cur[j - 1];
            }
            if top != 0 {
                for j in 0..phi {
                    next[j] = next[j]
                        .checked_sub(top.checked_mul(minpoly[j]).expect("cyclotomic overflow"))
                        .expect("cyclotomic overflow");
                }
            }
            cur = next;
        }
        CycField { n, phi, pow, minpoly }
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.phi
    }
}

/// Φ_n with integer coefficients, lowest degree first.
pub fn cyclotomic_poly(n: u32) -> Vec<i64> {
    fn rec(n: u32, memo: &mut HashMap<u32, Vec<i64>>) -> Vec<i64> {
        if let Some(p) = memo.get(&n) {
            return p.clone();
        }
        let mut num = vec![0i64; n as usize + 1];
        num[0] = -1;
        num[n as usize] = 1;
        for d in 1..n {
            if n.is_multiple_of(d) {
                let div = rec(d, memo);
                num = int_poly_div(&num, &div);
            }
        }
        memo.insert(n, num.clone());
        num
    }
    let mut memo = HashMap::new();
    rec(n, &mut memo)
}

fn int_poly_div(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let da = a.len() - 1;
    let mut q = vec![0i64; da - db + 1];
    for k in (0..=da - db).rev() {
        let c = r[k + db];
        q[k] = c;
        if c != 0 {
            for j in 0..=db {
                r[k + j] -= c * b[j];
            }
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

/// An element of Q(ζ_N).
#[derive(Clone)]
pub struct CycNumber {
    field: &'static CycField,
    coeffs: Vec<Rat>,
}

impl CycNumber {
    pub fn zero(n: u32) -> Self {
        let field = CycField::get(n);
        CycNumber { field, coeffs: vec![Rat::zero(); field.phi] }
    }

    pub fn one(n: u32) -> Self {
        Self::from_rat(n, Rat::one())
    }

    pub fn from_rat(n: u32, r: Rat) -> Self {
        let mut z = Self::zero(n);
        z.coeffs[0] = r;
        z
    }

    pub fn from_int(n: u32, v: i64) -> Self {
        Self::from_rat(n, Rat::from_integer(BigInt::from(v)))
    }

    /// ζ_N^k.
    pub fn root(n: u32, k: i64) -> Self {
        let field = CycField::get(n);
        let e = k.rem_euclid(n as i64) as usize;
        let coeffs = field.pow[e].iter().map(|&c| Rat::from_integer(BigInt::from(c))).collect();
        CycNumber { field, coeffs }
    }

    pub fn from_coeffs(n: u32, coeffs: Vec<Rat>) -> Self {
        let field = CycField::get(n);
        if coeffs.len() == field.phi {
            return CycNumber { field, coeffs };
        }
        let mut acc = vec![Rat::zero(); field.phi];
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &field.pow[k % field.n as usize];
            for j in 0..field.phi {
                if row[j] != 0 {
                    acc[j] += c * Rat::from_integer(BigInt::from(row[j]));
                }
            }
        }
        CycNumber { field, coeffs: acc }
    }

    pub fn conductor(&self) -> u32 {
        self.field.n
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Returns the rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<&Rat> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Image in Q(ζ_M) for a multiple M of the conductor.
    pub fn embed(&self, m: u32) -> CycNumber {
        let n = self.field.n;
        if m == n {
            return self.clone();
        }
        assert!(m.is_multiple_of(n), "cannot embed conductor {n} into {m}");
        let target = CycField::get(m);
        let step = (m / n) as usize;
        let mut acc = vec![Rat::zero(); target.phi];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let row = &target.pow[(k * step) % m as usize];
            for j in 0..target.phi {
                if row[j] != 0 {
                    acc[j] += c * Rat::from_integer(BigInt::from(row[j]));
                }
            }
        }
        CycNumber { field: target, coeffs: acc }
    }

    /// Galois image under ζ ↦ ζ^a, gcd(a, N) = 1.
    pub fn galois(&self, a: i64) -> CycNumber {
        let n = self.field.n as i64;
        assert!(a.gcd(&n) == 1, "galois exponent must be a unit");
        let mut acc = vec![Rat::zero(); self.field.phi];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = ((k as i64) * a).rem_euclid(n) as usize;
            let row = &self.field.pow[e];
            for j in 0..self.field.phi {
                if row[j] != 0 {
                    acc[j] += c * Rat::from_integer(BigInt::from(row[j]));
                }
            }
        }
        CycNumber { field: self.field, coeffs: acc }
    }

    fn align(&self, other: &CycNumber) -> Option<(CycNumber, CycNumber)> {
        if std::ptr::eq(self.field, other.field) {
            return None;
        }
        let m = self.field.n.lcm(&other.field.n);
        Some((self.embed(m), other.embed(m)))
    }

    pub fn add(&self, other: &CycNumber) -> CycNumber {
        if let Some((a, b)) = self.align(other) {
            return a.add(&b);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        CycNumber { field: self.field, coeffs }
    }

    pub fn sub(&self, other: &CycNumber) -> CycNumber {
        if let Some((a, b)) = self.align(other) {
            return a.sub(&b);
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        CycNumber { field: self.field, coeffs }
    }

    pub fn neg(&self) -> CycNumber {
        CycNumber { field: self.field, coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, r: &Rat) -> CycNumber {
        CycNumber { field: self.field, coeffs: self.coeffs.iter().map(|a| a * r).collect() }
    }

    pub fn mul(&self, other: &CycNumber) -> CycNumber {
        if let Some((a, b)) = self.align(other) {
            return a.mul(&b);
        }
        let phi = self.field.phi;
        if phi == 1 {
            return CycNumber { field: self.field, coeffs: vec![&self.coeffs[0] * &other.coeffs[0]] };
        }
        let mut prod = vec![Rat::zero(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let mut out: Vec<Rat> = prod[..phi].to_vec();
        for (k, c) in prod.iter().enumerate().skip(phi) {
            if c.is_zero() {
                continue;
            }
            let row = &self.field.pow[k];
            for j in 0..phi {
                if row[j] != 0 {
                    out[j] += c * Rat::from_integer(BigInt::from(row[j]));
                }
            }
        }
        CycNumber { field: self.field, coeffs: out }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against Φ_N.
    pub fn inv(&self) -> Option<CycNumber> {
        if self.is_zero() {
            return None;
        }
        if self.field.phi == 1 {
            return Some(CycNumber { field: self.field, coeffs: vec![self.coeffs[0].recip()] });
        }
        let modulus: Vec<Rat> =
            self.field.minpoly.iter().map(|&c| Rat::from_integer(BigInt::from(c))).collect();
        let a = trim(self.coeffs.clone());
        let (g, s) = ext_gcd(a, modulus);
        debug_assert_eq!(g.len(), 1);
        let c = g[0].recip();
        let mut s: Vec<Rat> = s.into_iter().map(|x| x * &c).collect();
        s.resize(self.field.phi, Rat::zero());
        Some(CycNumber { field: self.field, coeffs: s })
    }

    pub fn pow(&self, mut e: u64) -> CycNumber {
        let mut base = self.clone();
        let mut acc = CycNumber::one(self.field.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

fn trim(mut p: Vec<Rat>) -> Vec<Rat> {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn is_zero_poly(p: &[Rat]) -> bool {
    p.iter().all(|c| c.is_zero())
}

fn upoly_divrem(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() || is_zero_poly(&r) {
        return (vec![Rat::zero()], r);
    }
    let lead_inv = b.last().unwrap().recip();
    let mut q = vec![Rat::zero(); r.len() - b.len() + 1];
    for shift in (0..q.len()).rev() {
        let c = &r[shift + b.len() - 1] * &lead_inv;
        if c.is_zero() {
            continue;
        }
        for (i, x) in b.iter().enumerate() {
            r[i + shift] -= x * &c;
        }
        q[shift] = c;
    }
    r.truncate(b.len() - 1);
    if r.is_empty() {
        r.push(Rat::zero());
    }
    (trim(q), trim(r))
}

fn upoly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn upoly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), Rat::zero());
    }
    for (i, x) in b.iter().enumerate() {
        out[i] -= x;
    }
    trim(out)
}

/// Returns (g, s) with s·a ≡ g (mod m) and g = gcd(a, m).
fn ext_gcd(a: Vec<Rat>, m: Vec<Rat>) -> (Vec<Rat>, Vec<Rat>) {
    let (mut r0, mut r1) = (m, a);
    let (mut s0, mut s1) = (vec![Rat::zero()], vec![Rat::one()]);
    while !is_zero_poly(&r1) {
        let (q, r) = upoly_divrem(&r0, &r1);
        let s2 = upoly_sub(&s0, &upoly_mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    (r0, s0)
}

impl PartialEq for CycNumber {
    fn eq(&self, other: &Self) -> bool {
        if let Some((a, b)) = self.align(other) {
            return a.coeffs == b.coeffs;
        }
        self.coeffs == other.coeffs
    }
}

impl Eq for CycNumber {}

pub(crate) fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl CycNumber {
    /// Number of nonzero power-basis terms.
    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// Text in the scalar grammar, e.g. `1/3 - 2*z9^2`.
    pub fn render(&self) -> String {
        let n = self.field.n;
        let mut s = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if k == 0 {
                s.push_str(&fmt_rat(&mag));
            } else {
                if !mag.is_one() {
                    s.push_str(&fmt_rat(&mag));
                    s.push('*');
                }
                if k == 1 {
                    s.push_str(&format!("z{n}"));
                } else {
                    s.push_str(&format!("z{n}^{k}"));
                }
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

impl fmt::Display for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for CycNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNumber[{}]({})", self.field.n, self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(cyclotomic_poly(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_poly(9), vec![1, 0, 0, 1, 0, 0, 1]);
        assert_eq!(cyclotomic_poly(36).len() - 1, 12);
    }

    #[test]
    fn root_identities() {
        let z = CycNumber::root(9, 1);
        assert_eq!(z.mul(&z).mul(&z), CycNumber::root(9, 3));
        assert!(CycNumber::root(3, 1).add(&CycNumber::root(3, 2)).add(&CycNumber::one(3)).is_zero());
        assert_eq!(CycNumber::root(36, 36), CycNumber::one(36));
    }

    #[test]
    fn inverse_round_trip() {
        let a = CycNumber::root(36, 5).add(&CycNumber::from_int(36, 3));
        let b = a.inv().unwrap();
        assert!(a.mul(&b).is_one());
    }

    #[test]
    fn embedding_is_consistent() {
        let a = CycNumber::root(3, 1);
        assert_eq!(a.embed(36), CycNumber::root(36, 12));
        assert_eq!(a, CycNumber::root(9, 3));
    }
}
