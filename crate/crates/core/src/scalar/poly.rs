//! Multivariate polynomials over Q(ζ_N) in graded-lexicographic order.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::cyclo::{CycNumber, Rat};

/// Exponent vector; variable 0 is the most significant under lex tie-breaks.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn one(nvars: usize) -> Mono {
        Mono(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial; terms sorted by descending monomial, no zero coefficients.
#[derive(Clone, Debug)]
pub struct Poly {
    n: u32,
    nvars: usize,
    terms: Vec<(Mono, CycNumber)>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn zero(n: u32, nvars: usize) -> Poly {
        Poly { n, nvars, terms: Vec::new() }
    }

    pub fn constant(c: CycNumber, nvars: usize) -> Poly {
        let n = c.conductor();
        if c.is_zero() {
            return Poly::zero(n, nvars);
        }
        Poly { n, nvars, terms: vec![(Mono::one(nvars), c)] }
    }

    pub fn one(n: u32, nvars: usize) -> Poly {
        Poly::constant(CycNumber::one(n), nvars)
    }

    /// t_i^e.
    pub fn var_pow(n: u32, nvars: usize, i: usize, e: u32) -> Poly {
        let mut m = Mono::one(nvars);
        m.0[i] = e;
        Poly { n, nvars, terms: vec![(m, CycNumber::one(n))] }
    }

    pub fn from_terms(n: u32, nvars: usize, terms: Vec<(Mono, CycNumber)>) -> Poly {
        let mut acc: BTreeMap<Mono, CycNumber> = BTreeMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.0.len(), nvars);
            match acc.get_mut(&m) {
                Some(v) => *v = v.add(&c),
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Poly::from_map(n, nvars, acc)
    }

    fn from_map(n: u32, nvars: usize, acc: BTreeMap<Mono, CycNumber>) -> Poly {
        let terms = acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        Poly { n, nvars, terms }
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Mono, CycNumber)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<CycNumber> {
        match self.terms.len() {
            0 => Some(CycNumber::zero(self.n)),
            1 if self.terms[0].0.is_one() => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn lead(&self) -> Option<&(Mono, CycNumber)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => a.0.cmp(&b.0),
                (Some(_), None) => Ordering::Greater,
                (None, _) => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let (m, c) = &other.terms[j];
                    out.push((m.clone(), if negate { c.neg() } else { c.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        self.terms[i].1.sub(&other.terms[j].1)
                    } else {
                        self.terms[i].1.add(&other.terms[j].1)
                    };
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        debug_assert_eq!(self.n, other.n);
        Poly { n: self.n, nvars: self.nvars, terms: out }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.merge(other, true)
    }

    pub fn neg(&self) -> Poly {
        Poly { n: self.n, nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect() }
    }

    pub fn scale(&self, c: &CycNumber) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.n, self.nvars);
        }
        Poly { n: self.n, nvars: self.nvars, terms: self.terms.iter().map(|(m, d)| (m.clone(), d.mul(c))).collect() }
    }

    pub fn mul_term(&self, mono: &Mono, c: &CycNumber) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.n, self.nvars);
        }
        Poly {
            n: self.n,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, d)| (m.mul(mono), d.mul(c))).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.n, self.nvars);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut acc: BTreeMap<Mono, CycNumber> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca.mul(cb);
                match acc.get_mut(&m) {
                    Some(v) => *v = v.add(&c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        Poly::from_map(self.n, self.nvars, acc)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.n, self.nvars);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Quotient when `d` divides `self` exactly, otherwise `None`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (lm, lc) = d.lead().expect("division by zero polynomial");
        if let Some(c) = d.as_constant() {
            return Some(self.scale(&c.inv().unwrap()));
        }
        let lc_inv = lc.inv().unwrap();
        let mut r = self.clone();
        let mut q = Vec::new();
        while let Some((rm, rc)) = r.lead().cloned() {
            if !lm.divides(&rm) {
                return None;
            }
            let tm = rm.div(lm);
            let tc = rc.mul(&lc_inv);
            r = r.sub(&d.mul_term(&tm, &tc));
            q.push((tm, tc));
        }
        Some(Poly { n: self.n, nvars: self.nvars, terms: q })
    }

    /// Divides by the leading coefficient; returns the normalized polynomial and that coefficient.
    pub fn monic(&self) -> (Poly, CycNumber) {
        match self.lead() {
            None => (self.clone(), CycNumber::one(self.n)),
            Some((_, c)) if c.is_one() => (self.clone(), c.clone()),
            Some((_, c)) => {
                let c = c.clone();
                (self.scale(&c.inv().unwrap()), c)
            }
        }
    }

    fn max_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&v| self.terms.iter().any(|(m, _)| m.0[v] > 0))
    }

    pub fn deg_in(&self, v: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.0[v]).max().unwrap_or(0)
    }

    /// Coefficient of t_v^k, as a polynomial free of t_v.
    pub fn coeff_in(&self, v: usize, k: u32) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.0[v] == k)
            .map(|(m, c)| {
                let mut m = m.clone();
                m.0[v] = 0;
                (m, c.clone())
            })
            .collect();
        Poly::from_terms(self.n, self.nvars, terms)
    }

    fn content_in(&self, v: usize) -> Poly {
        let mut g = Poly::zero(self.n, self.nvars);
        for k in 0..=self.deg_in(v) {
            let c = self.coeff_in(v, k);
            if c.is_zero() {
                continue;
            }
            g = gcd(&g, &c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn prem(&self, g: &Poly, v: usize) -> Poly {
        let dg = g.deg_in(v);
        let lcg = g.coeff_in(v, dg);
        let mut r = self.clone();
        while !r.is_zero() && r.deg_in(v) >= dg {
            let dr = r.deg_in(v);
            let lcr = r.coeff_in(v, dr);
            let shift = Poly::var_pow(self.n, self.nvars, v, dr - dg);
            r = r.mul(&lcg).sub(&lcr.mul(g).mul(&shift));
        }
        r
    }

    pub fn eval(&self, values: &[Rat]) -> CycNumber {
        debug_assert_eq!(values.len(), self.nvars);
        let mut acc = CycNumber::zero(self.n);
        for (m, c) in &self.terms {
            let mut w = Rat::one();
            for (e, x) in m.0.iter().zip(values) {
                for _ in 0..*e {
                    w *= x;
                }
            }
            if !w.is_zero() {
                acc = acc.add(&c.scale(&w));
            }
        }
        acc
    }

    /// Re-indexes variables (`map[i]` is the new index of variable i) and lifts coefficients to conductor `n`.
    pub fn embed(&self, n: u32, nvars: usize, map: &[usize]) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = vec![0; nvars];
                for (i, &x) in m.0.iter().enumerate() {
                    e[map[i]] = x;
                }
                (Mono(e), c.embed(n))
            })
            .collect();
        Poly::from_terms(n, nvars, terms)
    }

    pub fn map_coeffs(&self, f: impl Fn(&CycNumber) -> CycNumber) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), f(c))).collect();
        Poly::from_terms(self.n, self.nvars, terms)
    }
}

/// Monic greatest common divisor (primitive pseudo-remainder sequences, recursive in the variables).
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic().0;
    }
    if b.is_zero() {
        return a.monic().0;
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one(a.n.max(b.n), a.nvars);
    }
    if a.terms.len() == 1 || b.terms.len() == 1 {
        return monomial_gcd(a, b);
    }
    let v = a.max_var().max(b.max_var()).unwrap();
    if a.deg_in(v) == 0 {
        return gcd(a, &b.content_in(v));
    }
    if b.deg_in(v) == 0 {
        return gcd(&a.content_in(v), b);
    }
    let ca = a.content_in(v);
    let cb = b.content_in(v);
    let gc = gcd(&ca, &cb);
    let mut f1 = a.div_exact(&ca).unwrap();
    let mut f2 = b.div_exact(&cb).unwrap();
    if f1.deg_in(v) < f2.deg_in(v) {
        std::mem::swap(&mut f1, &mut f2);
    }
    loop {
        let r = f1.prem(&f2, v);
        if r.is_zero() {
            break;
        }
        if r.deg_in(v) == 0 {
            f2 = Poly::one(a.n, a.nvars);
            break;
        }
        let cr = r.content_in(v);
        f1 = f2;
        // over a field only the primitive part matters; monic keeps coefficients small
        f2 = r.div_exact(&cr).unwrap().monic().0;
    }
    let pp = f2.div_exact(&f2.content_in(v)).unwrap();
    gc.mul(&pp).monic().0
}

/// gcd when one side is a single term: the common power of each variable.
fn monomial_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut e = vec![u32::MAX; a.nvars];
    for (m, _) in a.terms.iter().chain(&b.terms) {
        for (x, y) in e.iter_mut().zip(&m.0) {
            *x = (*x).min(*y);
        }
    }
    let n = a.n.max(b.n);
    Poly::from_terms(n, a.nvars, vec![(Mono(e), CycNumber::one(n))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn c(v: i64) -> CycNumber {
        CycNumber::from_int(1, v)
    }

    fn p(terms: &[(&[u32], i64)]) -> Poly {
        Poly::from_terms(1, 2, terms.iter().map(|(m, v)| (Mono(m.to_vec()), c(*v))).collect())
    }

    #[test]
    fn grlex_order() {
        assert!(Mono(vec![0, 2]) > Mono(vec![1, 0]));
        assert!(Mono(vec![1, 1]) > Mono(vec![0, 2]));
    }

    #[test]
    fn exact_division() {
        let a = p(&[(&[2, 0], 1), (&[0, 0], -1)]);
        let b = p(&[(&[1, 0], 1), (&[0, 0], -1)]);
        let q = a.div_exact(&b).unwrap();
        assert_eq!(q, p(&[(&[1, 0], 1), (&[0, 0], 1)]));
        assert!(b.div_exact(&a).is_none());
    }

    #[test]
    fn bivariate_gcd() {
        // (x + y)(x - 2y + 1) and (x + y)(x y + 3)
        let common = p(&[(&[1, 0], 1), (&[0, 1], 1)]);
        let a = common.mul(&p(&[(&[1, 0], 1), (&[0, 1], -2), (&[0, 0], 1)]));
        let b = common.mul(&p(&[(&[1, 1], 1), (&[0, 0], 3)]));
        assert_eq!(gcd(&a, &b), common);
        let one = gcd(&p(&[(&[1, 0], 1)]), &p(&[(&[0, 1], 1)]));
        assert!(one.is_one());
    }

    #[test]
    fn evaluation() {
        let a = p(&[(&[2, 0], 1), (&[0, 1], 3)]);
        let v = a.eval(&[Rat::from_integer(BigInt::from(2)), Rat::from_integer(BigInt::from(-1))]);
        assert_eq!(v, c(1));
    }
}
