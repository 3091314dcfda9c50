//! Exact scalars: rational functions over Q(ζ_N) in declared parameter roots.
//!
//! A parameter `u` declared with root order `r` is stored through an indeterminate
//! `t` with `u = t^r`, so fractional powers such as `u^(1/3)` stay polynomial.

mod cyclo;
mod poly;
mod text;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cyclo::{cyclotomic_poly, CycField, CycNumber, Rat};
pub use poly::{gcd, Mono, Poly};
pub use text::{parse_scalar, parse_with, render_scalar};

pub const DEFAULT_CONDUCTOR: u32 = 36;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("root of unity of order {order} is not available in conductor {conductor}")]
    ConductorMismatch { order: u32, conductor: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("specialization hits a pole")]
    Pole,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("exponent {exp} of `{name}` is not a multiple of 1/{root_order}")]
    BadExponent { name: String, exp: String, root_order: u32 },
    #[error("parameter `{0}` declared with conflicting root orders")]
    RootOrderConflict(String),
}

/// A formal parameter; the user-facing value equals `t^root_order`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub root_order: u32,
}

impl Param {
    pub fn new(name: &str, root_order: u32) -> Param {
        Param { name: name.to_string(), root_order }
    }
}

/// Conductor plus the ordered parameter table shared by a family of scalars.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Domain {
    conductor: u32,
    params: Vec<Param>,
}

impl Domain {
    pub fn new(conductor: u32, params: Vec<Param>) -> Arc<Domain> {
        Arc::new(Domain { conductor, params })
    }

    /// Conductor 36 without parameters.
    pub fn standard() -> Arc<Domain> {
        static STD: OnceLock<Arc<Domain>> = OnceLock::new();
        STD.get_or_init(|| Domain::new(DEFAULT_CONDUCTOR, Vec::new())).clone()
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    pub fn nvars(&self) -> usize {
        self.params.len()
    }

    /// Smallest domain containing both; parameters keep their order of first appearance.
    pub fn merge(a: &Arc<Domain>, b: &Arc<Domain>) -> Result<Arc<Domain>, ScalarError> {
        if Arc::ptr_eq(a, b) || a == b {
            return Ok(a.clone());
        }
        let mut params = a.params.clone();
        for p in &b.params {
            match params.iter().find(|q| q.name == p.name) {
                Some(q) if q.root_order != p.root_order => {
                    return Err(ScalarError::RootOrderConflict(p.name.clone()))
                }
                Some(_) => {}
                None => params.push(p.clone()),
            }
        }
        let conductor = a.conductor.lcm(&b.conductor);
        if conductor == a.conductor && params.len() == a.params.len() {
            return Ok(a.clone());
        }
        Ok(Domain::new(conductor, params))
    }

    /// Same parameters plus `extra` (ignoring names already present).
    pub fn extend(self: &Arc<Domain>, extra: &[Param]) -> Result<Arc<Domain>, ScalarError> {
        Domain::merge(self, &Domain::new(self.conductor, extra.to_vec()))
    }
}

/// Canonical reduced fraction num/den with monic denominator.
#[derive(Clone)]
pub struct Scalar {
    dom: Arc<Domain>,
    num: Poly,
    den: Poly,
}

impl Scalar {
    fn raw(dom: Arc<Domain>, num: Poly, den: Poly) -> Scalar {
        Scalar { dom, num, den }
    }

    /// Builds the canonical form of num/den.
    pub fn from_fraction(dom: &Arc<Domain>, num: Poly, den: Poly) -> Result<Scalar, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let (n, k) = (dom.conductor, dom.nvars());
        if num.is_zero() {
            return Ok(Scalar::raw(dom.clone(), Poly::zero(n, k), Poly::one(n, k)));
        }
        if let Some(c) = den.as_constant() {
            let inv = c.inv().unwrap();
            return Ok(Scalar::raw(dom.clone(), num.scale(&inv), Poly::one(n, k)));
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let (den, lc) = den.monic();
        let num = if lc.is_one() { num } else { num.scale(&lc.inv().unwrap()) };
        Ok(Scalar::raw(dom.clone(), num, den))
    }

    pub fn from_poly(dom: &Arc<Domain>, num: Poly) -> Scalar {
        let one = Poly::one(dom.conductor, dom.nvars());
        Scalar::raw(dom.clone(), num, one)
    }

    pub fn zero(dom: &Arc<Domain>) -> Scalar {
        Scalar::from_poly(dom, Poly::zero(dom.conductor, dom.nvars()))
    }

    pub fn one(dom: &Arc<Domain>) -> Scalar {
        Scalar::from_poly(dom, Poly::one(dom.conductor, dom.nvars()))
    }

    pub fn from_cyc(dom: &Arc<Domain>, c: CycNumber) -> Scalar {
        let c = c.embed(dom.conductor.lcm(&c.conductor()));
        let dom = if c.conductor() == dom.conductor {
            dom.clone()
        } else {
            Domain::new(c.conductor(), dom.params.clone())
        };
        Scalar::from_poly(&dom, Poly::constant(c, dom.nvars()))
    }

    pub fn from_rat(dom: &Arc<Domain>, r: Rat) -> Scalar {
        Scalar::from_cyc(dom, CycNumber::from_rat(dom.conductor, r))
    }

    pub fn from_int(dom: &Arc<Domain>, v: i64) -> Scalar {
        Scalar::from_cyc(dom, CycNumber::from_int(dom.conductor, v))
    }

    pub fn from_ratio(dom: &Arc<Domain>, p: i64, q: i64) -> Scalar {
        Scalar::from_rat(dom, Rat::new(BigInt::from(p), BigInt::from(q)))
    }

    /// ζ_n^k realized inside the domain's conductor.
    pub fn root_of_unity(dom: &Arc<Domain>, n: u32, k: i64) -> Result<Scalar, ScalarError> {
        if n == 0 || !dom.conductor.is_multiple_of(n) {
            return Err(ScalarError::ConductorMismatch { order: n, conductor: dom.conductor });
        }
        let step = (dom.conductor / n) as i64;
        Ok(Scalar::from_cyc(dom, CycNumber::root(dom.conductor, k * step)))
    }

    /// The user-facing parameter value `t^r`.
    pub fn param(dom: &Arc<Domain>, name: &str) -> Result<Scalar, ScalarError> {
        let i = dom.index_of(name).ok_or_else(|| ScalarError::UnknownParameter(name.to_string()))?;
        let r = dom.params[i].root_order;
        Ok(Scalar::from_poly(dom, Poly::var_pow(dom.conductor, dom.nvars(), i, r)))
    }

    /// The root indeterminate `t` of a parameter.
    pub fn param_root(dom: &Arc<Domain>, name: &str) -> Result<Scalar, ScalarError> {
        let i = dom.index_of(name).ok_or_else(|| ScalarError::UnknownParameter(name.to_string()))?;
        Ok(Scalar::from_poly(dom, Poly::var_pow(dom.conductor, dom.nvars(), i, 1)))
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.dom
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// Value in Q(ζ_N) when the scalar carries no parameter dependence.
    pub fn as_cyc(&self) -> Option<CycNumber> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.as_cyc().is_some()
    }

    /// Re-expresses the scalar over a larger domain.
    pub fn embed(&self, target: &Arc<Domain>) -> Scalar {
        if Arc::ptr_eq(&self.dom, target) {
            return self.clone();
        }
        assert!(
            target.conductor.is_multiple_of(self.dom.conductor),
            "conductor {} does not embed into {}",
            self.dom.conductor,
            target.conductor
        );
        let map: Vec<usize> = self
            .dom
            .params
            .iter()
            .map(|p| target.index_of(&p.name).expect("target domain lacks a parameter"))
            .collect();
        let n = target.conductor;
        let k = target.nvars();
        Scalar::raw(target.clone(), self.num.embed(n, k, &map), self.den.embed(n, k, &map))
    }

    fn aligned(&self, other: &Scalar) -> Option<(Scalar, Scalar)> {
        if Arc::ptr_eq(&self.dom, &other.dom) || self.dom == other.dom {
            return None;
        }
        let dom = Domain::merge(&self.dom, &other.dom).expect("incompatible scalar domains");
        Some((self.embed(&dom), other.embed(&dom)))
    }

    pub fn add_ref(&self, other: &Scalar) -> Scalar {
        if let Some((a, b)) = self.aligned(other) {
            return a.add_ref(&b);
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.den.is_one() && other.den.is_one() {
            return Scalar::raw(self.dom.clone(), self.num.add(&other.num), self.den.clone());
        }
        if self.den == other.den {
            return Scalar::from_fraction(&self.dom, self.num.add(&other.num), self.den.clone()).unwrap();
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Scalar::from_fraction(&self.dom, num, self.den.mul(&other.den)).unwrap()
    }

    pub fn neg_ref(&self) -> Scalar {
        Scalar::raw(self.dom.clone(), self.num.neg(), self.den.clone())
    }

    pub fn sub_ref(&self, other: &Scalar) -> Scalar {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Scalar) -> Scalar {
        if let Some((a, b)) = self.aligned(other) {
            return a.mul_ref(&b);
        }
        if self.is_zero() || other.is_zero() {
            return Scalar::zero(&self.dom);
        }
        if self.den.is_one() && other.den.is_one() {
            return Scalar::raw(self.dom.clone(), self.num.mul(&other.num), self.den.clone());
        }
        // cross-cancel; inputs are already reduced
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = if g1.is_one() { self.num.clone() } else { self.num.div_exact(&g1).unwrap() };
        let d2 = if g1.is_one() { other.den.clone() } else { other.den.div_exact(&g1).unwrap() };
        let n2 = if g2.is_one() { other.num.clone() } else { other.num.div_exact(&g2).unwrap() };
        let d1 = if g2.is_one() { self.den.clone() } else { self.den.div_exact(&g2).unwrap() };
        let den = d1.mul(&d2);
        let (den, lc) = den.monic();
        let num = n1.mul(&n2);
        let num = if lc.is_one() { num } else { num.scale(&lc.inv().unwrap()) };
        Scalar::raw(self.dom.clone(), num, den)
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Scalar::from_fraction(&self.dom, self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self.mul_ref(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Scalar, ScalarError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Scalar::one(&self.dom);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul_ref(&base);
        }
        Ok(acc)
    }

    /// Substitutes rational values for parameter roots (keyed by parameter name).
    /// Unassigned parameters stay symbolic.
    pub fn specialize(&self, assignment: &HashMap<String, Rat>) -> Result<Scalar, ScalarError> {
        let keep: Vec<Param> =
            self.dom.params.iter().filter(|p| !assignment.contains_key(&p.name)).cloned().collect();
        let target = Domain::new(self.dom.conductor, keep);
        let n = self.dom.conductor;
        let k = target.nvars();
        let subst = |p: &Poly| -> Poly {
            let mut acc = Poly::zero(n, k);
            for (m, c) in p.terms() {
                let mut coeff = c.clone();
                let mut e = vec![0u32; k];
                let mut j = 0;
                for (i, par) in self.dom.params.iter().enumerate() {
                    match assignment.get(&par.name) {
                        Some(v) => {
                            for _ in 0..m.0[i] {
                                coeff = coeff.scale(v);
                            }
                        }
                        None => {
                            e[j] = m.0[i];
                            j += 1;
                        }
                    }
                }
                acc = acc.add(&Poly::from_terms(n, k, vec![(Mono(e), coeff)]));
            }
            acc
        };
        let den = subst(&self.den);
        if den.is_zero() {
            return Err(ScalarError::Pole);
        }
        Scalar::from_fraction(&target, subst(&self.num), den)
    }

    /// Applies ζ_N ↦ ζ_N^a to every coefficient.
    pub fn galois(&self, a: i64) -> Scalar {
        let num = self.num.map_coeffs(|c| c.galois(a));
        let den = self.den.map_coeffs(|c| c.galois(a));
        Scalar::from_fraction(&self.dom, num, den).unwrap()
    }

    /// Complex conjugation ζ ↦ ζ⁻¹.
    pub fn conj(&self) -> Scalar {
        self.galois(-1)
    }

    pub fn render(&self) -> String {
        render_scalar(self)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        if let Some((a, b)) = self.aligned(other) {
            return a == b;
        }
        self.num == other.num && self.den == other.den
    }
}

impl Eq for Scalar {}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", self.render())
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$f(rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$f(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$f(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$f(&rhs)
            }
        }
    };
}

impl Scalar {
    fn div_panicking(&self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("scalar division by zero")
    }
}

binop!(Add, add, add_ref);
binop!(Sub, sub, sub_ref);
binop!(Mul, mul, mul_ref);
binop!(Div, div, div_panicking);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom_u() -> Arc<Domain> {
        Domain::new(36, vec![Param::new("u", 1)])
    }

    #[test]
    fn cancellation() {
        let d = dom_u();
        let u = Scalar::param(&d, "u").unwrap();
        let one = Scalar::one(&d);
        let q = (&u * &u - &one) / (&u - &one);
        assert_eq!(q, &u + &one);
        assert!(q.denominator().is_one());
    }

    #[test]
    fn one_over_one_plus_kappa() {
        let d = dom_u();
        let u = Scalar::param(&d, "u").unwrap();
        let one = Scalar::one(&d);
        let kappa = &one + &u + one.clone() / &u;
        let got = one.clone() / (&one + &kappa);
        let want = &u / ((&u + &one) * (&u + &one));
        assert_eq!(got, want);
    }

    #[test]
    fn roots() {
        let d = Domain::standard();
        let z3 = Scalar::root_of_unity(&d, 3, 1).unwrap();
        let z3sq = Scalar::root_of_unity(&d, 3, 2).unwrap();
        assert!((&z3 * &z3sq).is_one());
        assert_eq!(&z3 + &z3sq, Scalar::from_int(&d, -1));
        assert!(Scalar::root_of_unity(&d, 5, 1).is_err());
    }

    #[test]
    fn specialize_pole() {
        let d = Domain::new(36, vec![Param::new("u", 3)]);
        let u = Scalar::param(&d, "u").unwrap();
        let one = Scalar::one(&d);
        let mut a = HashMap::new();
        a.insert("u".to_string(), Rat::from_integer(BigInt::from(2)));
        assert_eq!((&u + &one).specialize(&a).unwrap().as_cyc().unwrap(), CycNumber::from_int(36, 9));
        a.insert("u".to_string(), Rat::from_integer(BigInt::from(-1)));
        assert_eq!((one.clone() / (&u + &one)).specialize(&a), Err(ScalarError::Pole));
    }
}
