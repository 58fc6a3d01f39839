//! Capped-relative-precision p-adic scalars and the Iwasawa logarithm.
//!
//! A nonzero value is p^val * unit with the unit known modulo p^prec
//! (relative precision `prec`). Zero comes in two flavours: exact, and
//! "zero modulo p^A" produced by full cancellation, which remembers the
//! absolute precision A at which it is indistinguishable from zero.
//! Arithmetic never claims more precision than its inputs justify.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

use crate::arith::valuation as int_valuation;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PadicError {
    #[error("division by zero (at working precision)")]
    DivisionByZero,
    #[error("result has no significant digits at working precision")]
    PrecisionExhausted,
    #[error("argument must be a p-adic unit")]
    NotAUnit,
    #[error("zero argument")]
    ZeroArgument,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Form {
    /// Exact zero.
    Zero,
    /// Indistinguishable from zero modulo p^abs_prec.
    FuzzyZero { abs_prec: i64 },
    Nonzero { val: i64, unit: BigUint, prec: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicNumber {
    p: u64,
    form: Form,
}

fn ppow(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

impl PadicNumber {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn zero(p: u64) -> Self {
        PadicNumber { p, form: Form::Zero }
    }

    /// Zero known only modulo p^abs_prec.
    pub fn fuzzy_zero(p: u64, abs_prec: i64) -> Self {
        PadicNumber {
            p,
            form: Form::FuzzyZero { abs_prec },
        }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self::from_int(p, &BigInt::one(), prec)
    }

    /// A nonzero value p^val * unit with `unit` reduced mod p^prec.
    fn make(p: u64, val: i64, unit: BigUint, prec: u32) -> Self {
        if prec == 0 {
            return Self::fuzzy_zero(p, val);
        }
        let unit = unit % ppow(p, prec);
        debug_assert!(!(&unit % BigUint::from(p)).is_zero(), "unit part not a unit");
        PadicNumber {
            p,
            form: Form::Nonzero { val, unit, prec },
        }
    }

    pub fn from_int(p: u64, n: &BigInt, prec: u32) -> Self {
        if n.is_zero() {
            return Self::zero(p);
        }
        let v = int_valuation(n, p) as i64;
        let mag = n.magnitude() / ppow(p, v as u32);
        let modulus = ppow(p, prec);
        let mut unit = mag % &modulus;
        if n.is_negative() {
            unit = (&modulus - unit) % &modulus;
        }
        Self::make(p, v, unit, prec)
    }

    pub fn from_i64(p: u64, n: i64, prec: u32) -> Self {
        Self::from_int(p, &BigInt::from(n), prec)
    }

    /// num/den as a p-adic number; den must be nonzero.
    pub fn from_ratio(p: u64, num: &BigInt, den: &BigInt, prec: u32) -> Self {
        assert!(!den.is_zero());
        if num.is_zero() {
            return Self::zero(p);
        }
        let a = Self::from_int(p, num, prec + 4);
        let b = Self::from_int(p, den, prec + 4);
        a.div(&b).expect("nonzero denominator").truncate(prec)
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.form, Form::Zero)
    }

    pub fn is_zero_at_precision(&self) -> bool {
        matches!(self.form, Form::Zero | Form::FuzzyZero { .. })
    }

    /// Valuation; None means "indistinguishable from zero" (>= abs precision
    /// for fuzzy zeros, +infinity for exact zero).
    pub fn valuation(&self) -> Option<i64> {
        match &self.form {
            Form::Nonzero { val, .. } => Some(*val),
            _ => None,
        }
    }

    /// Relative precision in digits (None for zeros).
    pub fn precision(&self) -> Option<u32> {
        match &self.form {
            Form::Nonzero { prec, .. } => Some(*prec),
            _ => None,
        }
    }

    /// Absolute precision: the value is known modulo p^(this).
    pub fn abs_precision(&self) -> Option<i64> {
        match &self.form {
            Form::Zero => None,
            Form::FuzzyZero { abs_prec } => Some(*abs_prec),
            Form::Nonzero { val, prec, .. } => Some(val + *prec as i64),
        }
    }

    /// The unit part modulo p^prec (nonzero values only).
    pub fn unit_part(&self) -> Option<&BigUint> {
        match &self.form {
            Form::Nonzero { unit, .. } => Some(unit),
            _ => None,
        }
    }

    /// Caps the relative precision at `prec`.
    pub fn truncate(&self, prec: u32) -> Self {
        match &self.form {
            Form::Nonzero { val, unit, prec: old } if *old > prec => {
                Self::make(self.p, *val, unit.clone(), prec)
            }
            _ => self.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        match &self.form {
            Form::Nonzero { val, unit, prec } => {
                let m = ppow(self.p, *prec);
                Self::make(self.p, *val, (&m - unit) % &m, *prec)
            }
            _ => self.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed primes");
        let p = self.p;
        match (&self.form, &other.form) {
            (Form::Zero, _) => other.clone(),
            (_, Form::Zero) => self.clone(),
            (Form::FuzzyZero { abs_prec: a }, Form::FuzzyZero { abs_prec: b }) => {
                Self::fuzzy_zero(p, (*a).min(*b))
            }
            (Form::FuzzyZero { abs_prec }, Form::Nonzero { val, unit, prec })
            | (Form::Nonzero { val, unit, prec }, Form::FuzzyZero { abs_prec }) => {
                let abs = (*abs_prec).min(val + *prec as i64);
                if *val >= abs {
                    Self::fuzzy_zero(p, abs)
                } else {
                    Self::make(p, *val, unit.clone(), (abs - val) as u32)
                }
            }
            (
                Form::Nonzero {
                    val: va,
                    unit: ua,
                    prec: na,
                },
                Form::Nonzero {
                    val: vb,
                    unit: ub,
                    prec: nb,
                },
            ) => {
                let v = (*va).min(*vb);
                let abs = (va + *na as i64).min(vb + *nb as i64);
                if abs <= v {
                    return Self::fuzzy_zero(p, abs);
                }
                let width = (abs - v) as u32;
                let modulus = ppow(p, width);
                let ta = ua * ppow(p, (va - v) as u32) % &modulus;
                let tb = ub * ppow(p, (vb - v) as u32) % &modulus;
                let s = (ta + tb) % &modulus;
                if s.is_zero() {
                    return Self::fuzzy_zero(p, abs);
                }
                let extra = {
                    // valuation of s within the known window
                    let mut w = 0u32;
                    let pb = BigUint::from(p);
                    let mut t = s.clone();
                    while (&t % &pb).is_zero() {
                        t /= &pb;
                        w += 1;
                    }
                    (w, t)
                };
                let (shift, unit) = extra;
                let val = v + shift as i64;
                if val >= abs {
                    return Self::fuzzy_zero(p, abs);
                }
                Self::make(p, val, unit, (abs - val) as u32)
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "mixed primes");
        let p = self.p;
        match (&self.form, &other.form) {
            (Form::Zero, _) | (_, Form::Zero) => Self::zero(p),
            (Form::FuzzyZero { abs_prec: a }, Form::FuzzyZero { abs_prec: b }) => {
                // each factor has valuation >= its abs precision bound? No:
                // a fuzzy zero only bounds the value by p^a; product bounded
                // by p^(a + min val of other) which is unknown, so use a + b
                // as a conservative floor only when both are >= 0.
                Self::fuzzy_zero(p, a + b)
            }
            (Form::FuzzyZero { abs_prec }, Form::Nonzero { val, .. })
            | (Form::Nonzero { val, .. }, Form::FuzzyZero { abs_prec }) => {
                Self::fuzzy_zero(p, abs_prec + val)
            }
            (
                Form::Nonzero {
                    val: va,
                    unit: ua,
                    prec: na,
                },
                Form::Nonzero {
                    val: vb,
                    unit: ub,
                    prec: nb,
                },
            ) => {
                let prec = (*na).min(*nb);
                Self::make(p, va + vb, ua * ub, prec)
            }
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self, PadicError> {
        assert_eq!(self.p, other.p, "mixed primes");
        let p = self.p;
        match &other.form {
            Form::Zero => Err(PadicError::DivisionByZero),
            Form::FuzzyZero { .. } => Err(PadicError::PrecisionExhausted),
            Form::Nonzero {
                val: vb,
                unit: ub,
                prec: nb,
            } => match &self.form {
                Form::Zero => Ok(Self::zero(p)),
                Form::FuzzyZero { abs_prec } => Ok(Self::fuzzy_zero(p, abs_prec - vb)),
                Form::Nonzero {
                    val: va,
                    unit: ua,
                    prec: na,
                } => {
                    let prec = (*na).min(*nb);
                    let modulus = ppow(p, prec);
                    let inv = mod_inverse(ub, &modulus, p);
                    Ok(Self::make(p, va - vb, ua * inv, prec))
                }
            },
        }
    }

    /// Multiplies by p^k (exact).
    pub fn shift(&self, k: i64) -> Self {
        match &self.form {
            Form::Zero => self.clone(),
            Form::FuzzyZero { abs_prec } => Self::fuzzy_zero(self.p, abs_prec + k),
            Form::Nonzero { val, unit, prec } => {
                Self::make(self.p, val + k, unit.clone(), *prec)
            }
        }
    }

    pub fn pow_u(&self, mut e: u64) -> Self {
        let prec = self.precision().unwrap_or(1);
        let mut acc = Self::one(self.p, prec.max(1));
        let mut base = self.clone();
        if e == 0 {
            return Self::one(self.p, prec.max(1));
        }
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Valuation of self - other; None when the difference vanishes at the
    /// joint precision. The workhorse for "equal to k digits" assertions.
    pub fn dist_valuation(&self, other: &Self) -> Option<i64> {
        self.sub(other).valuation()
    }

    /// The Iwasawa-branch p-adic logarithm (log p = 0): for x = p^v u, returns
    /// log(u) computed through log(u^(p-1))/(p-1).
    pub fn iwasawa_log(&self) -> Result<Self, PadicError> {
        let p = self.p;
        let (_, unit, prec) = match &self.form {
            Form::Zero => return Err(PadicError::ZeroArgument),
            Form::FuzzyZero { .. } => return Err(PadicError::PrecisionExhausted),
            Form::Nonzero { val, unit, prec } => (*val, unit.clone(), *prec),
        };
        // u^(p-1) = 1 mod p; z = u^(p-1) - 1 has valuation >= 1
        let u = Self::make(p, 0, unit, prec);
        let upow = u.pow_u(p - 1);
        let one = Self::one(p, prec);
        let z = upow.sub(&one);
        let log_u_p1 = log_one_plus(&z, prec)?;
        log_u_p1.div(&Self::from_i64(p, p as i64 - 1, prec + 2))
    }
}

/// log(1 + z) for val(z) >= 1, summed to enough terms that the tail valuation
/// exceeds the absolute precision of z.
fn log_one_plus(z: &PadicNumber, prec: u32) -> Result<PadicNumber, PadicError> {
    let p = z.prime();
    if z.is_exact_zero() {
        return Ok(PadicNumber::zero(p));
    }
    if z.is_zero_at_precision() {
        // log(1 + O(p^A)) = O(p^A)
        return Ok(PadicNumber::fuzzy_zero(
            p,
            z.abs_precision().unwrap_or(prec as i64),
        ));
    }
    let vz = z.valuation().expect("nonzero");
    if vz < 1 {
        return Err(PadicError::NotAUnit);
    }
    // terms: (-1)^(k+1) z^k / k; tail after K terms has valuation
    // >= (K+1) vz - log_p(K+1), so K = prec + a few suffices for vz >= 1
    let kmax = prec as u64 + 8;
    let mut acc = PadicNumber::zero(p);
    let mut zk = z.clone();
    for k in 1..=kmax {
        let term = zk
            .div(&PadicNumber::from_i64(p, k as i64, prec + 8))
            .expect("k nonzero");
        if k % 2 == 1 {
            acc = acc.add(&term);
        } else {
            acc = acc.sub(&term);
        }
        zk = zk.mul(z);
    }
    Ok(acc)
}

/// Inverse of u modulo p^k (u a unit), by Hensel/Newton lifting.
fn mod_inverse(u: &BigUint, modulus: &BigUint, p: u64) -> BigUint {
    // extended Euclid over the integers
    let m = BigInt::from(modulus.clone());
    let a = BigInt::from(u % modulus);
    let (mut r0, mut r1) = (m.clone(), a);
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
    }
    debug_assert!(r0.is_one(), "non-unit inverse mod p^k (p = {p})");
    let s = ((s0 % &m) + &m) % &m;
    s.magnitude().clone()
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.form {
            Form::Zero => write!(f, "0"),
            Form::FuzzyZero { abs_prec } => write!(f, "O({}^{})", self.p, abs_prec),
            Form::Nonzero { val, unit, prec } => {
                write!(
                    f,
                    "{}*{}^{} + O({}^{})",
                    unit,
                    self.p,
                    val,
                    self.p,
                    val + *prec as i64
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PREC: u32 = 20;

    #[test]
    fn cancellation_reduces_precision() {
        // p=5: 2 + 3 = 5, valuation 1, one digit of relative precision lost
        let a = PadicNumber::from_i64(5, 2, PREC);
        let b = PadicNumber::from_i64(5, 3, PREC);
        let s = a.add(&b);
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.precision(), Some(PREC - 1));
    }

    #[test]
    fn inverse_round_trip() {
        // p=7: 3 * (1/3) = 1 exactly at working precision
        let one = PadicNumber::one(7, PREC);
        let three = PadicNumber::from_i64(7, 3, PREC);
        let third = one.div(&three).unwrap();
        let back = third.mul(&three);
        assert_eq!(back.dist_valuation(&one), None, "difference vanishes");
        assert_eq!(back.unit_part(), one.unit_part());
    }

    #[test]
    fn division_by_zero_flavors() {
        let a = PadicNumber::from_i64(5, 7, PREC);
        assert_eq!(
            a.div(&PadicNumber::zero(5)).unwrap_err(),
            PadicError::DivisionByZero
        );
        assert_eq!(
            a.div(&PadicNumber::fuzzy_zero(5, 12)).unwrap_err(),
            PadicError::PrecisionExhausted
        );
    }

    #[test]
    fn full_cancellation_is_fuzzy_zero() {
        let a = PadicNumber::from_i64(5, 7, PREC);
        let d = a.sub(&a);
        assert!(d.is_zero_at_precision());
        assert!(!d.is_exact_zero());
        assert_eq!(d.abs_precision(), Some(PREC as i64));
    }

    #[test]
    fn log_of_one_is_zero() {
        let one = PadicNumber::one(5, PREC);
        let l = one.iwasawa_log().unwrap();
        assert!(l.is_zero_at_precision());
    }

    #[test]
    fn log_is_a_homomorphism_sample() {
        // log(a^2) = 2 log(a)
        for p in [5u64, 7, 13] {
            let a = PadicNumber::from_i64(p, 2, PREC);
            let la = a.iwasawa_log().unwrap();
            let la2 = a.mul(&a).iwasawa_log().unwrap();
            let two_la = la.add(&la);
            let d = la2.dist_valuation(&two_la);
            assert!(
                d.map_or(true, |v| v >= PREC as i64 - 1),
                "p = {p}, deviation {d:?}"
            );
        }
    }

    #[test]
    fn log_homomorphism_many_units() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(42);
        let p = 5u64;
        for _ in 0..500 {
            // random principal units 1 + p*k
            let a = PadicNumber::from_i64(p, 1 + p as i64 * rng.gen_range(1..10_000), PREC);
            let b = PadicNumber::from_i64(p, 1 + p as i64 * rng.gen_range(1..10_000), PREC);
            let lhs = a.mul(&b).iwasawa_log().unwrap();
            let rhs = a.iwasawa_log().unwrap().add(&b.iwasawa_log().unwrap());
            let d = lhs.dist_valuation(&rhs);
            assert!(d.map_or(true, |v| v >= PREC as i64 - 1), "deviation {d:?}");
        }
    }

    #[test]
    fn log_1_plus_5_matches_partial_sums() {
        // log(1+5) = sum (-1)^(k+1) 5^k / k; oracle: exact rational partial
        // sum with 14 terms reduced 5-adically, compared at 10 digits
        let p = 5u64;
        let z = PadicNumber::from_i64(p, 5, 16);
        let lhs = log_one_plus(&z, 16).unwrap();
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for k in 1..=14i64 {
            // num/den += (-1)^(k+1) 5^k / k
            let term_num = BigInt::from(5).pow(k as u32) * if k % 2 == 1 { 1 } else { -1 };
            num = num * BigInt::from(k) + term_num * &den;
            den *= BigInt::from(k);
        }
        let oracle = PadicNumber::from_ratio(p, &num, &den, 12);
        let d = lhs.dist_valuation(&oracle);
        assert!(d.map_or(true, |v| v >= 10), "deviation {d:?}");
        // and iwasawa_log(6) agrees with log(1+5) since 6 = 1+5
        let l6 = PadicNumber::from_i64(p, 6, 16).iwasawa_log().unwrap();
        let d6 = l6.dist_valuation(&oracle);
        assert!(d6.map_or(true, |v| v >= 10), "deviation {d6:?}");
    }

    #[test]
    fn truncation_tail_bound() {
        // summing deeper never changes the established digits
        let p = 7u64;
        let z = PadicNumber::from_i64(p, 7 * 3, 24);
        let shallow = {
            let mut acc = PadicNumber::zero(p);
            let mut zk = z.clone();
            for k in 1..=10i64 {
                let t = zk.div(&PadicNumber::from_i64(p, k, 30)).unwrap();
                acc = if k % 2 == 1 { acc.add(&t) } else { acc.sub(&t) };
                zk = zk.mul(&z);
            }
            acc
        };
        let deep = log_one_plus(&z, 24).unwrap();
        // tail beyond k=10 has valuation >= 11*1 - floor(log_7 11) = 10
        let d = shallow.dist_valuation(&deep);
        assert!(d.map_or(true, |v| v >= 10), "deviation {d:?}");
    }

    #[test]
    fn log_ignores_powers_of_p() {
        // branch log(p) = 0: log(p^3 * u) = log(u)
        let p = 5u64;
        let u = PadicNumber::from_i64(p, 7, PREC);
        let scaled = u.shift(3);
        let d = u
            .iwasawa_log()
            .unwrap()
            .dist_valuation(&scaled.iwasawa_log().unwrap());
        assert!(d.map_or(true, |v| v >= PREC as i64 - 1));
    }

    #[test]
    fn ring_axioms_random() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        let p = 7u64;
        for _ in 0..300 {
            let mut pick = || {
                let n = rng.gen_range(-100_000i64..100_000);
                if n == 0 {
                    PadicNumber::zero(p)
                } else {
                    PadicNumber::from_i64(p, n, PREC)
                }
            };
            let (a, b, c) = (pick(), pick(), pick());
            let assoc_l = a.add(&b).add(&c);
            let assoc_r = a.add(&b.add(&c));
            assert!(assoc_l
                .dist_valuation(&assoc_r)
                .map_or(true, |v| v >= PREC as i64 - 6));
            let dist_l = a.mul(&b.add(&c));
            let dist_r = a.mul(&b).add(&a.mul(&c));
            assert!(dist_l
                .dist_valuation(&dist_r)
                .map_or(true, |v| v >= PREC as i64 - 6));
            let comm = a.mul(&b).sub(&b.mul(&a));
            assert!(comm.is_zero_at_precision() || comm.valuation().is_none());
        }
    }
}
