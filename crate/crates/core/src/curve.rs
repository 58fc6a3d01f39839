//! Exact arithmetic on Weierstrass models over Q: invariants, the group law,
//! scalar multiplication and torsion determination.
//!
//! Everything here is exact rational arithmetic; no floating point.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CurveError {
    #[error("singular model: discriminant is zero")]
    SingularModel,
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("curve data is inconsistent: {0}")]
    InvalidContext(&'static str),
}

/// An integral Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
/// over Q, with its derived b-, c- and discriminant invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EllipticCurveQ {
    pub a1: BigInt,
    pub a2: BigInt,
    pub a3: BigInt,
    pub a4: BigInt,
    pub a6: BigInt,
    pub b2: BigInt,
    pub b4: BigInt,
    pub b6: BigInt,
    pub b8: BigInt,
    pub c4: BigInt,
    pub c6: BigInt,
    pub disc: BigInt,
    pub j: BigRational,
}

/// A rational point on an `EllipticCurveQ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointQ {
    Infinity,
    Affine { x: BigRational, y: BigRational },
}

impl PointQ {
    pub fn affine(x: BigRational, y: BigRational) -> Self {
        PointQ::Affine { x, y }
    }

    pub fn affine_int(x: i64, y: i64) -> Self {
        PointQ::Affine {
            x: BigRational::from(BigInt::from(x)),
            y: BigRational::from(BigInt::from(y)),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, PointQ::Infinity)
    }

    pub fn xy(&self) -> Option<(&BigRational, &BigRational)> {
        match self {
            PointQ::Infinity => None,
            PointQ::Affine { x, y } => Some((x, y)),
        }
    }
}

/// Builds the curve from a1..a6 and populates every derived invariant.
pub fn derive_invariants(
    a1: impl Into<BigInt>,
    a2: impl Into<BigInt>,
    a3: impl Into<BigInt>,
    a4: impl Into<BigInt>,
    a6: impl Into<BigInt>,
) -> Result<EllipticCurveQ, CurveError> {
    let (a1, a2, a3, a4, a6) = (a1.into(), a2.into(), a3.into(), a4.into(), a6.into());
    let b2 = &a1 * &a1 + 4 * &a2;
    let b4 = 2 * &a4 + &a1 * &a3;
    let b6 = &a3 * &a3 + 4 * &a6;
    let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
    let c4 = &b2 * &b2 - 24 * &b4;
    let c6 = -&b2 * &b2 * &b2 + 36 * &b2 * &b4 - 216 * &b6;
    let disc: BigInt =
        -&b2 * &b2 * &b8 - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6;
    if disc.is_zero() {
        return Err(CurveError::SingularModel);
    }
    let j = BigRational::new(&c4 * &c4 * &c4, disc.clone());
    Ok(EllipticCurveQ {
        a1,
        a2,
        a3,
        a4,
        a6,
        b2,
        b4,
        b6,
        b8,
        c4,
        c6,
        disc,
        j,
    })
}

impl EllipticCurveQ {
    pub fn from_ainvs(ainvs: &[i64; 5]) -> Result<Self, CurveError> {
        derive_invariants(ainvs[0], ainvs[1], ainvs[2], ainvs[3], ainvs[4])
    }

    pub fn ainvs(&self) -> [BigInt; 5] {
        [
            self.a1.clone(),
            self.a2.clone(),
            self.a3.clone(),
            self.a4.clone(),
            self.a6.clone(),
        ]
    }

    pub fn contains(&self, p: &PointQ) -> bool {
        match p {
            PointQ::Infinity => true,
            PointQ::Affine { x, y } => {
                let a1 = BigRational::from(self.a1.clone());
                let a2 = BigRational::from(self.a2.clone());
                let a3 = BigRational::from(self.a3.clone());
                let a4 = BigRational::from(self.a4.clone());
                let a6 = BigRational::from(self.a6.clone());
                y * y + &a1 * x * y + &a3 * y == x * x * x + &a2 * x * x + &a4 * x + &a6
            }
        }
    }

    pub fn negate(&self, p: &PointQ) -> PointQ {
        match p {
            PointQ::Infinity => PointQ::Infinity,
            PointQ::Affine { x, y } => {
                let a1 = BigRational::from(self.a1.clone());
                let a3 = BigRational::from(self.a3.clone());
                PointQ::Affine {
                    x: x.clone(),
                    y: -y - a1 * x - a3,
                }
            }
        }
    }

    /// Chord-tangent addition. Errors if either input is off the curve.
    pub fn add(&self, p: &PointQ, q: &PointQ) -> Result<PointQ, CurveError> {
        if !self.contains(p) || !self.contains(q) {
            return Err(CurveError::PointNotOnCurve);
        }
        Ok(self.add_unchecked(p, q))
    }

    pub(crate) fn add_unchecked(&self, p: &PointQ, q: &PointQ) -> PointQ {
        let (x1, y1) = match p.xy() {
            None => return q.clone(),
            Some(v) => v,
        };
        let (x2, y2) = match q.xy() {
            None => return p.clone(),
            Some(v) => v,
        };
        let a1 = BigRational::from(self.a1.clone());
        let a2 = BigRational::from(self.a2.clone());
        let a3 = BigRational::from(self.a3.clone());
        let a4 = BigRational::from(self.a4.clone());

        let lambda = if x1 == x2 {
            // either inverse points or a doubling
            if *y2 == -y1 - &a1 * x1 - &a3 {
                return PointQ::Infinity;
            }
            let num = BigRational::from(BigInt::from(3)) * x1 * x1
                + BigRational::from(BigInt::from(2)) * &a2 * x1
                + &a4
                - &a1 * y1;
            let den = BigRational::from(BigInt::from(2)) * y1 + &a1 * x1 + &a3;
            num / den
        } else {
            (y2 - y1) / (x2 - x1)
        };
        let x3 = &lambda * &lambda + &a1 * &lambda - &a2 - x1 - x2;
        let y3 = &lambda * (x1 - &x3) - y1 - &a1 * &x3 - &a3;
        PointQ::Affine { x: x3, y: y3 }
    }

    /// n*P by double-and-add; n may be negative or zero.
    pub fn mul(&self, n: i64, p: &PointQ) -> Result<PointQ, CurveError> {
        if !self.contains(p) {
            return Err(CurveError::PointNotOnCurve);
        }
        let (mut n, mut base) = if n < 0 {
            (n.unsigned_abs(), self.negate(p))
        } else {
            (n as u64, p.clone())
        };
        let mut acc = PointQ::Infinity;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add_unchecked(&acc, &base);
            }
            base = self.add_unchecked(&base, &base);
            n >>= 1;
        }
        Ok(acc)
    }

    /// Order of the rational torsion subgroup.
    ///
    /// The bound comes from gcd of point counts at five good primes > 3
    /// (torsion injects into the reduction at odd good primes); candidate
    /// points are then enumerated on the short model by Lutz-Nagell and
    /// verified by explicit multiplication.
    pub fn torsion_order(&self) -> u64 {
        let bound = self.torsion_bound(5);
        if bound == 1 {
            return 1;
        }
        let mut count = 1u64; // infinity
        for p in self.torsion_candidates() {
            if self.is_torsion(&p) {
                count += 1;
            }
        }
        count
    }

    pub(crate) fn torsion_bound(&self, num_primes: usize) -> u64 {
        let mut g: u64 = 0;
        let mut found = 0;
        let mut ell = 5u64;
        while found < num_primes {
            if arith::is_prime_u64(ell) && !(&self.disc % BigInt::from(ell)).is_zero() {
                let n = crate::reduction::count_points_any(self, ell);
                g = num_integer::gcd(g, n);
                found += 1;
                if g == 1 {
                    return 1;
                }
            }
            ell += 2;
        }
        g
    }

    /// True if some multiple nP with 1 <= n <= 12 is the identity.
    pub fn is_torsion(&self, p: &PointQ) -> bool {
        if p.is_infinity() {
            return true;
        }
        let mut acc = p.clone();
        for _ in 1..=12 {
            if acc.is_infinity() {
                return true;
            }
            acc = self.add_unchecked(&acc, p);
        }
        acc.is_infinity()
    }

    /// Lutz-Nagell candidates pulled back from Y^2 = X^3 - 27 c4 X - 54 c6.
    fn torsion_candidates(&self) -> Vec<PointQ> {
        let a_short = -27 * &self.c4;
        let b_short = -54 * &self.c6;
        // |disc of the short cubic| = 27 * |c4^3 - c6^2| / ... ; use 4A^3 + 27B^2
        let d: BigInt =
            4i32 * &a_short * &a_short * &a_short + 27i32 * &b_short * &b_short;
        let d = d.abs();
        let mut ys: Vec<BigInt> = vec![BigInt::zero()];
        for y in square_divisors(&d.magnitude().clone()) {
            ys.push(BigInt::from(y));
        }
        let mut out = Vec::new();
        for y in ys {
            let c = &b_short - &y * &y;
            for x in integer_cubic_roots(&a_short, &c) {
                for yy in [y.clone(), -y.clone()] {
                    // pull back: X = 36x + 3 b2, Y = 108(2y + a1 x + a3)
                    let xq = BigRational::new(&x - 3 * &self.b2, BigInt::from(36));
                    let eta = BigRational::new(yy.clone(), BigInt::from(108));
                    let a1 = BigRational::from(self.a1.clone());
                    let a3 = BigRational::from(self.a3.clone());
                    let yq = (eta - a1 * &xq - a3) / BigRational::from(BigInt::from(2));
                    let cand = PointQ::Affine {
                        x: xq.clone(),
                        y: yq,
                    };
                    if self.contains(&cand) && !out.contains(&cand) {
                        out.push(cand);
                    }
                }
            }
        }
        out
    }
}

/// All positive d with d^2 | n.
fn square_divisors(n: &BigUint) -> Vec<u64> {
    use num_traits::ToPrimitive;
    let factors = arith::factor(&BigInt::from(n.clone()));
    let mut divs: Vec<u64> = vec![1];
    for (p, e) in factors {
        let half = e / 2;
        if half == 0 {
            continue;
        }
        let p = match p.to_u64() {
            Some(v) => v,
            None => continue, // a torsion y-coordinate never needs a huge prime
        };
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = 1u64;
            for _ in 0..=half {
                if let Some(nd) = d.checked_mul(pk) {
                    next.push(nd);
                }
                pk = match pk.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
            }
        }
        next.sort_unstable();
        next.dedup();
        divs = next;
    }
    divs.retain(|&d| d > 0);
    divs
}

/// Integer roots of the monic cubic X^3 + a X + c, by sign bisection on each
/// monotone piece.
fn integer_cubic_roots(a: &BigInt, c: &BigInt) -> Vec<BigInt> {
    let f = |x: &BigInt| x * x * x + a * x + c;
    let bound: BigInt = BigInt::one() + a.abs().sqrt() + c.abs().nth_root(3) + 2;
    let mut breakpoints = vec![-&bound, bound.clone()];
    if a.is_negative() {
        // critical points at +- sqrt(-a/3)
        let m: BigInt = (-a / 3i32).sqrt();
        for d in [-&m - 1, -m.clone(), m.clone(), &m + 1] {
            if d.abs() < bound {
                breakpoints.push(d);
            }
        }
    }
    breakpoints.sort();
    breakpoints.dedup();
    let mut roots = Vec::new();
    for w in breakpoints.windows(2) {
        let (mut lo, mut hi) = (w[0].clone(), w[1].clone());
        let (flo, fhi) = (f(&lo), f(&hi));
        if flo.is_zero() && !roots.contains(&lo) {
            roots.push(lo.clone());
        }
        if fhi.is_zero() && !roots.contains(&hi) {
            roots.push(hi.clone());
        }
        if flo.sign() == fhi.sign() || flo.is_zero() || fhi.is_zero() {
            continue;
        }
        let rising = flo.is_negative();
        while &hi - &lo > BigInt::one() {
            let mid = (&lo + &hi) / 2;
            let fm = f(&mid);
            if fm.is_zero() {
                if !roots.contains(&mid) {
                    roots.push(mid);
                }
                break;
            }
            if fm.is_negative() == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    roots
}

/// Ingested arithmetic data the pipeline treats as known rather than
/// computed: the Mordell-Weil rank with a generator list, the torsion order,
/// and the analytic order of the Tate-Shafarevich group. Independence of the
/// generators is caller-asserted; a non-saturated set only ever scales the
/// regulator by a square integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveContext {
    pub label: String,
    pub rank: usize,
    pub generators: Vec<PointQ>,
    pub torsion_order: u64,
    pub sha_analytic_order: u64,
    /// Tamagawa numbers over a base field other than Q, keyed by the residue
    /// characteristic; when absent the rational Tamagawa numbers are used.
    pub tamagawa_overrides: BTreeMap<u64, u64>,
}

impl CurveContext {
    /// Sanity checks against the curve: generator count matches the rank,
    /// every generator lies on the curve and is non-torsion, and the torsion
    /// order is one allowed by Mazur's theorem.
    pub fn validate(&self, e: &EllipticCurveQ) -> Result<(), CurveError> {
        if self.generators.len() != self.rank {
            return Err(CurveError::InvalidContext("generator count differs from rank"));
        }
        for g in &self.generators {
            if !e.contains(g) {
                return Err(CurveError::PointNotOnCurve);
            }
            if e.is_torsion(g) {
                return Err(CurveError::InvalidContext("generator is a torsion point"));
            }
        }
        let allowed = matches!(self.torsion_order, 1..=10 | 12 | 16);
        if !allowed {
            return Err(CurveError::InvalidContext("torsion order not allowed by Mazur"));
        }
        if self.sha_analytic_order == 0 {
            return Err(CurveError::InvalidContext("sha order must be positive"));
        }
        Ok(())
    }
}
