//! Curves and points over prime fields: reduction of rational data mod p,
//! the group law on `PointFp`, and point counting (exhaustive and
//! baby-step/giant-step over the Hasse interval).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::HashMap;

use crate::arith::{inv_mod, legendre, mul_mod, sqrt_mod};
use crate::curve::{EllipticCurveQ, PointQ};

/// A Weierstrass model with coefficients reduced mod an odd (or 2) prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveFp {
    pub p: u64,
    pub a1: u64,
    pub a2: u64,
    pub a3: u64,
    pub a4: u64,
    pub a6: u64,
}

/// A point on a `CurveFp`; coordinates are residues mod p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointFp {
    Infinity,
    Affine { x: u64, y: u64 },
}

fn red(n: &BigInt, p: u64) -> u64 {
    let m = n % BigInt::from(p);
    let m = if m.is_negative() { m + BigInt::from(p) } else { m };
    m.to_u64().unwrap()
}

/// Residue of a rational with denominator prime to p; None if p divides it.
pub fn red_rational(q: &BigRational, p: u64) -> Option<u64> {
    let den = red(q.denom(), p);
    if den == 0 {
        return None;
    }
    Some(mul_mod(red(q.numer(), p), inv_mod(den, p), p))
}

impl CurveFp {
    pub fn reduce(e: &EllipticCurveQ, p: u64) -> CurveFp {
        CurveFp {
            p,
            a1: red(&e.a1, p),
            a2: red(&e.a2, p),
            a3: red(&e.a3, p),
            a4: red(&e.a4, p),
            a6: red(&e.a6, p),
        }
    }

    /// Reduction of a rational point; None when a denominator is divisible by p.
    pub fn reduce_point(&self, pt: &PointQ) -> Option<PointFp> {
        match pt {
            PointQ::Infinity => Some(PointFp::Infinity),
            PointQ::Affine { x, y } => {
                // a point with p in a denominator reduces to infinity
                let one = BigInt::from(1);
                let vx = crate::arith::valuation(
                    if x.is_zero() { &one } else { x.denom() },
                    self.p,
                );
                let vy = crate::arith::valuation(
                    if y.is_zero() { &one } else { y.denom() },
                    self.p,
                );
                if vx > 0 || vy > 0 {
                    return Some(PointFp::Infinity);
                }
                Some(PointFp::Affine {
                    x: red_rational(x, self.p)?,
                    y: red_rational(y, self.p)?,
                })
            }
        }
    }

    pub fn contains(&self, pt: &PointFp) -> bool {
        match *pt {
            PointFp::Infinity => true,
            PointFp::Affine { x, y } => {
                let p = self.p;
                let lhs = (mul_mod(y, y, p)
                    + mul_mod(mul_mod(self.a1, x, p), y, p)
                    + mul_mod(self.a3, y, p))
                    % p;
                let x2 = mul_mod(x, x, p);
                let rhs = (mul_mod(x2, x, p)
                    + mul_mod(self.a2, x2, p)
                    + mul_mod(self.a4, x, p)
                    + self.a6)
                    % p;
                lhs == rhs
            }
        }
    }

    pub fn negate(&self, pt: &PointFp) -> PointFp {
        match *pt {
            PointFp::Infinity => PointFp::Infinity,
            PointFp::Affine { x, y } => {
                let p = self.p;
                let ny = (2 * p - y - mul_mod(self.a1, x, p) % p - self.a3) % p;
                PointFp::Affine { x, y: ny % p }
            }
        }
    }

    pub fn add(&self, pt: &PointFp, qt: &PointFp) -> PointFp {
        let p = self.p;
        let (x1, y1) = match *pt {
            PointFp::Infinity => return *qt,
            PointFp::Affine { x, y } => (x, y),
        };
        let (x2, y2) = match *qt {
            PointFp::Infinity => return *pt,
            PointFp::Affine { x, y } => (x, y),
        };
        let lambda = if x1 == x2 {
            if *qt == self.negate(pt) {
                return PointFp::Infinity;
            }
            let num = (3 * mul_mod(x1, x1, p) % p
                + 2 * mul_mod(self.a2, x1, p) % p
                + self.a4
                + p
                - mul_mod(self.a1, y1, p))
                % p;
            let den = (2 * y1 + mul_mod(self.a1, x1, p) + self.a3) % p;
            mul_mod(num, inv_mod(den, p), p)
        } else {
            let num = (y2 + p - y1) % p;
            let den = (x2 + p - x1) % p;
            mul_mod(num, inv_mod(den, p), p)
        };
        let x3 = (mul_mod(lambda, lambda, p) + mul_mod(self.a1, lambda, p) + 3 * p
            - self.a2
            - x1
            - x2)
            % p;
        let y3 = (mul_mod(lambda, (x1 + p - x3) % p, p) + 3 * p
            - y1
            - mul_mod(self.a1, x3, p)
            - self.a3)
            % p;
        PointFp::Affine { x: x3, y: y3 }
    }

    pub fn mul(&self, n: u64, pt: &PointFp) -> PointFp {
        let mut acc = PointFp::Infinity;
        let mut base = *pt;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            n >>= 1;
        }
        acc
    }

    /// Exhaustive count of points including infinity.
    pub fn count_brute(&self) -> u64 {
        let p = self.p;
        if p == 2 {
            let mut count = 1;
            for x in 0..2 {
                for y in 0..2 {
                    if self.contains(&PointFp::Affine { x, y }) {
                        count += 1;
                    }
                }
            }
            return count;
        }
        // complete the square: (2y + a1 x + a3)^2 = 4 f(x) + (a1 x + a3)^2
        let mut count = p + 1;
        for x in 0..p {
            let d = self.disc_of_y_quadratic(x);
            count = (count as i64 + legendre(d as i64, p) as i64) as u64;
        }
        count
    }

    fn disc_of_y_quadratic(&self, x: u64) -> u64 {
        let p = self.p;
        let x2 = mul_mod(x, x, p);
        let f = (mul_mod(x2, x, p)
            + mul_mod(self.a2, x2, p)
            + mul_mod(self.a4, x, p)
            + self.a6)
            % p;
        let l = (mul_mod(self.a1, x, p) + self.a3) % p;
        (4 * f % p + mul_mod(l, l, p)) % p
    }

    /// A uniformly random affine point (requires good reduction).
    fn random_point(&self, rng: &mut StdRng) -> PointFp {
        let p = self.p;
        loop {
            let x = rng.gen_range(0..p);
            let d = self.disc_of_y_quadratic(x);
            if let Some(r) = sqrt_mod(d, p) {
                // y = (r - a1 x - a3) / 2
                let l = (mul_mod(self.a1, x, p) + self.a3) % p;
                let y = mul_mod((r + 2 * p - l) % p, inv_mod(2, p), p);
                let pt = PointFp::Affine { x, y };
                debug_assert!(self.contains(&pt));
                return pt;
            }
        }
    }

    /// All n in [lo, hi] with n*P = O, by baby-step/giant-step.
    fn order_candidates(&self, pt: &PointFp, lo: u64, hi: u64) -> Vec<u64> {
        let len = hi - lo + 1;
        let m = (len as f64).sqrt().ceil() as u64 + 1;
        // baby steps: j*P for j in 0..m
        let mut table: HashMap<PointFp, Vec<u64>> = HashMap::new();
        let mut acc = PointFp::Infinity;
        for j in 0..m {
            table.entry(acc).or_default().push(j);
            acc = self.add(&acc, pt);
        }
        let mp = self.mul(m, pt);
        let mut out = Vec::new();
        // (lo + i*m + j)*P = O  <=>  (lo + i*m)*P = -j*P
        let mut giant = self.mul(lo % (1 << 62), pt); // lo*P
        let mut i = 0u64;
        while lo + i * m <= hi {
            let neg = self.negate(&giant);
            if let Some(js) = table.get(&neg) {
                for &j in js {
                    let n = lo + i * m + j;
                    if n <= hi && self.mul(n, pt) == PointFp::Infinity {
                        out.push(n);
                    }
                }
            }
            giant = self.add(&giant, &mp);
            i += 1;
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Group order by BSGS on random points, intersecting Hasse-interval
    /// candidates until unique.
    pub fn count_bsgs(&self) -> u64 {
        let p = self.p;
        // below ~100 the Hasse interval can hold several multiples of the
        // group exponent, so point orders cannot isolate the group order;
        // exhaustive counting is cheaper there anyway
        if p < 100 {
            return self.count_brute();
        }
        let own = self.bsgs_candidates();
        if own.len() == 1 {
            return own[0];
        }
        // the group exponent has several multiples in the Hasse interval;
        // disambiguate via the quadratic twist, whose order N' satisfies
        // N + N' = 2p + 2
        let twisted = self.quadratic_twist().bsgs_candidates();
        let merged: Vec<u64> = own
            .into_iter()
            .filter(|n| twisted.contains(&(2 * p + 2 - n)))
            .collect();
        if merged.len() == 1 {
            return merged[0];
        }
        // both the curve and its twist have tiny exponent; only possible for
        // small p, where exhaustive counting is cheap
        self.count_brute()
    }

    /// Candidate group orders: every n in the Hasse interval killing 64
    /// random points, i.e. the interval's multiples of the observed exponent.
    fn bsgs_candidates(&self) -> Vec<u64> {
        let p = self.p;
        let two_sqrt = (2.0 * (p as f64).sqrt()).floor() as u64 + 1;
        let lo = p + 1 - two_sqrt;
        let hi = p + 1 + two_sqrt;
        let mut rng = StdRng::seed_from_u64(0x9e3779b97f4a7c15 ^ p);
        let mut candidates: Option<Vec<u64>> = None;
        for _ in 0..64 {
            let pt = self.random_point(&mut rng);
            let cs = self.order_candidates(&pt, lo, hi);
            let merged = match candidates {
                None => cs,
                Some(prev) => prev.into_iter().filter(|n| cs.contains(n)).collect(),
            };
            assert!(!merged.is_empty(), "BSGS lost the group order");
            if merged.len() == 1 {
                return merged;
            }
            candidates = Some(merged);
        }
        candidates.unwrap()
    }

    /// A quadratic twist by the least non-residue, on the short model
    /// y^2 = x^3 - 27 c4 x - 54 c6 (isomorphic to self when p >= 5).
    fn quadratic_twist(&self) -> CurveFp {
        let p = self.p;
        assert!(p >= 5, "short model needs p prime to 6");
        let b2 = (mul_mod(self.a1, self.a1, p) + 4 * self.a2) % p;
        let b4 = (2 * self.a4 % p + mul_mod(self.a1, self.a3, p)) % p;
        let b6 = (mul_mod(self.a3, self.a3, p) + 4 * self.a6) % p;
        let c4 = (mul_mod(b2, b2, p) + p - 24 * b4 % p) % p;
        let t1 = mul_mod(mul_mod(b2, b2, p), b2, p);
        let t2 = mul_mod(mul_mod(36 % p, b2, p), b4, p);
        let t3 = mul_mod(216 % p, b6, p);
        let c6 = (t2 + 2 * p - t1 - t3) % p;
        let a = (p - mul_mod(27 % p, c4, p)) % p;
        let b = (p - mul_mod(54 % p, c6, p)) % p;
        let mut d = 2;
        while legendre(d as i64, p) != -1 {
            d += 1;
        }
        let d2 = mul_mod(d, d, p);
        CurveFp {
            p,
            a1: 0,
            a2: 0,
            a3: 0,
            a4: mul_mod(a, d2, p),
            a6: mul_mod(b, mul_mod(d2, d, p), p),
        }
    }

    /// Counting dispatch: exhaustive below 2^12, BSGS above.
    pub fn count(&self) -> u64 {
        if self.p < (1 << 12) {
            self.count_brute()
        } else {
            self.count_bsgs()
        }
    }
}
