//! Finite-precision power series over Z_p: Weierstrass preparation and the
//! mu/lambda invariants, order of vanishing at T = 0, the Euler-characteristic
//! valuation, and the lambda-equals-rank verdict.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::padic::PadicNumber;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IwasawaError {
    #[error("series is zero (or has no unit coefficient) at working precision")]
    PrecisionInsufficient,
    #[error("euler characteristic valuation came out negative: inconsistent inputs")]
    NegativeValuation,
}

/// Truncated power series over Z_p: coefficients a_0..a_D at relative
/// precision `prec` digits each.
#[derive(Debug, Clone)]
pub struct ZpPowerSeries {
    pub p: u64,
    pub coeffs: Vec<PadicNumber>,
    pub prec: u32,
}

/// Default T-adic truncation order.
pub const DEFAULT_TRUNCATION: usize = 64;
/// Default coefficient precision in p-adic digits.
pub const DEFAULT_PRECISION: u32 = 20;

impl ZpPowerSeries {
    pub fn new(p: u64, coeffs: Vec<PadicNumber>, prec: u32) -> Self {
        assert!(coeffs.iter().all(|c| c.prime() == p));
        ZpPowerSeries { p, coeffs, prec }
    }

    pub fn from_i64(p: u64, coeffs: &[i64], prec: u32) -> Self {
        Self::new(
            p,
            coeffs
                .iter()
                .map(|&c| PadicNumber::from_i64(p, c, prec))
                .collect(),
            prec,
        )
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Product truncated to the longer operand's order.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p);
        let d = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![PadicNumber::zero(self.p); d];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= d {
                    break;
                }
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        ZpPowerSeries::new(self.p, out, self.prec.min(other.prec))
    }

    /// Multiplies every coefficient by p^k.
    pub fn shift_p(&self, k: i64) -> Self {
        ZpPowerSeries::new(
            self.p,
            self.coeffs.iter().map(|c| c.shift(k)).collect(),
            self.prec,
        )
    }

    /// Least index with a coefficient that is nonzero at working precision.
    pub fn ord_at_zero(&self) -> Result<usize, IwasawaError> {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero_at_precision())
            .ok_or(IwasawaError::PrecisionInsufficient)
    }

    pub fn leading_coefficient(&self) -> Result<PadicNumber, IwasawaError> {
        Ok(self.coeffs[self.ord_at_zero()?].clone())
    }
}

/// Result of Weierstrass preparation: f = p^mu * distinguished * unit.
#[derive(Debug, Clone)]
pub struct PreparationResult {
    pub mu: u32,
    pub lambda: usize,
    /// Monic of degree lambda; non-leading coefficients divisible by p.
    pub distinguished: Vec<PadicNumber>,
    pub unit_part: ZpPowerSeries,
}

/// Weierstrass preparation at finite precision by Hensel lifting of the
/// factorization g = T^lambda * (unit) mod p.
pub fn weierstrass_preparation(f: &ZpPowerSeries) -> Result<PreparationResult, IwasawaError> {
    let p = f.p;
    let d = f.coeffs.len();
    // mu: minimum coefficient valuation among coefficients visible as nonzero
    let mut mu_opt: Option<i64> = None;
    for c in &f.coeffs {
        if let Some(v) = c.valuation() {
            assert!(v >= 0, "series coefficient not in Z_p");
            mu_opt = Some(mu_opt.map_or(v, |m| m.min(v)));
        }
    }
    let mu = mu_opt.ok_or(IwasawaError::PrecisionInsufficient)? as u32;
    // every fuzzy-zero coefficient must be zero at least past p^mu
    for c in &f.coeffs {
        if c.valuation().is_none() {
            if let Some(a) = c.abs_precision() {
                if a < mu as i64 {
                    return Err(IwasawaError::PrecisionInsufficient);
                }
            }
        }
    }
    // lambda: first unit coefficient of f / p^mu; must sit strictly below D
    let lambda = f
        .coeffs
        .iter()
        .position(|c| c.valuation() == Some(mu as i64))
        .ok_or(IwasawaError::PrecisionInsufficient)?;
    if lambda + 1 >= d && d > 1 {
        // boundary witness: refuse rather than guess
        return Err(IwasawaError::PrecisionInsufficient);
    }

    // Honest output precision: coefficients of f beyond T^D are unknown, and
    // perturbing the unit's top lambda coefficients is invisible mod T^D at
    // one p-level but feeds back lambda T-degrees lower at the next, reaching
    // the distinguished part after about D/lambda levels. So P is only
    // determined mod p^(D/lambda) no matter how precise the coefficients are.
    let w = if lambda == 0 {
        f.prec
    } else {
        f.prec.min((d / lambda) as u32)
    };

    // integer coefficients of g = f / p^mu modulo p^w
    let modulus = BigUint::from(p).pow(w);
    let g: Vec<BigUint> = f
        .coeffs
        .iter()
        .map(|c| match (c.valuation(), c.unit_part()) {
            (Some(v), Some(u)) => {
                let shifted = u * BigUint::from(p).pow((v - mu as i64) as u32);
                shifted % &modulus
            }
            _ => BigUint::zero(),
        })
        .collect();

    // initial factors mod p: P = T^lambda, u = g shifted down by lambda
    let pb = BigUint::from(p);
    let mut pol: Vec<BigUint> = vec![BigUint::zero(); lambda + 1];
    pol[lambda] = BigUint::one();
    let mut unit: Vec<BigUint> = (lambda..d).map(|i| &g[i] % &pb).collect();
    unit.resize(d, BigUint::zero());

    // reductions mod p stay fixed through the ladder; convolve them in u64
    let unit0: Vec<u64> = unit.iter().map(|u| u.to_u64().unwrap()).collect();
    assert!(unit0[0] % p != 0, "unit part must have unit constant term");
    let conv_mod_p = |a: &[u64], b: &[u64]| -> Vec<u64> {
        let mut out = vec![0u64; d];
        for i in 0..d {
            if a[i] == 0 {
                continue;
            }
            for j in 0..d - i {
                out[i + j] = (out[i + j] + crate::arith::mul_mod(a[i], b[j], p)) % p;
            }
        }
        out
    };
    // term-by-term inverse of the unit series modulo p
    let inv_unit_mod_p: Vec<u64> = {
        let u0_inv = crate::arith::inv_mod(unit0[0], p);
        let mut inv = vec![0u64; d];
        inv[0] = u0_inv;
        for i in 1..d {
            let mut acc = 0u64;
            for j in 0..i {
                acc = (acc + crate::arith::mul_mod(inv[j], unit0[i - j], p)) % p;
            }
            inv[i] = crate::arith::mul_mod(u0_inv, (p - acc) % p, p);
        }
        inv
    };

    // Hensel ladder: after step k the factorization holds mod p^{k+1}
    for k in 1..w {
        let pk = BigUint::from(p).pow(k);
        let pk1 = BigUint::from(p).pow(k + 1);
        // prod = P * u mod (p^{k+1}, T^D)
        let mut prod = vec![BigUint::zero(); d];
        for (i, ai) in pol.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in unit.iter().enumerate() {
                if i + j >= d {
                    break;
                }
                prod[i + j] = (&prod[i + j] + ai * bj) % &pk1;
            }
        }
        // e = (g - prod) / p^k mod p
        let mut e = vec![0u64; d];
        for i in 0..d {
            let diff = (&g[i] % &pk1 + &pk1 - &prod[i]) % &pk1;
            let (q, r) = num_integer::Integer::div_rem(&diff, &pk);
            assert!(r.is_zero(), "factorization drifted off mod p^k");
            e[i] = (q % &pb).to_u64().unwrap();
        }
        // solve dP * u + T^lambda * du = e mod p via h = e / u:
        // dP = h below T^lambda, du = u * (h >> lambda)
        let h = conv_mod_p(&e, &inv_unit_mod_p);
        let mut h_hi = vec![0u64; d];
        h_hi[..d - lambda].copy_from_slice(&h[lambda..]);
        let delta_u = conv_mod_p(&unit0, &h_hi);
        for (i, item) in pol.iter_mut().enumerate().take(lambda) {
            *item = (&*item + &pk * h[i]) % &pk1;
        }
        for i in 0..d {
            unit[i] = (&unit[i] + &pk * delta_u[i]) % &pk1;
        }
    }

    // value known mod p^a -> p-adic number with that absolute precision
    let to_padic = |c: &BigUint, a: u32| -> PadicNumber {
        let c = c % BigUint::from(p).pow(a);
        if c.is_zero() {
            return PadicNumber::fuzzy_zero(p, a as i64);
        }
        let n = PadicNumber::from_int(p, &BigInt::from(c), w);
        let v = n.valuation().unwrap() as u32;
        n.truncate(a - v)
    };
    let dist: Vec<PadicNumber> = pol.iter().map(|c| to_padic(c, w)).collect();
    // the unit's coefficient at T^i is itself only sound to about (D - i) /
    // lambda digits: junk from beyond the truncation reaches it that quickly
    let unit_series = ZpPowerSeries::new(
        p,
        unit.iter()
            .enumerate()
            .map(|(i, c)| {
                let a = if lambda == 0 {
                    w
                } else {
                    w.min((((d - i) + lambda - 1) / lambda) as u32).max(1)
                };
                to_padic(c, a)
            })
            .collect(),
        w,
    );
    Ok(PreparationResult {
        mu,
        lambda,
        distinguished: dist,
        unit_part: unit_series,
    })
}

/// Valuation of the leading coefficient a_r from the Euler-characteristic
/// formula: val(R_p) + val(#Sha) + sum val(c_v) + 2 val(#E~(F_p)) - 2 val(#tors).
pub fn euler_char_valuation(
    _rank: u32,
    val_rp: i64,
    sha_order: u64,
    tamagawa_list: &[u64],
    counts_at_p: &[u64],
    torsion_order: u64,
    p: u64,
) -> Result<u32, IwasawaError> {
    let vp = |n: u64| crate::arith::valuation(&BigInt::from(n), p) as i64;
    let mut total = val_rp + vp(sha_order);
    for &c in tamagawa_list {
        total += vp(c);
    }
    for &n in counts_at_p {
        total += 2 * vp(n);
    }
    total -= 2 * vp(torsion_order);
    if total < 0 {
        return Err(IwasawaError::NegativeValuation);
    }
    Ok(total as u32)
}

/// Outcome of the leading-coefficient unit test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaVerdict {
    /// a_r is a unit, so mu = 0 and lambda = rank.
    Proven { mu: u32, lambda: u32 },
    /// positive valuation: lambda > rank or mu > 0, indistinguishable here
    Inconclusive,
}

pub fn lambda_verdict(val_ar: u32, rank: u32) -> LambdaVerdict {
    if val_ar == 0 {
        LambdaVerdict::Proven { mu: 0, lambda: rank }
    } else {
        LambdaVerdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    const P: u64 = 5;
    const W: u32 = 20;

    fn series(coeffs: &[i64]) -> ZpPowerSeries {
        ZpPowerSeries::from_i64(P, coeffs, W)
    }

    #[test]
    fn prepare_t_squared() {
        let mut c = vec![0i64; 8];
        c[2] = 1;
        let r = weierstrass_preparation(&series(&c)).unwrap();
        assert_eq!((r.mu, r.lambda), (0, 2));
        assert!(r.distinguished[0].is_zero_at_precision());
        assert!(r.distinguished[1].is_zero_at_precision());
        assert_eq!(r.distinguished[2].valuation(), Some(0));
        assert_eq!(r.unit_part.coeffs[0].valuation(), Some(0));
    }

    #[test]
    fn prepare_p_times_unit() {
        let f = series(&[5, 5, 0, 0]);
        let r = weierstrass_preparation(&f).unwrap();
        assert_eq!((r.mu, r.lambda), (1, 0));
        assert_eq!(r.distinguished.len(), 1);
        assert_eq!(r.distinguished[0].valuation(), Some(0));
        // unit part is 1 + T
        assert_eq!(
            r.unit_part.coeffs[1].dist_valuation(&PadicNumber::one(P, W)),
            None
        );
    }

    fn reconstruct(r: &PreparationResult, d: usize) -> ZpPowerSeries {
        let mut dist = r.distinguished.clone();
        dist.resize(d, PadicNumber::zero(P));
        let ds = ZpPowerSeries::new(P, dist, W);
        ds.mul(&r.unit_part).shift_p(r.mu as i64)
    }

    #[test]
    fn prepare_two_root_product() {
        // (T + p)(T + p^2) * (2 + T + 3T^2), padded so nothing truncates
        let a = series(&[5, 1, 0, 0, 0, 0, 0, 0]);
        let b = series(&[25, 1, 0, 0, 0, 0, 0, 0]);
        let u = series(&[2, 1, 3, 0, 0, 0, 0, 0]);
        let f = a.mul(&b).mul(&u);
        let r = weierstrass_preparation(&f).unwrap();
        assert_eq!((r.mu, r.lambda), (0, 2));
        // distinguished = T^2 + (p + p^2) T + p^3
        let expect = [125i64, 30, 1];
        for (i, e) in expect.iter().enumerate() {
            let d = r.distinguished[i]
                .dist_valuation(&PadicNumber::from_i64(P, *e, W));
            assert!(d.map_or(true, |v| v >= W as i64 - 2), "coeff {i}: {d:?}");
        }
        // ord/leading on the product: r = 0, val(a_0) = 3
        assert_eq!(f.ord_at_zero().unwrap(), 0);
        assert_eq!(f.leading_coefficient().unwrap().valuation(), Some(3));
    }

    #[test]
    fn ord_and_leading_examples() {
        let mut c = vec![0i64; 8];
        c[3] = 1;
        c[4] = 1;
        let f = series(&c); // T^3 (1 + T)
        assert_eq!(f.ord_at_zero().unwrap(), 3);
        assert_eq!(f.leading_coefficient().unwrap().valuation(), Some(0));
        let g = series(&[0, 25, 0, 0]); // p^2 T
        assert_eq!(g.ord_at_zero().unwrap(), 1);
        assert_eq!(g.leading_coefficient().unwrap().valuation(), Some(2));
    }

    #[test]
    fn zero_series_is_rejected() {
        let z = ZpPowerSeries::new(P, vec![PadicNumber::zero(P); 4], W);
        assert_eq!(
            weierstrass_preparation(&z).unwrap_err(),
            IwasawaError::PrecisionInsufficient
        );
        assert_eq!(z.ord_at_zero().unwrap_err(), IwasawaError::PrecisionInsufficient);
    }

    #[test]
    fn preparation_round_trip_1000() {
        let mut rng = StdRng::seed_from_u64(1234);
        // the product below is an exact polynomial of degree < d, and d is
        // large enough (lambda_max * W) that the recovered distinguished part
        // carries full coefficient precision
        let d = 96usize;
        for trial in 0..1000 {
            let mu = rng.gen_range(0..3u32);
            let lambda = rng.gen_range(0..5usize);
            // distinguished: monic, lower coefficients divisible by p
            let mut dist = vec![0i64; d];
            dist[lambda] = 1;
            let mut dvec: Vec<PadicNumber> = dist
                .iter()
                .map(|&c| PadicNumber::from_i64(P, c, W))
                .collect();
            let mut dist_expect = vec![BigUint::zero(); lambda + 1];
            dist_expect[lambda] = BigUint::one();
            for i in 0..lambda {
                let c = P as i64 * rng.gen_range(-200..200i64);
                dvec[i] = PadicNumber::from_i64(P, c, W);
                let m = BigUint::from(P).pow(W);
                let cc = ((BigInt::from(c) % BigInt::from(m.clone())
                    + BigInt::from(m.clone()))
                    % BigInt::from(m.clone()))
                .to_biguint()
                .unwrap();
                dist_expect[i] = cc;
            }
            // unit: random coefficients, unit constant term
            // keep deg(dist * unit) < d so truncation loses nothing
            let mut uc: Vec<i64> = (0..d)
                .map(|i| if i + 5 < d { rng.gen_range(-400..400) } else { 0 })
                .collect();
            if uc[0] % P as i64 == 0 {
                uc[0] += 1;
            }
            let unit = series(&uc);
            let dser = ZpPowerSeries::new(P, dvec, W);
            let f = dser.mul(&unit).shift_p(mu as i64);
            let r = weierstrass_preparation(&f).expect("preparation succeeds");
            assert_eq!((r.mu, r.lambda), (mu, lambda), "trial {trial}");
            // distinguished coefficients match mod p^(W - guard)
            let guard = 3;
            let mstrict = BigUint::from(P).pow(W - guard);
            for i in 0..=lambda {
                let got = match (r.distinguished[i].valuation(), r.distinguished[i].unit_part()) {
                    (Some(v), Some(u)) => {
                        u * BigUint::from(P).pow(v as u32) % &mstrict
                    }
                    _ => BigUint::zero(),
                };
                assert_eq!(
                    got,
                    &dist_expect[i] % &mstrict,
                    "trial {trial} coeff {i}"
                );
            }
            // reconstruction identity
            let back = reconstruct(&r, d);
            for i in 0..d {
                let dv = back.coeffs[i].dist_valuation(&f.coeffs[i]);
                assert!(
                    dv.map_or(true, |v| v >= (W - guard) as i64 + mu as i64),
                    "trial {trial} reconstruct coeff {i}: {dv:?}"
                );
            }
            // unit leading coefficient at T=0 iff (mu, lambda) = (0, ord)
            let ord = f.ord_at_zero().unwrap();
            let lead_unit = f.leading_coefficient().unwrap().valuation() == Some(0);
            assert_eq!(lead_unit, mu == 0 && lambda == ord, "trial {trial}");
        }
    }

    #[test]
    fn euler_char_examples() {
        // 37a1 at p = 5
        assert_eq!(
            euler_char_valuation(1, 0, 1, &[1], &[8], 1, 5).unwrap(),
            0
        );
        // sha = 25 contributes 2
        assert_eq!(
            euler_char_valuation(1, 0, 25, &[1], &[8], 1, 5).unwrap(),
            2
        );
        // symmetric in the tamagawa list
        assert_eq!(
            euler_char_valuation(2, 0, 1, &[5, 3, 25], &[6], 1, 5),
            euler_char_valuation(2, 0, 1, &[25, 5, 3], &[6], 1, 5)
        );
        // torsion can push it negative: flagged
        assert_eq!(
            euler_char_valuation(1, 0, 1, &[1], &[7], 5, 5).unwrap_err(),
            IwasawaError::NegativeValuation
        );
    }

    #[test]
    fn lambda_verdicts() {
        assert_eq!(
            lambda_verdict(0, 1),
            LambdaVerdict::Proven { mu: 0, lambda: 1 }
        );
        assert_eq!(lambda_verdict(2, 1), LambdaVerdict::Inconclusive);
        assert_eq!(
            lambda_verdict(0, 0),
            LambdaVerdict::Proven { mu: 0, lambda: 0 }
        );
    }
}
