//! Cyclotomic p-adic heights via the Mazur-Tate sigma function.
//!
//! Pipeline: put the curve on a minimal model, compute the sigma series from
//! the ODE -(d/dz)^2 log sigma = x(z) + c with c = (a1^2 + 4a2 - E_2)/12 and
//! z the formal logarithm, then evaluate it at t(NP) for a multiple NP that
//! lies in the formal group at p and reduces to a nonsingular point at every
//! bad place. Heights use the Iwasawa logarithm (log p = 0) and carry no
//! extra 1/p factor; the regulator normalized by p^rank is the quantity
//! whose unit-ness feeds the Euler-characteristic criterion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::valuation;
use crate::curve::{CurveError, EllipticCurveQ, PointQ};
use crate::iwasawa::ZpPowerSeries;
use crate::kedlaya::{e2, KedlayaError};
use crate::padic::{PadicError, PadicNumber};
use crate::reduction::{bad_primes, classify, minimal_model, tate_local, MinimalModel};

#[derive(Debug, Error)]
pub enum HeightError {
    #[error("prime {prime} is unusable: need an odd prime >= 5 of good ordinary reduction")]
    BadPrime { prime: u64 },
    #[error("E is supersingular at {prime}")]
    SupersingularPrime { prime: u64 },
    #[error("point is torsion: the canonical height pairing is degenerate there")]
    TorsionPoint,
    #[error("point does not lie on the curve")]
    PointNotOnCurve,
    #[error("internal consistency check failed: {0}")]
    ConsistencyCheck(&'static str),
    #[error("p-adic arithmetic error: {0}")]
    Arithmetic(#[from] PadicError),
    #[error("curve arithmetic error: {0}")]
    Curve(#[from] CurveError),
}

impl From<KedlayaError> for HeightError {
    fn from(e: KedlayaError) -> Self {
        match e {
            KedlayaError::SupersingularPrime { prime } => {
                HeightError::SupersingularPrime { prime }
            }
            KedlayaError::BadPrime { prime } => HeightError::BadPrime { prime },
            KedlayaError::PrecisionLoss => HeightError::ConsistencyCheck("kedlaya precision"),
            KedlayaError::Arithmetic(e) => HeightError::Arithmetic(e),
        }
    }
}

// ---- truncated power series over Q_p, index = exponent ----

type Ser = Vec<PadicNumber>;

fn ser_zero(p: u64, d: usize) -> Ser {
    vec![PadicNumber::zero(p); d]
}

fn ser_mul(a: &Ser, b: &Ser, d: usize) -> Ser {
    let p = a[0].prime();
    let mut out = ser_zero(p, d);
    for (i, ai) in a.iter().enumerate().take(d) {
        if ai.is_exact_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(d - i) {
            out[i + j] = out[i + j].add(&ai.mul(bj));
        }
    }
    out
}

fn ser_scale(a: &Ser, c: &PadicNumber) -> Ser {
    a.iter().map(|x| x.mul(c)).collect()
}

/// Multiplicative inverse of a series with unit constant term.
fn ser_inv(a: &Ser, d: usize) -> Result<Ser, HeightError> {
    let p = a[0].prime();
    let mut inv = ser_zero(p, d);
    inv[0] = PadicNumber::one(p, a[0].precision().unwrap_or(20)).div(&a[0])?;
    for n in 1..d {
        let mut acc = PadicNumber::zero(p);
        for k in 1..=n.min(a.len() - 1) {
            acc = acc.add(&a[k].mul(&inv[n - k]));
        }
        inv[n] = acc.mul(&inv[0]).neg();
    }
    Ok(inv)
}

/// Antiderivative mapping t^k to t^{k+1}/(k+1), zero constant term.
fn ser_antider(a: &Ser, d: usize) -> Result<Ser, HeightError> {
    let p = a[0].prime();
    let mut out = ser_zero(p, d);
    for k in 0..d - 1 {
        let div = PadicNumber::from_i64(p, (k + 1) as i64, 40);
        out[k + 1] = a[k].div(&div)?;
    }
    Ok(out)
}

/// The Mazur-Tate sigma function sigma(t) = t + ... as a series in the
/// formal parameter t = -x/y of the given model, with `trunc` coefficients.
pub fn sigma_series(
    e: &EllipticCurveQ,
    p: u64,
    prec: u32,
    trunc: usize,
) -> Result<ZpPowerSeries, HeightError> {
    let d = trunc.max(8);
    // guard digits cover the divisions by k in both integrations and the exp
    let mut log_d = 0u32;
    let mut acc = 1u64;
    while acc < d as u64 {
        acc *= p;
        log_d += 1;
    }
    let wk = prec + 2 * log_d + 6;
    let e2val = e2(e, p, wk)?;

    let from_i = |n: &BigInt| PadicNumber::from_int(p, n, wk);
    let from_i64 = |n: i64| PadicNumber::from_i64(p, n, wk);
    let a1 = from_i(&e.a1);
    let a2 = from_i(&e.a2);
    let a3 = from_i(&e.a3);
    let a4 = from_i(&e.a4);
    let a6 = from_i(&e.a6);

    // w(t) = t^3 (1 + ...) from w = t^3 + a1 t w + a2 t^2 w + a3 w^2
    //        + a4 t w^2 + a6 w^3; iterate on the unit part u = w / t^3:
    // u = 1 + a1 t u + a2 t^2 u + a3 t^3 u^2 + a4 t^4 u^2 + a6 t^6 u^3
    let mut u = ser_zero(p, d);
    u[0] = from_i64(1);
    for _ in 0..d {
        let u2 = ser_mul(&u, &u, d);
        let u3 = ser_mul(&u2, &u, d);
        let mut next = ser_zero(p, d);
        next[0] = from_i64(1);
        for k in 0..d {
            if k >= 1 {
                next[k] = next[k].add(&a1.mul(&u[k - 1]));
            }
            if k >= 2 {
                next[k] = next[k].add(&a2.mul(&u[k - 2]));
            }
            if k >= 3 {
                next[k] = next[k].add(&a3.mul(&u2[k - 3]));
            }
            if k >= 4 {
                next[k] = next[k].add(&a4.mul(&u2[k - 4]));
            }
            if k >= 6 {
                next[k] = next[k].add(&a6.mul(&u3[k - 6]));
            }
        }
        u = next;
    }
    // x = t^{-2} u^{-1}, y = -t^{-3} u^{-1}
    let uinv = ser_inv(&u, d)?;

    // omega = x'(t) dt / (2y + a1 x + a3)
    //       = (-2 uinv + t uinv') / (-2 uinv + a1 t uinv + a3 t^3)
    let mut num = ser_scale(&uinv, &from_i64(-2));
    for k in 1..d {
        // + t * d/dt uinv: contributes k * uinv[k] at exponent k
        num[k] = num[k].add(&uinv[k].mul(&from_i64(k as i64)));
    }
    let mut den = ser_scale(&uinv, &from_i64(-2));
    for k in 1..d {
        den[k] = den[k].add(&a1.mul(&uinv[k - 1]));
    }
    den[3] = den[3].add(&a3);
    let omega = ser_mul(&num, &ser_inv(&den, d)?, d);

    // c = (a1^2 + 4 a2 - E2) / 12
    let c = a1
        .mul(&a1)
        .add(&a2.mul(&from_i64(4)))
        .sub(&e2val)
        .div(&from_i64(12))?;

    // alpha = (x + c) omega = t^{-2} B(t), B = (uinv + c t^2) omega
    let mut xc = uinv.clone();
    xc[2] = xc[2].add(&c);
    let b = ser_mul(&xc, &omega, d);
    // residue of alpha dt must vanish (coordinate-free residue of (x+c) dz)
    if b[1].valuation().map_or(false, |v| v < (prec as i64) - 2) {
        return Err(HeightError::ConsistencyCheck("residue of (x+c) dz"));
    }

    // u(t) = -int alpha dt  (Laurent, pole part B_0 / t); represent U = t*u
    let mut cap_u = ser_zero(p, d);
    cap_u[0] = b[0].clone();
    for k in 2..d {
        let div = PadicNumber::from_i64(p, (k as i64) - 1, 40);
        cap_u[k] = b[k].div(&div)?.neg();
    }
    // normalization: the constant term of u in the formal log z must vanish
    // (oddness of sigma in z); in t that pins const(u) = [t^1] (t/z(t))
    let z = ser_antider(&omega, d)?;
    let zeta: Ser = (0..d)
        .map(|k| if k + 1 < d { z[k + 1].clone() } else { PadicNumber::zero(p) })
        .collect();
    let zeta_inv = ser_inv(&zeta, d)?;
    cap_u[1] = zeta_inv[1].clone();

    // d log(sigma/t) = (u omega - 1/t) dt; the 1/t poles cancel
    let g = ser_mul(&cap_u, &omega, d);
    let one = PadicNumber::one(p, wk);
    if g[0]
        .sub(&one)
        .valuation()
        .map_or(false, |v| v < (prec as i64) - 2)
    {
        return Err(HeightError::ConsistencyCheck("residue of d log(sigma/t)"));
    }
    let mut lser = ser_zero(p, d);
    for k in 1..d {
        let div = PadicNumber::from_i64(p, k as i64, 40);
        lser[k] = g[k].div(&div)?;
    }

    // sigma/t = exp(L) by the ODE recurrence s_n = (1/n) sum k L_k s_{n-k}
    let mut s = ser_zero(p, d);
    s[0] = one;
    for n in 1..d {
        let mut accn = PadicNumber::zero(p);
        for k in 1..=n {
            accn = accn.add(&lser[k].mul(&from_i64(k as i64)).mul(&s[n - k]));
        }
        s[n] = accn.div(&from_i64(n as i64))?;
    }

    // sigma = t * (sigma/t); sanity: the t^2 coefficient is a1/2
    let expect = a1.div(&from_i64(2))?;
    if s[1]
        .sub(&expect)
        .valuation()
        .map_or(false, |v| v < (prec as i64) - 2)
    {
        return Err(HeightError::ConsistencyCheck("sigma t^2 coefficient"));
    }
    let mut coeffs = Vec::with_capacity(d + 1);
    coeffs.push(PadicNumber::zero(p));
    coeffs.extend(s.into_iter().map(|cfs| cfs.truncate(prec)));
    Ok(ZpPowerSeries::new(p, coeffs, prec))
}

// ---- big multiples through homogeneous division-polynomial values ----

/// t = -x/y and the denominator square root of n*P, both mod p^prec, where P
/// is an exact rational point with nonsingular reduction at every prime. The
/// denominators are exact because cancellation in the division-polynomial
/// sequence only happens at primes of singular reduction.
fn multiple_t_and_denominator(
    e: &EllipticCurveQ,
    pt: &PointQ,
    n: u64,
    p: u64,
    prec: u32,
) -> Result<(PadicNumber, PadicNumber), HeightError> {
    let (a_n, b_n, dpsi_n, meff) = ladder_raw(e, pt, n, p, prec)?;
    let m = BigInt::from(p).pow(meff);
    let to_padic = |c: &BigInt| -> PadicNumber {
        let c = ((c % &m) + &m) % &m;
        if c.is_zero() {
            return PadicNumber::fuzzy_zero(p, meff as i64);
        }
        let v = valuation(&c, p);
        PadicNumber::from_int(p, &c, meff).truncate(meff - v)
    };
    let denom = to_padic(&dpsi_n);
    let t_num = to_padic(&(&a_n * &dpsi_n)).neg();
    let t_den = to_padic(&b_n);
    let t = t_num.div(&t_den)?;
    if t.valuation().map_or(false, |v| v < 1) {
        return Err(HeightError::ConsistencyCheck("multiple missed the formal group"));
    }
    Ok((t.truncate(prec), denom))
}

/// Raw homogeneous data of nP: (A_n, B_n, d Psi_n, absolute precision), with
/// x(nP) = A_n/(d Psi_n)^2 and y(nP) = B_n/(d Psi_n)^3, all mod p^meff.
fn ladder_raw(
    e: &EllipticCurveQ,
    pt: &PointQ,
    n: u64,
    p: u64,
    prec: u32,
) -> Result<(BigInt, BigInt, BigInt, u32), HeightError> {
    let (x, y) = pt.xy().ok_or(HeightError::TorsionPoint)?;
    let d2 = x.denom().clone();
    let d = crate::arith::exact_sqrt(&d2.magnitude().clone())
        .map(BigInt::from)
        .ok_or(HeightError::ConsistencyCheck("denominator is not a square"))?;
    if y.denom() != &(&d * &d * &d) {
        return Err(HeightError::ConsistencyCheck("denominator exponents"));
    }
    let a = x.numer().clone();
    let bb = y.numer().clone();

    // psi_2 at P, homogenized: d^3 (2y + a1 x + a3)
    let psi2: BigInt =
        BigInt::from(2) * &bb + &e.a1 * &a * &d + &e.a3 * &d * &d * &d;
    if psi2.is_zero() {
        return Err(HeightError::TorsionPoint);
    }
    let v2 = valuation(&psi2, p);
    let levels = 64 - n.leading_zeros();
    let budget = (4 * levels + 6) * v2;
    let mbig = prec + 8 + budget;
    let m = BigInt::from(p).pow(mbig);
    let rem = |x: &BigInt| -> BigInt { ((x % &m) + &m) % &m };

    // unit-part inverse of psi2 for exact divisions
    let pv2 = BigInt::from(p).pow(v2);
    let unit2 = rem(&(&psi2 / &pv2));
    let inv_unit2 = mod_inverse_big(&unit2, &m);
    let exact_div_psi2 = |x: &BigInt| -> Result<BigInt, HeightError> {
        if !(x % &pv2).is_zero() {
            return Err(HeightError::ConsistencyCheck("inexact division by psi_2"));
        }
        Ok(rem(&((x / &pv2) * &inv_unit2)))
    };

    // base values Psi_n = d^{n^2-1} psi_n(P), exact integers mod p^mbig
    let d2b: BigInt = &d * &d;
    let d3: BigInt = &d2b * &d;
    let psi3: BigInt = BigInt::from(3) * a.pow(4)
        + &e.b2 * a.pow(3) * &d2b
        + BigInt::from(3) * &e.b4 * a.pow(2) * d2b.pow(2)
        + BigInt::from(3) * &e.b6 * &a * d2b.pow(3)
        + &e.b8 * d2b.pow(4);
    let psi4_inner: BigInt = BigInt::from(2) * a.pow(6)
        + &e.b2 * a.pow(5) * &d2b
        + BigInt::from(5) * &e.b4 * a.pow(4) * d2b.pow(2)
        + BigInt::from(10) * &e.b6 * a.pow(3) * d2b.pow(3)
        + BigInt::from(10) * &e.b8 * a.pow(2) * d2b.pow(4)
        + (&e.b2 * &e.b8 - &e.b4 * &e.b6) * &a * d2b.pow(5)
        + (&e.b4 * &e.b8 - &e.b6 * &e.b6) * d2b.pow(6);
    let psi4: BigInt = &psi2 * psi4_inner;

    // value of Psi_j for j in -2..=5, reduced
    let base = |j: i64| -> BigInt {
        match j {
            0 => BigInt::zero(),
            1 => BigInt::one(),
            2 => rem(&psi2),
            3 => rem(&psi3),
            4 => rem(&psi4),
            -1 => rem(&BigInt::from(-1)),
            -2 => rem(&-&psi2),
            -3 => rem(&-&psi3),
            _ => unreachable!("base index {j}"),
        }
    };

    // window w[i] = Psi_{m0 - 4 + i} mod p^mbig, i = 0..9
    let mut m0: i64 = 1;
    let mut w: Vec<BigInt> = (-3..=4).map(base).collect();
    // Psi_5 = Psi_4 Psi_2^3 - Psi_1 Psi_3^3
    w.push(rem(&(&psi4 * psi2.pow(3) - psi3.pow(3))));

    let get = |w: &[BigInt], m0: i64, j: i64| -> BigInt {
        let idx = j - (m0 - 4);
        debug_assert!((0..9).contains(&idx), "window miss {j} around {m0}");
        w[idx as usize].clone()
    };

    let bits = (0..(64 - n.leading_zeros())).rev().collect::<Vec<_>>();
    for &bit_pos in bits.iter().skip(1) {
        let bit = (n >> bit_pos) & 1;
        let new_m0 = 2 * m0 + bit as i64;
        let mut nw: Vec<BigInt> = Vec::with_capacity(9);
        for j in (new_m0 - 4)..=(new_m0 + 4) {
            if j < 0 {
                // odd symmetry: Psi_{-j} = -Psi_j, and |j| <= 2 here
                nw.push(rem(&-base(-j)));
                continue;
            }
            let val = if j % 2 == 1 {
                // Psi_{2k+1} = Psi_{k+2} Psi_k^3 - Psi_{k-1} Psi_{k+1}^3
                let k = (j - 1) / 2;
                rem(&(get(&w, m0, k + 2) * get(&w, m0, k).pow(3)
                    - get(&w, m0, k - 1) * get(&w, m0, k + 1).pow(3)))
            } else {
                // Psi_{2k} = Psi_k (Psi_{k+2} Psi_{k-1}^2 - Psi_{k-2} Psi_{k+1}^2)/Psi_2
                let k = j / 2;
                let inner = rem(&(get(&w, m0, k + 2) * get(&w, m0, k - 1).pow(2)
                    - get(&w, m0, k - 2) * get(&w, m0, k + 1).pow(2)));
                exact_div_psi2(&rem(&(get(&w, m0, k) * inner)))?
            };
            nw.push(val);
        }
        w = nw;
        m0 = new_m0;
    }
    debug_assert_eq!(m0, n as i64);

    let psi_nm2 = get(&w, m0, m0 - 2);
    let psi_nm1 = get(&w, m0, m0 - 1);
    let psi_n = get(&w, m0, m0);
    let psi_np1 = get(&w, m0, m0 + 1);
    let psi_np2 = get(&w, m0, m0 + 2);

    // x(nP) = A_n / (d Psi_n)^2, with A_n = a Psi_n^2 - Psi_{n+1} Psi_{n-1}
    let a_n = rem(&(&a * &psi_n * &psi_n - &psi_np1 * &psi_nm1));
    // y(nP) (d Psi_n)^3 = Psi_{2n}/(2 Psi_n) - (a1 A_n d Psi_n + a3 d^3 Psi_n^3)/2
    let ratio = exact_div_psi2(&rem(
        &(&psi_np2 * &psi_nm1 * &psi_nm1 - &psi_nm2 * &psi_np1 * &psi_np1),
    ))?;
    let inv_two = mod_inverse_big(&rem(&BigInt::from(2)), &m);
    let b_n = rem(
        &((ratio - &e.a1 * &a_n * &d * &psi_n - &e.a3 * &d3 * psi_n.pow(3)) * inv_two),
    );

    // honest absolute precision after the exact divisions
    let meff = mbig - budget;
    let mred = BigInt::from(p).pow(meff);
    Ok((a_n % &mred, b_n % &mred, rem(&(&d * &psi_n)) % &mred, meff))
}

/// Modular inverse for an odd-prime-power modulus.
fn mod_inverse_big(a: &BigInt, m: &BigInt) -> BigInt {
    let (mut r0, mut r1) = (m.clone(), ((a % m) + m) % m);
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
    }
    assert!(r0.is_one(), "mod_inverse of a non-unit");
    ((s0 % m) + m) % m
}

/// Everything fixed for height computations of one curve at one prime.
pub struct HeightContext {
    minimal: MinimalModel,
    sigma: ZpPowerSeries,
    /// number of points of the reduction mod p
    pub n1: u64,
    /// lcm of the Tamagawa numbers
    pub n2: u64,
    pub p: u64,
    pub prec: u32,
}

impl HeightContext {
    pub fn new(e: &EllipticCurveQ, p: u64, prec: u32) -> Result<Self, HeightError> {
        if p < 5 {
            return Err(HeightError::BadPrime { prime: p });
        }
        let minimal = minimal_model(e);
        let class =
            classify(&minimal.curve, p).map_err(|_| HeightError::BadPrime { prime: p })?;
        if !class.is_ordinary {
            return Err(HeightError::SupersingularPrime { prime: p });
        }
        let n1 = class.count;
        let mut n2: u64 = 1;
        for q in bad_primes(&minimal.curve) {
            let local = tate_local(&minimal.curve, q);
            n2 = n2.lcm(&local.tamagawa);
        }
        let trunc = (prec as usize + 12).max(32);
        let sigma = sigma_series(&minimal.curve, p, prec + 6, trunc)?;
        Ok(HeightContext { minimal, sigma, n1, n2, p, prec })
    }

    /// The cyclotomic p-adic height of a non-torsion rational point.
    pub fn height(&self, pt: &PointQ) -> Result<PadicNumber, HeightError> {
        let pm = self.minimal.map.map_point(pt);
        if !self.minimal.curve.contains(&pm) {
            return Err(HeightError::PointNotOnCurve);
        }
        if self.minimal.curve.is_torsion(&pm) {
            return Err(HeightError::TorsionPoint);
        }
        // kill the Tamagawa obstructions exactly, then walk to the formal
        // group with the division-polynomial ladder
        let pprime = self.minimal.curve.mul(self.n2 as i64, &pm)?;
        let (t, denom) =
            multiple_t_and_denominator(&self.minimal.curve, &pprime, self.n1, self.p, self.prec + 6)?;

        // evaluate sigma at t by Horner on sigma/t
        let p = self.p;
        let mut acc = PadicNumber::zero(p);
        for k in (1..self.sigma.coeffs.len()).rev() {
            acc = acc.mul(&t).add(&self.sigma.coeffs[k]);
        }
        let sig = acc.mul(&t);

        let log_sig = sig.iwasawa_log()?;
        let log_den = denom.iwasawa_log()?;
        let nn = BigInt::from(self.n1) * BigInt::from(self.n2);
        let nsq = PadicNumber::from_int(p, &(&nn * &nn), self.prec + 10);
        Ok(log_sig.sub(&log_den).div(&nsq)?.truncate(self.prec))
    }

    /// Bilinear pairing <P, Q> = (h(P+Q) - h(P) - h(Q)) / 2.
    pub fn pairing(&self, pt: &PointQ, qt: &PointQ) -> Result<PadicNumber, HeightError> {
        let sum = {
            // add on the original model, mapping handled inside height
            let pm = self.minimal.map.map_point(pt);
            let qm = self.minimal.map.map_point(qt);
            let s = self.minimal.curve.add(&pm, &qm)?;
            self.minimal.map.unmap_point(&s)
        };
        let hs = self.height(&sum)?;
        let hp = self.height(pt)?;
        let hq = self.height(qt)?;
        let two = PadicNumber::from_i64(self.p, 2, self.prec + 4);
        Ok(hs.sub(&hp).sub(&hq).div(&two)?)
    }
}

/// The p-adic regulator data for a set of independent generators.
#[derive(Debug, Clone)]
pub struct RegulatorResult {
    /// Gram matrix of the height pairing on the generators.
    pub pairing: Vec<Vec<PadicNumber>>,
    /// det of the Gram matrix.
    pub regulator: PadicNumber,
    /// regulator divided by p^rank; this is the Euler-characteristic input.
    pub normalized: PadicNumber,
    /// whether the normalized regulator is a p-adic unit
    pub is_unit: bool,
}

pub fn padic_height(
    e: &EllipticCurveQ,
    pt: &PointQ,
    p: u64,
    prec: u32,
) -> Result<PadicNumber, HeightError> {
    HeightContext::new(e, p, prec)?.height(pt)
}

pub fn height_pairing(
    e: &EllipticCurveQ,
    pt: &PointQ,
    qt: &PointQ,
    p: u64,
    prec: u32,
) -> Result<PadicNumber, HeightError> {
    HeightContext::new(e, p, prec)?.pairing(pt, qt)
}

fn det_padic(m: &[Vec<PadicNumber>], p: u64) -> PadicNumber {
    let n = m.len();
    if n == 0 {
        return PadicNumber::one(p, 40);
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = PadicNumber::zero(p);
    for (j, top) in m[0].iter().enumerate() {
        let minor: Vec<Vec<PadicNumber>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = top.mul(&det_padic(&minor, p));
        total = if j % 2 == 0 { total.add(&term) } else { total.sub(&term) };
    }
    total
}

pub fn regulator(
    e: &EllipticCurveQ,
    gens: &[PointQ],
    p: u64,
    prec: u32,
) -> Result<RegulatorResult, HeightError> {
    let ctx = HeightContext::new(e, p, prec)?;
    let r = gens.len();
    let mut pairing = vec![vec![PadicNumber::zero(p); r]; r];
    for i in 0..r {
        for j in i..r {
            let v = if i == j {
                ctx.height(&gens[i])?
            } else {
                ctx.pairing(&gens[i], &gens[j])?
            };
            pairing[i][j] = v.clone();
            pairing[j][i] = v;
        }
    }
    let reg = det_padic(&pairing, p);
    let normalized = reg.shift(-(r as i64));
    let is_unit = normalized.valuation() == Some(0);
    Ok(RegulatorResult { pairing, regulator: reg, normalized, is_unit })
}
