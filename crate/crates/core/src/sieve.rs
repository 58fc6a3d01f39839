//! Prime scans and sieves: the set Pi of good ordinary primes dividing the
//! normalized p-adic regulator, completely-split tests in a Galois closure,
//! the Sigma_0..Sigma_3 exclusion sieve, and raw density reports.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{factor, primes_up_to, valuation};
use crate::curve::{CurveContext, EllipticCurveQ};
use crate::heights::regulator;
use crate::polyfp;
use crate::reduction::{bad_primes, classify, minimal_model, tate_local};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SieveError {
    #[error("prime {prime} is ramified in the field (divides the discriminant), excluded")]
    BadPrime { prime: u64 },
    #[error("cannot parse field polynomial: {0}")]
    Parse(String),
    #[error("field polynomial must be monic of degree >= 1 with integer coefficients")]
    BadPolynomial,
}

/// The Galois closure of a number field, given by a monic integer defining
/// polynomial. Irreducibility is caller-asserted; we only sanity-check the
/// absence of small integer roots for degree > 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberFieldSpec {
    /// little-endian coefficients, last entry 1
    pub coeffs: Vec<BigInt>,
    pub degree: usize,
}

impl NumberFieldSpec {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self, SieveError> {
        let coeffs: Vec<BigInt> = {
            let mut c = coeffs;
            while c.last().map_or(false, |v| v.is_zero()) {
                c.pop();
            }
            c
        };
        let degree = coeffs.len().checked_sub(1).ok_or(SieveError::BadPolynomial)?;
        if degree == 0 || coeffs[degree] != BigInt::from(1) {
            return Err(SieveError::BadPolynomial);
        }
        if degree > 1 {
            // an integer root divides the constant term; check small candidates
            for r in -100i64..=100 {
                let rb = BigInt::from(r);
                let mut acc = BigInt::zero();
                for c in coeffs.iter().rev() {
                    acc = acc * &rb + c;
                }
                if acc.is_zero() {
                    return Err(SieveError::Parse(format!(
                        "polynomial has the rational root {r}, so it is reducible"
                    )));
                }
            }
        }
        Ok(NumberFieldSpec { coeffs, degree })
    }

    /// Parses text like "x^2+1", "x - 1" or "x^3 - 2*x + 5".
    pub fn parse(text: &str) -> Result<Self, SieveError> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(SieveError::Parse("empty polynomial".into()));
        }
        // split into signed terms
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (i, ch) in cleaned.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 {
                terms.push(std::mem::take(&mut cur));
                if ch == '-' {
                    cur.push('-');
                }
            } else {
                cur.push(ch);
            }
        }
        terms.push(cur);

        let mut coeffs: Vec<BigInt> = Vec::new();
        for term in &terms {
            let bad = || SieveError::Parse(format!("cannot parse term '{term}' in '{text}'"));
            if term.is_empty() {
                return Err(bad());
            }
            let (coeff_text, power) = match term.find('x') {
                None => (term.as_str(), 0usize),
                Some(pos) => {
                    let after = &term[pos + 1..];
                    let power = if after.is_empty() {
                        1
                    } else {
                        after
                            .strip_prefix('^')
                            .and_then(|e| e.parse::<usize>().ok())
                            .ok_or_else(bad)?
                    };
                    (term[..pos].trim_end_matches('*'), power)
                }
            };
            let coeff: BigInt = match coeff_text {
                "" | "+" => BigInt::from(1),
                "-" => BigInt::from(-1),
                s => s.parse().map_err(|_| bad())?,
            };
            if coeffs.len() <= power {
                coeffs.resize(power + 1, BigInt::zero());
            }
            coeffs[power] += coeff;
        }
        Self::new(coeffs)
    }
}

/// Whether p splits completely in the field: f mod p factors into distinct
/// linear pieces, tested as squarefreeness plus x^p = x in F_p[x]/(f).
pub fn is_completely_split(f: &NumberFieldSpec, p: u64) -> Result<bool, SieveError> {
    let fp: Vec<u64> = f
        .coeffs
        .iter()
        .map(|c| {
            let m = BigInt::from(p);
            let r = ((c % &m) + &m) % &m;
            r.to_u64().unwrap()
        })
        .collect();
    if f.degree == 1 {
        return Ok(true);
    }
    // ramified primes are the caller's problem: report, never guess
    let deriv = polyfp::derivative(&fp, p);
    let g = polyfp::gcd(&fp, &deriv, p);
    if polyfp::degree(&g).unwrap_or(0) > 0 {
        return Err(SieveError::BadPrime { prime: p });
    }
    let xp = polyfp::powmod(&[0, 1], p, &fp, p);
    Ok(polyfp::trim(xp) == vec![0, 1])
}

/// What happened at one prime during a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeNote {
    BadReduction,
    Supersingular,
    HeightFailure(String),
}

/// Result of a regulator-divisibility scan.
#[derive(Debug, Clone)]
pub struct PiScan {
    pub bound: u64,
    /// ascending good ordinary primes dividing the normalized regulator
    pub primes: Vec<u64>,
    /// primes that were skipped or failed, with the reason
    pub diagnostics: Vec<(u64, PrimeNote)>,
}

/// Scans good ordinary primes in [5, N] and collects those dividing the
/// normalized regulator. Deterministic ascending output regardless of the
/// worker pool; per-prime failures are reported, never dropped.
pub fn pi_scan(e: &EllipticCurveQ, ctx: &CurveContext, n: u64, prec: u32) -> PiScan {
    let min = minimal_model(e).curve;
    let candidates: Vec<u64> = primes_up_to(n).into_iter().filter(|&p| p >= 5).collect();
    let mut rows: Vec<(u64, Result<bool, PrimeNote>)> = candidates
        .par_iter()
        .map(|&p| {
            let class = match classify(&min, p) {
                Ok(c) => c,
                Err(_) => return (p, Err(PrimeNote::BadReduction)),
            };
            if !class.is_ordinary {
                return (p, Err(PrimeNote::Supersingular));
            }
            match regulator(e, &ctx.generators, p, prec) {
                // membership means p divides the normalized regulator; at
                // anomalous primes the valuation can be negative, which is
                // not divisibility
                Ok(r) => (p, Ok(r.normalized.valuation().map_or(false, |v| v >= 1))),
                Err(er) => (p, Err(PrimeNote::HeightFailure(er.to_string()))),
            }
        })
        .collect();
    rows.sort_by_key(|(p, _)| *p);
    let mut primes = Vec::new();
    let mut diagnostics = Vec::new();
    for (p, row) in rows {
        match row {
            Ok(true) => primes.push(p),
            Ok(false) => {}
            Err(note) => diagnostics.push((p, note)),
        }
    }
    PiScan { bound: n, primes, diagnostics }
}

/// Raw frequency of a prime set among all primes up to the bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityReport {
    pub members: usize,
    pub primes_considered: usize,
    pub frequency: BigRational,
    pub predicted: BigRational,
}

pub fn density_report(set: &[u64], n: u64, predicted: BigRational) -> DensityReport {
    let total = primes_up_to(n).len();
    let frequency = if total == 0 {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::from(set.len()), BigInt::from(total))
    };
    DensityReport { members: set.len(), primes_considered: total, frequency, predicted }
}

/// The exclusion sieve over primes up to N.
#[derive(Debug, Clone)]
pub struct SieveReport {
    pub n: u64,
    /// good ordinary primes completely split in the Galois closure
    pub sigma0: Vec<u64>,
    /// anomalous members of sigma0
    pub sigma1: Vec<u64>,
    /// members of sigma0 dividing the Tamagawa product
    pub sigma2: Vec<u64>,
    /// members of sigma0 dividing the analytic sha order
    pub sigma3: Vec<u64>,
    /// sigma0 minus the union of sigma1..sigma3
    pub sigma: Vec<u64>,
    /// |sigma0| over the prime count up to N
    pub empirical_density: BigRational,
    /// 1 over the field degree
    pub predicted_density: BigRational,
    pub caveats: Vec<String>,
}

/// Runs the four-stage exclusion sieve: completely-split good ordinary primes,
/// minus anomalous primes, Tamagawa divisors, and sha divisors.
pub fn sigma_sieve(
    e: &EllipticCurveQ,
    ctx: &CurveContext,
    field: &NumberFieldSpec,
    n: u64,
) -> SieveReport {
    let min = minimal_model(e).curve;
    let mut caveats = Vec::new();

    let tamagawa_product: BigInt = if ctx.tamagawa_overrides.is_empty() {
        caveats.push(
            "Tamagawa product taken over Q (no overrides ingested); at completely split \
             primes the local fields agree with the rational completions"
                .to_string(),
        );
        bad_primes(&min)
            .into_iter()
            .map(|q| BigInt::from(tate_local(&min, q).tamagawa))
            .product()
    } else {
        ctx.tamagawa_overrides.values().map(|&c| BigInt::from(c)).product()
    };
    let tamagawa_divisors: BTreeSet<u64> = factor(&tamagawa_product)
        .into_iter()
        .filter_map(|(q, _)| q.to_u64())
        .collect();

    let mut sigma0 = Vec::new();
    let mut sigma1 = Vec::new();
    let mut sigma2 = Vec::new();
    let mut sigma3 = Vec::new();
    let mut ramified_skipped = Vec::new();
    for p in primes_up_to(n) {
        let class = match classify(&min, p) {
            Ok(c) => c,
            Err(_) => continue, // bad reduction
        };
        if !class.is_ordinary {
            continue;
        }
        match is_completely_split(field, p) {
            Ok(true) => {}
            Ok(false) => continue,
            Err(_) => {
                ramified_skipped.push(p);
                continue;
            }
        }
        sigma0.push(p);
        if class.is_anomalous {
            sigma1.push(p);
        }
        if tamagawa_divisors.contains(&p) {
            sigma2.push(p);
        }
        if valuation(&BigInt::from(ctx.sha_analytic_order), p) > 0 {
            sigma3.push(p);
        }
    }
    if !ramified_skipped.is_empty() {
        caveats.push(format!("ramified primes excluded from the scan: {ramified_skipped:?}"));
    }

    let excluded: BTreeSet<u64> =
        sigma1.iter().chain(&sigma2).chain(&sigma3).copied().collect();
    let sigma: Vec<u64> = sigma0.iter().copied().filter(|p| !excluded.contains(p)).collect();

    let total = primes_up_to(n).len();
    let empirical_density = if total == 0 {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::from(sigma0.len()), BigInt::from(total))
    };
    let predicted_density = BigRational::new(BigInt::from(1), BigInt::from(field.degree as u64));

    SieveReport {
        n,
        sigma0,
        sigma1,
        sigma2,
        sigma3,
        sigma,
        empirical_density,
        predicted_density,
        caveats,
    }
}
