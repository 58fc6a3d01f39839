//! Dense univariate polynomials over F_p, little-endian coefficient vectors.
//!
//! Small degrees only (reduction types, splitting tests), so the quadratic
//! algorithms here are fine.

use crate::arith::{inv_mod, mul_mod};

/// Drops trailing zero coefficients.
pub fn trim(mut f: Vec<u64>) -> Vec<u64> {
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

/// Degree, or None for the zero polynomial.
pub fn degree(f: &[u64]) -> Option<usize> {
    f.iter().rposition(|&c| c != 0)
}

pub fn is_zero(f: &[u64]) -> bool {
    degree(f).is_none()
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if is_zero(a) || is_zero(b) {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(ai, bj, p)) % p;
        }
    }
    trim(out)
}

/// Remainder of a mod b; b must be nonzero.
pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let db = degree(b).expect("division by zero polynomial");
    let lead_inv = inv_mod(b[db], p);
    let mut r: Vec<u64> = a.to_vec();
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let q = mul_mod(r[dr], lead_inv, p);
        for i in 0..=db {
            let idx = dr - db + i;
            r[idx] = (r[idx] + p - mul_mod(q, b[i], p)) % p;
        }
    }
    trim(r)
}

/// Monic gcd.
pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !is_zero(&b) {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(d) = degree(&a) {
        let inv = inv_mod(a[d], p);
        for c in &mut a {
            *c = mul_mod(*c, inv, p);
        }
    }
    a
}

/// base^exp mod (m, p).
pub fn powmod(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = rem(&[1], m, p);
    let mut base = rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = rem(&mul(&acc, &base, p), m, p);
        }
        base = rem(&mul(&base, &base, p), m, p);
        exp >>= 1;
    }
    acc
}

pub fn derivative(f: &[u64], p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for (i, &c) in f.iter().enumerate().skip(1) {
        out.push(mul_mod(c, (i as u64) % p, p));
    }
    trim(out)
}

pub fn eval(f: &[u64], x: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for &c in f.iter().rev() {
        acc = (mul_mod(acc, x, p) + c) % p;
    }
    acc
}

/// Number of distinct roots of f in F_p, as deg gcd(X^p - X, f).
pub fn count_roots(f: &[u64], p: u64) -> usize {
    let f = trim(f.to_vec());
    if degree(&f).map_or(true, |d| d == 0) {
        return 0;
    }
    // X^p - X mod f
    let xp = powmod(&[0, 1], p, &f, p);
    let mut g = xp;
    if g.len() < 2 {
        g.resize(2, 0);
    }
    g[1] = (g[1] + p - 1) % p;
    degree(&gcd(&g, &f, p)).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_of_shared_factor() {
        let p = 7;
        // (x+1)(x+2) and (x+1)(x+3)
        let a = mul(&[1, 1], &[2, 1], p);
        let b = mul(&[1, 1], &[3, 1], p);
        assert_eq!(gcd(&a, &b, p), vec![1, 1]);
    }

    #[test]
    fn root_counts() {
        let p = 11;
        // x^2 + 1 has roots mod p iff p = 1 mod 4
        assert_eq!(count_roots(&[1, 0, 1], 11), 0);
        assert_eq!(count_roots(&[1, 0, 1], 13), 2);
        // (x-1)(x-2)(x-3)
        let f = mul(&mul(&[p - 1, 1], &[p - 2, 1], p), &[p - 3, 1], p);
        assert_eq!(count_roots(&f, p), 3);
        // (x-1)^2 (x-2) has 2 distinct roots
        let g = mul(&mul(&[p - 1, 1], &[p - 1, 1], p), &[p - 2, 1], p);
        assert_eq!(count_roots(&g, p), 2);
    }

    #[test]
    fn powmod_fermat() {
        // X^p = X mod (X^2 - 2) over F_7 iff 2 is a QR mod 7 (it is)
        let m = vec![5u64, 0, 1]; // X^2 - 2 = X^2 + 5 mod 7
        let xp = powmod(&[0, 1], 7, &m, 7);
        assert_eq!(xp, vec![0, 1]);
        // over F_5, 2 is a non-residue: X^5 != X
        let m5 = vec![3u64, 0, 1];
        let xp5 = powmod(&[0, 1], 5, &m5, 5);
        assert_ne!(xp5, vec![0, 1]);
    }
}
