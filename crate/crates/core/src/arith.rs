//! Integer utilities shared across the crate: prime generation and testing,
//! factorization, valuations, and arithmetic modulo a machine-word prime.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Primes up to and including `n`, by sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &b)| if b { Some(i as u64) } else { None })
        .collect()
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc: u64 = 1;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, m: u64) -> u64 {
    // extended Euclid; m need not be prime but gcd(a, m) must be 1
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1, "inv_mod of non-unit");
    (s0.rem_euclid(m as i128)) as u64
}

/// Extended-Euclid modular inverse for big integers; gcd(a, m) must be 1.
pub fn inv_mod_big(a: &BigInt, m: &BigInt) -> BigInt {
    let (mut r0, mut r1) = (m.clone(), ((a % m) + m) % m);
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
    }
    assert!(r0.is_one(), "inv_mod_big of a non-unit");
    ((s0 % m) + m) % m
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    // this base set is known to be exact for all n < 2^64
    'witness: for &a in &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin for arbitrary-precision integers (probabilistic above u64 range).
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &[2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43] {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigUint) -> BigUint {
    // Brent's variant with deterministic parameter sweep
    let one = BigUint::one();
    let two = BigUint::from(2u32);
    if n.is_even() {
        return two;
    }
    for c in 1u32..64 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = two.clone();
        let mut y = two.clone();
        let mut d = one.clone();
        while d == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
        }
        if d != one && &d != n {
            return d;
        }
    }
    panic!("pollard_rho failed on {n}");
}

/// Prime factorization of |n| as ascending (prime, exponent) pairs.
pub fn factor(n: &BigInt) -> Vec<(BigUint, u32)> {
    let mut n = n.magnitude().clone();
    assert!(!n.is_zero(), "factor(0)");
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    let push = |p: BigUint, e: u32, out: &mut Vec<(BigUint, u32)>| {
        for entry in out.iter_mut() {
            if entry.0 == p {
                entry.1 += e;
                return;
            }
        }
        out.push((p, e));
    };
    for p in 2u64.. {
        if p > 100_000 || n.is_one() {
            break;
        }
        let pb = BigUint::from(p);
        let mut e = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            e += 1;
        }
        if e > 0 {
            push(pb, e, &mut out);
        }
        if BigUint::from(p) * p > n {
            break;
        }
    }
    // remaining cofactor: split recursively with rho
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m) {
            push(m, 1, &mut out);
        } else {
            let d = pollard_rho(&m);
            stack.push(&m / &d);
            stack.push(d);
        }
    }
    out.sort();
    out
}

/// Exact p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// Legendre symbol (a/p) for odd prime p, as -1, 0, or 1.
pub fn legendre(a: i64, p: u64) -> i32 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    let e = pow_mod(a, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// Square root mod an odd prime by Tonelli-Shanks. Returns None for non-residues.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if legendre(a as i64, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    // Tonelli-Shanks
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while legendre(z as i64, p) != -1 {
        z += 1;
    }
    let mut m = s as u64;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0u64;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Integer square root of a perfect square, if it is one.
pub fn exact_sqrt(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_and_primality_agree() {
        let ps = primes_up_to(2000);
        for n in 0..=2000u64 {
            assert_eq!(ps.contains(&n), is_prime_u64(n), "n = {n}");
        }
    }

    #[test]
    fn factor_small() {
        let f = factor(&BigInt::from(-432));
        assert_eq!(f, vec![(BigUint::from(2u32), 4), (BigUint::from(3u32), 3)]);
    }

    #[test]
    fn factor_large_semiprime() {
        let n = BigInt::from(1_000_003i64) * BigInt::from(998_244_353i64);
        let f = factor(&n);
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].0, BigUint::from(1_000_003u64));
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&BigInt::from(8), 2), 3);
        assert_eq!(valuation(&BigInt::from(8), 5), 0);
        assert_eq!(valuation(&BigInt::from(250), 5), 3);
    }

    #[test]
    fn tonelli_shanks_round_trip() {
        for &p in &[5u64, 13, 17, 97, 65537] {
            for a in 1..50u64 {
                if let Some(r) = sqrt_mod(a, p) {
                    assert_eq!(mul_mod(r, r, p), a % p);
                } else {
                    assert_eq!(legendre(a as i64, p), -1);
                }
            }
        }
    }
}
