//! Local reduction data at a prime: Kodaira type, Tamagawa number and
//! conductor exponent, by Tate's algorithm run on the minimal model.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;

use crate::arith::{inv_mod, legendre, mul_mod, valuation};
use crate::curve::EllipticCurveQ;
use crate::polyfp;
use crate::reduction::fp::CurveFp;
use crate::reduction::minimal::{minimal_model, transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ReductionKind {
    Good,
    MultiplicativeSplit,
    MultiplicativeNonsplit,
    Additive,
}

/// Kodaira symbol of the special fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum KodairaType {
    I(u32),
    II,
    III,
    IV,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl KodairaType {
    /// Number of irreducible components of the special fiber (with
    /// multiplicity one each), as used in Ogg's formula.
    pub fn num_components(&self) -> u32 {
        match *self {
            KodairaType::I(0) => 1,
            KodairaType::I(n) => n,
            KodairaType::II => 1,
            KodairaType::III => 2,
            KodairaType::IV => 3,
            KodairaType::IStar(n) => 5 + n,
            KodairaType::IVStar => 7,
            KodairaType::IIIStar => 8,
            KodairaType::IIStar => 9,
        }
    }
}

impl fmt::Display for KodairaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            KodairaType::I(n) => write!(f, "I{n}"),
            KodairaType::II => write!(f, "II"),
            KodairaType::III => write!(f, "III"),
            KodairaType::IV => write!(f, "IV"),
            KodairaType::IStar(n) => write!(f, "I{n}*"),
            KodairaType::IVStar => write!(f, "IV*"),
            KodairaType::IIIStar => write!(f, "III*"),
            KodairaType::IIStar => write!(f, "II*"),
        }
    }
}

/// Everything the rest of the pipeline needs to know about E at one prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalData {
    pub prime: u64,
    pub kind: ReductionKind,
    pub kodaira: KodairaType,
    pub tamagawa: u64,
    pub conductor_exponent: u32,
    pub disc_valuation: u32,
    /// #E~(F_p) for good reduction, None otherwise.
    pub count: Option<u64>,
    /// Frobenius trace p + 1 - #E~(F_p) for good reduction.
    pub ap: Option<i64>,
    pub is_ordinary: bool,
    pub is_anomalous: bool,
}

struct Model {
    a: [BigInt; 5],
    p: u64,
}

impl Model {
    fn curve(&self) -> EllipticCurveQ {
        crate::curve::derive_invariants(
            self.a[0].clone(),
            self.a[1].clone(),
            self.a[2].clone(),
            self.a[3].clone(),
            self.a[4].clone(),
        )
        .expect("tate intermediate model is nonsingular")
    }

    fn translate(&mut self, r: BigInt, s: BigInt, t: BigInt) {
        let e = self.curve();
        let m = transform(&e, &BigInt::from(1), &r, &s, &t).expect("translation stays integral");
        self.a = [m.a1, m.a2, m.a3, m.a4, m.a6];
    }

    fn v(&self, i: usize) -> u32 {
        // valuation of a-coefficient, saturating at a large sentinel for zero
        if self.a[i].is_zero() {
            u32::MAX
        } else {
            valuation(&self.a[i], self.p)
        }
    }

    fn red(&self, n: &BigInt) -> u64 {
        let p = BigInt::from(self.p);
        let m = n % &p;
        let m = if m.is_negative() { m + &p } else { m };
        m.to_u64().unwrap()
    }

    /// a_i / p^k reduced mod p (the division must be exact).
    fn quot_red(&self, i: usize, k: u32) -> u64 {
        let pk = BigInt::from(self.p).pow(k);
        let (q, r) = num_integer::Integer::div_rem(&self.a[i], &pk);
        assert!(r.is_zero(), "inexact division in tate step");
        self.red(&q)
    }
}

/// Roots in F_p of a quadratic with unit leading coefficient, described by
/// (alpha, beta, gamma) for alpha Y^2 + beta Y + gamma.
enum QuadRoots {
    Distinct { rational: bool },
    Double { root: u64 },
}

fn quadratic_roots(alpha: u64, beta: u64, gamma: u64, p: u64) -> QuadRoots {
    debug_assert!(alpha % p != 0);
    if p == 2 {
        if beta % 2 == 1 {
            // separable; rational iff it has a root in {0, 1}
            let f = |y: u64| (alpha * y * y + beta * y + gamma) % 2;
            QuadRoots::Distinct {
                rational: f(0) == 0 || f(1) == 0,
            }
        } else {
            // alpha Y^2 + gamma: double root sqrt(gamma/alpha) = gamma/alpha in F_2
            QuadRoots::Double {
                root: mul_mod(gamma % 2, alpha % 2, 2),
            }
        }
    } else {
        let disc = (mul_mod(beta, beta, p) + 4 * p
            - 4 * mul_mod(alpha, gamma, p) % p)
            % p;
        if disc == 0 {
            let root = mul_mod(p - beta % p, inv_mod(mul_mod(2, alpha, p), p), p);
            QuadRoots::Double { root }
        } else {
            QuadRoots::Distinct {
                rational: legendre(disc as i64, p) == 1,
            }
        }
    }
}

/// Finds the singular point of the reduction mod p and returns (x0, y0).
fn singular_point(m: &Model) -> (u64, u64) {
    let p = m.p;
    if p <= 3 {
        let a: Vec<u64> = m.a.iter().map(|c| m.red(c)).collect();
        for x in 0..p {
            for y in 0..p {
                let f = (y * y + a[0] * x * y + a[2] * y + 5 * p * p
                    - (x * x * x + a[1] * x * x + a[3] * x + a[4]))
                    % p;
                let fx = (a[0] * y + 9 * p * p - (3 * x * x + 2 * a[1] * x + a[3])) % p;
                let fy = (2 * y + a[0] * x + a[2]) % p;
                if f == 0 && fx == 0 && fy == 0 {
                    return (x, y);
                }
            }
        }
        panic!("no singular point found mod {p}");
    }
    // p >= 5: complete the square; singular x is a repeated root of
    // g = 4x^3 + b2 x^2 + 2 b4 x + b6
    let e = m.curve();
    let g = vec![
        m.red(&e.b6),
        m.red(&(2 * &e.b4)),
        m.red(&e.b2),
        4 % p,
    ];
    let gp = polyfp::derivative(&g, p);
    let h = polyfp::gcd(&g, &gp, p);
    let x0 = match polyfp::degree(&h) {
        Some(1) => mul_mod(p - h[0] % p, inv_mod(h[1], p), p),
        Some(2) => {
            // (x - x0)^2 up to scalar
            mul_mod(p - h[1] % p, inv_mod(mul_mod(2, h[2], p), p), p)
        }
        d => panic!("unexpected repeated-root structure {d:?} mod {p}"),
    };
    // dF/dy = 0: y0 = -(a1 x0 + a3)/2
    let a1 = m.red(&e.a1);
    let a3 = m.red(&e.a3);
    let y0 = mul_mod(
        p - (mul_mod(a1, x0, p) + a3) % p,
        inv_mod(2, p),
        p,
    );
    (x0, y0)
}

/// Tate's algorithm at p on the global minimal model of `e`.
pub fn tate_local(e: &EllipticCurveQ, p: u64) -> LocalData {
    let min = minimal_model(e).curve;
    let mut m = Model {
        a: [
            min.a1.clone(),
            min.a2.clone(),
            min.a3.clone(),
            min.a4.clone(),
            min.a6.clone(),
        ],
        p,
    };

    loop {
        let cur = m.curve();
        let n = if (&cur.disc % BigInt::from(p)).is_zero() {
            valuation(&cur.disc, p)
        } else {
            0
        };

        if n == 0 {
            let count = CurveFp::reduce(&cur, p).count();
            let ap = p as i64 + 1 - count as i64;
            return LocalData {
                prime: p,
                kind: ReductionKind::Good,
                kodaira: KodairaType::I(0),
                tamagawa: 1,
                conductor_exponent: 0,
                disc_valuation: 0,
                count: Some(count),
                ap: Some(ap),
                is_ordinary: ap.rem_euclid(p as i64) != 0,
                is_anomalous: count % p == 0,
            };
        }

        // move the singular point to the origin
        let (x0, y0) = singular_point(&m);
        m.translate(BigInt::from(x0), BigInt::zero(), BigInt::from(y0));
        assert!(m.v(2) >= 1 && m.v(3) >= 1 && m.v(4) >= 1);

        let cur = m.curve();
        if !(&cur.b2 % BigInt::from(p)).is_zero() {
            // multiplicative: node; split iff T^2 + a1 T - a2 splits mod p
            let split = if p == 2 {
                m.red(&cur.a2) == 0
            } else {
                legendre(m.red(&cur.b2) as i64, p) == 1
            };
            let tamagawa = if split {
                n as u64
            } else if n % 2 == 0 {
                2
            } else {
                1
            };
            return LocalData {
                prime: p,
                kind: if split {
                    ReductionKind::MultiplicativeSplit
                } else {
                    ReductionKind::MultiplicativeNonsplit
                },
                kodaira: KodairaType::I(n),
                tamagawa,
                conductor_exponent: 1,
                disc_valuation: n,
                count: None,
                ap: None,
                is_ordinary: false,
                is_anomalous: false,
            };
        }

        let additive = |kodaira: KodairaType, tamagawa: u64| LocalData {
            prime: p,
            kind: ReductionKind::Additive,
            kodaira,
            tamagawa,
            conductor_exponent: n + 1 - kodaira.num_components(),
            disc_valuation: n,
            count: None,
            ap: None,
            is_ordinary: false,
            is_anomalous: false,
        };

        // type II
        if m.v(4) < 2 {
            return additive(KodairaType::II, 1);
        }
        // type III
        let b8 = m.curve().b8;
        if !b8.is_zero() && valuation(&b8, p) < 3 {
            return additive(KodairaType::III, 2);
        }
        // type IV: quadratic Y^2 + (a3/p) Y - a6/p^2 has distinct roots
        match quadratic_roots(1, m.quot_red(2, 1), (p - m.quot_red(4, 2) % p) % p, p) {
            QuadRoots::Distinct { rational } => {
                return additive(KodairaType::IV, if rational { 3 } else { 1 });
            }
            QuadRoots::Double { root } => {
                // kill the double root: afterwards v(a3) >= 2, v(a6) >= 3
                m.translate(
                    BigInt::zero(),
                    BigInt::zero(),
                    BigInt::from(p) * BigInt::from(root),
                );
            }
        }
        // normalize so p | a1, a2
        let s = if p == 2 {
            m.red(&m.a[1])
        } else {
            mul_mod(p - m.red(&m.a[0]), inv_mod(2, p), p)
        };
        m.translate(BigInt::zero(), BigInt::from(s), BigInt::zero());
        assert!(m.v(0) >= 1 && m.v(1) >= 1 && m.v(2) >= 2 && m.v(3) >= 2 && m.v(4) >= 3);

        // step 7: cubic T^3 + (a2/p) T^2 + (a4/p^2) T + a6/p^3 mod p
        let b = m.quot_red(1, 1);
        let c = m.quot_red(3, 2);
        let d = m.quot_red(4, 3);
        let g = vec![d, c, b, 1];
        let gp = polyfp::derivative(&g, p);
        let sep = if polyfp::is_zero(&gp) {
            Vec::new() // char 3, G = T^3 + d: inseparable
        } else {
            polyfp::gcd(&g, &gp, p)
        };
        let repeated_root = if polyfp::is_zero(&gp) {
            // cube root in F_3 is the identity map
            Some((p - d % p) % p)
        } else {
            match polyfp::degree(&sep) {
                Some(0) | None => None,
                Some(1) => Some(mul_mod(p - sep[0] % p, inv_mod(sep[1], p), p)),
                Some(2) => Some(if p == 2 {
                    sep[0] % 2
                } else {
                    mul_mod(p - sep[1] % p, inv_mod(2, p), p)
                }),
                _ => unreachable!(),
            }
        };

        match repeated_root {
            None => {
                // separable cubic: type I0*
                let roots = polyfp::count_roots(&g, p) as u64;
                return additive(KodairaType::IStar(0), 1 + roots);
            }
            Some(u_root) => {
                // move the repeated root to the origin
                m.translate(
                    BigInt::from(p) * BigInt::from(u_root),
                    BigInt::zero(),
                    BigInt::zero(),
                );
                let b_shift = (b + 3 * u_root) % p;
                if b_shift != 0 {
                    // double root: types I_m* (m >= 1)
                    return istar_subloop(&mut m, n, additive);
                }
                // triple root at the origin
                assert!(m.v(1) >= 2 && m.v(3) >= 3 && m.v(4) >= 4);
                // type IV*: quadratic Y^2 + (a3/p^2) Y - a6/p^4
                match quadratic_roots(1, m.quot_red(2, 2), (p - m.quot_red(4, 4) % p) % p, p) {
                    QuadRoots::Distinct { rational } => {
                        return additive(KodairaType::IVStar, if rational { 3 } else { 1 });
                    }
                    QuadRoots::Double { root } => {
                        m.translate(
                            BigInt::zero(),
                            BigInt::zero(),
                            BigInt::from(p).pow(2) * BigInt::from(root),
                        );
                    }
                }
                assert!(m.v(2) >= 3 && m.v(4) >= 5);
                if m.v(3) < 4 {
                    return additive(KodairaType::IIIStar, 2);
                }
                if m.v(4) < 6 {
                    return additive(KodairaType::IIStar, 1);
                }
                // non-minimal at p: rescale and restart
                let pb = BigInt::from(p);
                let exact = |x: &BigInt, k: u32| {
                    let (q, r) = num_integer::Integer::div_rem(x, &pb.pow(k));
                    assert!(r.is_zero(), "non-minimal rescale must divide exactly");
                    q
                };
                m.a = [
                    exact(&m.a[0], 1),
                    exact(&m.a[1], 2),
                    exact(&m.a[2], 3),
                    exact(&m.a[3], 4),
                    exact(&m.a[4], 6),
                ];
            }
        }
    }
}

/// The I_m* sub-loop: alternately test a quadratic in Y and one in X, bumping
/// m until one is separable.
fn istar_subloop(
    m: &mut Model,
    n: u32,
    additive: impl Fn(KodairaType, u64) -> LocalData,
) -> LocalData {
    let p = m.p;
    let mut mm: u32 = 1;
    let mut k: u32 = 2; // Y-quadratic level: Y^2 + (a3/p^k) Y - a6/p^2k
    loop {
        // odd step (m = 2k - 3): quadratic in Y
        match quadratic_roots(1, m.quot_red(2, k), (p - m.quot_red(4, 2 * k) % p) % p, p) {
            QuadRoots::Distinct { rational } => {
                return additive(KodairaType::IStar(mm), if rational { 4 } else { 2 });
            }
            QuadRoots::Double { root } => {
                m.translate(
                    BigInt::zero(),
                    BigInt::zero(),
                    BigInt::from(p).pow(k) * BigInt::from(root),
                );
            }
        }
        mm += 1;
        // even step (m = 2k - 2): quadratic (a2/p) X^2 + (a4/p^{k+1}) X + a6/p^{2k+1}
        match quadratic_roots(
            m.quot_red(1, 1),
            m.quot_red(3, k + 1),
            m.quot_red(4, 2 * k + 1),
            p,
        ) {
            QuadRoots::Distinct { rational } => {
                return additive(KodairaType::IStar(mm), if rational { 4 } else { 2 });
            }
            QuadRoots::Double { root } => {
                m.translate(
                    BigInt::from(p).pow(k) * BigInt::from(root),
                    BigInt::zero(),
                    BigInt::zero(),
                );
            }
        }
        mm += 1;
        k += 1;
        assert!(mm <= n, "I_m* loop exceeded the discriminant valuation");
    }
}
