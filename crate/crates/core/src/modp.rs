//! Arithmetic modulo the Mersenne prime `2^61 - 1`.
//!
//! A polynomial with rational coefficients whose denominators avoid this
//! prime is certainly nonzero once one of its values modulo the prime is.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::series::Symbol;

pub const P: u64 = (1 << 61) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fp(u64);

impl Fp {
    pub const ZERO: Fp = Fp(0);
    pub const ONE: Fp = Fp(1);

    pub fn new(x: u64) -> Fp {
        Fp(reduce128(u128::from(x)))
    }

    pub fn from_i64(x: i64) -> Fp {
        if x >= 0 {
            Fp::new(x as u64)
        } else {
            -Fp::new(x.unsigned_abs())
        }
    }

    pub fn from_bigint(x: &BigInt) -> Fp {
        let r = x.mod_floor(&BigInt::from(P));
        Fp(r.to_u64().expect("reduced"))
    }

    /// `None` if the denominator is divisible by the prime.
    pub fn from_rational(q: &BigRational) -> Option<Fp> {
        let d = Fp::from_bigint(q.denom());
        if d.is_zero() {
            return None;
        }
        Some(Fp::from_bigint(q.numer()) * d.inv())
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn pow(self, mut e: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn pow_i(self, e: i64) -> Fp {
        if e >= 0 {
            self.pow(e as u64)
        } else {
            self.inv().pow(e.unsigned_abs())
        }
    }

    pub fn inv(self) -> Fp {
        assert!(!self.is_zero(), "inverse of zero");
        self.pow(P - 2)
    }
}

fn reduce128(x: u128) -> u64 {
    let lo = (x as u64) & P;
    let hi = (x >> 61) as u64;
    let mut r = lo as u128 + hi as u128;
    while r >= u128::from(P) {
        r -= u128::from(P);
    }
    r as u64
}

impl std::ops::Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        let s = self.0 + o.0;
        Fp(if s >= P { s - P } else { s })
    }
}

impl std::ops::Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        self + (-o)
    }
}

impl std::ops::Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp(if self.0 == 0 { 0 } else { P - self.0 })
    }
}

impl std::ops::Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        Fp(reduce128(u128::from(self.0) * u128::from(o.0)))
    }
}

impl std::ops::AddAssign for Fp {
    fn add_assign(&mut self, o: Fp) {
        *self = *self + o;
    }
}

impl std::ops::MulAssign for Fp {
    fn mul_assign(&mut self, o: Fp) {
        *self = *self * o;
    }
}

/// Deterministic pseudo-random nonzero values for the generators.
#[derive(Debug, Clone, Copy)]
pub struct RandomPoint {
    seed: u64,
}

impl RandomPoint {
    pub fn new(seed: u64) -> Self {
        RandomPoint { seed }
    }

    fn draw(&self, code: u64) -> Fp {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ code.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        loop {
            let v = Fp::new(rng.next_u64() & P);
            if !v.is_zero() {
                return v;
            }
        }
    }

    pub fn symbol(&self, s: Symbol) -> Fp {
        let code = match s {
            Symbol::S { k, n } => (1 << 56) | ((k as i64 + (1 << 20)) as u64) << 16 | u64::from(n),
            Symbol::G(n) => (2 << 56) | u64::from(n),
            Symbol::C(k) => (3 << 56) | u64::from(k),
            Symbol::U => 4 << 56,
            Symbol::H(i) => (5 << 56) | u64::from(i),
        };
        self.draw(code)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_laws() {
        let a = Fp::new(123_456_789_012_345);
        let b = Fp::from_i64(-987_654_321);
        assert_eq!(a * a.inv(), Fp::ONE);
        assert_eq!((a + b) - b, a);
        assert_eq!(Fp::from_i64(-1) + Fp::ONE, Fp::ZERO);
        assert_eq!(Fp::new(P), Fp::ZERO);
        let q = BigRational::new(BigInt::from(-5), BigInt::from(6));
        assert_eq!(Fp::from_rational(&q).unwrap() * Fp::from_i64(6), Fp::from_i64(-5));
        assert!(Fp::from_rational(&BigRational::new(BigInt::from(1), BigInt::from(P))).is_none());
        assert_eq!(a.pow_i(-3) * a.pow(3), Fp::ONE);
    }

    #[test]
    fn points_are_deterministic() {
        let p = RandomPoint::new(7);
        assert_eq!(p.symbol(Symbol::U), RandomPoint::new(7).symbol(Symbol::U));
        assert_ne!(p.symbol(Symbol::H(1)), p.symbol(Symbol::H(2)));
        assert_ne!(p.symbol(Symbol::S { k: 2, n: 1 }), p.symbol(Symbol::S { k: -2, n: 1 }));
    }
}
