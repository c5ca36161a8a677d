//! Laurent expansions of the factors `c(k + eps t)` of the intertwining
//! product, in the three regimes of the integer `k`.
//!
//! Every factor is kept in log form, `coefficient * unit * eps^p * exp(E)`
//! with `E` a series without constant term, so products of many factors
//! reduce to sums of exponents and a single exponential.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::series::{Monomial, Poly, Symbol, TruncatedSeries};

/// Arguments of one factor: `c(<lambda1, a^vee> + eps <lambda2, a^vee>)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactorKey {
    pub k: i64,
    pub t: i64,
}

impl FactorKey {
    pub fn new(k: i64, t: i64) -> Self {
        FactorKey { k, t }
    }

    /// Power of `eps` contributed by this factor.
    pub fn eps_power(self) -> i32 {
        match self.k {
            -1 => 1,
            1 => -1,
            _ => 0,
        }
    }
}

/// `c(k + eps t) = coefficient * unit * eps^eps_power * exp(exponent)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorExpansion {
    pub coefficient: BigRational,
    pub unit: Monomial,
    pub eps_power: i32,
    /// No constant term; exact through `eps^order`.
    pub exponent: TruncatedSeries,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// Coefficient of `delta^n / n!` in the exponent for argument `k`.
fn exponent_generator(k: i64, n: u32) -> Poly {
    let sign = if n % 2 == 0 { 1 } else { -1 };
    match k {
        -1 => Poly::var(Symbol::G(n)),
        1 => Poly::var(Symbol::G(n)).scale(&rat(-sign, 1)),
        0 if n % 2 == 1 => Poly::var(Symbol::S { k: 0, n }).scale(&rat(2, 1)),
        0 => Poly::zero(),
        _ => {
            let plus = Poly::var(Symbol::S { k: k as i32, n });
            let minus = Poly::var(Symbol::S { k: -k as i32, n });
            plus.sub(&minus.scale(&rat(sign, 1)))
        }
    }
}

/// Log-form expansion of `c(k + eps t)` with the exponent exact through
/// `eps^order`. `None` means the factor vanishes identically (`k = -1`,
/// `t = 0`).
pub fn factor_expansion(key: FactorKey, order: u32) -> Result<Option<FactorExpansion>> {
    let FactorKey { k, t } = key;
    let order_i = order as i32;
    if t == 0 {
        let (coefficient, unit) = match k {
            -1 => return Ok(None),
            1 => return Err(Error::PolarDivisor),
            0 => (rat(-1, 1), Monomial::one()),
            _ => (BigRational::one(), Monomial::c_value(k)),
        };
        return Ok(Some(FactorExpansion {
            coefficient,
            unit,
            eps_power: 0,
            exponent: TruncatedSeries::zero(order_i),
        }));
    }
    let (coefficient, unit) = match k {
        -1 => (rat(t, 1), Monomial::var(Symbol::U)),
        1 => (rat(-1, t), Monomial::pow(Symbol::U, -1)),
        0 => (rat(-1, 1), Monomial::one()),
        _ => (BigRational::one(), Monomial::c_value(k)),
    };
    let mut coeffs = vec![Poly::zero()];
    let tb = BigInt::from(t);
    let mut tpow = BigInt::one();
    for n in 1..=order {
        tpow *= &tb;
        let w = BigRational::new(tpow.clone(), factorial(n));
        coeffs.push(exponent_generator(k, n).scale(&w));
    }
    Ok(Some(FactorExpansion {
        coefficient,
        unit,
        eps_power: key.eps_power(),
        exponent: TruncatedSeries::from_coeffs(0, coeffs, order_i),
    }))
}

impl FactorExpansion {
    /// Expanded series, exact through `eps^(eps_power + order)`.
    pub fn to_series(&self) -> Result<TruncatedSeries> {
        let pref = Poly::term(self.coefficient.clone(), self.unit.clone());
        Ok(self.exponent.exp()?.scale_poly(&pref).shift(self.eps_power))
    }
}

/// Laurent expansion of `c(k + eps t)`, exact through `eps^(p + order)`
/// where `p` is the factor's own power of `eps`.
pub fn factor_series(key: FactorKey, order: u32) -> Result<TruncatedSeries> {
    match factor_expansion(key, order)? {
        None => Ok(TruncatedSeries::zero(order as i32)),
        Some(f) => f.to_series(),
    }
}

/// Checks `c(k + eps t) c(-k - eps t) = 1` through `eps^order`.
pub fn verify_reciprocity(k: i64, t: i64, order: u32) -> Result<bool> {
    let a = factor_series(FactorKey::new(k, t), order)?;
    let b = factor_series(FactorKey::new(-k, -t), order)?;
    let bound = order as i32;
    let prod = a.mul_to(&b, bound)?;
    Ok(prod == TruncatedSeries::one(bound))
}

/// Shared cache of factor expansions keyed by `(k, t, order)`.
#[derive(Debug, Default)]
pub struct FactorCache {
    map: Mutex<HashMap<(FactorKey, u32), Option<Arc<FactorExpansion>>>>,
}

impl FactorCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: FactorKey, order: u32) -> Result<Option<Arc<FactorExpansion>>> {
        if let Some(hit) = self.map.lock().unwrap().get(&(key, order)) {
            return Ok(hit.clone());
        }
        let value = factor_expansion(key, order)?.map(Arc::new);
        self.map.lock().unwrap().insert((key, order), value.clone());
        Ok(value)
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cached entries in key order.
    pub fn entries(&self) -> Vec<((FactorKey, u32), Option<Arc<FactorExpansion>>)> {
        let mut v: Vec<_> = self.map.lock().unwrap().iter().map(|(k, v)| (*k, v.clone())).collect();
        v.sort_by_key(|(k, _)| *k);
        v
    }
}

/// Accumulates the log form of a product of factors.
#[derive(Debug, Clone)]
pub struct LogProduct {
    pub coefficient: BigRational,
    pub unit: Monomial,
    pub eps_power: i32,
    /// Exponent coefficients, index = power of `eps`; entry 0 unused.
    pub exponent: Vec<Poly>,
}

impl LogProduct {
    pub fn one(order: u32) -> Self {
        LogProduct {
            coefficient: BigRational::one(),
            unit: Monomial::one(),
            eps_power: 0,
            exponent: vec![Poly::zero(); order as usize + 1],
        }
    }

    /// Multiplies in `f^multiplicity`.
    pub fn absorb(&mut self, f: &FactorExpansion, multiplicity: u32) {
        for _ in 0..multiplicity {
            self.coefficient *= &f.coefficient;
            self.unit = self.unit.mul(&f.unit);
        }
        self.eps_power += f.eps_power * multiplicity as i32;
        let m = BigRational::from_integer(BigInt::from(multiplicity));
        for (n, slot) in self.exponent.iter_mut().enumerate().skip(1) {
            if let Some(c) = f.exponent.coeff(n as i32) {
                slot.add_scaled(&c, &m, &Monomial::one());
            }
        }
    }

    pub fn prefactor(&self) -> Poly {
        Poly::term(self.coefficient.clone(), self.unit.clone())
    }

    pub fn is_zero_exponent(&self) -> bool {
        self.exponent.iter().all(Poly::is_zero)
    }
}
