//! Numeric specialization of the formal generators for the ground field
//! `Q`, where `c(s) = Xi(s) / Xi(s + 1)` with
//! `Xi(s) = pi^(-s/2) Gamma(s/2) zeta(s)`.
//!
//! This is a cross-check only; verdicts never depend on it.

use std::collections::HashMap;
use std::sync::Mutex;

use num_rational::BigRational;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

use crate::cfactor::FactorKey;
use crate::constantterm::{block_leading, LineAnalysis, MuBlock};
use crate::error::{Error, Result};
use crate::series::{Poly, Specialization, Symbol, TruncatedSeries};

/// Default working precision in decimal digits.
pub const DEFAULT_DIGITS: u32 = 50;
/// Largest precision the specializer accepts.
pub const MAX_DIGITS: u32 = 400;

const STENCIL_NODES: usize = 40;
const STENCIL_STEP_LOG2: i32 = 9;

fn to_float(q: &BigRational, bits: u32) -> Float {
    let r = Rational::from((
        rug::Integer::from_str_radix(&q.numer().to_str_radix(16), 16).unwrap(),
        rug::Integer::from_str_radix(&q.denom().to_str_radix(16), 16).unwrap(),
    ));
    Float::with_val(bits, r)
}

/// A value together with an estimate of its absolute error.
#[derive(Debug, Clone)]
pub struct Specialized {
    pub value: Float,
    pub error_estimate: Float,
    pub digits: u32,
}

/// Evaluates `c`, its log-derivatives and the formal generators at a fixed
/// working precision. Generator values are cached.
#[derive(Debug)]
pub struct ZetaSpecializer {
    digits: u32,
    bits: u32,
    h: Vec<BigRational>,
    cache: Mutex<HashMap<(Symbol, bool), Float>>,
}

impl ZetaSpecializer {
    /// `digits` is the requested precision; the internal working precision
    /// is several times larger to absorb the derivative stencils.
    pub fn new(digits: u32) -> Result<Self> {
        Self::with_max(digits, MAX_DIGITS)
    }

    pub fn with_max(digits: u32, max_digits: u32) -> Result<Self> {
        if digits > max_digits || digits == 0 {
            return Err(Error::PrecisionUnachievable { requested: digits, max: max_digits });
        }
        let bits = ((f64::from(digits) * std::f64::consts::LOG2_10 * 3.0) as u32).max(256) + 64;
        Ok(ZetaSpecializer { digits, bits, h: Vec::new(), cache: Mutex::new(HashMap::new()) })
    }

    /// Values for the `H(i)` generators (1-based, in order).
    pub fn with_h(mut self, h: Vec<BigRational>) -> Self {
        self.h = h;
        self
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn float(&self, x: f64) -> Float {
        Float::with_val(self.bits, x)
    }

    pub fn rational(&self, q: &BigRational) -> Float {
        to_float(q, self.bits)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, Constant::Pi)
    }

    /// `Xi(s)`, using `Xi(s) = Xi(1 - s)` left of the critical line.
    pub fn xi(&self, s: &Float) -> Float {
        let half = Float::with_val(self.bits, 0.5);
        if *s < half {
            let r = Float::with_val(self.bits, 1 - s);
            return self.xi(&r);
        }
        let half_s = Float::with_val(self.bits, s / 2u32);
        let pi_part = self.pi().pow(Float::with_val(self.bits, -&half_s));
        let gamma = half_s.gamma();
        let zeta = s.clone().zeta();
        pi_part * gamma * zeta
    }

    /// `c(s) = Xi(s) / Xi(s + 1)`.
    pub fn c_value(&self, s: &Float) -> Float {
        let s1 = Float::with_val(self.bits, s + 1u32);
        self.xi(s) / self.xi(&s1)
    }

    /// Taylor coefficients `a_0..=a_order` of `f` at `x0 = 0` from an
    /// interpolating polynomial on nodes that avoid 0 itself.
    fn taylor<F: Fn(&Float) -> Float>(&self, f: F, order: usize, alt: bool) -> Vec<Float> {
        let m = STENCIL_NODES + if alt { 4 } else { 0 };
        let step = if alt {
            Float::with_val(self.bits, 3) >> (STENCIL_STEP_LOG2 + 2)
        } else {
            Float::with_val(self.bits, 1) >> STENCIL_STEP_LOG2
        };
        let nodes: Vec<Float> = (0..m)
            .map(|i| {
                let off = Float::with_val(self.bits, 2 * i as i64 - (m as i64 - 1)) / 2u32;
                off * &step
            })
            .collect();
        let mut dd: Vec<Float> = nodes.iter().map(&f).collect();
        for level in 1..m {
            for i in (level..m).rev() {
                let num = Float::with_val(self.bits, &dd[i] - &dd[i - 1]);
                let den = Float::with_val(self.bits, &nodes[i] - &nodes[i - level]);
                dd[i] = num / den;
            }
        }
        // Newton form to monomial form, Horner from the top.
        let mut poly: Vec<Float> = vec![dd[m - 1].clone()];
        for k in (0..m - 1).rev() {
            let mut next = vec![Float::with_val(self.bits, 0); poly.len() + 1];
            for (p, c) in poly.iter().enumerate() {
                next[p + 1] += c;
                next[p] -= Float::with_val(self.bits, c * &nodes[k]);
            }
            next[0] += &dd[k];
            poly = next;
        }
        poly.truncate(order + 1);
        poly
    }

    fn factorial(&self, n: u32) -> Float {
        let mut f = Float::with_val(self.bits, 1);
        for i in 2..=n {
            f *= i;
        }
        f
    }

    fn compute_symbol(&self, sym: Symbol, alt: bool) -> Result<Float> {
        let bits = self.bits;
        match sym {
            Symbol::C(k) => Ok(self.c_value(&Float::with_val(bits, k))),
            Symbol::S { k, n } => {
                if k.abs() == 1 {
                    return Err(Error::UnspecializedSymbol(sym.to_string()));
                }
                let k0 = Float::with_val(bits, k);
                let coeffs = self.taylor(
                    |x| {
                        let s = Float::with_val(bits, &k0 + x);
                        self.c_value(&s).abs().ln()
                    },
                    n as usize,
                    alt,
                );
                Ok(Float::with_val(bits, &coeffs[n as usize] * self.factorial(n)) / 2u32)
            }
            Symbol::G(n) => {
                let coeffs = self.taylor(|x| self.reduced_at_minus_one(x).abs().ln(), n as usize, alt);
                Ok(Float::with_val(bits, &coeffs[n as usize] * self.factorial(n)))
            }
            Symbol::U => {
                let coeffs = self.taylor(|x| self.reduced_at_minus_one(x).abs().ln(), 0, alt);
                let probe = self.reduced_at_minus_one(&(Float::with_val(bits, 1) >> 20));
                let mag = coeffs[0].clone().exp();
                Ok(if probe.is_sign_negative() { -mag } else { mag })
            }
            Symbol::H(i) => {
                let q = self.h.get(i as usize - 1).ok_or_else(|| Error::UnspecializedSymbol(sym.to_string()))?;
                Ok(to_float(q, bits))
            }
        }
    }

    /// `c(-1 + delta) / delta`.
    fn reduced_at_minus_one(&self, delta: &Float) -> Float {
        let s = Float::with_val(self.bits, delta - 1u32);
        self.c_value(&s) / delta
    }

    fn symbol_value(&self, sym: Symbol, alt: bool) -> Result<Float> {
        if let Some(v) = self.cache.lock().unwrap().get(&(sym, alt)) {
            return Ok(v.clone());
        }
        let v = self.compute_symbol(sym, alt)?;
        self.cache.lock().unwrap().insert((sym, alt), v.clone());
        Ok(v)
    }

    pub fn symbol(&self, sym: Symbol) -> Result<Float> {
        self.symbol_value(sym, false)
    }

    /// Specialized value of a polynomial; the error estimate compares two
    /// independent derivative stencils.
    pub fn specialize_poly(&self, p: &Poly) -> Result<Specialized> {
        let main = p.eval(&Point { sp: self, alt: false })?;
        let alt = p.eval(&Point { sp: self, alt: true })?;
        let err = Float::with_val(self.bits, &main - &alt).abs();
        Ok(Specialized { value: main, error_estimate: err, digits: self.digits })
    }

    pub fn specialize_series(&self, s: &TruncatedSeries) -> Result<Vec<(i32, Specialized)>> {
        s.nonzero_terms().map(|(k, c)| Ok((k, self.specialize_poly(c)?))).collect()
    }
}

struct Point<'a> {
    sp: &'a ZetaSpecializer,
    alt: bool,
}

impl Specialization for Point<'_> {
    type Value = Float;

    fn rational(&self, q: &BigRational) -> Float {
        to_float(q, self.sp.bits)
    }

    fn symbol(&self, s: Symbol) -> Result<Float> {
        self.sp.symbol_value(s, self.alt)
    }

    fn add(&self, a: &Float, b: &Float) -> Float {
        Float::with_val(self.sp.bits, a + b)
    }

    fn mul(&self, a: &Float, b: &Float) -> Float {
        Float::with_val(self.sp.bits, a * b)
    }

    fn inv(&self, a: &Float) -> Float {
        Float::with_val(self.sp.bits, 1u32 / a)
    }
}

impl ZetaSpecializer {
    /// Coefficient of `eps^order` in the block's sum
    /// `sum_w prod c(k + eps t) exp(eps <w lambda2, H>)`, evaluated directly
    /// from `c` and extrapolated to `eps = 0`. Valid when all lower
    /// coefficients vanish.
    pub fn grouped_sum_coefficient(&self, block: &MuBlock, order: i32) -> Result<Specialized> {
        let rank = block.mu.len();
        if self.h.len() < rank {
            return Err(Error::UnspecializedSymbol(format!("H({})", self.h.len() + 1)));
        }
        let h: Vec<Float> = self.h[..rank].iter().map(|q| self.rational(q)).collect();
        let sample = |eps: &Float| -> Float {
            let mut cache: HashMap<FactorKey, Float> = HashMap::new();
            let mut total = Float::with_val(self.bits, 0);
            for class in &block.classes {
                let mut prod = Float::with_val(self.bits, 1);
                for &(key, mult) in &class.factors {
                    let v = cache.entry(key).or_insert_with(|| {
                        let arg = Float::with_val(self.bits, eps * key.t) + key.k;
                        self.c_value(&arg)
                    });
                    for _ in 0..mult {
                        prod *= &*v;
                    }
                }
                let mut members = Float::with_val(self.bits, 0);
                for w in &class.members {
                    let mut hw = Float::with_val(self.bits, 0);
                    for (x, hi) in w.iter().zip(&h) {
                        hw += Float::with_val(self.bits, hi * *x);
                    }
                    members += Float::with_val(self.bits, hw * eps).exp();
                }
                total += prod * members;
            }
            let scale = Float::with_val(self.bits, eps.pow(order));
            total / scale
        };
        let nodes: Vec<Float> = (0..GROUPED_NODES).map(|i| Float::with_val(self.bits, 1) >> (6 + i as i32)).collect();
        let values: Vec<Float> = nodes.iter().map(sample).collect();
        let full = extrapolate_to_zero(&nodes, &values, self.bits);
        let short = extrapolate_to_zero(&nodes[..GROUPED_NODES - 4], &values[..GROUPED_NODES - 4], self.bits);
        let err = Float::with_val(self.bits, &full - &short).abs();
        Ok(Specialized { value: full, error_estimate: err, digits: self.digits })
    }
}

const GROUPED_NODES: usize = 24;

/// A leading block coefficient specialized two ways.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossCheck {
    pub order: i32,
    pub formal: String,
    pub direct: String,
    pub difference: String,
    pub nonzero: bool,
    /// `|formal - direct| < 10^-(digits / 2)`.
    pub agrees: bool,
}

/// Specializes the leading coefficient of `block` at `H(i) = i/7` and
/// compares it with `grouped_sum_coefficient`. `None` if the block
/// vanishes through the cap.
pub fn cross_check(ctx: &LineAnalysis<'_>, block: &MuBlock, digits: u32) -> Result<Option<CrossCheck>> {
    let Some((order, poly)) = block_leading(ctx, block)? else {
        return Ok(None);
    };
    let h = (1..=ctx.rs.rank as i64).map(|i| BigRational::new(i.into(), 7.into())).collect();
    let sp = ZetaSpecializer::new(digits)?.with_h(h);
    let formal = sp.specialize_poly(&poly)?.value;
    let direct = sp.grouped_sum_coefficient(block, order)?.value;
    let diff = Float::with_val(sp.bits, &formal - &direct).abs();
    let tol = Float::with_val(sp.bits, 10).pow(-(digits as i32 / 2));
    let show = |x: &Float, n: usize| x.to_string_radix(10, Some(n));
    Ok(Some(CrossCheck {
        order,
        formal: show(&formal, 30),
        direct: show(&direct, 30),
        difference: show(&diff, 3),
        nonzero: !formal.is_zero() && Float::with_val(sp.bits, formal.abs_ref()) > tol,
        agrees: diff < tol,
    }))
}

/// One-shot specialization of a polynomial at `digits` decimal digits.
pub fn zeta_specialize(p: &Poly, digits: u32, h: Option<&[BigRational]>) -> Result<Specialized> {
    let sp = ZetaSpecializer::new(digits)?.with_h(h.map(<[_]>::to_vec).unwrap_or_default());
    sp.specialize_poly(p)
}

/// Polynomial extrapolation to 0 of samples `(x_i, y_i)` (Neville).
pub fn extrapolate_to_zero(xs: &[Float], ys: &[Float], bits: u32) -> Float {
    let n = xs.len();
    let mut p: Vec<Float> = ys.to_vec();
    for level in 1..n {
        for i in 0..n - level {
            let num = Float::with_val(bits, &xs[i + level] * &p[i]) - Float::with_val(bits, &xs[i] * &p[i + 1]);
            let den = Float::with_val(bits, &xs[i + level] - &xs[i]);
            p[i] = num / den;
        }
    }
    p[0].clone()
}
