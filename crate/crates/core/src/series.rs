//! Exact coefficient algebra: polynomials over the rationals in named
//! formal generators, and truncated Laurent series in `eps` over them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A formal generator of the coefficient ring.
///
/// Declaration order is the canonical generator order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    /// `n`-th derivative of `c_l` at the integer `k`.
    S { k: i32, n: u32 },
    /// `n`-th derivative of `c_{l,1}` at 0, `n >= 1`.
    G(u32),
    /// Unit: the value `c(k)`, stored for `k >= 2` only.
    C(u32),
    /// Unit: `exp(G(0))`.
    U,
    /// Coordinate `i` (1-based) of `H` in the simple-coroot basis.
    H(u32),
}

impl Symbol {
    pub fn is_unit(self) -> bool {
        matches!(self, Symbol::C(_) | Symbol::U)
    }

    pub fn is_h(self) -> bool {
        matches!(self, Symbol::H(_))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::S { k, n } => write!(f, "S({k},{n})"),
            Symbol::G(n) => write!(f, "G({n})"),
            Symbol::C(k) => write!(f, "C({k})"),
            Symbol::U => write!(f, "U"),
            Symbol::H(i) => write!(f, "H({i})"),
        }
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad symbol {s:?}"));
        if s == "U" {
            return Ok(Symbol::U);
        }
        let open = s.find('(').ok_or_else(bad)?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
        match &s[..open] {
            "S" => {
                let (k, n) = inner.split_once(',').ok_or_else(bad)?;
                Ok(Symbol::S { k: num(k)? as i32, n: u32::try_from(num(n)?).map_err(|_| bad())? })
            }
            "G" => Ok(Symbol::G(u32::try_from(num(inner)?).map_err(|_| bad())?)),
            "C" => {
                let k = num(inner)?;
                if k < 2 {
                    return Err(bad());
                }
                Ok(Symbol::C(k as u32))
            }
            "H" => Ok(Symbol::H(u32::try_from(num(inner)?).map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

/// A product of generators with integer exponents, sorted by generator.
/// Only unit generators may carry negative exponents.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(SmallVec<[(Symbol, i32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(sym: Symbol) -> Self {
        Monomial::pow(sym, 1)
    }

    pub fn pow(sym: Symbol, exp: i32) -> Self {
        assert!(exp >= 0 || sym.is_unit(), "negative exponent on non-unit {sym}");
        let mut m = Monomial::one();
        if exp != 0 {
            m.0.push((sym, exp));
        }
        m
    }

    /// The unit `c(k)` for `|k| >= 2`, using `C(-k) = C(k)^-1`.
    pub fn c_value(k: i64) -> Self {
        assert!(k.abs() >= 2, "C(k) needs |k| >= 2");
        Monomial::pow(Symbol::C(k.unsigned_abs() as u32), k.signum() as i32)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Symbol, i32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0, e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn inverse(&self) -> Monomial {
        assert!(self.0.iter().all(|(s, _)| s.is_unit()), "only unit monomials are invertible");
        Monomial(self.0.iter().map(|&(s, e)| (s, -e)).collect())
    }

    /// Total degree in the generators selected by `pred`.
    pub fn degree_in(&self, pred: impl Fn(Symbol) -> bool) -> i32 {
        self.0.iter().filter(|(s, _)| pred(*s)).map(|(_, e)| e).sum()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, (s, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut m = Monomial::one();
        if s == "1" {
            return Ok(m);
        }
        for factor in s.split('*') {
            let (sym, exp) = match factor.split_once('^') {
                Some((sym, e)) => (sym, e.parse::<i32>().map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?),
                None => (factor, 1),
            };
            let sym: Symbol = sym.parse()?;
            if exp < 0 && !sym.is_unit() {
                return Err(Error::Parse(format!("negative exponent on non-unit {sym}")));
            }
            m = m.mul(&Monomial::pow(sym, exp));
        }
        Ok(m)
    }
}

/// Values assigned to the generators, used to specialize polynomials.
pub trait Specialization {
    type Value: Clone;
    fn rational(&self, q: &BigRational) -> Self::Value;
    fn symbol(&self, s: Symbol) -> Result<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn inv(&self, a: &Self::Value) -> Self::Value;
}

/// Polynomial with exact rational coefficients in canonical form: terms
/// sorted by monomial, no zero coefficients. Two polynomials are equal iff
/// their representations are identical.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::term(c, Monomial::one())
    }

    pub fn from_int(c: i64) -> Self {
        Poly::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn term(c: BigRational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn var(sym: Symbol) -> Self {
        Poly::term(BigRational::one(), Monomial::var(sym))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Constant term, zero if absent.
    pub fn constant_term(&self) -> BigRational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += c * m * other`.
    pub fn add_scaled(&mut self, other: &Poly, c: &BigRational, m: &Monomial) {
        if c.is_zero() {
            return;
        }
        for (om, oc) in &other.terms {
            self.add_term(om.mul(m), oc * c);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|(x, c)| (x.mul(m), c.clone())).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        for (m, c) in &small.terms {
            out.add_scaled(large, c, m);
        }
        out
    }

    /// True iff some monomial has positive total degree in the generators
    /// selected by `pred`.
    pub fn depends_on(&self, pred: impl Fn(Symbol) -> bool + Copy) -> bool {
        self.terms.keys().any(|m| m.degree_in(pred) > 0)
    }

    pub fn eval<S: Specialization>(&self, sp: &S) -> Result<S::Value> {
        let mut acc = sp.rational(&BigRational::zero());
        for (m, c) in &self.terms {
            let mut t = sp.rational(c);
            for &(s, e) in m.factors() {
                let v = sp.symbol(s)?;
                let base = if e < 0 { sp.inv(&v) } else { v };
                for _ in 0..e.unsigned_abs() {
                    t = sp.mul(&t, &base);
                }
            }
            acc = sp.add(&acc, &t);
        }
        Ok(acc)
    }
}

/// Structural zero test: all non-unit generators are algebraically
/// independent, so a polynomial vanishes iff its canonical form is empty.
pub fn is_zero(p: &Poly) -> bool {
    p.is_zero()
}

fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().map_err(|_| bad())?;
            let d: BigInt = d.parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            if m.is_one() {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl FromStr for Poly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut p = Poly::zero();
        if s == "0" {
            return Ok(p);
        }
        let (mut neg, mut rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s),
        };
        loop {
            let cut = [rest.find(" + "), rest.find(" - ")].into_iter().flatten().min();
            let (term, next) = match cut {
                Some(i) => (&rest[..i], Some((&rest[i + 1..i + 2] == "-", &rest[i + 3..]))),
                None => (rest, None),
            };
            let first = term.split('*').next().unwrap_or_default();
            let (coef, mono) = if first.chars().next().is_some_and(|ch| ch.is_ascii_digit()) {
                let c = parse_rational(first)?;
                let mono = term.get(first.len() + 1..).unwrap_or("1");
                (c, mono)
            } else {
                (BigRational::one(), term)
            };
            let coef = if neg { -coef } else { coef };
            p.add_term(mono.parse()?, coef);
            match next {
                Some((n, r)) => {
                    neg = n;
                    rest = r;
                }
                None => break,
            }
        }
        Ok(p)
    }
}

/// Laurent series in `eps` known exactly for powers `min_power..=bound`.
///
/// Invariant: either the coefficient at `min_power` is nonzero, or the
/// series is the canonical zero (no coefficients, `min_power = bound + 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    min_power: i32,
    bound: i32,
    coeffs: Vec<Poly>,
}

impl TruncatedSeries {
    pub fn zero(bound: i32) -> Self {
        TruncatedSeries { min_power: bound + 1, bound, coeffs: Vec::new() }
    }

    /// Series with coefficient `coeffs[i]` at `eps^(min_power + i)`, known
    /// up to `bound`. Coefficients past the bound are dropped.
    pub fn from_coeffs(min_power: i32, mut coeffs: Vec<Poly>, bound: i32) -> Self {
        let keep = (bound - min_power + 1).max(0) as usize;
        coeffs.truncate(keep);
        let mut s = TruncatedSeries { min_power, bound, coeffs };
        s.normalize();
        s
    }

    pub fn constant(p: Poly, bound: i32) -> Self {
        TruncatedSeries::from_coeffs(0, vec![p], bound)
    }

    pub fn one(bound: i32) -> Self {
        TruncatedSeries::constant(Poly::one(), bound)
    }

    /// `p * eps^power`.
    pub fn monomial(p: Poly, power: i32, bound: i32) -> Self {
        TruncatedSeries::from_coeffs(power, vec![p], bound)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => {
                self.coeffs.clear();
                self.min_power = self.bound + 1;
            }
            Some(i) => {
                self.coeffs.drain(..i);
                self.min_power += i as i32;
                while self.coeffs.last().is_some_and(Poly::is_zero) {
                    self.coeffs.pop();
                }
            }
        }
    }

    pub fn min_power(&self) -> i32 {
        self.min_power
    }

    pub fn bound(&self) -> i32 {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `eps^k`; `None` when `k` is past the bound.
    pub fn coeff(&self, k: i32) -> Option<Poly> {
        if k > self.bound {
            return None;
        }
        Some(self.coeff_ref(k).cloned().unwrap_or_default())
    }

    fn coeff_ref(&self, k: i32) -> Option<&Poly> {
        if k < self.min_power {
            return None;
        }
        self.coeffs.get((k - self.min_power) as usize)
    }

    /// `(power, coefficient)` pairs for the nonzero coefficients.
    pub fn nonzero_terms(&self) -> impl Iterator<Item = (i32, &Poly)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.min_power + i as i32, c))
    }

    pub fn truncate(&self, bound: i32) -> Self {
        let bound = bound.min(self.bound);
        TruncatedSeries::from_coeffs(self.min_power, self.coeffs.clone(), bound)
    }

    pub fn add(&self, other: &Self) -> Self {
        let bound = self.bound.min(other.bound);
        let lo = self.min_power.min(other.min_power);
        if lo > bound {
            return TruncatedSeries::zero(bound);
        }
        let coeffs = (lo..=bound)
            .map(|k| match (self.coeff_ref(k), other.coeff_ref(k)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => Poly::zero(),
            })
            .collect();
        TruncatedSeries::from_coeffs(lo, coeffs, bound)
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            min_power: self.min_power,
            bound: self.bound,
            coeffs: self.coeffs.iter().map(Poly::neg).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplies every coefficient by `p`.
    pub fn scale_poly(&self, p: &Poly) -> Self {
        TruncatedSeries::from_coeffs(self.min_power, self.coeffs.iter().map(|c| c.mul(p)).collect(), self.bound)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        TruncatedSeries::from_coeffs(self.min_power, self.coeffs.iter().map(|x| x.scale(c)).collect(), self.bound)
    }

    /// Multiplies by `eps^m`.
    pub fn shift(&self, m: i32) -> Self {
        TruncatedSeries { min_power: self.min_power + m, bound: self.bound + m, coeffs: self.coeffs.clone() }
    }

    /// Highest power at which the product of `self` and `other` is exact.
    pub fn product_bound(&self, other: &Self) -> i32 {
        (self.min_power + other.bound).min(other.min_power + self.bound)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let bound = self.product_bound(other);
        let lo = self.min_power + other.min_power;
        if self.is_zero() || other.is_zero() || lo > bound {
            return TruncatedSeries::zero(bound);
        }
        let mut coeffs = vec![Poly::zero(); (bound - lo + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= coeffs.len() {
                    break;
                }
                let prod = a.mul(b);
                coeffs[k].add_assign(&prod);
            }
        }
        TruncatedSeries::from_coeffs(lo, coeffs, bound)
    }

    /// Product that must be exact through `eps^bound`.
    pub fn mul_to(&self, other: &Self, bound: i32) -> Result<Self> {
        let achievable = self.product_bound(other);
        if achievable < bound {
            return Err(Error::TruncationWindow { requested: bound, achievable });
        }
        Ok(self.mul(other).truncate(bound))
    }

    /// `sum_k self^k / k!`; requires `min_power >= 1`.
    pub fn exp(&self) -> Result<Self> {
        if !self.is_zero() && self.min_power < 1 {
            return Err(Error::ConstantPartInExp(self.min_power));
        }
        let bound = self.bound;
        if bound < 0 {
            return Ok(TruncatedSeries::zero(bound));
        }
        let a: Vec<Poly> = (0..=bound).map(|k| self.coeff_ref(k).cloned().unwrap_or_default()).collect();
        Ok(TruncatedSeries::from_coeffs(0, exp_coefficients(&a, bound as usize), bound))
    }
}

/// Coefficients `0..=order` of `exp(a)` where `a[0]` is ignored (taken as 0),
/// via `n E_n = sum_{m=1}^n m a_m E_{n-m}`.
pub(crate) fn exp_coefficients(a: &[Poly], order: usize) -> Vec<Poly> {
    let mut e = Vec::with_capacity(order + 1);
    e.push(Poly::one());
    for n in 1..=order {
        let mut acc = Poly::zero();
        for m in 1..=n {
            let Some(am) = a.get(m) else { break };
            if am.is_zero() || e[n - m].is_zero() {
                continue;
            }
            let w = BigRational::new(BigInt::from(m), BigInt::from(n));
            let prod = am.mul(&e[n - m]);
            acc.add_scaled(&prod, &w, &Monomial::one());
        }
        e.push(acc);
    }
    e
}

pub fn series_add(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
    a.add(b)
}

pub fn series_mul(a: &TruncatedSeries, b: &TruncatedSeries) -> TruncatedSeries {
    a.mul(b)
}

pub fn series_exp(a: &TruncatedSeries) -> Result<TruncatedSeries> {
    a.exp()
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "series[min={},bound={}]{{", self.min_power, self.bound)?;
        for (i, (k, c)) in self.nonzero_terms().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{k}: {c}")?;
        }
        f.write_str("}")
    }
}

impl FromStr for TruncatedSeries {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("bad series ({what}): {s:?}"));
        let rest = s.trim().strip_prefix("series[min=").ok_or_else(|| bad("prefix"))?;
        let (min, rest) = rest.split_once(",bound=").ok_or_else(|| bad("bound"))?;
        let (bound, body) = rest.split_once("]{").ok_or_else(|| bad("body"))?;
        let body = body.strip_suffix('}').ok_or_else(|| bad("close"))?;
        let min: i32 = min.parse().map_err(|_| bad("min"))?;
        let bound: i32 = bound.parse().map_err(|_| bad("bound"))?;
        let mut coeffs: Vec<Poly> = Vec::new();
        if !body.is_empty() {
            for entry in body.split("; ") {
                let (k, p) = entry.split_once(": ").ok_or_else(|| bad("entry"))?;
                let k: i32 = k.parse().map_err(|_| bad("power"))?;
                if k < min || k > bound {
                    return Err(bad("power out of window"));
                }
                let idx = (k - min) as usize;
                if coeffs.len() <= idx {
                    coeffs.resize(idx + 1, Poly::zero());
                }
                coeffs[idx] = p.parse()?;
            }
        }
        let out = TruncatedSeries::from_coeffs(min, coeffs, bound);
        if !out.is_zero() && out.min_power != min {
            return Err(bad("leading coefficient is zero"));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn eps(p: Poly, power: i32, bound: i32) -> TruncatedSeries {
        TruncatedSeries::monomial(p, power, bound)
    }

    #[test]
    fn product_of_binomials() {
        let a = TruncatedSeries::from_coeffs(0, vec![Poly::one(), Poly::one()], 2);
        let b = TruncatedSeries::from_coeffs(0, vec![Poly::one(), Poly::from_int(-1)], 2);
        let p = a.mul(&b);
        assert_eq!(p.bound(), 2);
        assert_eq!(p.coeff(0).unwrap(), Poly::one());
        assert!(p.coeff(1).unwrap().is_zero());
        assert_eq!(p.coeff(2).unwrap(), Poly::from_int(-1));
    }

    #[test]
    fn laurent_cancellation() {
        let inv = eps(Poly::one(), -1, 3);
        let e = eps(Poly::one(), 1, 5);
        let p = inv.mul(&e);
        assert_eq!(p.min_power(), 0);
        assert_eq!(p.coeff(0).unwrap(), Poly::one());
    }

    #[test]
    fn unit_relation() {
        let c2 = Poly::term(q(1, 1), Monomial::c_value(2));
        let c2inv = Poly::term(q(1, 1), Monomial::c_value(-2));
        assert_eq!(c2.mul(&c2inv), Poly::one());
        assert!(is_zero(&c2.mul(&c2inv).sub(&Poly::one())));
        assert!(!is_zero(&Poly::var(Symbol::G(1)).sub(&Poly::var(Symbol::S { k: 2, n: 1 }))));
    }

    #[test]
    fn exp_expansion() {
        let g1 = Poly::var(Symbol::G(1));
        let e = eps(g1.clone(), 1, 2).exp().unwrap();
        assert_eq!(e.coeff(0).unwrap(), Poly::one());
        assert_eq!(e.coeff(1).unwrap(), g1);
        assert_eq!(e.coeff(2).unwrap(), g1.mul(&g1).scale(&q(1, 2)));
        assert_eq!(TruncatedSeries::zero(3).exp().unwrap(), TruncatedSeries::one(3));
        let err = TruncatedSeries::one(3).exp().unwrap_err();
        assert!(err.to_string().contains("constant part must be extracted as a unit"));
    }

    #[test]
    fn exp_is_a_homomorphism_against_brute_force() {
        // Brute force: expand exp(x eps) exp(y eps) and exp((x+y) eps) from
        // the binomial theorem, independent of the recurrence.
        let x = Poly::var(Symbol::H(1));
        let y = Poly::var(Symbol::S { k: 3, n: 2 });
        for n in 1..=4 {
            let lhs = eps(x.add(&y), 1, n).exp().unwrap();
            let rhs = eps(x.clone(), 1, n).exp().unwrap().mul(&eps(y.clone(), 1, n).exp().unwrap());
            assert_eq!(lhs, rhs);
            for k in 0..=n {
                let mut direct = Poly::zero();
                for i in 0..=k {
                    let mut t = Poly::one();
                    for _ in 0..i {
                        t = t.mul(&x);
                    }
                    for _ in 0..k - i {
                        t = t.mul(&y);
                    }
                    let denom: i64 = (1..=i as i64).product::<i64>() * (1..=(k - i) as i64).product::<i64>();
                    direct.add_assign(&t.scale(&q(1, denom)));
                }
                assert_eq!(lhs.coeff(k).unwrap(), direct, "order {k}");
            }
        }
    }

    #[test]
    fn truncation_windows() {
        let a = eps(Poly::one(), -2, 1);
        let b = eps(Poly::one(), 0, 4);
        assert_eq!(a.product_bound(&b), 1);
        let err = a.mul_to(&b, 3).unwrap_err();
        assert_eq!(err, Error::TruncationWindow { requested: 3, achievable: 1 });
        assert!(a.mul_to(&b, 1).is_ok());
    }

    #[test]
    fn poly_text_round_trip() {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), q(-3, 2));
        p.add_term(Monomial::var(Symbol::S { k: -2, n: 1 }).mul(&Monomial::var(Symbol::H(3))), q(1, 1));
        p.add_term(Monomial::c_value(-5).mul(&Monomial::pow(Symbol::U, 2)), q(-7, 3));
        let text = p.to_string();
        let back: Poly = text.parse().unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_string(), text);
        assert_eq!("0".parse::<Poly>().unwrap(), Poly::zero());
        assert!("S(2,1)^-1".parse::<Poly>().is_err());
    }

    #[test]
    fn series_text_round_trip() {
        let g = Poly::var(Symbol::G(1));
        let s = eps(g, 1, 4).exp().unwrap().shift(-1);
        let back: TruncatedSeries = s.to_string().parse().unwrap();
        assert_eq!(back, s);
        let z = TruncatedSeries::zero(2);
        assert_eq!(z.to_string().parse::<TruncatedSeries>().unwrap(), z);
    }
}
