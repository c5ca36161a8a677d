//! Zero tests for block coefficients in reduced generators.
//!
//! Factor exponents only involve `G(n)`, `S(0, n)` and the combinations
//! `S(k, n) - (-1)^n S(-k, n)` for `k >= 2`. Each combination is replaced by
//! the single generator `S{k, n}`; the combinations are algebraically
//! independent, so a coefficient vanishes iff its reduced form does.
//!
//! A block's coefficient at relative order `m` splits by weight `a` in the
//! exponent generators and degree `b = m - a` in `H`:
//! `F(m, a) = sum_c q_c u_c E(c, a) P(c, b)` with `E(c, a)` the
//! `eps^a` coefficient of the class exponential and
//! `P(c, b) = sum_{w in c} <w lambda2, H>^b / b!`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::MuBlock;
use crate::cfactor::{factor_expansion, FactorKey};
use crate::error::Result;
use crate::modp::{Fp, RandomPoint};
use crate::rootsys::Region;
use crate::series::{Monomial, Poly, Symbol};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn factorial(n: u32) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// `(generator, sign)`: the `eps^n` exponent coefficient of `c(k + eps t)`
/// is `sign * t^n / n! * generator`.
pub(crate) fn reduced_generator(k: i64, n: u32) -> Option<(Symbol, i64)> {
    let odd = n % 2 == 1;
    let even_sign = if odd { 1 } else { -1 };
    match k {
        -1 => Some((Symbol::G(n), 1)),
        1 => Some((Symbol::G(n), even_sign)),
        0 => odd.then_some((Symbol::S { k: 0, n }, 2)),
        _ if k >= 2 => Some((Symbol::S { k: k as i32, n }, 1)),
        _ => Some((Symbol::S { k: -k as i32, n }, even_sign)),
    }
}

/// Rewrites reduced generators `S{k, n}`, `k >= 2`, in the original ones.
pub(crate) fn expand_reduced(p: &Poly) -> Poly {
    let mut out = Poly::zero();
    for (m, c) in p.terms() {
        let mut term = Poly::term(c.clone(), Monomial::one());
        for &(s, e) in m.factors() {
            let base = match s {
                Symbol::S { k, n } if k >= 2 => {
                    let sign = if n % 2 == 0 { 1 } else { -1 };
                    Poly::var(s).sub(&Poly::var(Symbol::S { k: -k, n }).scale(&rat(sign)))
                }
                _ => {
                    term = term.mul_monomial(&Monomial::pow(s, e));
                    continue;
                }
            };
            for _ in 0..e {
                term = term.mul(&base);
            }
        }
        out.add_assign(&term);
    }
    out
}

fn linear_poly(form: &[(Symbol, BigRational)]) -> Poly {
    let mut p = Poly::zero();
    for (s, c) in form {
        p.add_term(Monomial::var(*s), c.clone());
    }
    p
}

fn fp_rational(q: &BigRational) -> Fp {
    Fp::from_rational(q).expect("denominator avoids the modulus")
}

fn fp_monomial(m: &Monomial, pt: &RandomPoint) -> Fp {
    m.factors().iter().fold(Fp::ONE, |acc, &(s, e)| acc * pt.symbol(s).pow_i(i64::from(e)))
}

/// Members sharing one residual factor multiset.
#[derive(Debug, Clone)]
struct ResidualClass {
    coefficient: BigRational,
    unit: Monomial,
    /// Linear form of the `eps^n` exponent coefficient, index `n >= 1`.
    exponent: Vec<Vec<(Symbol, BigRational)>>,
    members: Vec<Vec<i64>>,
    /// `E(c, a)` computed so far.
    e_poly: Vec<Poly>,
    prefactor_fp: Fp,
    e_fp: Vec<Fp>,
    p_fp: Vec<Fp>,
}

impl ResidualClass {
    fn extend_e(&mut self, a: usize) {
        if self.e_poly.is_empty() {
            self.e_poly.push(Poly::one());
        }
        while self.e_poly.len() <= a {
            let n = self.e_poly.len();
            let mut acc = Poly::zero();
            for j in 1..=n {
                if self.exponent[j].is_empty() || self.e_poly[n - j].is_zero() {
                    continue;
                }
                let w = BigRational::new(BigInt::from(j), BigInt::from(n));
                acc.add_scaled(&linear_poly(&self.exponent[j]).mul(&self.e_poly[n - j]), &w, &Monomial::one());
            }
            self.e_poly.push(acc);
        }
    }
}

/// One block prepared for repeated coefficient tests.
#[derive(Debug, Clone)]
pub(crate) struct BlockState {
    pub eps_power: i32,
    pub region: Region,
    rank: usize,
    common_coefficient: BigRational,
    common_unit: Monomial,
    classes: Vec<ResidualClass>,
}

fn common_factors(block: &MuBlock) -> BTreeMap<FactorKey, u32> {
    let mut common: BTreeMap<FactorKey, u32> = block.classes[0].factors.iter().copied().collect();
    for c in &block.classes[1..] {
        let here: BTreeMap<FactorKey, u32> = c.factors.iter().copied().collect();
        common = common.into_iter().filter_map(|(k, m)| here.get(&k).map(|&h| (k, m.min(h)))).collect();
    }
    common
}

impl BlockState {
    /// Prepares `block` for relative orders up to `max_m`.
    pub fn new(block: &MuBlock, rank: usize, max_m: usize, pt: &RandomPoint) -> Result<Self> {
        let common = common_factors(block);
        let mut common_coefficient = BigRational::one();
        let mut common_unit = Monomial::one();
        let mut classes = Vec::new();
        'classes: for class in &block.classes {
            let mut coefficient = BigRational::one();
            let mut unit = Monomial::one();
            let mut exponent: Vec<Vec<(Symbol, BigRational)>> = vec![Vec::new(); max_m + 1];
            for &(key, mult) in &class.factors {
                let Some(f) = factor_expansion(key, 0)? else {
                    continue 'classes;
                };
                let shared = common.get(&key).copied().unwrap_or(0);
                let own = mult - shared;
                for _ in 0..own {
                    coefficient *= &f.coefficient;
                    unit = unit.mul(&f.unit);
                }
                if own == 0 || key.t == 0 {
                    continue;
                }
                let t = BigInt::from(key.t);
                let mut tpow = BigInt::one();
                for (n, slot) in exponent.iter_mut().enumerate().skip(1) {
                    tpow *= &t;
                    let Some((sym, sign)) = reduced_generator(key.k, n as u32) else {
                        continue;
                    };
                    let w = BigRational::new(&tpow * BigInt::from(sign * i64::from(own)), factorial(n as u32));
                    match slot.iter_mut().find(|(s, _)| *s == sym) {
                        Some((_, c)) => *c += w,
                        None => slot.push((sym, w)),
                    }
                }
            }
            for slot in exponent.iter_mut() {
                slot.retain(|(_, c)| !c.is_zero());
                slot.sort_by_key(|(s, _)| *s);
            }
            classes.push(ResidualClass {
                coefficient,
                unit,
                exponent,
                members: class.members.clone(),
                e_poly: Vec::new(),
                prefactor_fp: Fp::ZERO,
                e_fp: Vec::new(),
                p_fp: Vec::new(),
            });
        }
        for (&key, &mult) in &common {
            if let Some(f) = factor_expansion(key, 0)? {
                for _ in 0..mult {
                    common_coefficient *= &f.coefficient;
                    common_unit = common_unit.mul(&f.unit);
                }
            }
        }
        let h: Vec<Fp> = (1..=rank).map(|i| pt.symbol(Symbol::H(i as u32))).collect();
        let inv_fact: Vec<Fp> = (0..=max_m as u32).map(|n| fp_rational(&BigRational::new(BigInt::one(), factorial(n)))).collect();
        for c in &mut classes {
            c.prefactor_fp = fp_rational(&c.coefficient) * fp_monomial(&c.unit, pt);
            let z: Vec<Fp> = c
                .exponent
                .iter()
                .map(|form| form.iter().fold(Fp::ZERO, |acc, (s, q)| acc + fp_rational(q) * pt.symbol(*s)))
                .collect();
            let mut e = vec![Fp::ONE];
            for n in 1..=max_m {
                let mut acc = Fp::ZERO;
                for j in 1..=n {
                    acc += Fp::from_i64(j as i64) * z[j] * e[n - j];
                }
                e.push(acc * Fp::from_i64(n as i64).inv());
            }
            c.e_fp = e;
            let mut p = vec![Fp::ZERO; max_m + 1];
            for w in &c.members {
                let hw = w.iter().zip(&h).fold(Fp::ZERO, |acc, (&x, &y)| acc + Fp::from_i64(x) * y);
                let mut pow = Fp::ONE;
                for (b, slot) in p.iter_mut().enumerate() {
                    *slot += pow * inv_fact[b];
                    pow *= hw;
                }
            }
            c.p_fp = p;
        }
        Ok(BlockState { eps_power: block.eps_power, region: block.region, rank, common_coefficient, common_unit, classes })
    }

    /// Values of `F(m, a)`, `a = 0..=m`, at the random point.
    pub fn random_components(&self, m: usize) -> Vec<Fp> {
        (0..=m)
            .map(|a| {
                self.classes.iter().fold(Fp::ZERO, |acc, c| acc + c.prefactor_fp * c.e_fp[a] * c.p_fp[m - a])
            })
            .collect()
    }

    /// Exact test of `F(m, a) = 0`.
    pub fn component_is_zero(&mut self, m: usize, a: usize) -> bool {
        let b = m - a;
        let n = self.classes.len();
        let mut columns: BTreeMap<Monomial, Vec<BigRational>> = BTreeMap::new();
        for (ci, c) in self.classes.iter_mut().enumerate() {
            c.extend_e(a);
            for (mono, q) in c.e_poly[a].terms() {
                let v = columns.entry(mono.mul(&c.unit)).or_insert_with(|| vec![BigRational::zero(); n]);
                v[ci] += q * &c.coefficient;
            }
        }
        let mut basis = Basis::default();
        for v in columns.into_values() {
            basis.insert(v);
            if basis.rows.len() == n {
                break;
            }
        }
        if basis.rows.is_empty() {
            return true;
        }
        let rows: Vec<Vec<BigInt>> = basis.rows.iter().map(|(_, r)| integer_row(r)).collect();
        let powers: Vec<Vec<Vec<Vec<Option<i128>>>>> =
            self.classes.iter().map(|c| c.members.iter().map(|w| power_table(w, b)).collect()).collect();
        let mut zero = true;
        for_each_composition(self.rank, b as u32, &mut |alpha| {
            let sums: Vec<BigInt> = powers.iter().map(|class| power_sum(class, alpha)).collect();
            for row in &rows {
                let dot: BigInt = row.iter().zip(&sums).map(|(x, y)| x * y).sum();
                if !dot.is_zero() {
                    zero = false;
                    return false;
                }
            }
            true
        });
        zero
    }

    /// Whether the coefficient at relative order `m` is nonzero.
    /// `exact = false` only trusts the random evaluation and answers `None`
    /// when it is zero.
    pub fn coefficient_nonzero(&mut self, m: usize, exact: bool) -> Option<bool> {
        let comps = self.random_components(m);
        if comps.iter().any(|v| !v.is_zero()) {
            return Some(true);
        }
        if !exact {
            return None;
        }
        Some((0..=m).any(|a| !self.component_is_zero(m, a)))
    }

    /// Whether the coefficient at relative order `m` has a monomial of
    /// positive degree in `H`.
    pub fn h_dependent(&mut self, m: usize) -> bool {
        let comps = self.random_components(m);
        if comps[..m].iter().any(|v| !v.is_zero()) {
            return true;
        }
        (0..m).any(|a| !self.component_is_zero(m, a))
    }

    /// The block coefficient at relative order `m`, in the original
    /// generators, assuming all lower coefficients vanish.
    pub fn leading_poly(&mut self, m: usize) -> Poly {
        let mut out = Poly::zero();
        let h: Vec<Poly> = (1..=self.rank).map(|i| Poly::var(Symbol::H(i as u32))).collect();
        for a in 0..=m {
            let b = m - a;
            let inv_b = BigRational::new(BigInt::one(), factorial(b as u32));
            for c in &mut self.classes {
                c.extend_e(a);
                if c.e_poly[a].is_zero() {
                    continue;
                }
                let mut p = Poly::zero();
                for w in &c.members {
                    let mut hw = Poly::zero();
                    for (x, hi) in w.iter().zip(&h) {
                        hw.add_scaled(hi, &rat(*x), &Monomial::one());
                    }
                    let mut pow = Poly::one();
                    for _ in 0..b {
                        pow = pow.mul(&hw);
                    }
                    p.add_assign(&pow);
                }
                let term = c.e_poly[a].mul(&p).mul(&Poly::term(&c.coefficient * &inv_b, c.unit.clone()));
                out.add_assign(&term);
            }
        }
        let common = Poly::term(self.common_coefficient.clone(), self.common_unit.clone());
        expand_reduced(&out.mul(&common))
    }
}

/// Row-echelon basis over the rationals; rows have pivot entry 1.
#[derive(Debug, Default)]
struct Basis {
    rows: Vec<(usize, Vec<BigRational>)>,
}

impl Basis {
    fn insert(&mut self, mut v: Vec<BigRational>) {
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let f = v[*pivot].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &f * r;
                }
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[p].recip();
            for x in v.iter_mut() {
                *x *= &inv;
            }
            self.rows.push((p, v));
        }
    }
}

fn integer_row(r: &[BigRational]) -> Vec<BigInt> {
    let l = r.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    r.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

/// `table[i][e] = w_i^e`, `None` on overflow.
fn power_table(w: &[i64], b: usize) -> Vec<Vec<Option<i128>>> {
    w.iter()
        .map(|&x| {
            let mut row = vec![Some(1i128)];
            for e in 1..=b {
                row.push(row[e - 1].and_then(|p| p.checked_mul(i128::from(x))));
            }
            row
        })
        .collect()
}

fn power_sum(members: &[Vec<Vec<Option<i128>>>], alpha: &[u32]) -> BigInt {
    let mut fast: Option<i128> = Some(0);
    for t in members {
        let mut term: Option<i128> = Some(1);
        for (row, &e) in t.iter().zip(alpha) {
            term = term.and_then(|x| row[e as usize].and_then(|y| x.checked_mul(y)));
        }
        fast = fast.and_then(|s| term.and_then(|x| s.checked_add(x)));
    }
    if let Some(s) = fast {
        return BigInt::from(s);
    }
    members
        .iter()
        .map(|t| {
            t.iter()
                .zip(alpha)
                .map(|(row, &e)| {
                    let base = row[1].expect("coordinates fit");
                    num_traits::pow(BigInt::from(base), e as usize)
                })
                .product::<BigInt>()
        })
        .sum()
}

/// Calls `f` on every `alpha` with `rank` parts summing to `total` until it
/// returns false.
fn for_each_composition(rank: usize, total: u32, f: &mut dyn FnMut(&[u32]) -> bool) {
    fn rec(alpha: &mut Vec<u32>, rank: usize, left: u32, f: &mut dyn FnMut(&[u32]) -> bool) -> bool {
        if alpha.len() + 1 == rank {
            alpha.push(left);
            let go = f(alpha);
            alpha.pop();
            return go;
        }
        for e in (0..=left).rev() {
            alpha.push(e);
            let go = rec(alpha, rank, left - e, f);
            alpha.pop();
            if !go {
                return false;
            }
        }
        true
    }
    if rank == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    rec(&mut Vec::with_capacity(rank), rank, total, f);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compositions_are_counted() {
        let mut n = 0;
        for_each_composition(3, 4, &mut |a| {
            assert_eq!(a.iter().sum::<u32>(), 4);
            n += 1;
            true
        });
        assert_eq!(n, 15);
    }

    #[test]
    fn reduced_generators_match_factor_exponents() {
        use crate::cfactor::factor_expansion;
        for k in -4..=4 {
            for t in 1..=2 {
                let f = factor_expansion(FactorKey::new(k, t), 4).unwrap().unwrap();
                for n in 1..=4u32 {
                    let direct = f.exponent.coeff(n as i32).unwrap();
                    let reduced = match reduced_generator(k, n) {
                        Some((s, sign)) => Poly::var(s).scale(&BigRational::new(
                            BigInt::from(sign) * num_traits::pow(BigInt::from(t), n as usize),
                            factorial(n),
                        )),
                        None => Poly::zero(),
                    };
                    assert_eq!(expand_reduced(&reduced), direct, "k={k} t={t} n={n}");
                }
            }
        }
    }
}
