//! The constant-term pipeline: group `W_rel` by `mu = w lambda1`, compress
//! each group by inversion multiset, expand every block in `eps`, and
//! decide the square-integrability criterion.

mod reduced;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64 as Q};
use num_traits::One;
use rayon::prelude::*;

use crate::cfactor::{factor_expansion, factor_series, FactorKey, LogProduct};
use crate::error::{Error, Result};
use crate::modp::RandomPoint;
use crate::orbits::{Counts, LineSpec, OrdValue};
use crate::rootsys::{Region, RootSystem, TypeLabel, Weight};
use crate::series::{Monomial, Poly, Symbol, TruncatedSeries};
use reduced::BlockState;

/// Deformation context `lambda1 + eps lambda2` with an order cap.
#[derive(Debug, Clone)]
pub struct LineAnalysis<'a> {
    pub rs: &'a RootSystem,
    pub line: LineSpec,
    /// Largest power of `eps` examined.
    pub max_order: i32,
}

impl<'a> LineAnalysis<'a> {
    pub fn new(rs: &'a RootSystem, line: LineSpec, max_order: i32) -> Result<Self> {
        if line.lambda1.rank() != rs.rank {
            return Err(Error::RankMismatch { expected: rs.rank, got: line.lambda1.rank() });
        }
        if !line.lambda1.is_integral() {
            return Err(Error::NonIntegralLine(format!("lambda1 = {} has non-integral coroot pairings", line.lambda1)));
        }
        Ok(LineAnalysis { rs, line, max_order })
    }

    fn l1_ints(&self) -> Vec<i64> {
        self.line.lambda1.to_ints().expect("checked integral")
    }

    /// Number of `H` generators.
    pub fn h_count(&self) -> usize {
        self.rs.rank
    }
}

/// Members of a block sharing one inversion multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InversionClass {
    /// `(k, t)` with multiplicity, sorted.
    pub factors: Vec<(FactorKey, u32)>,
    /// Images `w lambda2`, sorted.
    pub members: Vec<Vec<i64>>,
}

impl InversionClass {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// All of `W_rel` with a common image `mu`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuBlock {
    pub mu: Vec<i64>,
    pub region: Region,
    pub eps_power: i32,
    pub classes: Vec<InversionClass>,
}

impl MuBlock {
    pub fn mu_weight(&self) -> Weight {
        Weight::from_ints(self.mu.iter().copied())
    }

    pub fn member_count(&self) -> usize {
        self.classes.iter().map(InversionClass::len).sum()
    }
}

fn eps_power_of(factors: &[(FactorKey, u32)]) -> i32 {
    factors.iter().map(|(f, m)| f.eps_power() * *m as i32).sum()
}

fn word_string(word: &[u8]) -> String {
    let parts: Vec<String> = word.iter().map(u8::to_string).collect();
    format!("[{}]", parts.join(","))
}

/// Compresses a list of `(k, t)` pairs into sorted multiplicities.
pub(crate) fn compress(pairs: &[(i64, i64)]) -> Vec<(FactorKey, u32)> {
    let mut sorted: Vec<FactorKey> = pairs.iter().map(|&(k, t)| FactorKey::new(k, t)).collect();
    sorted.sort_unstable();
    let mut out: Vec<(FactorKey, u32)> = Vec::new();
    for f in sorted {
        match out.last_mut() {
            Some((g, m)) if *g == f => *m += 1,
            _ => out.push((f, 1)),
        }
    }
    out
}

/// Partitions `W_rel` into blocks by `mu`, sorted by `mu`; inside a block,
/// classes are sorted by inversion multiset.
pub fn build_blocks(ctx: &LineAnalysis<'_>) -> Result<Vec<MuBlock>> {
    let rs = ctx.rs;
    let l1 = ctx.l1_ints();
    let mut groups: HashMap<Vec<i64>, HashMap<Vec<(FactorKey, u32)>, Vec<Vec<i64>>>> = HashMap::new();
    let mut failure: Option<Error> = None;
    rs.visit_wrel(ctx.line.j, &l1, |node| {
        if failure.is_some() {
            return;
        }
        if let Some(&(_, t)) = node.inversions.iter().find(|&&(_, t)| t < 1) {
            failure = Some(Error::LeviInversion { word: word_string(&node.word()), t });
            return;
        }
        groups
            .entry(node.image_l1.to_vec())
            .or_default()
            .entry(compress(node.inversions))
            .or_default()
            .push(node.image_l2.to_vec());
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let mut blocks: Vec<MuBlock> = groups
        .into_iter()
        .map(|(mu, classes)| {
            let mut classes: Vec<InversionClass> = classes
                .into_iter()
                .map(|(factors, mut members)| {
                    members.sort_unstable();
                    InversionClass { factors, members }
                })
                .collect();
            classes.sort_unstable_by(|a, b| a.factors.cmp(&b.factors));
            let eps_power = eps_power_of(&classes[0].factors);
            if let Some(c) = classes.iter().find(|c| eps_power_of(&c.factors) != eps_power) {
                return Err(Error::EpsilonPowerInvariance {
                    mu: format!("{}", Weight::from_ints(mu.iter().copied())),
                    first: eps_power,
                    second: eps_power_of(&c.factors),
                });
            }
            let region = rs.langlands_classify(&Weight::from_ints(mu.iter().copied()));
            Ok(MuBlock { mu, region, eps_power, classes })
        })
        .collect::<Result<_>>()?;
    blocks.sort_unstable_by(|a, b| a.mu.cmp(&b.mu));
    Ok(blocks)
}

/// Geometric data of a line, computed without any series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geometry {
    pub wrel_count: u64,
    pub distinct_mu: u64,
    pub counts: Counts,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#W_rel={} distinct_mu={} counts={}", self.wrel_count, self.distinct_mu, self.counts)
    }
}

pub fn counts_of<'b>(regions: impl IntoIterator<Item = &'b Region>) -> Counts {
    let mut c = Counts::new(0, 0, 0);
    for r in regions {
        match r {
            Region::StrictInterior => c.strict += 1,
            Region::Boundary => {
                c.non_strict += 1;
                c.boundary += 1;
            }
            Region::Outside => c.non_strict += 1,
        }
    }
    c
}

/// Counts `W_rel`, its distinct images and their Langlands classes, and
/// checks `t >= 1` for every inversion.
pub fn geometry(ctx: &LineAnalysis<'_>) -> Result<Geometry> {
    let l1 = ctx.l1_ints();
    let mut images: BTreeMap<Vec<i64>, ()> = BTreeMap::new();
    let mut count = 0u64;
    let mut failure: Option<Error> = None;
    ctx.rs.visit_wrel(ctx.line.j, &l1, |node| {
        count += 1;
        if failure.is_none() {
            if let Some(&(_, t)) = node.inversions.last().filter(|&&(_, t)| t < 1) {
                failure = Some(Error::LeviInversion { word: word_string(&node.word()), t });
            }
        }
        images.insert(node.image_l1.to_vec(), ());
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let regions: Vec<Region> =
        images.keys().map(|mu| ctx.rs.langlands_classify(&Weight::from_ints(mu.iter().copied()))).collect();
    Ok(Geometry { wrel_count: count, distinct_mu: images.len() as u64, counts: counts_of(&regions) })
}


/// Order of a block's series, exact or bounded below by the last level
/// proven to vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockOrder {
    Exact(i32),
    AtLeast(i32),
}

impl fmt::Display for BlockOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockOrder::Exact(k) => write!(f, "{k}"),
            BlockOrder::AtLeast(k) => write!(f, ">={k}"),
        }
    }
}

impl FromStr for BlockOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad block order {s:?}"));
        match s.trim().strip_prefix(">=") {
            Some(rest) => rest.trim().parse().map(BlockOrder::AtLeast).map_err(|_| bad()),
            None => s.trim().parse().map(BlockOrder::Exact).map_err(|_| bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockResult {
    pub mu: Vec<i64>,
    pub region: Region,
    pub eps_power: i32,
    pub class_count: usize,
    pub member_count: usize,
    pub order: BlockOrder,
    /// Set for strict-interior blocks that are nonzero at the row's order.
    pub h_dependent: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    L2Certified,
    NotL2,
    UndeterminedAtCap,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::L2Certified => "L2_certified",
            Verdict::NotL2 => "not_L2",
            Verdict::UndeterminedAtCap => "undetermined_at_cap",
        })
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "L2_certified" => Ok(Verdict::L2Certified),
            "not_L2" => Ok(Verdict::NotL2),
            "undetermined_at_cap" => Ok(Verdict::UndeterminedAtCap),
            _ => Err(Error::Parse(format!("bad verdict {s:?}"))),
        }
    }
}

/// `Exact` proves every vanishing it relies on. `Criterion` only proves
/// vanishing for blocks outside the open cone and accepts a randomized
/// nonzero certificate for the first interior block it meets, which bounds
/// `ord` from above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AnalysisMode {
    #[default]
    Exact,
    Criterion,
}

/// Progress after each `eps` level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub level: i32,
    pub tested: usize,
    pub resolved: usize,
    pub total: usize,
}

#[derive(Clone, Copy, Default)]
pub struct AnalyzeOptions<'a> {
    pub mode: AnalysisMode,
    /// Seed of the evaluation point used for nonzero certificates.
    pub seed: u64,
    pub progress: Option<&'a (dyn Fn(Progress) + Sync)>,
}

impl fmt::Debug for AnalyzeOptions<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyzeOptions").field("mode", &self.mode).field("seed", &self.seed).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictReport {
    pub group_type: TypeLabel,
    pub orbit_label: Option<String>,
    pub marking: Option<String>,
    pub j: usize,
    pub s: Q,
    pub lambda1: Vec<i64>,
    pub max_order: i32,
    pub wrel_count: u64,
    /// `|W / W_M|`, computed from group orders.
    pub coset_count: u128,
    pub distinct_mu: u64,
    pub counts: Counts,
    pub ord: OrdValue,
    pub verdict: Verdict,
    /// Blocks nonzero at `ord`, by region.
    pub leading_support: Counts,
    /// Elements of `W_rel` in those blocks.
    pub leading_members: u64,
    pub leading_mu: Option<Vec<i64>>,
    pub h_dependent: Option<bool>,
    pub blocks: Vec<BlockResult>,
}

/// Runs the criterion with default options.
pub fn analyze(ctx: &LineAnalysis<'_>) -> Result<VerdictReport> {
    analyze_with(ctx, &AnalyzeOptions::default())
}

fn max_relative_order(cap: i32, p: i32) -> usize {
    (cap - p).max(0) as usize
}

/// Scans `eps` levels upward from the lowest block power. At each level
/// every unresolved block is tested; the first level with a nonzero block
/// decides the verdict. The result does not depend on the thread count.
pub fn analyze_with(ctx: &LineAnalysis<'_>, opts: &AnalyzeOptions<'_>) -> Result<VerdictReport> {
    analyze_blocks(ctx, build_blocks(ctx)?, opts)
}

/// `analyze_with` on blocks built earlier, e.g. loaded from a cache.
pub fn analyze_blocks(ctx: &LineAnalysis<'_>, blocks: Vec<MuBlock>, opts: &AnalyzeOptions<'_>) -> Result<VerdictReport> {
    let rs = ctx.rs;
    let cap = ctx.max_order;
    let pt = RandomPoint::new(opts.seed);
    let mut states: Vec<BlockState> = blocks
        .par_iter()
        .map(|b| BlockState::new(b, rs.rank, max_relative_order(cap, b.eps_power), &pt))
        .collect::<Result<_>>()?;
    let n = blocks.len();
    let mut orders: Vec<Option<i32>> = vec![None; n];
    let mut proven: Vec<i32> = blocks.iter().map(|b| b.eps_power - 1).collect();
    let min_p = blocks.iter().map(|b| b.eps_power).min().unwrap_or(0);
    let criterion = opts.mode == AnalysisMode::Criterion;
    let mut all_proven = true;
    let mut decided: Option<(i32, Vec<usize>)> = None;
    for k in min_p..=cap {
        let outcomes: Vec<(usize, Option<bool>)> = states
            .par_iter_mut()
            .enumerate()
            .filter(|(i, st)| orders[*i].is_none() && st.eps_power <= k)
            .map(|(i, st)| {
                let exact = !criterion || st.region != Region::StrictInterior;
                (i, st.coefficient_nonzero((k - st.eps_power) as usize, exact))
            })
            .collect();
        let mut nonzero = Vec::new();
        for &(i, o) in &outcomes {
            match o {
                Some(true) => {
                    orders[i] = Some(k);
                    nonzero.push(i);
                }
                Some(false) => proven[i] = k,
                None => {}
            }
        }
        if let Some(cb) = opts.progress {
            let resolved = orders.iter().filter(|o| o.is_some()).count();
            cb(Progress { level: k, tested: outcomes.len(), resolved, total: n });
        }
        if !nonzero.is_empty() {
            decided = Some((k, nonzero));
            break;
        }
        all_proven &= outcomes.iter().all(|(_, o)| o.is_some());
    }

    let (ord, verdict, leading) = match decided {
        None => (OrdValue::AtLeast(cap + 1), Verdict::UndeterminedAtCap, Vec::new()),
        Some((k, nonzero)) => {
            let outside = nonzero.iter().any(|&i| blocks[i].region != Region::StrictInterior);
            if outside && criterion {
                return analyze_blocks(ctx, blocks, &AnalyzeOptions { mode: AnalysisMode::Exact, ..*opts });
            }
            let verdict = if outside { Verdict::NotL2 } else { Verdict::L2Certified };
            let ord = if all_proven || k == min_p { OrdValue::Exact(k) } else { OrdValue::AtMost(k) };
            (ord, verdict, nonzero)
        }
    };

    let leading_level = match ord {
        OrdValue::Exact(k) | OrdValue::AtMost(k) => k,
        OrdValue::AtLeast(_) => cap,
    };
    let flags: Vec<(usize, bool)> = states
        .par_iter_mut()
        .enumerate()
        .filter(|(i, st)| leading.contains(i) && st.region == Region::StrictInterior)
        .map(|(i, st)| (i, st.h_dependent((leading_level - st.eps_power) as usize)))
        .collect();
    let flag_of: HashMap<usize, bool> = flags.iter().copied().collect();

    let mut leading_support = Counts::default();
    for &i in &leading {
        leading_support = add_region(leading_support, blocks[i].region);
    }
    let leading_members = leading.iter().map(|&i| blocks[i].member_count() as u64).sum();
    let leading_mu = flags
        .iter()
        .find(|(_, h)| *h)
        .or_else(|| flags.first())
        .map(|&(i, _)| blocks[i].mu.clone());
    let h_dependent = (!flags.is_empty()).then(|| flags.iter().any(|(_, h)| *h));

    let results: Vec<BlockResult> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| BlockResult {
            mu: b.mu.clone(),
            region: b.region,
            eps_power: b.eps_power,
            class_count: b.classes.len(),
            member_count: b.member_count(),
            order: match orders[i] {
                Some(k) => BlockOrder::Exact(k),
                None => BlockOrder::AtLeast(proven[i] + 1),
            },
            h_dependent: flag_of.get(&i).copied(),
        })
        .collect();
    let counts = counts_of(blocks.iter().map(|b| &b.region));
    Ok(VerdictReport {
        group_type: rs.type_label,
        orbit_label: None,
        marking: None,
        j: ctx.line.j,
        s: ctx.line.s,
        lambda1: ctx.l1_ints(),
        max_order: cap,
        wrel_count: results.iter().map(|b| b.member_count as u64).sum(),
        coset_count: rs.weyl_group_order() / rs.levi_weyl_order(ctx.line.j)?,
        distinct_mu: blocks.len() as u64,
        counts,
        ord,
        verdict,
        leading_support,
        leading_members,
        leading_mu,
        h_dependent,
        blocks: results,
    })
}

fn add_region(mut c: Counts, r: Region) -> Counts {
    match r {
        Region::StrictInterior => c.strict += 1,
        Region::Boundary => {
            c.non_strict += 1;
            c.boundary += 1;
        }
        Region::Outside => c.non_strict += 1,
    }
    c
}

fn member_exponential(members: &[Vec<i64>], order: i32) -> TruncatedSeries {
    let h: Vec<Poly> = (1..=members.first().map_or(0, Vec::len)).map(|i| Poly::var(Symbol::H(i as u32))).collect();
    let mut coeffs = vec![Poly::zero(); order.max(0) as usize + 1];
    for w in members {
        let mut hw = Poly::zero();
        for (x, hi) in w.iter().zip(&h) {
            hw.add_scaled(hi, &BigRational::from_integer(BigInt::from(*x)), &Monomial::one());
        }
        let mut pow = Poly::one();
        for (b, slot) in coeffs.iter_mut().enumerate() {
            if b > 0 {
                pow = pow.mul(&hw).scale(&BigRational::new(BigInt::one(), BigInt::from(b)));
            }
            slot.add_assign(&pow);
        }
    }
    TruncatedSeries::from_coeffs(0, coeffs, order)
}

/// The block's Laurent series in the original generators, exact through
/// `eps^bound`, by direct expansion of every class.
pub fn block_series(ctx: &LineAnalysis<'_>, block: &MuBlock, bound: i32) -> Result<TruncatedSeries> {
    let _ = ctx;
    let mut total = TruncatedSeries::zero(bound);
    let n = bound - block.eps_power;
    if n < 0 {
        return Ok(total);
    }
    'classes: for class in &block.classes {
        let mut lp = LogProduct::one(n as u32);
        for &(key, mult) in &class.factors {
            match factor_expansion(key, n as u32)? {
                Some(f) => lp.absorb(&f, mult),
                None => continue 'classes,
            }
        }
        let e = TruncatedSeries::from_coeffs(0, lp.exponent.clone(), n).exp()?;
        let s = e.mul(&member_exponential(&class.members, n)).scale_poly(&lp.prefactor()).shift(lp.eps_power);
        total = total.add(&s);
    }
    Ok(total)
}

/// First nonzero coefficient of the block through `eps^max_order`, found
/// with the reduced zero tests.
pub fn block_leading(ctx: &LineAnalysis<'_>, block: &MuBlock) -> Result<Option<(i32, Poly)>> {
    let top = max_relative_order(ctx.max_order, block.eps_power);
    if block.eps_power > ctx.max_order {
        return Ok(None);
    }
    let mut st = BlockState::new(block, ctx.rs.rank, top, &RandomPoint::new(0))?;
    for m in 0..=top {
        if st.coefficient_nonzero(m, true) == Some(true) {
            return Ok(Some((block.eps_power + m as i32, st.leading_poly(m))));
        }
    }
    Ok(None)
}

/// Largest Weyl group the oracle accepts.
pub const ORACLE_LIMIT: u128 = 10_000;

/// Per-`mu` result of the full Weyl group sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleEntry {
    pub mu: Vec<i64>,
    /// First nonzero power through the cap.
    pub order: Option<i32>,
    pub leading: Poly,
    pub series: TruncatedSeries,
}

fn to_int(q: Q) -> Result<i64> {
    if q.is_integer() {
        Ok(q.to_integer())
    } else {
        Err(Error::NonIntegralLine(format!("pairing {q} is not an integer")))
    }
}

/// Sums `M(w, lambda) a^(eps w lambda2)` over all of `W`, grouped by
/// `w lambda1`, exact through `eps^max_order`.
pub fn brute_force_oracle(ctx: &LineAnalysis<'_>) -> Result<Vec<OracleEntry>> {
    let rs = ctx.rs;
    let order = rs.weyl_group_order();
    if order > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge { order, limit: ORACLE_LIMIT });
    }
    let cap = ctx.max_order;
    let l1 = &ctx.line.lambda1;
    let l2 = &ctx.line.lambda2;
    // Breadth-first over W, keyed by the regular image of rho.
    let rho: Vec<i64> = vec![1; rs.rank];
    let mut seen: HashMap<Vec<i64>, Vec<u8>> = HashMap::new();
    seen.insert(rho.clone(), Vec::new());
    let mut frontier = vec![(rho, Vec::<u8>::new())];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (v, word) in &frontier {
            for i in 0..rs.rank {
                if v[i] <= 0 {
                    continue;
                }
                let child: Vec<i64> =
                    v.iter().zip(&rs.cartan_matrix).map(|(x, row)| x - v[i] * row[i]).collect();
                if seen.contains_key(&child) {
                    continue;
                }
                let mut w = vec![i as u8 + 1];
                w.extend_from_slice(word);
                seen.insert(child.clone(), w.clone());
                next.push((child, w));
            }
        }
        frontier = next;
    }
    let mut words: Vec<Vec<u8>> = seen.into_values().collect();
    words.sort();
    let mut groups: BTreeMap<Vec<i64>, TruncatedSeries> = BTreeMap::new();
    'elements: for word in &words {
        let mut keys = Vec::new();
        for idx in rs.inversion_set_by_application(word)? {
            let key = FactorKey::new(to_int(rs.pair(l1, idx)?)?, to_int(rs.pair(l2, idx)?)?);
            if key.k == -1 && key.t == 0 {
                continue 'elements;
            }
            if key.k == 1 && key.t == 0 {
                return Err(Error::PolarDivisor);
            }
            keys.push(key);
        }
        let p: i32 = keys.iter().map(|k| k.eps_power()).sum();
        let n = cap - p;
        if n < 0 {
            continue;
        }
        let mut term = TruncatedSeries::one(n);
        for key in keys {
            term = term.mul(&factor_series(key, n as u32)?);
        }
        let mu: Vec<i64> = rs.apply_word(word, l1)?.to_ints().expect("integral");
        let image_l2: Vec<i64> = rs.apply_word(word, l2)?.to_ints().expect("integral");
        let term = term.mul(&member_exponential(&[image_l2], n)).truncate(cap);
        let slot = groups.entry(mu).or_insert_with(|| TruncatedSeries::zero(cap));
        *slot = slot.add(&term);
    }
    Ok(groups
        .into_iter()
        .map(|(mu, series)| {
            let lead = series.nonzero_terms().next().map(|(k, c)| (k, c.clone()));
            OracleEntry { mu, order: lead.as_ref().map(|l| l.0), leading: lead.map(|l| l.1).unwrap_or_default(), series }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::{entry_line, find_entry};

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn row_ctx<'a>(rs: &'a RootSystem, marking: &str) -> LineAnalysis<'a> {
        let e = find_entry(rs.type_label, marking).unwrap();
        LineAnalysis::new(rs, entry_line(rs, &e).unwrap(), 4).unwrap()
    }

    #[test]
    fn e6_blocks_and_geometry() {
        let rs = RootSystem::new(TypeLabel::E6);
        let ctx = row_ctx(&rs, "200202");
        let blocks = build_blocks(&ctx).unwrap();
        assert_eq!(blocks.len(), 45);
        assert_eq!(blocks.iter().map(MuBlock::member_count).sum::<usize>(), 72);
        assert_eq!(counts_of(blocks.iter().map(|b| &b.region)), Counts::new(44, 1, 0));
        let g = geometry(&ctx).unwrap();
        assert_eq!((g.wrel_count, g.distinct_mu, g.counts), (72, 45, Counts::new(44, 1, 0)));
        assert!(blocks.windows(2).all(|w| w[0].mu < w[1].mu));
    }

    #[test]
    fn f4_geometry() {
        let rs = RootSystem::new(TypeLabel::F4);
        let g = geometry(&row_ctx(&rs, "0020")).unwrap();
        assert_eq!((g.wrel_count, g.distinct_mu, g.counts), (96, 47, Counts::new(23, 24, 9)));
    }

    #[test]
    fn identity_block_starts_with_one() {
        let rs = RootSystem::new(TypeLabel::E6);
        let ctx = row_ctx(&rs, "200202");
        let l1 = ctx.l1_ints();
        let blocks = build_blocks(&ctx).unwrap();
        let id = blocks.iter().find(|b| b.mu == l1).unwrap();
        assert_eq!(id.eps_power, 0);
        assert!(id.classes[0].factors.is_empty());
        let s = block_series(&ctx, id, 2).unwrap();
        assert_eq!(s.coeff(0).unwrap(), Poly::one());
    }

    #[test]
    fn rank_one_reflection() {
        let rs = RootSystem::new(TypeLabel::A(1));
        let line = LineSpec::on_node(&rs, 1, Q::new(3, 2)).unwrap();
        let ctx = LineAnalysis::new(&rs, line, 2).unwrap();
        let blocks = build_blocks(&ctx).unwrap();
        assert_eq!(blocks.len(), 2);
        let refl = &blocks[0];
        assert_eq!(refl.mu, vec![-2]);
        assert_eq!(refl.classes[0].factors, vec![(FactorKey::new(2, 1), 1)]);
        assert_eq!(refl.eps_power, 0);
        let s = block_series(&ctx, refl, 1).unwrap();
        let c2 = Poly::term(rat(1), Monomial::c_value(2));
        assert_eq!(s.coeff(0).unwrap(), c2);
        // eps coefficient: C(2) (S(2,1) + S(-2,1) - H(1))
        let d = Poly::var(Symbol::S { k: 2, n: 1 })
            .add(&Poly::var(Symbol::S { k: -2, n: 1 }))
            .sub(&Poly::var(Symbol::H(1)));
        assert_eq!(s.coeff(1).unwrap(), c2.mul(&d));
    }

    #[test]
    fn rank_one_pole() {
        let rs = RootSystem::new(TypeLabel::A(1));
        let line = LineSpec::on_node(&rs, 1, Q::one()).unwrap();
        let ctx = LineAnalysis::new(&rs, line, 1).unwrap();
        let report = analyze(&ctx).unwrap();
        assert_eq!(report.ord, OrdValue::Exact(-1));
        let blocks = build_blocks(&ctx).unwrap();
        let (k, lead) = block_leading(&ctx, &blocks[0]).unwrap().unwrap();
        assert_eq!(k, -1);
        assert_eq!(lead, Poly::term(rat(-1), Monomial::pow(Symbol::U, -1)));
        // mu = -1 lies in the open cone, so the residue is square-integrable.
        assert_eq!(report.verdict, Verdict::L2Certified);
    }

    #[test]
    fn catalog_rows_small() {
        let rs = RootSystem::new(TypeLabel::E6);
        let r = analyze(&row_ctx(&rs, "200202")).unwrap();
        assert_eq!((r.wrel_count, r.counts, r.ord, r.verdict), (72, Counts::new(44, 1, 0), OrdValue::Exact(0), Verdict::L2Certified));
        assert_eq!(r.h_dependent, Some(true));
        let rs = RootSystem::new(TypeLabel::F4);
        let r = analyze(&row_ctx(&rs, "0020")).unwrap();
        assert_eq!((r.wrel_count, r.counts, r.ord, r.verdict), (96, Counts::new(23, 24, 9), OrdValue::Exact(2), Verdict::L2Certified));
        assert_eq!(r.coset_count, 96);
        for b in &r.blocks {
            if let BlockOrder::Exact(k) = b.order {
                assert!(k >= b.eps_power);
            }
        }
    }

    #[test]
    fn leading_agrees_with_direct_series() {
        let rs = RootSystem::new(TypeLabel::F4);
        let ctx = row_ctx(&rs, "0020");
        for block in build_blocks(&ctx).unwrap().iter().filter(|b| b.eps_power <= 1) {
            let lead = block_leading(&ctx, block).unwrap();
            let direct = block_series(&ctx, block, ctx.max_order).unwrap();
            let first = direct.nonzero_terms().next().map(|(k, c)| (k, c.clone()));
            assert_eq!(lead, first, "mu = {:?}", block.mu);
        }
    }

    #[test]
    fn thread_count_does_not_change_reports() {
        let rs = RootSystem::new(TypeLabel::E7);
        let ctx = row_ctx(&rs, "2002022");
        let run = |n| {
            rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(|| analyze(&ctx).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(4));
        assert_eq!(one, run(8));
    }

    #[test]
    fn verdict_text_round_trips() {
        for v in [Verdict::L2Certified, Verdict::NotL2, Verdict::UndeterminedAtCap] {
            assert_eq!(v.to_string().parse::<Verdict>().unwrap(), v);
        }
        for o in [BlockOrder::Exact(-3), BlockOrder::AtLeast(2)] {
            assert_eq!(o.to_string().parse::<BlockOrder>().unwrap(), o);
        }
    }

    #[test]
    fn low_cap_is_undetermined() {
        let rs = RootSystem::new(TypeLabel::F4);
        let mut ctx = row_ctx(&rs, "0020");
        ctx.max_order = 1;
        let r = analyze(&ctx).unwrap();
        assert_eq!(r.verdict, Verdict::UndeterminedAtCap);
        assert_eq!(r.ord, OrdValue::AtLeast(2));
    }
}
