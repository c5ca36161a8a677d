//! Catalog of distinguished orbit data and normalization of a dominant
//! parameter `lambda0` to a point `2 s omega_j - rho` on a maximal
//! parabolic line.

use std::fmt;
use std::str::FromStr;

use num_integer::Roots;
use num_rational::Rational64 as Q;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rootsys::{RootSystem, TypeLabel, Weight};

/// Order of vanishing: exact, or only an upper or a lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrdValue {
    Exact(i32),
    AtMost(i32),
    AtLeast(i32),
}

impl fmt::Display for OrdValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrdValue::Exact(v) => write!(f, "{v}"),
            OrdValue::AtMost(v) => write!(f, "<={v}"),
            OrdValue::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

impl FromStr for OrdValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad order value {s:?}"));
        if let Some(rest) = s.strip_prefix("<=") {
            return rest.trim().parse().map(OrdValue::AtMost).map_err(|_| bad());
        }
        if let Some(rest) = s.strip_prefix(">=") {
            return rest.trim().parse().map(OrdValue::AtLeast).map_err(|_| bad());
        }
        s.parse().map(OrdValue::Exact).map_err(|_| bad())
    }
}

/// Counts over distinct images `mu`: in the open negative cone, outside
/// it, and (among the latter) those on its boundary, i.e. satisfying the
/// weak inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Counts {
    pub strict: u64,
    pub non_strict: u64,
    pub boundary: u64,
}

impl Counts {
    pub fn new(strict: u64, non_strict: u64, boundary: u64) -> Self {
        Counts { strict, non_strict, boundary }
    }

    pub fn total(&self) -> u64 {
        self.strict + self.non_strict
    }
}

impl fmt::Display for Counts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.strict, self.non_strict, self.boundary)
    }
}

impl FromStr for Counts {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split('/').collect();
        let bad = || Error::Parse(format!("bad counts {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let n: Vec<u64> = parts.iter().map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
        Ok(Counts::new(n[0], n[1], n[2]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitEntry {
    pub group_type: TypeLabel,
    pub bala_carter_label: String,
    /// `2 lambda0` in Bourbaki numbering.
    pub marking: Vec<u8>,
    pub wavefront_label: String,
    pub lambda1_hint: Option<Vec<i64>>,
    pub expected_wrel: Option<u64>,
    pub expected_counts: Option<Counts>,
    pub expected_ord: Option<OrdValue>,
}

impl OrbitEntry {
    pub fn marking_string(&self) -> String {
        self.marking.iter().map(|d| char::from(b'0' + d)).collect()
    }

    pub fn lambda0(&self) -> Weight {
        marking_to_lambda0(&self.marking)
    }

    pub fn is_rho_row(&self) -> bool {
        self.marking.iter().all(|&m| m == 2)
    }

    /// Entries equal to 1 are admitted but not even.
    pub fn has_odd_marks(&self) -> bool {
        self.marking.contains(&1)
    }

    /// Node carrying the line in the hint, if the hint is not `-rho`.
    pub fn hint_node(&self) -> Option<usize> {
        let hint = self.lambda1_hint.as_ref()?;
        hint.iter().position(|&c| c != -1).map(|i| i + 1)
    }

    pub fn matches_label(&self, label: &str) -> bool {
        normalize_label(&self.bala_carter_label) == normalize_label(label)
            || normalize_label(&self.wavefront_label) == normalize_label(label)
    }
}

fn normalize_label(s: &str) -> String {
    s.chars()
        .filter(|c| !matches!(c, ' ' | '_' | '{' | '}' | '$' | '~'))
        .flat_map(char::to_lowercase)
        .collect()
}

/// Parses a marking such as `200202`.
pub fn parse_marking(s: &str) -> Result<Vec<u8>> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty marking".into()));
    }
    s.bytes()
        .map(|b| match b {
            b'0'..=b'2' => Ok(b - b'0'),
            _ => Err(Error::Parse(format!("marking {s:?} must use digits 0, 1, 2"))),
        })
        .collect()
}

pub fn marking_to_lambda0(marking: &[u8]) -> Weight {
    Weight::new(marking.iter().map(|&m| Q::new(i64::from(m), 2)).collect())
}

/// Relabels coordinates: output node `i` takes input node `perm[i-1]`
/// (1-based).
pub fn permute_nodes(w: &Weight, perm: &[usize]) -> Result<Weight> {
    let n = w.rank();
    if perm.len() != n {
        return Err(Error::RankMismatch { expected: n, got: perm.len() });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p == 0 || p > n || seen[p - 1] {
            return Err(Error::Parse(format!("{perm:?} is not a permutation of 1..={n}")));
        }
        seen[p - 1] = true;
    }
    Ok(Weight::new(perm.iter().map(|&p| w.coords()[p - 1]).collect()))
}

struct Row {
    marking: &'static str,
    label: &'static str,
    hint: &'static [i64],
    wrel: u64,
    counts: (u64, u64, u64),
    ord: OrdValue,
}

const fn row(
    marking: &'static str,
    label: &'static str,
    hint: &'static [i64],
    wrel: u64,
    counts: (u64, u64, u64),
    ord: OrdValue,
) -> Row {
    Row { marking, label, hint, wrel, counts, ord }
}

use OrdValue::{AtMost, Exact};

const E6_ROWS: &[Row] = &[
    row("200202", "A2", &[-1, 4, -1, -1, -1, -1], 72, (44, 1, 0), Exact(0)),
    row("222022", "A1", &[2, -1, -1, -1, -1, -1], 27, (24, 2, 1), Exact(0)),
    row("222222", "0", &[-1, -1, -1, -1, -1, -1], 1, (1, 0, 0), Exact(0)),
];

const E7_ROWS: &[Row] = &[
    row("0002002", "D4(a1)", &[-1, -1, 4, -1, -1, -1, -1], 2016, (638, 27, 2), Exact(1)),
    row("2002002", "A2+2A1", &[-1, 5, -1, -1, -1, -1, -1], 576, (292, 2, 1), Exact(0)),
    row("2002022", "A2", &[7, -1, -1, -1, -1, -1, -1], 126, (90, 1, 0), Exact(0)),
    row("2220202", "2A1", &[4, -1, -1, -1, -1, -1, -1], 126, (115, 3, 1), Exact(0)),
    row("2220222", "A1", &[2, -1, -1, -1, -1, -1, -1], 126, (97, 28, 0), Exact(0)),
    row("2222222", "0", &[-1, -1, -1, -1, -1, -1, -1], 1, (1, 0, 0), Exact(0)),
];

const E8_ROWS: &[Row] = &[
    row("00002000", "E8(a7)", &[-1, -1, -1, -1, 4, -1, -1, -1], 241920, (18881, 3897, 1329), AtMost(3)),
    row("00020002", "D4(a1)+A2", &[-1, 7, -1, -1, -1, -1, -1, -1], 17280, (3638, 2, 1), Exact(0)),
    row("00020020", "D4(a1)+A1", &[-1, 6, -1, -1, -1, -1, -1, -1], 17280, (8902, 603, 22), Exact(1)),
    row("00020022", "D4(a1)", &[-1, -1, -1, -1, -1, -1, 8, -1], 6720, (3143, 49, 1), Exact(1)),
    row("20020020", "2A2", &[10, -1, -1, -1, -1, -1, -1, -1], 2160, (1099, 1, 0), Exact(0)),
    row("20020022", "A2+2A1", &[8, -1, -1, -1, -1, -1, -1, -1], 2160, (1647, 13, 4), Exact(0)),
    row("20020202", "A2+A1", &[7, -1, -1, -1, -1, -1, -1, -1], 2160, (1763, 157, 26), Exact(0)),
    row("20020222", "A2", &[-1, -1, -1, -1, -1, -1, -1, 13], 240, (195, 1, 0), Exact(0)),
    row("22202022", "2A1", &[-1, -1, -1, -1, -1, -1, -1, 8], 240, (229, 2, 0), Exact(0)),
    row("22202222", "A1", &[-1, -1, -1, -1, -1, -1, -1, 4], 240, (224, 15, 0), Exact(0)),
    row("22222222", "0", &[-1, -1, -1, -1, -1, -1, -1, -1], 1, (1, 0, 0), Exact(0)),
];

const F4_ROWS: &[Row] = &[
    row("0020", "F4(a3)", &[-1, 1, -1, -1], 96, (23, 24, 9), Exact(2)),
    row("2020", "A1+A1s", &[2, -1, -1, -1], 24, (15, 2, 1), Exact(0)),
    row("2022", "A1s", &[1, -1, -1, -1], 24, (17, 6, 0), Exact(0)),
    row("2222", "0", &[-1, -1, -1, -1], 1, (1, 0, 0), Exact(0)),
];

/// The tabulated rows for `E6`, `E7`, `E8`, `F4`; empty for other types.
pub fn catalog(group_type: TypeLabel) -> Vec<OrbitEntry> {
    let rows: &[Row] = match group_type {
        TypeLabel::E6 => E6_ROWS,
        TypeLabel::E7 => E7_ROWS,
        TypeLabel::E8 => E8_ROWS,
        TypeLabel::F4 => F4_ROWS,
        _ => &[],
    };
    rows.iter()
        .map(|r| OrbitEntry {
            group_type,
            bala_carter_label: r.label.to_string(),
            marking: parse_marking(r.marking).expect("catalog marking"),
            wavefront_label: r.label.to_string(),
            lambda1_hint: Some(r.hint.to_vec()),
            expected_wrel: Some(r.wrel),
            expected_counts: Some(Counts::new(r.counts.0, r.counts.1, r.counts.2)),
            expected_ord: Some(r.ord),
        })
        .collect()
}

pub fn has_catalog(group_type: TypeLabel) -> bool {
    matches!(group_type, TypeLabel::E6 | TypeLabel::E7 | TypeLabel::E8 | TypeLabel::F4)
}

/// Finds a catalog entry by marking or label.
pub fn find_entry(group_type: TypeLabel, selector: &str) -> Option<OrbitEntry> {
    let cat = catalog(group_type);
    if let Ok(m) = parse_marking(selector) {
        if let Some(e) = cat.iter().find(|e| e.marking == m) {
            return Some(e.clone());
        }
    }
    cat.into_iter().find(|e| e.matches_label(selector))
}

pub const CATALOG_VERSION: u32 = 1;
const CATALOG_MAGIC: &str = "# l2residue orbit catalog";
const CATALOG_FIELDS: &str = "# type | bala_carter | wavefront | marking | lambda1 | wrel | counts | ord";

fn format_ints(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

/// Versioned text rendering, one record per row.
pub fn export_catalog(entries: &[OrbitEntry]) -> String {
    let mut out = format!("{CATALOG_MAGIC}\nversion {CATALOG_VERSION}\n{CATALOG_FIELDS}\n");
    for e in entries {
        let hint = e.lambda1_hint.as_deref().map_or_else(|| "-".to_string(), format_ints);
        out.push_str(&format!(
            "{} | {} | {} | {} | {} | {} | {} | {}\n",
            e.group_type,
            e.bala_carter_label,
            e.wavefront_label,
            e.marking_string(),
            hint,
            opt(&e.expected_wrel),
            opt(&e.expected_counts),
            opt(&e.expected_ord),
        ));
    }
    out
}

pub fn import_catalog(text: &str) -> Result<Vec<OrbitEntry>> {
    let mut lines = text.lines();
    if lines.next() != Some(CATALOG_MAGIC) {
        return Err(Error::Parse("missing catalog header".into()));
    }
    let version = lines.next().and_then(|l| l.strip_prefix("version ")).and_then(|v| v.trim().parse::<u32>().ok());
    if version != Some(CATALOG_VERSION) {
        return Err(Error::Parse(format!("unsupported catalog version {version:?}")));
    }
    let mut out = Vec::new();
    for line in lines.filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let f: Vec<&str> = line.split('|').map(str::trim).collect();
        if f.len() != 8 {
            return Err(Error::Parse(format!("catalog record needs 8 fields: {line:?}")));
        }
        let dash = |s: &str| if s == "-" { None } else { Some(s.to_string()) };
        let hint = dash(f[4])
            .map(|h| {
                h.trim_matches(|c| c == '[' || c == ']')
                    .split(',')
                    .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad hint {h:?}"))))
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()?;
        out.push(OrbitEntry {
            group_type: f[0].parse()?,
            bala_carter_label: f[1].to_string(),
            wavefront_label: f[2].to_string(),
            marking: parse_marking(f[3])?,
            lambda1_hint: hint,
            expected_wrel: dash(f[5])
                .map(|s| s.parse().map_err(|_| Error::Parse(format!("bad count {s:?}"))))
                .transpose()?,
            expected_counts: dash(f[6]).map(|s| s.parse()).transpose()?,
            expected_ord: dash(f[7]).map(|s| s.parse()).transpose()?,
        });
    }
    Ok(out)
}

/// A point `lambda1 = 2 s omega_j - rho` on the line in direction
/// `lambda2 = omega_j`, with `witness lambda1 = lambda0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineSpec {
    pub j: usize,
    pub s: Q,
    pub lambda1: Weight,
    pub lambda2: Weight,
    pub witness: Vec<u8>,
}

impl LineSpec {
    /// The line through `2 s omega_j - rho`, without a witness.
    pub fn on_node(rs: &RootSystem, j: usize, s: Q) -> Result<LineSpec> {
        rs.simple_index(j)?;
        let n = rs.rank;
        let lambda1 = Weight::fundamental(n, j).scale(s * 2).sub(&Weight::rho(n));
        Ok(LineSpec { j, s, lambda1, lambda2: Weight::fundamental(n, j), witness: Vec::new() })
    }

    /// Recovers the line from an explicit `lambda1` of the form
    /// `2 s omega_j - rho`.
    pub fn from_lambda1(rs: &RootSystem, lambda1: &Weight, j: usize) -> Result<LineSpec> {
        let idx = rs.simple_index(j)?;
        if lambda1.rank() != rs.rank {
            return Err(Error::RankMismatch { expected: rs.rank, got: lambda1.rank() });
        }
        for (i, c) in lambda1.coords().iter().enumerate() {
            if i != idx && *c != -Q::one() {
                return Err(Error::NotOnLine(format!("{lambda1} has coordinate {c} at node {} (expected -1)", i + 1)));
            }
        }
        let s = (lambda1.coords()[idx] + Q::one()) / 2;
        let mut spec = LineSpec::on_node(rs, j, s)?;
        spec.witness = rs.dominant_representative(lambda1)?.1;
        Ok(spec)
    }

    /// The dominant parameter this line point is Weyl-equivalent to.
    pub fn lambda0(&self, rs: &RootSystem) -> Result<Weight> {
        rs.apply_word(&self.witness, &self.lambda1)
    }
}

fn rational_sqrt(q: Q) -> Option<Q> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (*q.numer(), *q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (rn * rn == n && rd * rd == d).then(|| Q::new(rn, rd))
}

/// All `s` with `|2 s omega_j - rho|^2 = |lambda0|^2` that confirm under
/// the dominance check, smaller root first.
pub fn line_candidates(rs: &RootSystem, lambda0: &Weight, j: usize) -> Result<Vec<LineSpec>> {
    let n = rs.rank;
    let w = Weight::fundamental(n, j);
    let rho = Weight::rho(n);
    let a = rs.inner_product(&w, &w) * 4;
    let b = -rs.inner_product(&w, &rho) * 4;
    let c = rs.inner_product(&rho, &rho) - rs.inner_product(lambda0, lambda0);
    let Some(root) = rational_sqrt(b * b - a * c * 4) else {
        return Ok(Vec::new());
    };
    let mut roots = vec![(-b - root) / (a * 2)];
    if !root.is_zero() {
        roots.push((-b + root) / (a * 2));
    }
    let mut out = Vec::new();
    for s in roots {
        let spec = LineSpec::on_node(rs, j, s)?;
        if !spec.lambda1.is_integral() {
            continue;
        }
        let (dom, word) = rs.dominant_representative(&spec.lambda1)?;
        if dom == *lambda0 {
            out.push(LineSpec { witness: word, ..spec });
        }
    }
    Ok(out)
}

/// The confirmed `(j, s)` with the fewest cosets `|W / W_M|`, ties going
/// to the lower node and then the smaller `s`. For `lambda0 = rho` every
/// node works with `s = 0`, and the last node is used.
pub fn normalize_to_line(rs: &RootSystem, lambda0: &Weight) -> Result<LineSpec> {
    if lambda0.rank() != rs.rank {
        return Err(Error::RankMismatch { expected: rs.rank, got: lambda0.rank() });
    }
    if !lambda0.is_dominant() {
        return Err(Error::NotDominant);
    }
    if *lambda0 == Weight::rho(rs.rank) {
        return LineSpec::from_lambda1(rs, &Weight::rho(rs.rank).scale(-Q::one()), rs.rank);
    }
    let order = rs.weyl_group_order();
    let mut best: Option<(u128, LineSpec)> = None;
    for j in 1..=rs.rank {
        if let Some(spec) = line_candidates(rs, lambda0, j)?.into_iter().next() {
            let cosets = order / rs.levi_weyl_order(j)?;
            if best.as_ref().is_none_or(|(c, _)| cosets < *c) {
                best = Some((cosets, spec));
            }
        }
    }
    best.map(|(_, spec)| spec).ok_or(Error::NoLineFound)
}

/// The line for a catalog row: its `lambda1` hint when present (checked
/// against the marking), otherwise `normalize_to_line`.
pub fn entry_line(rs: &RootSystem, entry: &OrbitEntry) -> Result<LineSpec> {
    let lambda0 = entry.lambda0();
    let Some(hint) = &entry.lambda1_hint else {
        return normalize_to_line(rs, &lambda0);
    };
    let j = entry.hint_node().unwrap_or(rs.rank);
    let spec = LineSpec::from_lambda1(rs, &Weight::from_ints(hint.iter().copied()), j)?;
    if spec.lambda0(rs)? != lambda0 {
        return Err(Error::NotOnLine(format!(
            "{} is not Weyl-equivalent to half the marking {}",
            spec.lambda1,
            entry.marking_string()
        )));
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::build_root_system;

    fn w(v: &[i64]) -> Weight {
        Weight::from_ints(v.iter().copied())
    }

    #[test]
    fn catalog_sizes() {
        assert_eq!(catalog(TypeLabel::E6).len(), 3);
        assert_eq!(catalog(TypeLabel::E7).len(), 6);
        assert_eq!(catalog(TypeLabel::E8).len(), 11);
        assert_eq!(catalog(TypeLabel::F4).len(), 4);
        assert!(catalog(TypeLabel::G2).is_empty());
        let f4 = &catalog(TypeLabel::F4)[0];
        assert_eq!(f4.marking_string(), "0020");
        assert_eq!(f4.expected_ord, Some(Exact(2)));
        assert_eq!(f4.expected_counts, Some(Counts::new(23, 24, 9)));
        assert_eq!(catalog(TypeLabel::E8)[0].expected_ord, Some(AtMost(3)));
    }

    #[test]
    fn catalog_text_round_trip() {
        let all: Vec<OrbitEntry> =
            [TypeLabel::E6, TypeLabel::E7, TypeLabel::E8, TypeLabel::F4].into_iter().flat_map(catalog).collect();
        let text = export_catalog(&all);
        assert!(text.contains("E8 | E8(a7) | E8(a7) | 00002000 | [-1,-1,-1,-1,4,-1,-1,-1] | 241920 | 18881/3897/1329 | <=3"));
        assert_eq!(import_catalog(&text).unwrap(), all);
        assert!(import_catalog(&text.replace("version 1", "version 2")).is_err());
    }

    #[test]
    fn normalize_examples() {
        let e6 = build_root_system("E6").unwrap();
        let spec = normalize_to_line(&e6, &w(&[1, 0, 0, 1, 0, 1])).unwrap();
        assert_eq!((spec.j, spec.s), (2, Q::new(5, 2)));
        assert_eq!(spec.lambda1, w(&[-1, 4, -1, -1, -1, -1]));
        assert_eq!(e6.apply_word(&spec.witness, &spec.lambda1).unwrap(), w(&[1, 0, 0, 1, 0, 1]));

        let e7 = build_root_system("E7").unwrap();
        let spec = normalize_to_line(&e7, &w(&[0, 0, 0, 1, 0, 0, 1])).unwrap();
        assert_eq!((spec.j, spec.s), (3, Q::new(5, 2)));

        let e8 = build_root_system("E8").unwrap();
        let spec = normalize_to_line(&e8, &w(&[1, 1, 1, 0, 1, 1, 1, 1])).unwrap();
        assert_eq!((spec.j, spec.s), (8, Q::new(5, 2)));
        assert_eq!(spec.lambda1, w(&[-1, -1, -1, -1, -1, -1, -1, 4]));
    }

    #[test]
    fn normalization_reproduces_table_lines() {
        let mut differing = Vec::new();
        for t in [TypeLabel::E6, TypeLabel::E7, TypeLabel::E8, TypeLabel::F4] {
            let rs = RootSystem::new(t);
            for e in catalog(t) {
                let spec = normalize_to_line(&rs, &e.lambda0()).unwrap();
                if spec.lambda1.to_ints() != e.lambda1_hint {
                    differing.push(format!("{t} {}", e.marking_string()));
                }
            }
        }
        // The table prefers node 1 here although node 7 has fewer cosets.
        assert_eq!(differing, ["E7 2220202", "E7 2220222"]);
    }

    #[test]
    fn rho_uses_last_node() {
        let f4 = build_root_system("F4").unwrap();
        let spec = normalize_to_line(&f4, &Weight::rho(4)).unwrap();
        assert_eq!((spec.j, spec.s), (4, Q::zero()));
        assert!(spec.witness.len() == 24);
    }

    #[test]
    fn every_hint_is_equivalent_to_its_marking() {
        for t in [TypeLabel::E6, TypeLabel::E7, TypeLabel::E8, TypeLabel::F4] {
            let rs = RootSystem::new(t);
            for e in catalog(t) {
                let spec = entry_line(&rs, &e).unwrap();
                assert_eq!(spec.lambda0(&rs).unwrap(), e.lambda0(), "{t} {}", e.marking_string());
                let first = line_candidates(&rs, &e.lambda0(), spec.j).unwrap().remove(0);
                assert_eq!(first.s, spec.s, "{t} {}", e.marking_string());
            }
        }
    }

    #[test]
    fn rejections() {
        let e6 = build_root_system("E6").unwrap();
        assert_eq!(normalize_to_line(&e6, &w(&[-1, 0, 0, 0, 0, 0])).unwrap_err(), Error::NotDominant);
        assert!(matches!(
            LineSpec::from_lambda1(&e6, &w(&[0, 4, -1, -1, -1, -1]), 2).unwrap_err(),
            Error::NotOnLine(_)
        ));
        assert!(parse_marking("2003").is_err());
    }

    #[test]
    fn selectors_and_permutation() {
        assert_eq!(find_entry(TypeLabel::E7, "D4(a1)").unwrap().marking_string(), "0002002");
        assert_eq!(find_entry(TypeLabel::E7, "2220202").unwrap().bala_carter_label, "2A1");
        assert_eq!(find_entry(TypeLabel::F4, "a1+a1s").unwrap().marking_string(), "2020");
        assert!(find_entry(TypeLabel::E6, "E8(a7)").is_none());
        let p = permute_nodes(&w(&[0, 0, 1, 0]), &[1, 3, 2, 4]).unwrap();
        assert_eq!(p, w(&[0, 1, 0, 0]));
        assert!(permute_nodes(&w(&[0, 0]), &[1, 1]).is_err());
    }
}
