//! Serializable reports and their renderings.

use std::fmt::Write as _;

use l2residue::constantterm::{BlockResult, VerdictReport};
use l2residue::zeta::CrossCheck;
use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineDoc {
    pub j: usize,
    pub s: String,
    pub lambda1: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDoc {
    pub mu: Vec<i64>,
    pub region: String,
    pub eps_power: i32,
    pub classes: usize,
    pub members: usize,
    pub order: String,
    pub h_dependent: Option<bool>,
}

impl From<&BlockResult> for BlockDoc {
    fn from(b: &BlockResult) -> Self {
        BlockDoc {
            mu: b.mu.clone(),
            region: b.region.to_string(),
            eps_power: b.eps_power,
            classes: b.class_count,
            members: b.member_count,
            order: b.order.to_string(),
            h_dependent: b.h_dependent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaDoc {
    pub digits: u32,
    pub mu: Vec<i64>,
    pub order: i32,
    pub formal: String,
    pub direct: String,
    pub difference: String,
    pub nonzero: bool,
    pub agrees: bool,
}

impl ZetaDoc {
    pub fn new(digits: u32, mu: Vec<i64>, c: CrossCheck) -> Self {
        ZetaDoc {
            digits,
            mu,
            order: c.order,
            formal: c.formal,
            direct: c.direct,
            difference: c.difference,
            nonzero: c.nonzero,
            agrees: c.agrees,
        }
    }
}

/// One analyzed line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub schema_version: u32,
    pub group_type: String,
    pub orbit_label: Option<String>,
    pub marking: Option<String>,
    pub line: LineDoc,
    pub mode: String,
    pub seed: u64,
    pub max_order: i32,
    pub wrel_count: u64,
    pub coset_count: u64,
    pub distinct_mu: u64,
    pub counts: String,
    pub ord: String,
    pub verdict: String,
    pub leading_support: String,
    pub leading_members: u64,
    pub leading_mu: Option<Vec<i64>>,
    pub h_dependent: Option<bool>,
    pub zeta_check: Option<ZetaDoc>,
    pub blocks: Vec<BlockDoc>,
}

impl ReportDoc {
    pub fn new(r: &VerdictReport, mode: &str, seed: u64) -> Self {
        ReportDoc {
            schema_version: SCHEMA_VERSION,
            group_type: r.group_type.to_string(),
            orbit_label: r.orbit_label.clone(),
            marking: r.marking.clone(),
            line: LineDoc { j: r.j, s: r.s.to_string(), lambda1: r.lambda1.clone() },
            mode: mode.to_string(),
            seed,
            max_order: r.max_order,
            wrel_count: r.wrel_count,
            coset_count: r.coset_count as u64,
            distinct_mu: r.distinct_mu,
            counts: r.counts.to_string(),
            ord: r.ord.to_string(),
            verdict: r.verdict.to_string(),
            leading_support: r.leading_support.to_string(),
            leading_members: r.leading_members,
            leading_mu: r.leading_mu.clone(),
            h_dependent: r.h_dependent,
            zeta_check: None,
            blocks: r.blocks.iter().map(BlockDoc::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedDoc {
    pub wrel: Option<u64>,
    pub counts: Option<String>,
    pub ord: Option<String>,
}

/// One catalog row. `table_wrel` and `table_counts` are the values compared
/// with the tabulated columns; they differ from the geometric ones only on
/// the row with `lambda0 = rho`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRowDoc {
    pub label: String,
    pub marking: String,
    pub rho_row: bool,
    pub line: LineDoc,
    pub mode: Option<String>,
    pub wrel_count: u64,
    pub coset_count: u64,
    pub counts: String,
    pub table_wrel: Option<u64>,
    pub table_counts: Option<String>,
    pub ord: Option<String>,
    pub verdict: Option<String>,
    pub leading_support: Option<String>,
    pub leading_members: Option<u64>,
    pub h_dependent: Option<bool>,
    pub expected: ExpectedDoc,
    pub status: String,
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDoc {
    pub schema_version: u32,
    pub group_type: String,
    pub max_order: i32,
    pub budget: u64,
    pub rows: Vec<TableRowDoc>,
}

impl TableDoc {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.status != "mismatch")
    }
}

fn ints(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("[{}]", parts.join(","))
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
}

fn json<T: Serialize>(doc: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("csv buffer: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

const HEADER: &str = "| 2lambda0 | orbit | lambda1 | #W_rel | #cap -C | ord | verdict |";
const RULE: &str = "|---|---|---|---|---|---|---|";

pub fn render_report(doc: &ReportDoc, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(doc),
        Format::Markdown => {
            let mut s = format!("{}\n\n{HEADER}\n{RULE}\n", doc.group_type);
            writeln!(
                s,
                "| {} | {} | {} | {} | {} | {} | {} |",
                opt(&doc.marking),
                opt(&doc.orbit_label),
                ints(&doc.line.lambda1),
                doc.wrel_count,
                doc.counts,
                doc.ord,
                doc.verdict
            )
            .unwrap();
            writeln!(s, "\nline j={} s={}, cap {}, mode {}", doc.line.j, doc.line.s, doc.max_order, doc.mode).unwrap();
            writeln!(
                s,
                "leading support {} over {} elements, leading mu {}, H-dependent {}",
                doc.leading_support,
                doc.leading_members,
                doc.leading_mu.as_deref().map_or_else(|| "-".to_string(), ints),
                opt(&doc.h_dependent)
            )
            .unwrap();
            if let Some(z) = &doc.zeta_check {
                writeln!(
                    s,
                    "zeta check at {} digits: formal {} direct {} difference {} agrees {}",
                    z.digits, z.formal, z.direct, z.difference, z.agrees
                )
                .unwrap();
            }
            Ok(s)
        }
        Format::Csv => {
            let header = [
                "type", "orbit", "marking", "j", "s", "lambda1", "wrel", "cosets", "distinct_mu", "counts", "ord",
                "verdict", "leading_support", "leading_members", "h_dependent", "mode",
            ];
            let row = vec![
                doc.group_type.clone(),
                opt(&doc.orbit_label),
                opt(&doc.marking),
                doc.line.j.to_string(),
                doc.line.s.clone(),
                ints(&doc.line.lambda1),
                doc.wrel_count.to_string(),
                doc.coset_count.to_string(),
                doc.distinct_mu.to_string(),
                doc.counts.clone(),
                doc.ord.clone(),
                doc.verdict.clone(),
                doc.leading_support.clone(),
                doc.leading_members.to_string(),
                opt(&doc.h_dependent),
                doc.mode.clone(),
            ];
            csv_text(&header, &[row])
        }
    }
}

fn wrel_cell(r: &TableRowDoc) -> String {
    match (r.rho_row, r.table_wrel) {
        (true, Some(t)) => format!("{t} ({} cosets)", r.wrel_count),
        _ => r.wrel_count.to_string(),
    }
}

pub fn render_table(doc: &TableDoc, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(doc),
        Format::Markdown => {
            let mut s = format!("{}, cap {}\n\n", doc.group_type, doc.max_order);
            s.push_str("| 2lambda0 | orbit | lambda1 | #W_rel | #cap -C | ord | verdict | status |\n");
            s.push_str("|---|---|---|---|---|---|---|---|\n");
            for r in &doc.rows {
                writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} | {} | {} |",
                    r.marking,
                    r.label,
                    ints(&r.line.lambda1),
                    wrel_cell(r),
                    r.table_counts.as_deref().unwrap_or(&r.counts),
                    opt(&r.ord),
                    opt(&r.verdict),
                    r.status
                )
                .unwrap();
            }
            Ok(s)
        }
        Format::Csv => {
            let header = [
                "marking", "orbit", "j", "s", "lambda1", "wrel", "cosets", "counts", "table_wrel", "table_counts",
                "ord", "verdict", "h_dependent", "status",
            ];
            let rows: Vec<Vec<String>> = doc
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.marking.clone(),
                        r.label.clone(),
                        r.line.j.to_string(),
                        r.line.s.clone(),
                        ints(&r.line.lambda1),
                        r.wrel_count.to_string(),
                        r.coset_count.to_string(),
                        r.counts.clone(),
                        opt(&r.table_wrel),
                        opt(&r.table_counts),
                        opt(&r.ord),
                        opt(&r.verdict),
                        opt(&r.h_dependent),
                        r.status.clone(),
                    ]
                })
                .collect();
            csv_text(&header, &rows)
        }
    }
}
