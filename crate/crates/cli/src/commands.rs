use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use l2residue::cfactor::{factor_series, FactorKey};
use l2residue::constantterm::{
    analyze_blocks, build_blocks, geometry, AnalysisMode, AnalyzeOptions, LineAnalysis, MuBlock, Progress, Verdict,
};
use l2residue::orbits::{
    catalog, entry_line, export_catalog, has_catalog, marking_to_lambda0, normalize_to_line, parse_marking,
    permute_nodes, LineSpec, OrbitEntry, OrdValue,
};
use l2residue::zeta::cross_check;
use l2residue::{Error, RootSystem, TypeLabel, Weight};

use crate::cache::{decode_blocks, encode_blocks, fingerprint, Cache, Kind};
use crate::config::{CacheCommand, Cli, Command, CommandKind, ModeArg, RunConfig, Selector};
use crate::error::CliError;
use crate::report::{
    render_report, render_table, ExpectedDoc, LineDoc, ReportDoc, TableDoc, TableRowDoc, ZetaDoc, SCHEMA_VERSION,
};

pub const EXIT_CERTIFIED: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_UNDETERMINED: u8 = 2;
pub const EXIT_NOT_L2: u8 = 3;
pub const EXIT_TABLE_MISMATCH: u8 = 4;

/// Runs a parsed command line, writing the report to `out`. Returns the
/// exit status.
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match cli.command {
        Command::Verify(a) => verify(&RunConfig::from_verify(a)?, out),
        Command::Table(a) => table(&RunConfig::from_table(a)?, out),
        Command::Cache(c) => match c.action {
            CacheCommand::List { cache_dir } => {
                let cache = Cache::open(&require_dir(cache_dir)?)?;
                let mut text = String::new();
                for r in cache.list()? {
                    text.push_str(&format!("{}\t{}\t{}\n", r.kind.name(), r.key, r.bytes));
                }
                text.push_str(&format!("quarantined\t{}\n", cache.quarantined()));
                write_out(out, &text)?;
                Ok(0)
            }
            CacheCommand::Clear { cache_dir } => {
                let cache = Cache::open(&require_dir(cache_dir)?)?;
                let n = cache.clear()?;
                write_out(out, &format!("removed {n} records\n"))?;
                Ok(0)
            }
            CacheCommand::Warm { engine, selector, budget } => warm(&RunConfig::from_warm(engine, selector, budget)?, out),
        },
        Command::Catalog(a) => {
            let ty: TypeLabel = a.group_type.parse()?;
            if !has_catalog(ty) {
                eprintln!("no orbit catalog for {ty}; explicit lines are still accepted by verify");
            }
            write_out(out, &export_catalog(&catalog(ty)))?;
            Ok(0)
        }
    }
}

fn no_cache_dir() -> CliError {
    CliError::Usage(format!("no cache directory (use --cache-dir or {})", crate::config::CACHE_DIR_ENV))
}

fn require_dir(dir: Option<std::path::PathBuf>) -> Result<std::path::PathBuf, CliError> {
    dir.ok_or_else(no_cache_dir)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::io("<stdout>", e))
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match workers {
        None => Ok(f()),
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
    }
}

fn open_cache(cfg: &RunConfig) -> Result<Option<Cache>, CliError> {
    cfg.cache_dir.as_deref().map(Cache::open).transpose()
}

fn ints(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    parts.join(",")
}

fn lambda1_ints(line: &LineSpec) -> Vec<i64> {
    line.lambda1.to_ints().unwrap_or_default()
}

fn line_key(line: &LineSpec) -> String {
    format!("j={};s={};lambda1={}", line.j, line.s, ints(&lambda1_ints(line)))
}

fn line_doc(line: &LineSpec) -> LineDoc {
    LineDoc { j: line.j, s: line.s.to_string(), lambda1: lambda1_ints(line) }
}

/// A line together with the catalog row it belongs to, if any.
struct Target {
    entry: Option<OrbitEntry>,
    marking: Option<String>,
    line: LineSpec,
}

impl Target {
    fn from_entry(rs: &RootSystem, entry: OrbitEntry) -> Result<Target, CliError> {
        let line = entry_line(rs, &entry)?;
        Ok(Target { marking: Some(entry.marking_string()), entry: Some(entry), line })
    }

    fn name(&self) -> String {
        match &self.entry {
            Some(e) => format!("{} {} ({})", e.group_type, e.marking_string(), e.bala_carter_label),
            None => format!("line {}", line_key(&self.line)),
        }
    }

    fn mode(&self, arg: ModeArg) -> AnalysisMode {
        match arg {
            ModeArg::Exact => AnalysisMode::Exact,
            ModeArg::Criterion => AnalysisMode::Criterion,
            ModeArg::Auto => match self.entry.as_ref().and_then(|e| e.expected_ord) {
                Some(OrdValue::AtMost(_)) => AnalysisMode::Criterion,
                _ => AnalysisMode::Exact,
            },
        }
    }
}

fn marking_of(lambda0: &Weight) -> String {
    lambda0.coords().iter().map(|c| (c * 2).to_string()).collect()
}

fn resolve(rs: &RootSystem, cfg: &RunConfig, selector: &Selector) -> Result<Target, CliError> {
    let ty = cfg.group_type;
    let cat = catalog(ty);
    let by_lambda0 = |l0: &Weight| cat.iter().find(|e| e.lambda0() == *l0).cloned();
    match selector {
        Selector::Label(label) => {
            if !has_catalog(ty) {
                return Err(CliError::Usage(format!("no orbit catalog for {ty}; use --marking or --lambda1")));
            }
            let entry = cat
                .iter()
                .find(|e| e.matches_label(label))
                .cloned()
                .ok_or_else(|| CliError::Usage(format!("unknown orbit label {label:?} for {ty}")))?;
            Target::from_entry(rs, entry)
        }
        Selector::Marking(m) => {
            let marking = parse_marking(m)?;
            if marking.len() != rs.rank {
                return Err(Error::RankMismatch { expected: rs.rank, got: marking.len() }.into());
            }
            let mut lambda0 = marking_to_lambda0(&marking);
            if let Some(p) = &cfg.node_perm {
                lambda0 = permute_nodes(&lambda0, p)?;
            }
            match by_lambda0(&lambda0) {
                Some(entry) => Target::from_entry(rs, entry),
                None => {
                    let line = normalize_to_line(rs, &lambda0)?;
                    Ok(Target { entry: None, marking: Some(marking_of(&lambda0)), line })
                }
            }
        }
        Selector::Lambda1 { lambda1, j } => {
            let mut w = Weight::new(lambda1.clone());
            let mut j = *j;
            if let Some(p) = &cfg.node_perm {
                w = permute_nodes(&w, p)?;
                j = p.iter().position(|&x| x == j).map(|i| i + 1).ok_or(Error::IndexOutOfRange { index: j, rank: rs.rank })?;
            }
            if w.rank() != rs.rank {
                return Err(Error::RankMismatch { expected: rs.rank, got: w.rank() }.into());
            }
            if !w.is_integral() {
                return Err(Error::NonIntegralLine(format!("lambda1 = {w} has non-integral coordinates")).into());
            }
            let line = LineSpec::from_lambda1(rs, &w, j)?;
            let entry = by_lambda0(&line.lambda0(rs)?);
            let marking = entry.as_ref().map(OrbitEntry::marking_string);
            Ok(Target { entry, marking, line })
        }
    }
}

fn progress_printer(name: &str, quiet: bool) -> impl Fn(Progress) + Sync + '_ {
    move |p: Progress| {
        if !quiet {
            eprintln!(
                "{name}: eps^{}: {} blocks tested, {}/{} resolved",
                p.level, p.tested, p.resolved, p.total
            );
        }
    }
}

fn load_blocks(ctx: &LineAnalysis<'_>, cache: Option<&Cache>, fp: &str) -> Result<Vec<MuBlock>, CliError> {
    let key = line_key(&ctx.line);
    if let Some(c) = cache {
        if let Some(payload) = c.load(Kind::Blocks, fp, &key) {
            match decode_blocks(&payload) {
                Some(b) => return Ok(b),
                None => c.discard(Kind::Blocks, fp, &key, "unreadable block data"),
            }
        }
    }
    let blocks = build_blocks(ctx)?;
    if let Some(c) = cache {
        c.store(Kind::Blocks, fp, &key, &encode_blocks(&blocks))?;
    }
    Ok(blocks)
}

fn mode_name(mode: AnalysisMode) -> &'static str {
    match mode {
        AnalysisMode::Exact => "exact",
        AnalysisMode::Criterion => "criterion",
    }
}

/// Analyzes a target, reusing a stored report when one matches.
fn analyze_target(
    rs: &RootSystem,
    cfg: &RunConfig,
    cache: Option<&Cache>,
    target: &Target,
    keep_blocks: bool,
) -> Result<(ReportDoc, Option<Vec<MuBlock>>), CliError> {
    let fp = fingerprint(rs);
    let mode = target.mode(cfg.mode);
    let label = target.entry.as_ref().map(|e| e.bala_carter_label.clone());
    let key = format!(
        "{};cap={};mode={};seed={};label={};marking={}",
        line_key(&target.line),
        cfg.max_order,
        mode_name(mode),
        cfg.seed,
        label.as_deref().unwrap_or("-"),
        target.marking.as_deref().unwrap_or("-")
    );
    let ctx = LineAnalysis::new(rs, target.line.clone(), cfg.max_order)?;
    if let Some(c) = cache {
        if let Some(payload) = c.load(Kind::Results, &fp, &key) {
            match serde_json::from_str::<ReportDoc>(&payload) {
                Ok(doc) if doc.schema_version == SCHEMA_VERSION => {
                    let blocks = if keep_blocks { Some(load_blocks(&ctx, cache, &fp)?) } else { None };
                    return Ok((doc, blocks));
                }
                _ => c.discard(Kind::Results, &fp, &key, "unreadable report"),
            }
        }
    }
    let name = target.name();
    let started = Instant::now();
    let blocks = load_blocks(&ctx, cache, &fp)?;
    let kept = keep_blocks.then(|| blocks.clone());
    let printer = progress_printer(&name, cfg.quiet);
    let opts = AnalyzeOptions { mode, seed: cfg.seed, progress: Some(&printer) };
    let mut report = analyze_blocks(&ctx, blocks, &opts)?;
    report.orbit_label = label;
    report.marking = target.marking.clone();
    let doc = ReportDoc::new(&report, mode_name(mode), cfg.seed);
    if let Some(c) = cache {
        c.store(Kind::Results, &fp, &key, &serde_json::to_string(&doc)?)?;
    }
    if !cfg.quiet {
        eprintln!("{name}: {} in {:.2}s", doc.verdict, started.elapsed().as_secs_f64());
    }
    Ok((doc, kept))
}

fn exit_for(verdict: &str) -> Result<u8, CliError> {
    Ok(match verdict.parse::<Verdict>()? {
        Verdict::L2Certified => EXIT_CERTIFIED,
        Verdict::NotL2 => EXIT_NOT_L2,
        Verdict::UndeterminedAtCap => EXIT_UNDETERMINED,
    })
}

pub fn verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8, CliError> {
    debug_assert_eq!(cfg.command, CommandKind::Verify);
    let rs = RootSystem::new(cfg.group_type);
    let selector = cfg.selector.as_ref().ok_or_else(|| CliError::Usage("verify needs a selector".into()))?;
    let target = resolve(&rs, cfg, selector)?;
    let cache = open_cache(cfg)?;
    let doc = with_pool(cfg.workers, || -> Result<ReportDoc, CliError> {
        let (mut doc, blocks) = analyze_target(&rs, cfg, cache.as_ref(), &target, cfg.zeta_check)?;
        if cfg.zeta_check {
            doc.zeta_check = zeta_doc(&rs, cfg, &target, &doc, blocks.as_deref().unwrap_or_default())?;
        }
        Ok(doc)
    })??;
    write_out(out, &render_report(&doc, cfg.format)?)?;
    exit_for(&doc.verdict)
}

fn zeta_doc(
    rs: &RootSystem,
    cfg: &RunConfig,
    target: &Target,
    doc: &ReportDoc,
    blocks: &[MuBlock],
) -> Result<Option<ZetaDoc>, CliError> {
    let Some(mu) = &doc.leading_mu else {
        eprintln!("zeta check: no leading coefficient at this cap");
        return Ok(None);
    };
    let block = blocks.iter().find(|b| &b.mu == mu).expect("leading block is among the blocks");
    let ctx = LineAnalysis::new(rs, target.line.clone(), cfg.max_order)?;
    Ok(cross_check(&ctx, block, cfg.precision)?.map(|c| ZetaDoc::new(cfg.precision, mu.clone(), c)))
}

fn ord_consistent(expected: OrdValue, got: &str) -> bool {
    match (expected, got.parse::<OrdValue>()) {
        (OrdValue::Exact(a), Ok(OrdValue::Exact(b))) => a == b,
        (OrdValue::AtMost(a), Ok(OrdValue::Exact(b) | OrdValue::AtMost(b))) => b <= a,
        _ => false,
    }
}

fn compare_row(entry: &OrbitEntry, row: &TableRowDoc) -> Vec<String> {
    let mut diffs = Vec::new();
    if let (Some(want), Some(got)) = (entry.expected_wrel, row.table_wrel) {
        if want != got {
            diffs.push(format!("#W_rel: expected {want}, got {got}"));
        }
    }
    if let (Some(want), Some(got)) = (&entry.expected_counts, &row.table_counts) {
        if want.to_string() != *got {
            diffs.push(format!("counts: expected {want}, got {got}"));
        }
    }
    if let (Some(want), Some(got)) = (entry.expected_ord, &row.ord) {
        if !ord_consistent(want, got) {
            diffs.push(format!("ord: expected {want}, got {got}"));
        }
    }
    if let Some(v) = &row.verdict {
        if *v != Verdict::L2Certified.to_string() {
            diffs.push(format!("verdict: expected {}, got {v}", Verdict::L2Certified));
        }
    }
    diffs
}

fn table_row(rs: &RootSystem, cfg: &RunConfig, cache: Option<&Cache>, entry: OrbitEntry) -> Result<TableRowDoc, CliError> {
    let target = Target::from_entry(rs, entry.clone())?;
    let coset_count = (rs.weyl_group_order() / rs.levi_weyl_order(target.line.j)?) as u64;
    let rho_row = entry.is_rho_row();
    let expected = ExpectedDoc {
        wrel: entry.expected_wrel,
        counts: entry.expected_counts.map(|c| c.to_string()),
        ord: entry.expected_ord.map(|o| o.to_string()),
    };
    let mut row = TableRowDoc {
        label: entry.bala_carter_label.clone(),
        marking: entry.marking_string(),
        rho_row,
        line: line_doc(&target.line),
        mode: None,
        wrel_count: 0,
        coset_count,
        counts: String::new(),
        table_wrel: None,
        table_counts: None,
        ord: None,
        verdict: None,
        leading_support: None,
        leading_members: None,
        h_dependent: None,
        expected,
        status: String::new(),
        mismatches: Vec::new(),
    };
    if cfg.force || coset_count <= cfg.budget {
        let (doc, _) = analyze_target(rs, cfg, cache, &target, false)?;
        row.mode = Some(doc.mode);
        row.wrel_count = doc.wrel_count;
        row.counts = doc.counts.clone();
        // The trivial row is tabulated by its single nonzero term.
        if rho_row {
            row.table_wrel = Some(doc.leading_members);
            row.table_counts = Some(doc.leading_support.clone());
        } else {
            row.table_wrel = Some(doc.wrel_count);
            row.table_counts = Some(doc.counts);
        }
        row.ord = Some(doc.ord);
        row.verdict = Some(doc.verdict);
        row.leading_support = Some(doc.leading_support);
        row.leading_members = Some(doc.leading_members);
        row.h_dependent = doc.h_dependent;
    } else {
        let started = Instant::now();
        let ctx = LineAnalysis::new(rs, target.line.clone(), cfg.max_order)?;
        let g = geometry(&ctx)?;
        if !cfg.quiet {
            eprintln!(
                "{}: over budget ({coset_count} > {}), geometry only in {:.2}s",
                target.name(),
                cfg.budget,
                started.elapsed().as_secs_f64()
            );
        }
        row.wrel_count = g.wrel_count;
        row.counts = g.counts.to_string();
        if !rho_row {
            row.table_wrel = Some(g.wrel_count);
            row.table_counts = Some(row.counts.clone());
        }
    }
    row.mismatches = compare_row(&entry, &row);
    row.status = if !row.mismatches.is_empty() {
        "mismatch"
    } else if row.ord.is_none() {
        "skipped"
    } else {
        "match"
    }
    .to_string();
    Ok(row)
}

pub fn table(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8, CliError> {
    let ty = cfg.group_type;
    if !has_catalog(ty) {
        return Err(CliError::Usage(format!("no orbit catalog for {ty}")));
    }
    let rs = RootSystem::new(ty);
    let cache = open_cache(cfg)?;
    let rows = with_pool(cfg.workers, || {
        catalog(ty).into_iter().map(|e| table_row(&rs, cfg, cache.as_ref(), e)).collect::<Result<Vec<_>, _>>()
    })??;
    let doc = TableDoc { schema_version: SCHEMA_VERSION, group_type: ty.to_string(), max_order: cfg.max_order, budget: cfg.budget, rows };
    for r in doc.rows.iter().filter(|r| r.status == "mismatch") {
        for m in &r.mismatches {
            eprintln!("mismatch {ty} {} ({}): {m}", r.marking, r.label);
        }
    }
    write_out(out, &render_table(&doc, cfg.format)?)?;
    Ok(if doc.all_match() { EXIT_CERTIFIED } else { EXIT_TABLE_MISMATCH })
}

/// Enumerates blocks and builds the factor series a later run needs.
pub fn warm(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8, CliError> {
    let cache = open_cache(cfg)?.ok_or_else(no_cache_dir)?;
    let ty = cfg.group_type;
    let rs = RootSystem::new(ty);
    let targets: Vec<Target> = match &cfg.selector {
        Some(s) => vec![resolve(&rs, cfg, s)?],
        None => {
            if !has_catalog(ty) {
                return Err(CliError::Usage(format!("no orbit catalog for {ty}; give a selector")));
            }
            let mut v = Vec::new();
            for e in catalog(ty) {
                let t = Target::from_entry(&rs, e)?;
                if rs.weyl_group_order() / rs.levi_weyl_order(t.line.j)? <= u128::from(cfg.budget) {
                    v.push(t);
                }
            }
            v
        }
    };
    let fp = fingerprint(&rs);
    let mut text = String::new();
    with_pool(cfg.workers, || -> Result<(), CliError> {
        for t in &targets {
            let started = Instant::now();
            let ctx = LineAnalysis::new(&rs, t.line.clone(), cfg.max_order)?;
            let blocks = load_blocks(&ctx, Some(&cache), &fp)?;
            let mut orders: BTreeMap<FactorKey, u32> = BTreeMap::new();
            for b in &blocks {
                let rel = (cfg.max_order - b.eps_power).max(0) as u32;
                for c in &b.classes {
                    for (k, _) in &c.factors {
                        let o = orders.entry(*k).or_insert(0);
                        *o = (*o).max(rel);
                    }
                }
            }
            let mut fresh = 0;
            for (k, order) in &orders {
                let key = format!("c({}+{}eps);order={order}", k.k, k.t);
                if cache.load(Kind::Factors, &fp, &key).is_none() {
                    cache.store(Kind::Factors, &fp, &key, &format!("{}\n", factor_series(*k, *order)?))?;
                    fresh += 1;
                }
            }
            if !cfg.quiet {
                eprintln!("{}: warmed in {:.2}s", t.name(), started.elapsed().as_secs_f64());
            }
            text.push_str(&format!(
                "{}: {} blocks, {} factor series ({fresh} new)\n",
                t.name(),
                blocks.len(),
                orders.len()
            ));
        }
        Ok(())
    })??;
    write_out(out, &text)?;
    Ok(0)
}
