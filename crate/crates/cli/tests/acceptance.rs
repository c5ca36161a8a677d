//! Acceptance run: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use l2residue::cfactor::verify_reciprocity;
use l2residue::constantterm::{block_leading, block_series, brute_force_oracle, build_blocks, geometry, LineAnalysis};
use l2residue::orbits::{catalog, entry_line, LineSpec, OrdValue};
use l2residue::rootsys::Q;
use l2residue::{RootSystem, TypeLabel};
use l2residue_cli::report::{ReportDoc, TableDoc};

const BIN: &str = env!("CARGO_BIN_EXE_l2residue");

/// marking, lambda1, #W_rel, counts, ord
type Row = (&'static str, &'static [i64], u64, &'static str, &'static str);

const E6: &[Row] = &[
    ("200202", &[-1, 4, -1, -1, -1, -1], 72, "44/1/0", "0"),
    ("222022", &[2, -1, -1, -1, -1, -1], 27, "24/2/1", "0"),
    ("222222", &[-1, -1, -1, -1, -1, -1], 1, "1/0/0", "0"),
];

const E7: &[Row] = &[
    ("0002002", &[-1, -1, 4, -1, -1, -1, -1], 2016, "638/27/2", "1"),
    ("2002002", &[-1, 5, -1, -1, -1, -1, -1], 576, "292/2/1", "0"),
    ("2002022", &[7, -1, -1, -1, -1, -1, -1], 126, "90/1/0", "0"),
    ("2220202", &[4, -1, -1, -1, -1, -1, -1], 126, "115/3/1", "0"),
    ("2220222", &[2, -1, -1, -1, -1, -1, -1], 126, "97/28/0", "0"),
    ("2222222", &[-1, -1, -1, -1, -1, -1, -1], 1, "1/0/0", "0"),
];

const E8: &[Row] = &[
    ("00002000", &[-1, -1, -1, -1, 4, -1, -1, -1], 241920, "18881/3897/1329", "<=3"),
    ("00020002", &[-1, 7, -1, -1, -1, -1, -1, -1], 17280, "3638/2/1", "0"),
    ("00020020", &[-1, 6, -1, -1, -1, -1, -1, -1], 17280, "8902/603/22", "1"),
    ("00020022", &[-1, -1, -1, -1, -1, -1, 8, -1], 6720, "3143/49/1", "1"),
    ("20020020", &[10, -1, -1, -1, -1, -1, -1, -1], 2160, "1099/1/0", "0"),
    ("20020022", &[8, -1, -1, -1, -1, -1, -1, -1], 2160, "1647/13/4", "0"),
    ("20020202", &[7, -1, -1, -1, -1, -1, -1, -1], 2160, "1763/157/26", "0"),
    ("20020222", &[-1, -1, -1, -1, -1, -1, -1, 13], 240, "195/1/0", "0"),
    ("22202022", &[-1, -1, -1, -1, -1, -1, -1, 8], 240, "229/2/0", "0"),
    ("22202222", &[-1, -1, -1, -1, -1, -1, -1, 4], 240, "224/15/0", "0"),
    ("22222222", &[-1, -1, -1, -1, -1, -1, -1, -1], 1, "1/0/0", "0"),
];

const F4: &[Row] = &[
    ("0020", &[-1, 1, -1, -1], 96, "23/24/9", "2"),
    ("2020", &[2, -1, -1, -1], 24, "15/2/1", "0"),
    ("2022", &[1, -1, -1, -1], 24, "17/6/0", "0"),
    ("2222", &[-1, -1, -1, -1], 1, "1/0/0", "0"),
];

struct Output {
    code: i32,
    stdout: Vec<u8>,
    elapsed: Duration,
}

fn cli(args: &[&str]) -> Output {
    let started = Instant::now();
    let out = Command::new(BIN).args(args).env_remove("L2RESIDUE_CACHE_DIR").output().expect("run the cli");
    Output { code: out.status.code().unwrap_or(-1), stdout: out.stdout, elapsed: started.elapsed() }
}

fn table_args<'a>(ty: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["table", "--type", ty, "--format", "json", "--quiet"];
    v.extend_from_slice(extra);
    v
}

/// Runs a table at one worker and checks every executed row against the
/// tabulated values.
fn check_table(ty: &str, rows: &[Row], limit: Duration) -> Result<(String, Output), String> {
    let out = cli(&table_args(ty, &["--workers", "1"]));
    let doc: TableDoc = serde_json::from_slice(&out.stdout).map_err(|e| format!("unreadable table: {e}"))?;
    if out.code != 0 {
        return Err(format!("exit status {}", out.code));
    }
    if doc.rows.len() != rows.len() {
        return Err(format!("{} rows, expected {}", doc.rows.len(), rows.len()));
    }
    let mut executed = 0;
    for (r, &(marking, lambda1, wrel, counts, ord)) in doc.rows.iter().zip(rows) {
        let ctx = format!("{ty} {marking}");
        if r.marking != marking || r.line.lambda1 != lambda1 {
            return Err(format!("{ctx}: row is {} {:?}", r.marking, r.line.lambda1));
        }
        if r.status == "skipped" {
            if wrel <= 17280 {
                return Err(format!("{ctx}: skipped within budget"));
            }
            if (r.table_wrel, r.table_counts.as_deref()) != (Some(wrel), Some(counts)) {
                return Err(format!("{ctx}: geometry {:?} {:?}", r.table_wrel, r.table_counts));
            }
            continue;
        }
        executed += 1;
        let got = (r.table_wrel, r.table_counts.as_deref(), r.ord.as_deref(), r.verdict.as_deref());
        if got != (Some(wrel), Some(counts), Some(ord), Some("L2_certified")) || r.status != "match" {
            return Err(format!("{ctx}: got {got:?} status {}", r.status));
        }
        if r.rho_row && (r.leading_members != Some(1) || r.leading_support.as_deref() != Some("1/0/0")) {
            return Err(format!("{ctx}: trivial row is not a single term"));
        }
    }
    if out.elapsed > limit {
        return Err(format!("took {:.1}s, limit {:.0}s", out.elapsed.as_secs_f64(), limit.as_secs_f64()));
    }
    Ok((format!("{executed}/{} rows match in {:.1}s", rows.len(), out.elapsed.as_secs_f64()), out))
}

struct Gate {
    failures: usize,
}

impl Gate {
    fn criterion(&mut self, n: u32, name: &str, f: impl FnOnce() -> Result<String, String>) {
        let started = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {n} ({name}): PASS: {detail} [{secs:.1}s]"),
            Err(detail) => {
                self.failures += 1;
                println!("criterion {n} ({name}): FAIL: {detail} [{secs:.1}s]");
            }
        }
    }
}

fn catalog_types() -> [(TypeLabel, &'static str, &'static [Row]); 4] {
    [(TypeLabel::E6, "E6", E6), (TypeLabel::F4, "F4", F4), (TypeLabel::E7, "E7", E7), (TypeLabel::E8, "E8", E8)]
}

fn oracle_line(ty: TypeLabel, j: usize, s: Q) -> Result<usize, String> {
    let rs = RootSystem::new(ty);
    let ctx = LineAnalysis::new(&rs, LineSpec::on_node(&rs, j, s).map_err(|e| e.to_string())?, 4).map_err(|e| e.to_string())?;
    let oracle: BTreeMap<Vec<i64>, _> =
        brute_force_oracle(&ctx).map_err(|e| e.to_string())?.into_iter().map(|e| (e.mu.clone(), e)).collect();
    let blocks = build_blocks(&ctx).map_err(|e| e.to_string())?;
    if oracle.len() != blocks.len() {
        return Err(format!("{ty} j={j} s={s}: {} oracle images, {} blocks", oracle.len(), blocks.len()));
    }
    for b in &blocks {
        let want = oracle.get(&b.mu).ok_or_else(|| format!("{ty} j={j} s={s}: no oracle entry for {:?}", b.mu))?;
        let series = block_series(&ctx, b, 4).map_err(|e| e.to_string())?;
        let lead = block_leading(&ctx, b).map_err(|e| e.to_string())?;
        if series != want.series || lead.as_ref().map(|l| l.0) != want.order {
            return Err(format!("{ty} j={j} s={s}: block {:?} differs from the oracle", b.mu));
        }
        if let Some((_, p)) = lead {
            if p != want.leading {
                return Err(format!("{ty} j={j} s={s}: leading coefficient of {:?} differs", b.mu));
            }
        }
    }
    Ok(blocks.len())
}

fn main() {
    let mut gate = Gate { failures: 0 };
    let mut runs: BTreeMap<&str, Output> = BTreeMap::new();
    let limits = [60.0, 60.0, 1800.0, 3.0 * 3600.0];
    let names = ["E6 table", "F4 table", "E7 table", "E8 table within budget"];
    for (i, (_, ty, rows)) in catalog_types().into_iter().enumerate() {
        let n = [1, 2, 3, 4][i];
        gate.criterion(n, names[i], || {
            let (detail, out) = check_table(ty, rows, Duration::from_secs_f64(limits[i]))?;
            runs.insert(ty, out);
            Ok(detail)
        });
    }

    let mut a7_report: Option<ReportDoc> = None;
    gate.criterion(5, "E8(a7) geometry and bound", || {
        let rs = RootSystem::new(TypeLabel::E8);
        let entry = catalog(TypeLabel::E8).into_iter().find(|e| e.marking_string() == "00002000").unwrap();
        let ctx = LineAnalysis::new(&rs, entry_line(&rs, &entry).unwrap(), 3).unwrap();
        let started = Instant::now();
        let g = geometry(&ctx).map_err(|e| e.to_string())?;
        let geo_secs = started.elapsed().as_secs_f64();
        if g.wrel_count != 241920 || g.counts.to_string() != "18881/3897/1329" {
            return Err(format!("geometry {g}"));
        }
        if geo_secs > 600.0 {
            return Err(format!("geometry took {geo_secs:.1}s"));
        }
        let out = cli(&["verify", "--type", "E8", "--marking", "00002000", "--max-order", "3", "--quiet"]);
        let doc: ReportDoc = serde_json::from_slice(&out.stdout).map_err(|e| format!("unreadable report: {e}"))?;
        let bound = match doc.ord.parse::<OrdValue>() {
            Ok(OrdValue::AtMost(k)) if k <= 3 => k,
            other => return Err(format!("ord {other:?} is not a bound <= 3")),
        };
        if out.code != 0 || doc.verdict != "L2_certified" || doc.mode != "criterion" {
            return Err(format!("exit {} verdict {} mode {}", out.code, doc.verdict, doc.mode));
        }
        let detail = format!(
            "#W_rel {} counts {} in {geo_secs:.1}s; criterion with m = 3 gives ord <= {bound} in {:.1}s",
            g.wrel_count,
            g.counts,
            out.elapsed.as_secs_f64()
        );
        a7_report = Some(doc);
        Ok(detail)
    });

    gate.criterion(6, "invariant suite", || {
        let mut rows = 0;
        for (ty, _, _) in catalog_types() {
            let rs = RootSystem::new(ty);
            for entry in catalog(ty) {
                let line = entry_line(&rs, &entry).map_err(|e| e.to_string())?;
                let cosets = rs.weyl_group_order() / rs.levi_weyl_order(line.j).unwrap();
                let ctx = LineAnalysis::new(&rs, line, 4).unwrap();
                // geometry fails on any inversion with t < 1
                let g = geometry(&ctx).map_err(|e| format!("{ty} {}: {e}", entry.marking_string()))?;
                if u128::from(g.wrel_count) != cosets {
                    return Err(format!("{ty} {}: #W_rel {} but |W/W_M| = {cosets}", entry.marking_string(), g.wrel_count));
                }
                let blocks = build_blocks(&ctx).map_err(|e| format!("{ty} {}: {e}", entry.marking_string()))?;
                for b in &blocks {
                    for c in &b.classes {
                        let p: i32 = c.factors.iter().map(|(k, m)| k.eps_power() * *m as i32).sum();
                        if p != b.eps_power {
                            return Err(format!("{ty} {}: block {:?} mixes eps powers", entry.marking_string(), b.mu));
                        }
                    }
                }
                rows += 1;
            }
        }
        for k in -30..=30 {
            for t in 1..=3 {
                for n in 0..=4 {
                    if !verify_reciprocity(k, t, n).map_err(|e| e.to_string())? {
                        return Err(format!("reciprocity fails at k={k} t={t} N={n}"));
                    }
                }
            }
        }
        let mut certified = 0;
        for (ty, out) in &runs {
            let doc: TableDoc = serde_json::from_slice(&out.stdout).unwrap();
            for r in doc.rows.iter().filter(|r| r.verdict.as_deref() == Some("L2_certified") && !r.rho_row) {
                if r.h_dependent != Some(true) {
                    return Err(format!("{ty} {}: leading coefficient not H-dependent", r.marking));
                }
                certified += 1;
            }
        }
        if let Some(doc) = &a7_report {
            if doc.h_dependent != Some(true) {
                return Err("E8 00002000: leading coefficient not H-dependent".into());
            }
            certified += 1;
        }
        Ok(format!("{rows} rows, reciprocity |k|<=30, {certified} certified rows H-dependent"))
    });

    gate.criterion(7, "oracle equivalence", || {
        let lines = [
            (TypeLabel::A(2), 1, Q::new(1, 1)),
            (TypeLabel::A(2), 1, Q::new(3, 2)),
            (TypeLabel::B(2), 1, Q::new(1, 1)),
            (TypeLabel::B(2), 2, Q::new(3, 2)),
            (TypeLabel::G2, 1, Q::new(1, 1)),
            (TypeLabel::G2, 2, Q::new(3, 2)),
            (TypeLabel::A(3), 2, Q::new(1, 1)),
            (TypeLabel::A(3), 2, Q::new(3, 2)),
        ];
        let mut blocks = 0;
        for (ty, j, s) in lines {
            blocks += oracle_line(ty, j, s)?;
        }
        Ok(format!("{} lines, {blocks} blocks agree through eps^4", lines.len()))
    });

    gate.criterion(8, "zeta cross-check", || {
        let mut worst = 0.0f64;
        for (ty, marking) in [("E6", "200202"), ("F4", "0020"), ("E7", "2002022"), ("E8", "20020222")] {
            let out = cli(&["verify", "--type", ty, "--marking", marking, "--zeta-check", "--precision", "50", "--quiet"]);
            let doc: ReportDoc = serde_json::from_slice(&out.stdout).map_err(|e| format!("{ty}: {e}"))?;
            let z = doc.zeta_check.ok_or_else(|| format!("{ty}: no zeta check"))?;
            let diff: f64 = z.difference.parse().map_err(|_| format!("{ty}: bad difference {}", z.difference))?;
            if z.digits != 50 || !z.nonzero || !z.agrees || diff >= 1e-25 {
                return Err(format!("{ty} {marking}: nonzero {} difference {}", z.nonzero, z.difference));
            }
            worst = worst.max(diff);
        }
        Ok(format!("four types, largest difference {worst:.1e}"))
    });

    gate.criterion(9, "determinism", || {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let cache = dir.path().to_str().unwrap();
        let mut compared = 0;
        for (_, ty, _) in catalog_types() {
            let base = runs.get(ty).ok_or_else(|| format!("{ty}: no baseline run"))?;
            for extra in [&["--workers", "4"][..], &["--workers", "8"], &["--cache-dir", cache], &["--cache-dir", cache]] {
                let out = cli(&table_args(ty, extra));
                if out.stdout != base.stdout {
                    return Err(format!("{ty}: report differs with {extra:?}"));
                }
                compared += 1;
            }
        }
        if !Path::new(cache).join("results").read_dir().is_ok_and(|mut d| d.next().is_some()) {
            return Err("warm runs stored nothing".into());
        }
        Ok(format!("{compared} reruns byte-identical to the one-worker run"))
    });

    if gate.failures > 0 {
        println!("{} criteria failed", gate.failures);
        std::process::exit(1);
    }
    println!("all criteria passed");
}
