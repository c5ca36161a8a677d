use l2residue::cfactor::verify_reciprocity;
use l2residue::constantterm::{analyze, build_blocks, geometry, LineAnalysis, Verdict};
use l2residue::orbits::{catalog, entry_line, LineSpec};
use l2residue::{RootSystem, TypeLabel};
use num_rational::Rational64 as Q;
use proptest::prelude::*;

const EXCEPTIONAL: [TypeLabel; 4] = [TypeLabel::E6, TypeLabel::F4, TypeLabel::E7, TypeLabel::E8];

#[test]
fn wrel_size_is_the_coset_count_for_every_row() {
    for ty in EXCEPTIONAL {
        let rs = RootSystem::new(ty);
        for entry in catalog(ty) {
            let line = entry_line(&rs, &entry).unwrap();
            let j = line.j;
            let ctx = LineAnalysis::new(&rs, line, 0).unwrap();
            // geometry also checks t >= 1 for every inversion
            let g = geometry(&ctx).unwrap();
            let cosets = rs.weyl_group_order() / rs.levi_weyl_order(j).unwrap();
            assert_eq!(u128::from(g.wrel_count), cosets, "{ty} {}", entry.marking_string());
            if !entry.is_rho_row() {
                assert_eq!(Some(g.wrel_count), entry.expected_wrel, "{ty} {}", entry.marking_string());
                assert_eq!(Some(g.counts), entry.expected_counts, "{ty} {}", entry.marking_string());
            }
        }
    }
}

#[test]
fn inversions_have_positive_t() {
    for ty in [TypeLabel::E6, TypeLabel::F4, TypeLabel::E7] {
        let rs = RootSystem::new(ty);
        for entry in catalog(ty) {
            let line = entry_line(&rs, &entry).unwrap();
            for el in rs.enumerate_wrel(line.j, &line.lambda1, &line.lambda2).unwrap() {
                assert!(el.inversions.iter().all(|&(_, t)| t >= 1), "{ty} {:?}", el.word);
            }
        }
    }
}

#[test]
fn epsilon_power_is_constant_on_blocks() {
    // build_blocks fails on any block with two different powers
    for ty in EXCEPTIONAL {
        let rs = RootSystem::new(ty);
        for entry in catalog(ty).into_iter().filter(|e| e.expected_wrel.unwrap_or(0) <= 20_000) {
            let ctx = LineAnalysis::new(&rs, entry_line(&rs, &entry).unwrap(), 0).unwrap();
            let blocks = build_blocks(&ctx).unwrap();
            for b in &blocks {
                for c in &b.classes {
                    let p: i32 = c.factors.iter().map(|(f, m)| f.eps_power() * *m as i32).sum();
                    assert_eq!(p, b.eps_power);
                }
            }
        }
    }
}

#[test]
fn reciprocity_sweep() {
    for k in -30..=30 {
        for t in 1..=3 {
            for n in 0..=4 {
                assert!(verify_reciprocity(k, t, n).unwrap(), "k={k} t={t} N={n}");
            }
        }
    }
}

#[test]
fn certified_rows_have_h_dependent_leading_terms() {
    for ty in [TypeLabel::E6, TypeLabel::F4, TypeLabel::E7] {
        let rs = RootSystem::new(ty);
        for entry in catalog(ty).into_iter().filter(|e| !e.is_rho_row()) {
            let ctx = LineAnalysis::new(&rs, entry_line(&rs, &entry).unwrap(), 4).unwrap();
            let r = analyze(&ctx).unwrap();
            assert_eq!(r.verdict, Verdict::L2Certified);
            assert_eq!(Some(r.ord), entry.expected_ord, "{ty} {}", entry.marking_string());
            assert_eq!(r.h_dependent, Some(true), "{ty} {}", entry.marking_string());
        }
    }
}

fn small_type() -> impl Strategy<Value = TypeLabel> {
    prop_oneof![
        (1usize..=4).prop_map(TypeLabel::A),
        (2usize..=4).prop_map(TypeLabel::B),
        (2usize..=4).prop_map(TypeLabel::C),
        (4usize..=5).prop_map(TypeLabel::D),
        Just(TypeLabel::G2),
        Just(TypeLabel::F4),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn blocks_partition_wrel(ty in small_type(), node in 1usize..=5, twice_s in 1i64..=9) {
        let rs = RootSystem::new(ty);
        let j = (node - 1) % rs.rank + 1;
        let line = LineSpec::on_node(&rs, j, Q::new(twice_s, 2)).unwrap();
        let ctx = LineAnalysis::new(&rs, line, 1).unwrap();
        let blocks = build_blocks(&ctx).unwrap();
        let members: usize = blocks.iter().map(|b| b.member_count()).sum();
        prop_assert_eq!(members as u128, rs.weyl_group_order() / rs.levi_weyl_order(j).unwrap());
        let g = geometry(&ctx).unwrap();
        prop_assert_eq!(g.distinct_mu as usize, blocks.len());
        prop_assert_eq!(g.counts.total(), g.distinct_mu);
        prop_assert!(g.counts.boundary <= g.counts.non_strict);
        let report = analyze(&ctx).unwrap();
        prop_assert_eq!(report.counts, g.counts);
        for b in &report.blocks {
            prop_assert!(b.order.to_string().trim_start_matches(">=").parse::<i32>().unwrap() >= b.eps_power);
        }
    }
}
