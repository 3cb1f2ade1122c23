use std::collections::BTreeSet;

use meshroute::characterize::{estimate_alpha, simulate_measurements, MeasurementSet, Optics, ProcessVariation};
use meshroute::theory::{multi_path_upper_bound, path_sum_spectrum, stats_bounds, type_constraints};
use meshroute::trace::{alternates_orientation, classify_path, path_stats};
use meshroute::{build_mesh, trace, Configuration, Family, MeshGraph, MeshSpec};
use num_rational::Ratio;
use proptest::prelude::*;

fn mesh_strategy() -> impl Strategy<Value = MeshSpec> {
    prop_oneof![
        (1u32..=4, 1u32..=4).prop_map(|(n, m)| MeshSpec::square(n, m).unwrap()),
        (1u32..=3, 1u32..=3).prop_map(|(n, m)| MeshSpec::hex(n, m).unwrap()),
        (1u32..=3, 1u32..=2).prop_map(|(n, h)| MeshSpec::tri(n, 2 * h).unwrap()),
    ]
}

fn random_config(g: &MeshGraph, seed: u64) -> Configuration {
    let mut s = seed | 1;
    let cross = (0..g.tbu_count()).filter(|_| {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        s & 1 == 1
    });
    Configuration::with_cross(g, cross)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn paths_pair_floating_nodes_and_cover_every_edge(spec in mesh_strategy(), seed: u64) {
        let g = build_mesh(spec);
        let c = random_config(&g, seed);
        let t = trace(&g, &c);
        prop_assert_eq!(t.paths.len() as u64, spec.path_count());
        let mut ends: Vec<_> = t.paths.iter().flat_map(|p| [p.start, p.end]).collect();
        ends.sort();
        let mut floating = g.floating_nodes().to_vec();
        floating.sort();
        prop_assert_eq!(ends, floating);
        prop_assert_eq!(t.path_sum() + t.loop_sum(), 2 * g.tbu_count() as u64);
        for p in &t.paths {
            prop_assert_ne!(p.start, p.end);
            prop_assert_eq!(p.tbus.len(), p.length as usize);
            prop_assert_eq!(p.nodes.len(), p.length as usize + 1);
        }
    }

    #[test]
    fn path_sum_and_moments_respect_bounds(spec in mesh_strategy(), seed: u64) {
        let g = build_mesh(spec);
        let t = trace(&g, &random_config(&g, seed));
        let stats = path_stats(&t.paths, &spec).unwrap();
        prop_assert!(path_sum_spectrum(&spec).contains(stats.sum));
        let b = stats_bounds(&spec, stats.k0).unwrap();
        prop_assert_eq!(stats.mean, b.mean);
        prop_assert!(stats.max as u64 <= b.max_len);
        prop_assert!(stats.variance <= b.var_bound);
        prop_assert!(stats.variance >= Ratio::from_integer(0));
    }

    #[test]
    fn square_paths_obey_type_rules(n in 1u32..=4, m in 1u32..=4, seed: u64) {
        let spec = MeshSpec::square(n, m).unwrap();
        let g = build_mesh(spec);
        let c = random_config(&g, seed);
        let t = trace(&g, &c);
        for p in &t.paths {
            let kind = classify_path(&g, p).unwrap();
            let rule = type_constraints(kind, p.start_side, &spec).unwrap();
            prop_assert!(rule.admits(p.length as u64), "{:?} {}", kind, p.length);
            prop_assert!(alternates_orientation(&g, p));
        }
        for l in &t.loops {
            prop_assert_eq!(l.length % 4, 0);
        }
    }

    #[test]
    fn bitstrings_round_trip(spec in mesh_strategy(), seed: u64) {
        let g = build_mesh(spec);
        let c = random_config(&g, seed);
        let back = Configuration::from_bits(&g, &c.to_bits()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn bound_is_between_zero_and_path_count(n in 1u32..=6, m in 1u32..=6, x in 1u64..200) {
        let spec = MeshSpec::square(n, m).unwrap();
        let b = multi_path_upper_bound(&spec, x).unwrap();
        prop_assert!(b.y_max <= spec.path_count());
        if x > 4 * n as u64 * m as u64 + 1 {
            prop_assert_eq!(b.y_max, 0);
        }
    }

    #[test]
    fn uniform_loss_is_recovered_for_any_configuration(n in 1u32..=3, m in 1u32..=3, seed: u64,
                                                       alpha in 0.5f64..1.0) {
        let spec = MeshSpec::square(n, m).unwrap();
        let g = build_mesh(spec);
        let c = random_config(&g, seed);
        let k0 = path_stats(&trace(&g, &c).paths, &spec).unwrap().k0;
        let ms = simulate_measurements(&g, &c, &ProcessVariation::uniform(&g, alpha, 50e-6),
                                       Optics::at_wavelength(2.35, 1550e-9)).unwrap();
        let est = estimate_alpha(&ms, &g, k0).unwrap();
        prop_assert!(((est - alpha) / alpha).abs() <= 1e-12);
        let csv = MeasurementSet::from_csv(ms.to_csv().as_bytes()).unwrap();
        prop_assert_eq!(csv.length_sum(), ms.length_sum());
    }
}

#[test]
fn enumeration_counts_match_tbu_count() {
    for spec in [MeshSpec::square(1, 1).unwrap(), MeshSpec::hex(1, 1).unwrap(), MeshSpec::tri(1, 2).unwrap()] {
        let g = build_mesh(spec);
        let distinct: BTreeSet<String> = (0..1u64 << g.tbu_count())
            .map(|i| Configuration::from_index(&g, i).to_bits())
            .collect();
        assert_eq!(distinct.len() as u64, 1 << spec.tbu_count());
    }
}

#[test]
fn family_sides() {
    assert_eq!(Family::Square.cell_sides(), 4);
    assert_eq!(Family::HexParallelogram.cell_sides(), 6);
    assert_eq!(Family::TriParallelogram.cell_sides(), 3);
}
