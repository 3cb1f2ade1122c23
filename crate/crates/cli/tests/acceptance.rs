//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use meshroute::advisor::{check_feasibility, minimal_sizes, minimal_square_size, Constraint};
use meshroute::characterize::{
    demonstrate_alpha_ambiguity, estimate_alpha, estimate_length, simulate_measurements,
    traversal_counts, weighted_geometric_mean, Optics, ProcessVariation,
};
use meshroute::construct::{
    construct_extremal, construct_max_snake, construct_modified_snake, construct_single_path,
    SnakeModification,
};
use meshroute::oracle::{
    oracle_max_profile, oracle_realizable_lengths, verify_theorem_suite, OracleOptions,
};
use meshroute::theory::{multi_path_upper_bound, realizable_lengths};
use meshroute::trace::path_stats;
use meshroute::{build_mesh, trace, Configuration, Family, MeshSpec};
use num_rational::Ratio;

fn report(criterion: u32, name: &str, ok: bool, detail: String) {
    let status = if ok { "PASS" } else { "FAIL" };
    println!("{status} criterion {criterion:>2} {name}: {detail}");
    assert!(ok, "criterion {criterion} {name}: {detail}");
}

fn square(n: u32, m: u32) -> MeshSpec {
    MeshSpec::square(n, m).unwrap()
}

fn jobs() -> OracleOptions {
    OracleOptions::with_jobs(std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[test]
fn criterion_01_realizable_length_sets() {
    let start = Instant::now();
    let mut problems = Vec::new();
    let mut sets = Vec::new();
    for (n, m) in [(1, 1), (2, 2), (1, 3), (2, 3)] {
        let spec = square(n, m);
        let oracle = oracle_realizable_lengths(&build_mesh(spec), &jobs()).unwrap();
        let expected_configs = 1u64 << (n * (m + 1) + m * (n + 1));
        if oracle.configurations != expected_configs {
            problems.push(format!("{spec}: {} configurations", oracle.configurations));
        }
        let closed: Vec<u64> = realizable_lengths(&spec).into_iter().collect();
        if oracle.set() != closed {
            problems.push(format!("{spec}: oracle {:?} vs closed form {closed:?}", oracle.set()));
        }
        sets.push((spec, oracle.set().into_iter().collect::<BTreeSet<u64>>()));
    }
    let s23 = &sets[3].1;
    if !s23.contains(&7) || s23.contains(&3) {
        problems.push("2x3 must contain 7 and exclude 3".into());
    }
    let s22 = &sets[1].1;
    if [3, 7, 11, 15].iter().any(|x| s22.contains(x)) {
        problems.push("2x2 must exclude 3, 7, 11, 15".into());
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(60) {
        problems.push(format!("took {elapsed:?}"));
    }
    report(1, "realizable lengths", problems.is_empty(), format!("{elapsed:.2?} {problems:?}"));
}

#[test]
fn criterion_02_multi_path_bound_dominance() {
    let spec = square(2, 3);
    let start = Instant::now();
    let profile = oracle_max_profile(&build_mesh(spec), &jobs()).unwrap();
    let elapsed = start.elapsed();
    let mut problems = Vec::new();
    if profile.len() != 25 {
        problems.push(format!("profile covers {} lengths", profile.len()));
    }
    for p in &profile {
        let bound = multi_path_upper_bound(&spec, p.x as u64).unwrap().y_max;
        if p.y_true as u64 > bound {
            problems.push(format!("x={}: y_true {} > bound {bound}", p.x, p.y_true));
        }
    }
    let y = |x: usize| profile[x - 1].y_true;
    if y(1) != 10 || y(3) != 0 {
        problems.push(format!("y(1)={} y(3)={}", y(1), y(3)));
    }
    if elapsed > Duration::from_secs(120) {
        problems.push(format!("took {elapsed:?}"));
    }
    report(2, "bound dominance", problems.is_empty(), format!("{elapsed:.2?} {problems:?}"));
}

#[test]
fn criterion_03_graph_counts() {
    let mut problems = Vec::new();
    let mut meshes = 0;
    for n in 1..=5i64 {
        for m in 1..=5i64 {
            let mut cases = vec![(
                Family::Square,
                n * (m + 1) + m * (n + 1),
                4 * n + 4 * m,
                4 * n * m,
            )];
            cases.push((
                Family::HexParallelogram,
                (4 * n + 4 * m - 2) + (3 * n * m - 2 * n - 2 * m + 1),
                8 * n + 8 * m - 4,
                6 * n * m,
            ));
            if m % 2 == 0 {
                cases.push((
                    Family::TriParallelogram,
                    (2 * n + m) + ((3 * n - 1) * m / 2 - n),
                    4 * n + 2 * m,
                    3 * n * m,
                ));
            }
            for (family, tbus, floating, inner) in cases {
                let spec = MeshSpec::new(family, n as u32, m as u32).unwrap();
                let g = build_mesh(spec);
                let got_floating = g.nodes().iter().filter(|x| x.degree() == 1).count() as i64;
                let got_inner = g.nodes().iter().filter(|x| x.degree() == 2).count() as i64;
                let bad_degree = g.nodes().iter().any(|x| !(1..=2).contains(&x.degree()));
                let peripheral_ok = g.tbus().iter().all(|t| {
                    let has_floating = (0..2)
                        .flat_map(|e| (0..2).map(move |s| (e, s)))
                        .any(|(e, s)| g.node(t.port_node(e, s)).degree() == 1);
                    has_floating == t.peripheral
                });
                let got = (g.tbu_count() as i64, got_floating, got_inner);
                if got != (tbus, floating, inner) || bad_degree || !peripheral_ok {
                    problems.push(format!("{spec}: got {got:?}, want {:?}", (tbus, floating, inner)));
                }
                meshes += 1;
            }
        }
    }
    report(3, "graph counts", problems.is_empty(), format!("{meshes} meshes {problems:?}"));
}

fn suite_detail(spec: MeshSpec, names: &[&str], problems: &mut Vec<String>) -> u64 {
    let r = verify_theorem_suite(&build_mesh(spec), &jobs()).unwrap();
    for c in r.checks.iter().filter(|c| names.contains(&c.name)) {
        if c.failures > 0 {
            problems.push(format!("{spec} {}: {} failures, e.g. {:?}", c.name, c.failures, c.counterexamples.first()));
        }
    }
    let seen: BTreeSet<&str> = r.checks.iter().map(|c| c.name).collect();
    for n in names {
        if !seen.contains(n) {
            problems.push(format!("{spec}: check {n} not run"));
        }
    }
    r.configurations
}

#[test]
fn criterion_04_path_type_constraints() {
    let mut problems = Vec::new();
    let mut configs = 0;
    for spec in [square(2, 2), square(2, 3)] {
        configs += suite_detail(spec, &["type_rules"], &mut problems);
    }
    report(4, "path type constraints", problems.is_empty(), format!("{configs} configurations {problems:?}"));
}

#[test]
fn criterion_05_path_statistics() {
    let mut problems = Vec::new();
    let mut configs = 0;
    for spec in [square(1, 1), square(2, 2)] {
        configs += suite_detail(spec, &["sum_format", "max_length", "variance"], &mut problems);
    }
    let g = build_mesh(square(2, 2));
    let c = construct_extremal(&g, 4).unwrap();
    let stats = path_stats(&trace(&g, &c).paths, g.spec()).unwrap();
    if stats.variance != Ratio::from_integer(28) || stats.k0 != 4 {
        problems.push(format!("extremal variance {} at k0 {}", stats.variance, stats.k0));
    }
    report(5, "path statistics", problems.is_empty(), format!("{configs} configurations, extremal σ²={} {problems:?}", stats.variance));
}

#[test]
fn criterion_06_constructions() {
    let mut problems = Vec::new();
    let mut built = 0;
    let mut specs = Vec::new();
    for n in 1..=4 {
        for m in 1..=4 {
            specs.push(square(n, m));
        }
    }
    for n in 1..=2 {
        for m in 1..=2 {
            specs.push(MeshSpec::hex(n, m).unwrap());
        }
    }
    for spec in specs {
        let g = build_mesh(spec);
        for x in realizable_lengths(&spec) {
            match construct_single_path(&g, x) {
                Ok(c) if trace(&g, &c.config).paths.iter().any(|p| p.length as u64 == x) => built += 1,
                Ok(_) => problems.push(format!("{spec} x={x}: traced length mismatch")),
                Err(e) => problems.push(format!("{spec} x={x}: {e}")),
            }
        }
    }
    let longest = |g: &meshroute::MeshGraph, c: &Configuration| {
        trace(g, c).paths.iter().map(|p| p.length as u64).max().unwrap()
    };
    for n in 1..=5 {
        for m in 1..=5 {
            let g = build_mesh(square(n, m));
            let got = construct_max_snake(&g).map(|c| longest(&g, &c));
            let want = 4 * n as u64 * m as u64 + 1;
            if got.as_ref().ok() != Some(&want) {
                problems.push(format!("snake {n}x{m}: {got:?} want {want}"));
            }
        }
    }
    let g = build_mesh(square(2, 2));
    for (modification, want) in [
        (SnakeModification::TopLeftHorizontal, 16),
        (SnakeModification::SecondRightVertical, 13),
    ] {
        let got = construct_modified_snake(&g, modification).map(|c| longest(&g, &c));
        if got.as_ref().ok() != Some(&want) {
            problems.push(format!("{modification:?}: {got:?} want {want}"));
        }
    }
    report(6, "constructions", problems.is_empty(), format!("{built} single paths {problems:?}"));
}

#[test]
fn criterion_07_hex_and_tri_sweeps() {
    let mut problems = Vec::new();
    for (spec, step) in [(MeshSpec::hex(1, 1).unwrap(), 6), (MeshSpec::tri(1, 2).unwrap(), 3)] {
        let g = build_mesh(spec);
        let oracle = oracle_realizable_lengths(&g, &jobs()).unwrap();
        let want_configs = if spec.family() == Family::HexParallelogram { 64 } else { 32 };
        if oracle.configurations != want_configs {
            problems.push(format!("{spec}: {} configurations", oracle.configurations));
        }
        if oracle.set() != (1..=7).collect::<Vec<u64>>() {
            problems.push(format!("{spec}: lengths {:?}", oracle.set()));
        }
        if spec.family().cell_sides() != step {
            problems.push(format!("{spec}: step {}", spec.family().cell_sides()));
        }
        suite_detail(spec, &["path_count", "endpoints", "sum_format", "edge_cover"], &mut problems);
    }
    report(7, "hex and tri sweeps", problems.is_empty(), format!("{problems:?}"));
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn criterion_08_characterization() {
    let g = build_mesh(square(2, 2));
    let cross = Configuration::all_cross(&g);
    let optics = Optics::at_wavelength(2.35, 1550e-9);
    let mut problems = Vec::new();

    let ms = simulate_measurements(&g, &cross, &ProcessVariation::uniform(&g, 0.99, 100e-6), optics).unwrap();
    let alpha = estimate_alpha(&ms, &g, 4).unwrap();
    if rel(alpha, 0.99) > 1e-12 {
        problems.push(format!("uniform α̂ {alpha}"));
    }

    let var = ProcessVariation::random(&g, (0.95, 0.995), (100e-6, 100e-6), 7);
    let ms_var = simulate_measurements(&g, &cross, &var, optics).unwrap();
    let gm = weighted_geometric_mean(&var.alpha, &traversal_counts(&g, &cross));
    let alpha_var = estimate_alpha(&ms_var, &g, 4).unwrap();
    if rel(alpha_var, gm) > 1e-9 {
        problems.push(format!("per-TBU α̂ {alpha_var} vs geometric mean {gm}"));
    }

    let est = estimate_length(&ms, &g, optics, 4, (90e-6, 110e-6)).unwrap();
    let nearest = est
        .candidates
        .iter()
        .copied()
        .min_by(|a, b| (a - 100e-6).abs().total_cmp(&(b - 100e-6).abs()))
        .unwrap();
    if rel(nearest, 100e-6) > 1e-9 {
        problems.push(format!("nearest length candidate {nearest}"));
    }
    if est.candidates.len() != 1 {
        problems.push(format!(
            "length not unique: {} candidates spaced {:.3e} m in the window",
            est.candidates.len(),
            est.period
        ));
    }

    let amb = demonstrate_alpha_ambiguity(&g, &ProcessVariation::uniform(&g, 0.98, 100e-6), 1.01, optics).unwrap();
    if amb.max_deviation > 1e-12 || amb.first == amb.second {
        problems.push(format!("ambiguity deviation {}", amb.max_deviation));
    }
    report(8, "characterization", problems.is_empty(), format!("{problems:?}"));
}

#[test]
fn criterion_09_advisor() {
    let mut problems = Vec::new();
    let size = |l: &[u64]| minimal_square_size(l, 64).map(|s| s.size);
    if size(&[2, 4, 6, 8]) != Ok(2) {
        problems.push(format!("Λ1 {:?}", size(&[2, 4, 6, 8])));
    }
    if size(&[6, 10, 14, 18, 22, 26]) != Ok(5) {
        problems.push(format!("Λ2 {:?}", size(&[6, 10, 14, 18, 22, 26])));
    }
    let l3 = [3, 5, 7, 9, 11, 13];
    if size(&l3).is_ok() {
        problems.push("Λ3 has a square size".into());
    }
    match minimal_sizes(&l3, 64, 64) {
        Ok(f) if f.minimal.contains(&(1, 8)) => {}
        other => problems.push(format!("Λ3 frontier {other:?}")),
    }
    for (lambda, constraint) in [
        (&[1u64, 18][..], Constraint::MaxLength),
        (&[1, 2, 4, 5, 8, 10][..], Constraint::PathSum),
        (&[1, 1, 1, 1, 2, 4, 5, 10][..], Constraint::MeanFormat),
    ] {
        let r = check_feasibility(2, 2, lambda).unwrap();
        if r.passes() || !r.violated(constraint) {
            problems.push(format!("Λ4 {lambda:?}: {:?}", r.violations));
        }
    }
    report(9, "advisor", problems.is_empty(), format!("{problems:?}"));
}

#[test]
fn criterion_10_bounds_csv() {
    let dir = std::env::temp_dir().join(format!("meshroute-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("bounds.csv");
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_meshroute"))
        .args(["bounds", "--mesh", "square:21x21", "--x-range", "1..1765", "--csv"])
        .arg(&csv)
        .output()
        .unwrap();
    let elapsed = start.elapsed();
    let mut problems = Vec::new();
    if !out.status.success() {
        problems.push(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let text = std::fs::read_to_string(&csv).unwrap_or_default();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    if rows.len() != 1765 {
        problems.push(format!("{} rows", rows.len()));
    }
    let y = |x: usize| rows.get(x - 1).map(|r| r[5].to_string());
    if y(1).as_deref() != Some("84") || y(2).as_deref() != Some("4") {
        problems.push(format!("y(1)={:?} y(2)={:?}", y(1), y(2)));
    }
    if rows.get(1).map(|r| r[3]) != Some("4") {
        problems.push("C1 not binding at x=2".into());
    }
    if elapsed > Duration::from_secs(1) {
        problems.push(format!("took {elapsed:?}"));
    }
    std::fs::remove_dir_all(&dir).ok();
    report(10, "bounds csv", problems.is_empty(), format!("{elapsed:.2?} {problems:?}"));
}
