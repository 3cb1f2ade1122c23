//! Exhaustive sweeps over every configuration of a small mesh.
//!
//! Work is split into disjoint index ranges and merged associatively, so every
//! report is independent of the worker count. Witnesses are always the
//! smallest enumeration index with the property.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    enumerate_configurations, fill_states, ConfigRange, Configuration, EnumerationLimit, TbuState,
};
use crate::error::ConfigError;
use crate::mesh::{Family, MeshGraph, MeshSpec};
use crate::theory::{stats_bounds, type_constraints};
use crate::trace::{alternates_orientation, classify_path, lengths_stats, trace, Tracer};

/// Sweep settings.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleOptions {
    pub limit: EnumerationLimit,
    /// Worker threads; `None` uses the global rayon pool.
    pub jobs: Option<usize>,
}

impl OracleOptions {
    pub fn with_jobs(jobs: usize) -> Self {
        Self {
            jobs: Some(jobs.max(1)),
            ..Self::default()
        }
    }
}

fn sweep<T, F, M>(mesh: &MeshGraph, opts: &OracleOptions, map: F, merge: M) -> Result<T, ConfigError>
where
    T: Send + Default,
    F: Fn(ConfigRange) -> T + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    let range = enumerate_configurations(mesh, opts.limit)?;
    let workers = opts.jobs.unwrap_or_else(rayon::current_num_threads).max(1);
    let parts = range.split(workers * 8);
    let run = || {
        parts
            .into_par_iter()
            .map(&map)
            .reduce(T::default, &merge)
    };
    Ok(match opts.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    })
}

/// One realizable length with the first configuration that realizes it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthWitness {
    pub length: u32,
    pub index: u64,
    pub config: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealizableLengths {
    pub mesh: MeshSpec,
    pub configurations: u64,
    pub lengths: Vec<LengthWitness>,
}

impl RealizableLengths {
    pub fn set(&self) -> Vec<u64> {
        self.lengths.iter().map(|w| w.length as u64).collect()
    }

    pub fn witness(&self, length: u32) -> Option<&LengthWitness> {
        self.lengths.iter().find(|w| w.length == length)
    }
}

fn min_merge(mut a: BTreeMap<u32, u64>, b: BTreeMap<u32, u64>) -> BTreeMap<u32, u64> {
    for (k, v) in b {
        a.entry(k).and_modify(|e| *e = (*e).min(v)).or_insert(v);
    }
    a
}

/// Every path length realized by some configuration.
pub fn oracle_realizable_lengths(
    mesh: &MeshGraph,
    opts: &OracleOptions,
) -> Result<RealizableLengths, ConfigError> {
    let found = sweep(
        mesh,
        opts,
        |range| {
            let mut tracer = Tracer::new(mesh);
            let mut states = vec![TbuState::Bar; mesh.tbu_count()];
            let mut lens = Vec::new();
            let mut seen = BTreeMap::new();
            for idx in range.indices() {
                fill_states(idx, &mut states);
                tracer.path_lengths(&states, &mut lens);
                for &l in &lens {
                    seen.entry(l).or_insert(idx);
                }
            }
            seen
        },
        min_merge,
    )?;
    Ok(RealizableLengths {
        mesh: *mesh.spec(),
        configurations: 1u64 << mesh.tbu_count(),
        lengths: found
            .into_iter()
            .map(|(length, index)| LengthWitness {
                length,
                index,
                config: Configuration::from_index(mesh, index).to_bits(),
            })
            .collect(),
    })
}

/// Largest number of simultaneous paths of length `x` over all configurations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxSimultaneous {
    pub x: u32,
    pub y_true: u32,
    /// First configuration attaining `y_true`; absent when `y_true = 0`.
    pub witness: Option<String>,
}

/// Per-length best `(count, first index)`.
#[derive(Debug, Clone, Default)]
struct Profile(Vec<(u32, u64)>);

impl Profile {
    fn record(&mut self, x: usize, count: u32, idx: u64) {
        if self.0.len() <= x {
            self.0.resize(x + 1, (0, u64::MAX));
        }
        let e = &mut self.0[x];
        if count > e.0 || (count == e.0 && idx < e.1) {
            *e = (count, idx);
        }
    }

    fn merge(mut self, other: Profile) -> Profile {
        for (x, &(c, i)) in other.0.iter().enumerate() {
            if c > 0 {
                self.record(x, c, i);
            }
        }
        self
    }
}

/// `y_true` for every `x` in `[1, max_len]` from a single sweep.
pub fn oracle_max_profile(
    mesh: &MeshGraph,
    opts: &OracleOptions,
) -> Result<Vec<MaxSimultaneous>, ConfigError> {
    let max_len = crate::theory::max_path_length(mesh.spec()) as usize;
    let profile = sweep(
        mesh,
        opts,
        |range| {
            let mut tracer = Tracer::new(mesh);
            let mut states = vec![TbuState::Bar; mesh.tbu_count()];
            let mut lens = Vec::new();
            let mut counts = vec![0u32; max_len + 1];
            let mut prof = Profile::default();
            for idx in range.indices() {
                fill_states(idx, &mut states);
                tracer.path_lengths(&states, &mut lens);
                for &l in &lens {
                    counts[l as usize] += 1;
                }
                for &l in &lens {
                    let c = std::mem::take(&mut counts[l as usize]);
                    if c > 0 {
                        prof.record(l as usize, c, idx);
                    }
                }
            }
            prof
        },
        Profile::merge,
    )?;
    Ok((1..=max_len)
        .map(|x| {
            let (y, idx) = profile.0.get(x).copied().unwrap_or((0, u64::MAX));
            MaxSimultaneous {
                x: x as u32,
                y_true: y,
                witness: (y > 0).then(|| Configuration::from_index(mesh, idx).to_bits()),
            }
        })
        .collect())
}

pub fn oracle_max_simultaneous(
    mesh: &MeshGraph,
    x: u32,
    opts: &OracleOptions,
) -> Result<MaxSimultaneous, ConfigError> {
    let best = sweep(
        mesh,
        opts,
        |range| {
            let mut tracer = Tracer::new(mesh);
            let mut states = vec![TbuState::Bar; mesh.tbu_count()];
            let mut lens = Vec::new();
            let mut best: Option<(u32, u64)> = None;
            for idx in range.indices() {
                fill_states(idx, &mut states);
                tracer.path_lengths(&states, &mut lens);
                let c = lens.iter().filter(|&&l| l == x).count() as u32;
                if c > 0 && best.is_none_or(|(bc, _)| c > bc) {
                    best = Some((c, idx));
                }
            }
            best
        },
        |a, b| match (a, b) {
            (Some(p), Some(q)) => Some(if q.0 > p.0 || (q.0 == p.0 && q.1 < p.1) { q } else { p }),
            (a, b) => a.or(b),
        },
    )?;
    Ok(MaxSimultaneous {
        x,
        y_true: best.map_or(0, |b| b.0),
        witness: best.map(|(_, i)| Configuration::from_index(mesh, i).to_bits()),
    })
}

const MAX_COUNTEREXAMPLES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub config: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub rule: &'static str,
    pub failures: u64,
    pub counterexamples: Vec<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub mesh: MeshSpec,
    pub configurations: u64,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0)
    }
}

const CHECKS: &[(&str, &str, bool)] = &[
    ("path_count", "one path per pair of floating nodes", false),
    ("endpoints", "every floating node ends exactly one path", false),
    ("sum_format", "path sum = base + step·k, 0 ≤ k ≤ cells", false),
    ("edge_cover", "path sum + loop sum = 2·#TBU", false),
    ("max_length", "max ≤ step·k0 + 1", false),
    ("variance", "σ² ≤ (μ−1)(step·k0+1−μ)", false),
    ("type_rules", "type residue and length window", true),
    ("loop_length", "loop length ≡ 0 mod 4", true),
    ("alternation", "paths alternate vertical/horizontal TBUs", true),
];

#[derive(Debug, Clone, Default)]
struct Tally(Vec<(u64, Vec<(u64, String)>)>);

impl Tally {
    fn fail(&mut self, check: usize, idx: u64, detail: String) {
        if self.0.is_empty() {
            self.0 = vec![(0, Vec::new()); CHECKS.len()];
        }
        let (n, ex) = &mut self.0[check];
        *n += 1;
        if ex.len() < MAX_COUNTEREXAMPLES {
            ex.push((idx, detail));
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        if self.0.is_empty() {
            return other;
        }
        for (i, (n, ex)) in other.0.into_iter().enumerate() {
            self.0[i].0 += n;
            self.0[i].1.extend(ex);
            self.0[i].1.sort();
            self.0[i].1.truncate(MAX_COUNTEREXAMPLES);
        }
        self
    }
}

fn check_one(mesh: &MeshGraph, idx: u64, tally: &mut Tally) {
    let spec = mesh.spec();
    let square = spec.family() == Family::Square;
    let config = Configuration::from_index(mesh, idx);
    let t = trace(mesh, &config);

    if t.paths.len() as u64 != spec.path_count() {
        tally.fail(0, idx, format!("{} paths", t.paths.len()));
    }
    let mut ends: Vec<_> = t.paths.iter().flat_map(|p| [p.start, p.end]).collect();
    ends.sort();
    let mut floating = mesh.floating_nodes().to_vec();
    floating.sort();
    if ends != floating {
        tally.fail(1, idx, "endpoint multiset differs from floating nodes".into());
    }
    if t.path_sum() + t.loop_sum() != 2 * mesh.tbu_count() as u64 {
        tally.fail(3, idx, format!("{} + {}", t.path_sum(), t.loop_sum()));
    }
    let lengths = t.lengths();
    match lengths_stats(&lengths, spec) {
        Err(e) => tally.fail(2, idx, e.to_string()),
        Ok(stats) => match stats_bounds(spec, stats.k0) {
            Err(e) => tally.fail(2, idx, e.to_string()),
            Ok(b) => {
                if stats.max as u64 > b.max_len {
                    tally.fail(4, idx, format!("max {} > {}", stats.max, b.max_len));
                }
                if stats.variance > b.var_bound {
                    tally.fail(5, idx, format!("σ² {} > {}", stats.variance, b.var_bound));
                }
            }
        },
    }
    if !square {
        return;
    }
    for p in &t.paths {
        let ok = classify_path(mesh, p)
            .ok()
            .and_then(|kind| type_constraints(kind, p.start_side, spec).ok().map(|c| (kind, c)));
        match ok {
            Some((_, c)) if c.admits(p.length as u64) => {}
            Some((kind, c)) => tally.fail(
                6,
                idx,
                format!("{kind:?} path of length {} from {:?}; allowed {c:?}", p.length, p.start_side),
            ),
            None => tally.fail(6, idx, "path could not be classified".into()),
        }
        if !alternates_orientation(mesh, p) {
            tally.fail(8, idx, format!("path {:?}", p.tbus));
        }
    }
    for l in &t.loops {
        if l.length % 4 != 0 {
            tally.fail(7, idx, format!("loop of length {}", l.length));
        }
    }
}

/// Checks every configuration against the structural rules.
pub fn verify_theorem_suite(mesh: &MeshGraph, opts: &OracleOptions) -> Result<SuiteReport, ConfigError> {
    let tally = sweep(
        mesh,
        opts,
        |range| {
            let mut tally = Tally::default();
            for idx in range.indices() {
                check_one(mesh, idx, &mut tally);
            }
            tally
        },
        Tally::merge,
    )?;
    let square = mesh.family() == Family::Square;
    let mut tally = tally.0;
    if tally.is_empty() {
        tally = vec![(0, Vec::new()); CHECKS.len()];
    }
    let checks = CHECKS
        .iter()
        .zip(tally)
        .filter(|((_, _, sq_only), _)| square || !sq_only)
        .map(|(&(name, rule, _), (failures, ex))| CheckResult {
            name,
            rule,
            failures,
            counterexamples: ex
                .into_iter()
                .map(|(i, detail)| Counterexample {
                    config: Configuration::from_index(mesh, i).to_bits(),
                    detail,
                })
                .collect(),
        })
        .collect();
    Ok(SuiteReport {
        mesh: *mesh.spec(),
        configurations: 1u64 << mesh.tbu_count(),
        checks,
    })
}
