//! Necessary-condition screening of desired path-length collections on
//! square meshes, and searches for the smallest mesh that passes.
//!
//! Passing every check never certifies that a collection can be routed.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::AdvisorError;
use crate::mesh::MeshSpec;
use crate::theory::{multi_path_upper_bound, single_path_realizable};

pub const DEFAULT_SEARCH_CAP: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    FailsNecessary,
    PassesNecessary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// Every length at most `4NM+1`.
    MaxLength,
    /// Every length single-path realizable.
    Realizability,
    /// At most `2N+2M` paths.
    PathCount,
    /// Total length at most `2N+2M+4NM`.
    PathSum,
    /// At most four paths of one even length.
    EvenMultiplicity,
    /// At most `⌊4NM/(x-1)⌋` paths of length `x`.
    LengthMultiplicity,
    /// With `2N+2M` paths, the mean is `1 + 2k/(N+M)`.
    MeanFormat,
}

impl Constraint {
    pub fn rule(self) -> &'static str {
        match self {
            Constraint::MaxLength => "maximum path length 4NM+1",
            Constraint::Realizability => "single-path realizable lengths",
            Constraint::PathCount => "path count 2N+2M",
            Constraint::PathSum => "path sum at most 2N+2M+4NM",
            Constraint::EvenMultiplicity => "at most 4 equal even-length paths",
            Constraint::LengthMultiplicity => "at most floor(4NM/(x-1)) paths of length x",
            Constraint::MeanFormat => "full-count mean of the form 1+2k/(N+M)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub rule: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeasibilityReport {
    pub rows: u32,
    pub cols: u32,
    pub lambda: Vec<u64>,
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl FeasibilityReport {
    pub fn passes(&self) -> bool {
        self.verdict == Verdict::PassesNecessary
    }

    pub fn violated(&self, c: Constraint) -> bool {
        self.violations.iter().any(|v| v.constraint == c)
    }
}

fn validate(lambda: &[u64]) -> Result<(), AdvisorError> {
    if lambda.is_empty() || lambda.contains(&0) {
        Err(AdvisorError::InvalidLambda)
    } else {
        Ok(())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Evaluates every necessary condition on an `N×M` square mesh.
pub fn check_feasibility(n: u32, m: u32, lambda: &[u64]) -> Result<FeasibilityReport, AdvisorError> {
    validate(lambda)?;
    let spec = MeshSpec::square(n, m).map_err(|_| AdvisorError::InvalidLambda)?;
    let (nn, mm) = (n as u64, m as u64);
    let max_len = 4 * nn * mm + 1;
    let paths = 2 * nn + 2 * mm;
    let mut violations = Vec::new();
    let mut notes = Vec::new();
    let mut fail = |constraint: Constraint, detail: String| {
        violations.push(Violation {
            constraint,
            rule: constraint.rule(),
            detail,
        })
    };

    let longest = *lambda.iter().max().expect("nonempty");
    if longest > max_len {
        fail(Constraint::MaxLength, format!("{longest} > 4NM+1 = {max_len}"));
    }
    let mut multiplicity: BTreeMap<u64, u64> = BTreeMap::new();
    for &x in lambda {
        *multiplicity.entry(x).or_default() += 1;
    }
    for &x in multiplicity.keys() {
        let r = single_path_realizable(&spec, x);
        if !r.realizable && x <= max_len {
            fail(Constraint::Realizability, format!("{x}: {}", r.reason));
        }
    }
    if lambda.len() as u64 > paths {
        fail(Constraint::PathCount, format!("|Λ| = {} > 2N+2M = {paths}", lambda.len()));
    }
    let sum: u64 = lambda.iter().sum();
    let sum_cap = paths + 4 * nn * mm;
    if sum > sum_cap {
        fail(Constraint::PathSum, format!("ΣΛ = {sum} > 2N+2M+4NM = {sum_cap}"));
    }
    let min_dim = nn.min(mm);
    for (&x, &count) in &multiplicity {
        if x > max_len {
            continue;
        }
        let bound = multi_path_upper_bound(&spec, x).expect("x >= 1");
        if x % 2 == 0 && count > 4 {
            if min_dim >= 2 * x {
                fail(Constraint::EvenMultiplicity, format!("{count} paths of even length {x} > 4"));
            } else {
                notes.push(format!(
                    "{count} paths of even length {x}: the four-path limit assumes min(N, M) ≥ {}; not applied",
                    2 * x
                ));
            }
        }
        if let Some(f) = bound.floor_component {
            if count > f {
                fail(
                    Constraint::LengthMultiplicity,
                    format!("{count} paths of length {x} > floor(4NM/{}) = {f}", x - 1),
                );
            }
        }
    }
    if lambda.len() as u64 == paths {
        let excess = sum.checked_sub(paths);
        let ok = excess.is_some_and(|e| e % 4 == 0 && e / 4 <= nn * mm);
        if !ok {
            fail(
                Constraint::MeanFormat,
                format!(
                    "mean {sum}/{} = {:.4} is not 1+2k/(N+M) for integer 0 ≤ k ≤ NM",
                    lambda.len(),
                    sum as f64 / lambda.len() as f64
                ),
            );
        }
    }
    let g = lambda.iter().copied().fold(0, gcd);
    if g > 1 {
        notes.push(format!(
            "all lengths share the factor {g}: Λ/{g} with TBU length {g}L and loss α^{g} has the same response, \
             but its realizability must be checked separately"
        ));
    }
    notes.push("passing these checks is necessary, not sufficient".into());
    Ok(FeasibilityReport {
        rows: n,
        cols: m,
        lambda: lambda.to_vec(),
        verdict: if violations.is_empty() {
            Verdict::PassesNecessary
        } else {
            Verdict::FailsNecessary
        },
        violations,
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareSize {
    pub size: u32,
    /// What rules out `size - 1`; empty when `size = 1`.
    pub binding: Vec<Violation>,
}

/// Smallest `x` such that the `x×x` mesh passes.
pub fn minimal_square_size(lambda: &[u64], cap: u32) -> Result<SquareSize, AdvisorError> {
    validate(lambda)?;
    let mut previous: Option<FeasibilityReport> = None;
    for x in 1..=cap {
        let r = check_feasibility(x, x, lambda)?;
        if r.passes() {
            return Ok(SquareSize {
                size: x,
                binding: previous.map(|p| p.violations).unwrap_or_default(),
            });
        }
        previous = Some(r);
    }
    Err(AdvisorError::NoSizeWithinCap { cap })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Frontier {
    /// Pareto-minimal passing sizes, ascending by rows.
    pub minimal: Vec<(u32, u32)>,
    /// Passing sizes with a failing neighbour one row or column larger.
    pub non_monotone: Vec<(u32, u32)>,
}

/// Pareto-minimal `(N, M)` within `nmax × mmax` that pass every check.
pub fn minimal_sizes(lambda: &[u64], nmax: u32, mmax: u32) -> Result<Frontier, AdvisorError> {
    validate(lambda)?;
    let (nmax, mmax) = (nmax.max(1), mmax.max(1));
    let grid: Vec<Vec<bool>> = (1..=nmax)
        .map(|n| {
            (1..=mmax)
                .map(|m| check_feasibility(n, m, lambda).map(|r| r.passes()))
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()?;
    let pass = |n: u32, m: u32| grid[(n - 1) as usize][(m - 1) as usize];
    let mut minimal = Vec::new();
    let mut non_monotone = Vec::new();
    for n in 1..=nmax {
        for m in 1..=mmax {
            if !pass(n, m) {
                continue;
            }
            let dominated = (1..=n).any(|a| (1..=m).any(|b| (a, b) != (n, m) && pass(a, b)));
            if !dominated {
                minimal.push((n, m));
            }
            if (n < nmax && !pass(n + 1, m)) || (m < mmax && !pass(n, m + 1)) {
                non_monotone.push((n, m));
            }
        }
    }
    if minimal.is_empty() {
        return Err(AdvisorError::EmptyFrontier { nmax, mmax });
    }
    Ok(Frontier { minimal, non_monotone })
}
