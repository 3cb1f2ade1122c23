//! Closed-form realizability predicates and bounds. Nothing here builds a
//! graph; everything is exact integer or rational arithmetic on `(N, M)`.

use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::TheoryError;
use crate::mesh::{Family, MeshSpec, SideLabel};
use crate::trace::PathType;

/// The residue/window sets characterizing single-path lengths on a square mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealizabilitySets {
    n: u64,
    m: u64,
}

impl RealizabilitySets {
    pub fn new(n: u32, m: u32) -> Self {
        Self {
            n: n as u64,
            m: m as u64,
        }
    }

    pub fn for_spec(spec: &MeshSpec) -> Self {
        Self::new(spec.rows(), spec.cols())
    }

    pub fn max(&self) -> u64 {
        4 * self.n * self.m + 1
    }

    /// Γ⋆: residues 0, 1, 2 (mod 4) in `[1, 4NM+1]`.
    pub fn in_star(&self, d: u64) -> bool {
        (1..=self.max()).contains(&d) && d % 4 != 3
    }

    fn in_window3(&self, d: u64, side: u64) -> bool {
        d % 4 == 3 && d > 2 * side && d + 2 * side <= self.max()
    }

    /// Γ_M: residue 3 in `[2M+1, 4NM+1-2M]`.
    pub fn in_gamma_m(&self, d: u64) -> bool {
        self.in_window3(d, self.m)
    }

    /// Γ_N: residue 3 in `[2N+1, 4NM+1-2N]`.
    pub fn in_gamma_n(&self, d: u64) -> bool {
        self.in_window3(d, self.n)
    }

    pub fn star_members(&self) -> impl Iterator<Item = u64> + '_ {
        (1..=self.max()).filter(|&d| self.in_star(d))
    }

    pub fn gamma_m_members(&self) -> impl Iterator<Item = u64> + '_ {
        (1..=self.max()).filter(|&d| self.in_gamma_m(d))
    }

    pub fn gamma_n_members(&self) -> impl Iterator<Item = u64> + '_ {
        (1..=self.max()).filter(|&d| self.in_gamma_n(d))
    }

    /// Which set witnesses `d` under the parity case split, if any.
    pub fn witness(&self, d: u64) -> Option<WitnessSet> {
        if self.in_star(d) {
            Some(WitnessSet::Star)
        } else if self.m % 2 == 1 && self.in_gamma_m(d) {
            Some(WitnessSet::GammaM)
        } else if self.n % 2 == 1 && self.in_gamma_n(d) {
            Some(WitnessSet::GammaN)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WitnessSet {
    #[serde(rename = "Γ⋆")]
    Star,
    #[serde(rename = "Γ_M")]
    GammaM,
    #[serde(rename = "Γ_N")]
    GammaN,
    /// Hexagonal/triangular meshes: every length in `[1, max]`.
    #[serde(rename = "Γ")]
    Full,
}

impl WitnessSet {
    pub fn symbol(self) -> &'static str {
        match self {
            WitnessSet::Star => "Γ⋆",
            WitnessSet::GammaM => "Γ_M",
            WitnessSet::GammaN => "Γ_N",
            WitnessSet::Full => "Γ",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Realizability {
    pub x: u64,
    pub realizable: bool,
    pub witness: Option<WitnessSet>,
    pub reason: String,
}

pub fn max_path_length(spec: &MeshSpec) -> u64 {
    spec.family().cell_sides() * spec.cell_count() + 1
}

pub fn single_path_realizable(spec: &MeshSpec, x: u64) -> Realizability {
    let max = max_path_length(spec);
    let no = |reason: String| Realizability {
        x,
        realizable: false,
        witness: None,
        reason,
    };
    if x == 0 || x > max {
        let bound = match spec.family() {
            Family::Square => "4NM+1",
            Family::HexParallelogram => "6NM+1",
            Family::TriParallelogram => "3NM+1",
        };
        return no(format!("x outside [1, {bound}] = [1, {max}]"));
    }
    if spec.family() != Family::Square {
        return Realizability {
            x,
            realizable: true,
            witness: Some(WitnessSet::Full),
            reason: format!("1 ≤ x ≤ {max}"),
        };
    }
    let sets = RealizabilitySets::for_spec(spec);
    if let Some(w) = sets.witness(x) {
        return Realizability {
            x,
            realizable: true,
            witness: Some(w),
            reason: format!("x∈{}", w.symbol()),
        };
    }
    let reason = match (spec.rows() % 2 == 1, spec.cols() % 2 == 1) {
        (false, false) => "x≡3 mod 4 and N, M both even".to_string(),
        (false, true) => "x≡3 mod 4 and x∉Γ_M".to_string(),
        (true, false) => "x≡3 mod 4 and x∉Γ_N".to_string(),
        (true, true) => "x≡3 mod 4 and x∉Γ_N∪Γ_M".to_string(),
    };
    no(reason)
}

/// Every realizable single-path length.
pub fn realizable_lengths(spec: &MeshSpec) -> BTreeSet<u64> {
    (1..=max_path_length(spec))
        .filter(|&x| single_path_realizable(spec, x).realizable)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeConstraint {
    /// Allowed residues mod 4.
    pub residues: Vec<u64>,
    pub min: u64,
    pub max: u64,
}

impl TypeConstraint {
    pub fn admits(&self, l: u64) -> bool {
        self.residues.contains(&(l % 4)) && (self.min..=self.max).contains(&l)
    }
}

/// Residue and length window of a square-mesh path of type `kind` starting on
/// `start_side`.
pub fn type_constraints(
    kind: PathType,
    start_side: SideLabel,
    spec: &MeshSpec,
) -> Result<TypeConstraint, TheoryError> {
    if spec.family() != Family::Square || matches!(start_side, SideLabel::Boundary(_)) {
        return Err(TheoryError::UnsupportedFamily(spec.family()));
    }
    let (n, m) = (spec.rows() as u64, spec.cols() as u64);
    let full = 4 * n * m;
    Ok(match kind {
        PathType::S => TypeConstraint {
            residues: vec![1],
            min: 1,
            max: full + 1,
        },
        PathType::A => TypeConstraint {
            residues: vec![0, 2],
            min: 2,
            max: full,
        },
        PathType::O => {
            // Left/right starts cross M columns; top/bottom starts cross N rows.
            let span = if start_side.is_horizontal_boundary() { n } else { m };
            TypeConstraint {
                residues: vec![if span % 2 == 1 { 3 } else { 1 }],
                min: 2 * span + 1,
                max: full - 2 * span + 1,
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundComponent {
    Floor,
    Count,
    C1,
    C2,
}

/// Upper bound on how many paths of one length a configuration can carry.
/// `None` components are +∞ (inactive).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiPathBound {
    pub x: u64,
    /// `⌊cells·sides/(x-1)⌋`; inactive at `x = 1`.
    pub floor_component: Option<u64>,
    /// Total path count.
    pub count_component: u64,
    /// 4 for even `x` (square only).
    pub c1: Option<u64>,
    /// 0 when `x ≡ 3 (mod 4)` is not single-path realizable (square only).
    pub c2: Option<u64>,
    pub y_max: u64,
    pub binding: BoundComponent,
    /// The C1 argument assumes `min(N, M) ≥ 2x`; when false the C1 value is
    /// still an upper bound but may not be tight.
    pub c1_assumption_holds: bool,
}

impl MultiPathBound {
    /// True when the bound is zero because a single path of length `x`
    /// cannot be realized at all.
    pub fn infeasible_by_realizability(&self) -> bool {
        self.binding == BoundComponent::C2
    }
}

pub fn multi_path_upper_bound(spec: &MeshSpec, x: u64) -> Result<MultiPathBound, TheoryError> {
    if x == 0 {
        return Err(TheoryError::InvalidLength);
    }
    let edges = spec.family().cell_sides() * spec.cell_count();
    let floor_component = (x > 1).then(|| edges / (x - 1));
    let count_component = spec.path_count();
    let square = spec.family() == Family::Square;
    let c1 = (square && x.is_multiple_of(2)).then_some(4);
    let c2 = (square && x % 4 == 3 && !single_path_realizable(spec, x).realizable).then_some(0);

    let mut binding = BoundComponent::Count;
    let mut y_max = count_component;
    for (comp, value) in [
        (BoundComponent::Floor, floor_component),
        (BoundComponent::C1, c1),
        (BoundComponent::C2, c2),
    ] {
        if let Some(v) = value {
            if v < y_max || (comp == BoundComponent::C2 && v <= y_max) {
                y_max = v;
                binding = comp;
            }
        }
    }
    let min_dim = spec.rows().min(spec.cols()) as u64;
    Ok(MultiPathBound {
        x,
        floor_component,
        count_component,
        c1,
        c2,
        y_max,
        binding,
        c1_assumption_holds: min_dim >= 2 * x,
    })
}

/// Path sums are exactly `{base + step·k : 0 ≤ k ≤ kmax}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SumSpectrum {
    pub base: u64,
    pub step: u64,
    pub kmax: u64,
}

impl SumSpectrum {
    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        (0..=self.kmax).map(|k| self.base + self.step * k)
    }

    pub fn contains(&self, sum: u64) -> bool {
        sum >= self.base && (sum - self.base).is_multiple_of(self.step) && (sum - self.base) / self.step <= self.kmax
    }
}

pub fn path_sum_spectrum(spec: &MeshSpec) -> SumSpectrum {
    SumSpectrum {
        base: spec.path_count(),
        step: spec.family().cell_sides(),
        kmax: spec.cell_count(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatsBounds {
    pub mean: Ratio<i64>,
    pub max_len: u64,
    pub var_bound: Ratio<i64>,
}

/// Mean, maximum length and variance bound when `k0` cells are consumed.
pub fn stats_bounds(spec: &MeshSpec, k0: u64) -> Result<StatsBounds, TheoryError> {
    let kmax = spec.cell_count();
    if k0 > kmax {
        return Err(TheoryError::OutOfRange { k0, max: kmax });
    }
    let step = spec.family().cell_sides() as i64;
    let paths = spec.path_count() as i64;
    let k = k0 as i64;
    let mean = Ratio::from_integer(1) + Ratio::new(step * k, paths);
    let max_len = (step * k + 1) as u64;
    // Range [1, max_len] with mean μ: σ² ≤ (μ - 1)(max_len - μ).
    let var_bound = (mean - 1) * (Ratio::from_integer(max_len as i64) - mean);
    Ok(StatsBounds {
        mean,
        max_len,
        var_bound,
    })
}
