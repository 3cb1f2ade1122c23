//! Bar/cross state assignments and their enumeration.
//!
//! Bit `i` of a configuration's text form (MSB first) is the state of TBU `i`
//! in the mesh's canonical order: `'0'` = bar, `'1'` = cross. The same string
//! read as a binary number is the configuration's enumeration index.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::mesh::{MeshGraph, MeshSpec};

/// Default ceiling on `#TBU` for exhaustive enumeration.
pub const DEFAULT_ENUMERATION_CAP: u32 = 24;
/// Enumeration indices are `u64`.
pub const MAX_ENUMERABLE_TBUS: u32 = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TbuState {
    Bar,
    Cross,
}

impl TbuState {
    pub fn is_cross(self) -> bool {
        self == TbuState::Cross
    }

    fn bit(self) -> char {
        match self {
            TbuState::Bar => '0',
            TbuState::Cross => '1',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    spec: MeshSpec,
    states: Vec<TbuState>,
}

impl Configuration {
    pub fn uniform(mesh: &MeshGraph, state: TbuState) -> Self {
        Self {
            spec: *mesh.spec(),
            states: vec![state; mesh.tbu_count()],
        }
    }

    pub fn all_bar(mesh: &MeshGraph) -> Self {
        Self::uniform(mesh, TbuState::Bar)
    }

    pub fn all_cross(mesh: &MeshGraph) -> Self {
        Self::uniform(mesh, TbuState::Cross)
    }

    /// All bar except the listed TBU indices.
    pub fn with_cross(mesh: &MeshGraph, cross: impl IntoIterator<Item = usize>) -> Self {
        let mut c = Self::all_bar(mesh);
        for i in cross {
            c.states[i] = TbuState::Cross;
        }
        c
    }

    pub fn from_bits(mesh: &MeshGraph, bits: &str) -> Result<Self, ConfigError> {
        let bits = bits.trim();
        let got = bits.chars().count();
        if got != mesh.tbu_count() {
            return Err(ConfigError::LengthMismatch {
                expected: mesh.tbu_count(),
                got,
            });
        }
        let states = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(TbuState::Bar),
                '1' => Ok(TbuState::Cross),
                other => Err(ConfigError::InvalidBit(other)),
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            spec: *mesh.spec(),
            states,
        })
    }

    pub fn to_bits(&self) -> String {
        self.states.iter().map(|s| s.bit()).collect()
    }

    /// Configuration number `index` in enumeration order.
    pub fn from_index(mesh: &MeshGraph, index: u64) -> Self {
        let n = mesh.tbu_count();
        let mut states = vec![TbuState::Bar; n];
        fill_states(index, &mut states);
        Self {
            spec: *mesh.spec(),
            states,
        }
    }

    pub fn spec(&self) -> &MeshSpec {
        &self.spec
    }

    pub fn states(&self) -> &[TbuState] {
        &self.states
    }

    pub fn state(&self, tbu: usize) -> TbuState {
        self.states[tbu]
    }

    pub fn set(&mut self, tbu: usize, state: TbuState) {
        self.states[tbu] = state;
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Indices of TBUs in cross state, ascending.
    pub fn cross_indices(&self) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_cross())
            .map(|(i, _)| i)
            .collect()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bits())
    }
}

/// Decodes an enumeration index into `states` (MSB = TBU 0).
pub fn fill_states(index: u64, states: &mut [TbuState]) {
    let n = states.len();
    for (i, s) in states.iter_mut().enumerate() {
        *s = if (index >> (n - 1 - i)) & 1 == 1 {
            TbuState::Cross
        } else {
            TbuState::Bar
        };
    }
}

/// Limit applied before an exhaustive sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimit {
    pub cap: u32,
    pub allow_override: bool,
}

impl Default for EnumerationLimit {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ENUMERATION_CAP,
            allow_override: false,
        }
    }
}

impl EnumerationLimit {
    pub fn with_cap(cap: u32) -> Self {
        Self {
            cap,
            allow_override: false,
        }
    }

    /// Lift the cap up to the hard `u64` index limit.
    pub fn unbounded() -> Self {
        Self {
            cap: MAX_ENUMERABLE_TBUS,
            allow_override: true,
        }
    }

    pub fn check(&self, tbus: usize) -> Result<(), ConfigError> {
        let limit = if self.allow_override {
            MAX_ENUMERABLE_TBUS
        } else {
            self.cap.min(MAX_ENUMERABLE_TBUS)
        };
        if tbus as u64 > limit as u64 {
            Err(ConfigError::TooLarge {
                tbus,
                cap: limit,
            })
        } else {
            Ok(())
        }
    }
}

/// A contiguous block of enumeration indices. Splitting yields disjoint
/// blocks whose concatenation is the original order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigRange {
    spec: MeshSpec,
    tbus: usize,
    start: u64,
    end: u64,
}

pub fn enumerate_configurations(
    mesh: &MeshGraph,
    limit: EnumerationLimit,
) -> Result<ConfigRange, ConfigError> {
    limit.check(mesh.tbu_count())?;
    Ok(ConfigRange {
        spec: *mesh.spec(),
        tbus: mesh.tbu_count(),
        start: 0,
        end: 1u64 << mesh.tbu_count(),
    })
}

impl ConfigRange {
    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn end(&self) -> u64 {
        self.end
    }

    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn indices(&self) -> std::ops::Range<u64> {
        self.start..self.end
    }

    /// Split into at most `parts` nonempty disjoint consecutive ranges.
    pub fn split(&self, parts: usize) -> Vec<ConfigRange> {
        let parts = (parts.max(1) as u64).min(self.len().max(1));
        let base = self.len() / parts;
        let extra = self.len() % parts;
        let mut out = Vec::with_capacity(parts as usize);
        let mut at = self.start;
        for p in 0..parts {
            let size = base + u64::from(p < extra);
            out.push(ConfigRange {
                spec: self.spec,
                tbus: self.tbus,
                start: at,
                end: at + size,
            });
            at += size;
        }
        debug_assert_eq!(at, self.end);
        out
    }
}

impl Iterator for ConfigRange {
    type Item = Configuration;

    fn next(&mut self) -> Option<Configuration> {
        if self.start >= self.end {
            return None;
        }
        let mut states = vec![TbuState::Bar; self.tbus];
        fill_states(self.start, &mut states);
        self.start += 1;
        Some(Configuration {
            spec: self.spec,
            states,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.len() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for ConfigRange {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_mesh;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn square(n: u32, m: u32) -> MeshGraph {
        build_mesh(MeshSpec::square(n, m).unwrap())
    }

    #[test]
    fn enumeration_sizes() {
        let g = square(1, 1);
        assert_eq!(enumerate_configurations(&g, Default::default()).unwrap().count(), 16);
        let g = square(2, 3);
        let r = enumerate_configurations(&g, Default::default()).unwrap();
        assert_eq!(r.len(), 131_072);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let g = square(3, 3); // 24 TBUs: allowed
        assert!(enumerate_configurations(&g, Default::default()).is_ok());
        let g = square(3, 4); // 31 TBUs
        assert_eq!(
            enumerate_configurations(&g, Default::default()).unwrap_err(),
            ConfigError::TooLarge { tbus: 31, cap: 24 }
        );
        assert!(enumerate_configurations(&g, EnumerationLimit::unbounded()).is_ok());
    }

    #[test]
    fn split_ranges_concatenate_to_whole() {
        let g = square(2, 2);
        let whole: Vec<_> = enumerate_configurations(&g, Default::default())
            .unwrap()
            .map(|c| c.to_bits())
            .collect();
        let parts = enumerate_configurations(&g, Default::default()).unwrap().split(8);
        assert_eq!(parts.len(), 8);
        let joined: Vec<_> = parts.into_iter().flatten().map(|c| c.to_bits()).collect();
        assert_eq!(whole, joined);
        assert_eq!(whole.iter().collect::<HashSet<_>>().len(), 4096);
    }

    #[test]
    fn bit_lengths_are_checked() {
        let g = square(2, 3);
        assert!(Configuration::from_bits(&g, &"0".repeat(17)).is_ok());
        let g = square(2, 2);
        assert_eq!(
            Configuration::from_bits(&g, &"1".repeat(13)).unwrap_err(),
            ConfigError::LengthMismatch { expected: 12, got: 13 }
        );
        assert_eq!(
            Configuration::from_bits(&g, "01x010101010").unwrap_err(),
            ConfigError::InvalidBit('x')
        );
    }

    #[test]
    fn index_matches_bitstring() {
        let g = square(1, 1);
        assert_eq!(Configuration::from_index(&g, 0b1010).to_bits(), "1010");
        assert_eq!(Configuration::all_cross(&g).to_bits(), "1111");
    }

    proptest! {
        #[test]
        fn bits_round_trip(index in 0u64..(1 << 17)) {
            let g = square(2, 3);
            let c = Configuration::from_index(&g, index);
            let bits = c.to_bits();
            prop_assert_eq!(u64::from_str_radix(&bits, 2).unwrap(), index);
            prop_assert_eq!(Configuration::from_bits(&g, &bits).unwrap(), c);
        }
    }
}
