//! Simulated port measurements and the inverse estimators for loss and length.
//!
//! A measurement is the complex ratio `r = out/in` of one undirected path.
//! With `S` the path-length sum, `Σ log|r| = S·log α` and
//! `Σ arg r ≡ -S·ω·n_eff·L/c (mod 2π)`, so loss is recovered exactly while
//! length is recovered only up to multiples of `2πc/(S·ω·n_eff)`.

use std::f64::consts::PI;
use std::io::Read;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::config::{Configuration, TbuState};
use crate::error::CharacterizationError;
use crate::mesh::{MeshGraph, Point, TbuId};
use crate::response::{bar_parity, SPEED_OF_LIGHT};
use crate::trace::{sum_format, trace};

type Result<T> = std::result::Result<T, CharacterizationError>;

/// Carrier frequency and mode index, shared by every TBU.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Optics {
    pub n_eff: f64,
    /// rad/s.
    pub omega: f64,
}

impl Optics {
    pub fn at_wavelength(n_eff: f64, wavelength: f64) -> Self {
        Self {
            n_eff,
            omega: crate::response::omega_from_wavelength(wavelength),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_eff > 0.0 && self.omega > 0.0 && self.n_eff.is_finite() && self.omega.is_finite() {
            Ok(())
        } else {
            Err(CharacterizationError::InvalidParameter(format!(
                "n_eff = {}, omega = {}",
                self.n_eff, self.omega
            )))
        }
    }
}

/// Per-TBU loss and length, indexed in canonical TBU order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessVariation {
    pub alpha: Vec<f64>,
    pub length: Vec<f64>,
    /// Standard deviation of the complex multiplicative measurement noise.
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub seed: u64,
}

impl ProcessVariation {
    pub fn uniform(mesh: &MeshGraph, alpha: f64, length: f64) -> Self {
        Self {
            alpha: vec![alpha; mesh.tbu_count()],
            length: vec![length; mesh.tbu_count()],
            noise: 0.0,
            seed: 0,
        }
    }

    /// Independent uniform draws of α and L per TBU.
    pub fn random(
        mesh: &MeshGraph,
        alpha: (f64, f64),
        length: (f64, f64),
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = mesh.tbu_count();
        let alpha = (0..n).map(|_| rng.random_range(alpha.0..=alpha.1)).collect();
        let length = (0..n).map(|_| rng.random_range(length.0..=length.1)).collect();
        Self {
            alpha,
            length,
            noise: 0.0,
            seed,
        }
    }

    pub fn with_noise(mut self, level: f64, seed: u64) -> Self {
        self.noise = level;
        self.seed = seed;
        self
    }

    pub fn validate(&self, mesh: &MeshGraph) -> Result<()> {
        let expected = mesh.tbu_count();
        for got in [self.alpha.len(), self.length.len()] {
            if got != expected {
                return Err(CharacterizationError::VariationSize { expected, got });
            }
        }
        if let Some(a) = self.alpha.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
            return Err(CharacterizationError::InvalidParameter(format!("alpha {a} outside (0, 1]")));
        }
        if let Some(l) = self.length.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(CharacterizationError::InvalidParameter(format!("length {l} must be positive")));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(CharacterizationError::InvalidParameter(format!("noise {}", self.noise)));
        }
        Ok(())
    }
}

/// One measured path: endpoints, length and `r = out/in`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub start: u32,
    pub end: u32,
    pub length: u32,
    pub re: f64,
    pub im: f64,
    /// Bar-traversal parity, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u8>,
}

impl Measurement {
    pub fn r(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MeasurementSet {
    pub measurements: Vec<Measurement>,
}

impl MeasurementSet {
    pub fn len(&self) -> usize {
        self.measurements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty()
    }

    pub fn length_sum(&self) -> u64 {
        self.measurements.iter().map(|m| m.length as u64).sum()
    }

    /// Reads a CSV file with header `start,end,length,re,im[,q]`.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let measurements = rdr
            .deserialize()
            .collect::<std::result::Result<Vec<Measurement>, _>>()
            .map_err(|e| CharacterizationError::Import(e.to_string()))?;
        Ok(Self { measurements })
    }

    /// Reads a JSON array of measurement objects.
    pub fn from_json(reader: impl Read) -> Result<Self> {
        serde_json::from_reader(reader).map_err(|e| CharacterizationError::Import(e.to_string()))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for m in &self.measurements {
            w.serialize(m).expect("in-memory CSV");
        }
        String::from_utf8(w.into_inner().expect("in-memory CSV")).expect("CSV is UTF-8")
    }
}

/// Number of times each TBU is traversed by the paths of `config`.
pub fn traversal_counts(mesh: &MeshGraph, config: &Configuration) -> Vec<u32> {
    let mut w = vec![0; mesh.tbu_count()];
    for p in trace(mesh, config).paths {
        for t in p.tbus {
            w[t as usize] += 1;
        }
    }
    w
}

/// `exp(Σ wᵢ log vᵢ / Σ wᵢ)`.
pub fn weighted_geometric_mean(values: &[f64], weights: &[u32]) -> f64 {
    let total: f64 = weights.iter().map(|&w| w as f64).sum();
    let s: f64 = values.iter().zip(weights).map(|(v, &w)| w as f64 * v.ln()).sum();
    (s / total).exp()
}

pub fn weighted_arithmetic_mean(values: &[f64], weights: &[u32]) -> f64 {
    let total: f64 = weights.iter().map(|&w| w as f64).sum();
    values.iter().zip(weights).map(|(v, &w)| w as f64 * v).sum::<f64>() / total
}

/// Forward model: `rᵢ = (-1)^qᵢ · Π_t α_t e^{-jω n_eff L_t / c}` over the
/// TBUs traversed by path `i`, times optional noise `(1 + ε)`.
pub fn simulate_measurements(
    mesh: &MeshGraph,
    config: &Configuration,
    variation: &ProcessVariation,
    optics: Optics,
) -> Result<MeasurementSet> {
    variation.validate(mesh)?;
    optics.validate()?;
    Ok(forward(mesh, config, variation, optics))
}

fn forward(
    mesh: &MeshGraph,
    config: &Configuration,
    variation: &ProcessVariation,
    optics: Optics,
) -> MeasurementSet {
    let k = optics.omega * optics.n_eff / SPEED_OF_LIGHT;
    let mut rng = ChaCha8Rng::seed_from_u64(variation.seed);
    let noise = (variation.noise > 0.0)
        .then(|| Normal::new(0.0, variation.noise).expect("validated noise level"));
    let measurements = trace(mesh, config)
        .paths
        .iter()
        .map(|p| {
            let q = bar_parity(p, config);
            let mut r = Complex64::new(if q == 1 { -1.0 } else { 1.0 }, 0.0);
            for &t in &p.tbus {
                let t = t as usize;
                r *= Complex64::from_polar(variation.alpha[t], -k * variation.length[t]);
            }
            if let Some(n) = &noise {
                r *= Complex64::new(1.0 + n.sample(&mut rng), n.sample(&mut rng));
            }
            Measurement {
                start: p.start.0,
                end: p.end.0,
                length: p.length,
                re: r.re,
                im: r.im,
                q: Some(q),
            }
        })
        .collect();
    MeasurementSet { measurements }
}

/// Denominator `base + step·k0`, checked against the measured lengths.
fn checked_denominator(ms: &MeasurementSet, mesh: &MeshGraph, k0: u64) -> Result<u64> {
    if ms.is_empty() {
        return Err(CharacterizationError::EmptyMeasurements);
    }
    let expected_paths = mesh.spec().path_count() as usize;
    if ms.len() != expected_paths {
        return Err(CharacterizationError::MeasurementCount {
            expected: expected_paths,
            got: ms.len(),
        });
    }
    let (base, step) = sum_format(mesh.spec());
    let expected = base + step * k0;
    let measured = ms.length_sum();
    if measured != expected {
        return Err(CharacterizationError::InconsistentK { k0, measured, expected });
    }
    Ok(expected)
}

/// `α̂ = exp(Σ log|rᵢ| / (base + step·k0))`.
pub fn estimate_alpha(ms: &MeasurementSet, mesh: &MeshGraph, k0: u64) -> Result<f64> {
    let s = checked_denominator(ms, mesh, k0)?;
    let logs: f64 = ms.measurements.iter().map(|m| m.r().norm().ln()).sum();
    Ok((logs / s as f64).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthEstimate {
    /// Every `L̂(d)` inside the window, ascending.
    pub candidates: Vec<f64>,
    /// Spacing between consecutive candidates, `2πc/(S·ω·n_eff)`.
    pub period: f64,
    /// Path-length sum used as denominator.
    pub denominator: u64,
}

/// `L̂(d) = (-Σ arg rᵢ + 2dπ)·c/(S·ω·n_eff)` for every integer `d` placing
/// `L̂` in `[window.0, window.1]`. Known bar parities are removed first.
pub fn estimate_length(
    ms: &MeasurementSet,
    mesh: &MeshGraph,
    optics: Optics,
    k0: u64,
    window: (f64, f64),
) -> Result<LengthEstimate> {
    optics.validate()?;
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(CharacterizationError::InvalidParameter(format!("window [{lo}, {hi}]")));
    }
    let s = checked_denominator(ms, mesh, k0)?;
    let phase: f64 = ms
        .measurements
        .iter()
        .map(|m| m.r().arg() - m.q.unwrap_or(0) as f64 * PI)
        .sum();
    let scale = SPEED_OF_LIGHT / (s as f64 * optics.omega * optics.n_eff);
    let l0 = -phase * scale;
    let period = 2.0 * PI * scale;
    let d_lo = ((lo - l0) / period).ceil() as i64;
    let d_hi = ((hi - l0) / period).floor() as i64;
    let candidates: Vec<f64> = (d_lo..=d_hi)
        .map(|d| l0 + d as f64 * period)
        .filter(|l| (lo..=hi).contains(l))
        .collect();
    if candidates.is_empty() {
        return Err(CharacterizationError::NoCandidateInWindow { min: lo, max: hi });
    }
    Ok(LengthEstimate {
        candidates,
        period,
        denominator: s,
    })
}

/// Two loss maps that no port measurement can tell apart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaAmbiguity {
    pub config: String,
    pub factor: f64,
    /// TBUs scaled by `factor` and by `1/factor`.
    pub scaled_up: Vec<TbuId>,
    pub scaled_down: Vec<TbuId>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    /// Largest `|r₁ - r₂|` over all paths.
    pub max_deviation: f64,
}

/// TBUs around one lattice vertex, alternately scaled up and down. Every
/// path through the vertex uses two angularly adjacent TBUs there, so
/// products along paths are unchanged.
fn vertex_gauge(mesh: &MeshGraph) -> Option<(Vec<usize>, Vec<usize>)> {
    let mut vertices: Vec<Point> = mesh
        .tbus()
        .iter()
        .filter(|t| !t.peripheral)
        .flat_map(|t| t.ends)
        .collect();
    vertices.sort();
    vertices.dedup();
    for v in vertices {
        let incident: Vec<usize> = (0..mesh.tbu_count())
            .filter(|&i| mesh.tbu(i).ends.contains(&v))
            .collect();
        if incident.len() < 4 || incident.len() % 2 == 1 || incident.iter().any(|&i| mesh.tbu(i).peripheral) {
            continue;
        }
        let (vx, vy) = mesh.point_position(v);
        let mut by_angle: Vec<(f64, usize)> = incident
            .iter()
            .map(|&i| {
                let t = mesh.tbu(i);
                let other = if t.ends[0] == v { t.ends[1] } else { t.ends[0] };
                let (x, y) = mesh.point_position(other);
                ((y - vy).atan2(x - vx), i)
            })
            .collect();
        by_angle.sort_by(|a, b| a.0.total_cmp(&b.0));
        let up = by_angle.iter().step_by(2).map(|&(_, i)| i).collect();
        let down = by_angle.iter().skip(1).step_by(2).map(|&(_, i)| i).collect();
        return Some((up, down));
    }
    None
}

/// Two TBUs every all-cross path traverses equally often.
fn balanced_pair(mesh: &MeshGraph, config: &Configuration) -> Option<(Vec<usize>, Vec<usize>)> {
    let t = trace(mesh, config);
    let interior: Vec<usize> = (0..mesh.tbu_count()).filter(|&i| !mesh.tbu(i).peripheral).collect();
    let profile = |tbu: usize| -> Vec<usize> {
        t.paths
            .iter()
            .map(|p| p.tbus.iter().filter(|&&x| x as usize == tbu).count())
            .collect()
    };
    for (a_pos, &a) in interior.iter().enumerate() {
        let pa = profile(a);
        for &b in &interior[a_pos + 1..] {
            if profile(b) == pa {
                return Some((vec![a], vec![b]));
            }
        }
    }
    None
}

/// Loss maps `{α}` and `{b·α}` on some TBUs, `{α/b}` on others, that give
/// identical measurements on the all-cross configuration.
pub fn demonstrate_alpha_ambiguity(
    mesh: &MeshGraph,
    base: &ProcessVariation,
    factor: f64,
    optics: Optics,
) -> Result<AlphaAmbiguity> {
    base.validate(mesh)?;
    optics.validate()?;
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(CharacterizationError::InvalidParameter(format!("factor {factor}")));
    }
    if mesh.tbus().iter().all(|t| t.peripheral) {
        return Err(CharacterizationError::NoInteriorTbu);
    }
    let config = Configuration::uniform(mesh, TbuState::Cross);
    let (up, down) = vertex_gauge(mesh)
        .or_else(|| balanced_pair(mesh, &config))
        .ok_or(CharacterizationError::NoGaugeFound)?;
    let mut second = base.clone();
    for &i in &up {
        second.alpha[i] *= factor;
    }
    for &i in &down {
        second.alpha[i] /= factor;
    }
    // Scaled values may leave (0, 1]; the forward model does not need the bound.
    let a = forward(mesh, &config, base, optics);
    let b = forward(mesh, &config, &second, optics);
    let max_deviation = a
        .measurements
        .iter()
        .zip(&b.measurements)
        .map(|(x, y)| (x.r() - y.r()).norm())
        .fold(0.0, f64::max);
    let ids = |v: &[usize]| v.iter().map(|&i| mesh.tbu(i).id).collect();
    Ok(AlphaAmbiguity {
        config: config.to_bits(),
        factor,
        scaled_up: ids(&up),
        scaled_down: ids(&down),
        first: base.alpha.clone(),
        second: second.alpha,
        max_deviation,
    })
}
