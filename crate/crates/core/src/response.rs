//! TBU transfer matrix and per-path complex response.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{Configuration, TbuState};
use crate::trace::TracedPath;

/// Vacuum speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Physical parameters shared by the TBUs of a mesh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TbuPhysical {
    /// Amplitude transmission, in `(0, 1]`.
    pub alpha: f64,
    /// Waveguide length, m.
    pub length: f64,
    pub n_eff: f64,
    /// Angular frequency, rad/s.
    pub omega: f64,
}

impl TbuPhysical {
    /// Parameters at vacuum wavelength `wavelength` (m).
    pub fn at_wavelength(alpha: f64, length: f64, n_eff: f64, wavelength: f64) -> Self {
        Self {
            alpha,
            length,
            n_eff,
            omega: omega_from_wavelength(wavelength),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.alpha > 0.0
            && self.alpha <= 1.0
            && self.length > 0.0
            && self.n_eff > 0.0
            && self.omega > 0.0
            && [self.alpha, self.length, self.n_eff, self.omega].iter().all(|v| v.is_finite())
    }

    /// Phase delay of one traversal, `ω·n_eff·L/c`.
    pub fn phase_delay(&self) -> f64 {
        self.omega * self.n_eff * self.length / SPEED_OF_LIGHT
    }

    /// `α·e^{-jωn_eff L/c}`.
    pub fn propagation(&self) -> Complex64 {
        Complex64::from_polar(self.alpha, -self.phase_delay())
    }
}

pub fn omega_from_wavelength(wavelength: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / wavelength
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSettings {
    pub theta: f64,
    pub phi: f64,
}

impl PhaseSettings {
    pub const BAR: PhaseSettings = PhaseSettings { theta: 0.0, phi: PI };
    pub const CROSS: PhaseSettings = PhaseSettings {
        theta: -PI / 2.0,
        phi: -PI / 2.0,
    };

    pub fn for_state(state: TbuState) -> Self {
        match state {
            TbuState::Bar => Self::BAR,
            TbuState::Cross => Self::CROSS,
        }
    }
}

pub type Matrix2 = [[Complex64; 2]; 2];

/// The MZI transfer matrix for phase shifts `(θ, φ)`.
pub fn tbu_transfer(ph: PhaseSettings, phys: &TbuPhysical) -> Matrix2 {
    let j = Complex64::i();
    let et = Complex64::from_polar(1.0, -ph.theta);
    let ep = Complex64::from_polar(1.0, -ph.phi);
    let g = phys.propagation() * 0.5;
    let off = (-j * et - j * ep) * g;
    [[(et - ep) * g, off], [off, (-et + ep) * g]]
}

/// `b·(-1)^q·(α e^{-jωn_eff L/c})^l`.
pub fn path_response(b: Complex64, l: u32, q: u8, phys: &TbuPhysical) -> Complex64 {
    let sign = if q % 2 == 1 { -1.0 } else { 1.0 };
    b * sign * phys.propagation().powu(l)
}

/// Parity of bar-state traversals along `path`. A TBU traversed on both arms
/// counts twice.
pub fn bar_parity(path: &TracedPath, config: &Configuration) -> u8 {
    (path
        .tbus
        .iter()
        .filter(|&&t| config.state(t as usize) == TbuState::Bar)
        .count()
        % 2) as u8
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, MeshSpec};
    use crate::trace::trace;
    use proptest::prelude::*;

    const TOL: f64 = 1e-12;

    fn phys(alpha: f64) -> TbuPhysical {
        TbuPhysical::at_wavelength(alpha, 100e-6, 2.35, 1550e-9)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= TOL
    }

    #[test]
    fn bar_and_cross_reduce_to_diagonal_and_antidiagonal() {
        let p = phys(0.97);
        let g = p.propagation();
        let z = Complex64::new(0.0, 0.0);
        let bar = tbu_transfer(PhaseSettings::BAR, &p);
        assert!(close(bar[0][0], g) && close(bar[1][1], -g) && close(bar[0][1], z) && close(bar[1][0], z));
        let cross = tbu_transfer(PhaseSettings::CROSS, &p);
        assert!(close(cross[0][1], g) && close(cross[1][0], g) && close(cross[0][0], z) && close(cross[1][1], z));
    }

    #[test]
    fn equal_phases_give_pure_coupling() {
        let p = phys(0.9);
        let th = 0.731;
        let f = tbu_transfer(PhaseSettings { theta: th, phi: th }, &p);
        let expect = -Complex64::i() * Complex64::from_polar(1.0, -th) * p.propagation();
        assert!(close(f[0][0], Complex64::new(0.0, 0.0)));
        assert!(close(f[0][1], expect) && close(f[1][0], expect));
    }

    proptest! {
        #[test]
        fn lossless_transfer_is_unitary(theta in -10.0f64..10.0, phi in -10.0f64..10.0) {
            let f = tbu_transfer(PhaseSettings { theta, phi }, &phys(1.0));
            for r in 0..2 {
                for c in 0..2 {
                    let dot = f[r][0] * f[c][0].conj() + f[r][1] * f[c][1].conj();
                    let id = if r == c { 1.0 } else { 0.0 };
                    prop_assert!((dot - Complex64::new(id, 0.0)).norm() <= TOL);
                }
            }
        }

        #[test]
        fn magnitude_and_phase_separate(l in 1u32..40, q in 0u8..2, alpha in 0.5f64..1.0,
                                         len in 1e-6f64..1e-3, n in 1.0f64..4.0) {
            let p = TbuPhysical::at_wavelength(alpha, len, n, 1550e-9);
            let out = path_response(Complex64::new(1.0, 0.0), l, q, &p);
            prop_assert!((out.norm() - alpha.powi(l as i32)).abs() <= TOL);
            let want = -(p.phase_delay() * l as f64 + q as f64 * PI);
            let diff = (out.arg() - want).rem_euclid(2.0 * PI);
            prop_assert!(diff.min(2.0 * PI - diff) <= 1e-6);
            let other = TbuPhysical { alpha: alpha * 0.9, ..p };
            let o2 = path_response(Complex64::new(1.0, 0.0), l, q, &other);
            prop_assert!((o2.arg() - out.arg()).abs() <= 1e-9);
        }
    }

    #[test]
    fn single_lossless_traversal() {
        let p = phys(1.0);
        let b = Complex64::new(0.3, -0.4);
        let out = path_response(b, 1, 0, &p);
        assert!((out.norm() - b.norm()).abs() <= TOL);
        assert!(close(out / b, Complex64::from_polar(1.0, -p.phase_delay())));
    }

    #[test]
    fn seventeen_traversals() {
        let out = path_response(Complex64::new(1.0, 0.0), 17, 0, &phys(0.99));
        assert!((out.norm() - 0.842_943_193_383_926_8).abs() <= TOL);
    }

    #[test]
    fn parity_examples() {
        let g = build_mesh(MeshSpec::square(2, 2).unwrap());
        let all_cross = Configuration::all_cross(&g);
        let t = trace(&g, &all_cross);
        assert!(t.paths.iter().all(|p| bar_parity(p, &all_cross) == 0));
        let prod: f64 = t
            .paths
            .iter()
            .map(|p| path_response(Complex64::new(1.0, 0.0), p.length, 0, &phys(0.99)).norm())
            .product();
        assert!((prod - 0.99f64.powi(24)).abs() <= TOL);

        let all_bar = Configuration::all_bar(&g);
        for p in &trace(&g, &all_bar).paths {
            assert_eq!((p.length, bar_parity(p, &all_bar)), (1, 1));
        }
        let c = Configuration::from_index(&g, 0b1011_0010_0110);
        for p in trace(&g, &c).paths {
            let mut rev = p.clone();
            rev.tbus.reverse();
            assert_eq!(bar_parity(&p, &c), bar_parity(&rev, &c));
        }
    }
}
