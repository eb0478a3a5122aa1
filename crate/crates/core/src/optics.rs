//! Linear optical elements acting on [`PhotonState`]s.
//!
//! The beam splitter follows the two-frame convention: a photon keeps its
//! own frame when transmitted, and a reflected photon has its transverse
//! `y` axis inverted, so its OAM charge flips and its mask is mirrored.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::fockstate::{PhotonState, Polarization, Port, SinglePhotonMode};
use crate::masks::PhaseMask;
use crate::{Error, Result};

/// `T = 1/√2`, `R = i/√2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamSplitterCoefficients {
    pub t: Complex64,
    pub r: Complex64,
}

impl Default for BeamSplitterCoefficients {
    fn default() -> Self {
        Self { t: Complex64::new(FRAC_1_SQRT_2, 0.0), r: Complex64::new(0.0, FRAC_1_SQRT_2) }
    }
}

impl BeamSplitterCoefficients {
    pub fn is_unitary(&self, tol: f64) -> bool {
        let norm = self.t.norm_sqr() + self.r.norm_sqr();
        let cross = self.t * self.r.conj() + self.r * self.t.conj();
        (norm - 1.0).abs() <= tol && cross.norm() <= tol
    }
}

/// Mirror image of a mode: `m → −m`, `Φ(x, y) → Φ(x, −y)`.
pub fn reflect_mode(mode: &SinglePhotonMode) -> SinglePhotonMode {
    SinglePhotonMode { oam: -mode.oam, mask: mode.mask.clone().mirror(), ..mode.clone() }
}

/// One output branch of a port map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Branch {
    pub amplitude: Complex64,
    pub port: Port,
    pub reflect: bool,
}

/// Simultaneous rewrite of port labels: each mode on a mapped port becomes
/// `Σ amplitude · (mode on branch port, reflected if requested)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PortMap {
    branches: BTreeMap<Port, Vec<Branch>>,
}

impl PortMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn route(mut self, from: Port, branches: Vec<Branch>) -> Self {
        self.branches.insert(from, branches);
        self
    }

    pub fn apply(&self, state: &PhotonState) -> Result<PhotonState> {
        state.map_modes(|m| {
            Ok(match self.branches.get(&m.port) {
                None => vec![(Complex64::new(1.0, 0.0), m.clone())],
                Some(bs) => bs
                    .iter()
                    .map(|b| {
                        let moved = if b.reflect { reflect_mode(m) } else { m.clone() };
                        (b.amplitude, SinglePhotonMode { port: b.port, ..moved })
                    })
                    .collect(),
            })
        })
    }
}

/// 50:50 beam splitter: `A → T·D + R·C̄`, `B → T·C + R·D̄` (bar: reflected).
pub fn beam_splitter(input: &PhotonState) -> Result<PhotonState> {
    beam_splitter_with(input, BeamSplitterCoefficients::default())
}

pub fn beam_splitter_with(input: &PhotonState, k: BeamSplitterCoefficients) -> Result<PhotonState> {
    for (_, modes) in input.monomials() {
        if let Some(m) = modes.iter().find(|m| !matches!(m.port, Port::A | Port::B)) {
            return Err(Error::UnsupportedPortLayout(format!(
                "beam splitter input has a photon on port {}",
                m.port
            )));
        }
    }
    let branch = |amplitude, port, reflect| Branch { amplitude, port, reflect };
    PortMap::new()
        .route(Port::A, vec![branch(k.t, Port::D, false), branch(k.r, Port::C, true)])
        .route(Port::B, vec![branch(k.t, Port::C, false), branch(k.r, Port::D, true)])
        .apply(input)
}

fn on_port(
    state: &PhotonState,
    port: Port,
    f: impl Fn(&SinglePhotonMode) -> (Complex64, SinglePhotonMode),
) -> Result<PhotonState> {
    state.map_modes(|m| Ok(vec![if m.port == port { f(m) } else { (Complex64::new(1.0, 0.0), m.clone()) }]))
}

/// Adds `z₀` to the delay of every mode on `port`.
pub fn apply_delay(state: &PhotonState, port: Port, z0: f64) -> Result<PhotonState> {
    if z0 == 0.0 {
        return Ok(state.clone());
    }
    on_port(state, port, |m| (Complex64::new(1.0, 0.0), m.clone().with_delay(m.delay + z0)))
}

/// Dove prism rotated by `φ₀`: `|m⟩ → e^{i2mφ₀}|m⟩` on `port`.
pub fn dove_prism(state: &PhotonState, port: Port, phi0: f64) -> Result<PhotonState> {
    on_port(state, port, |m| (Complex64::from_polar(1.0, 2.0 * f64::from(m.oam) * phi0), m.clone()))
}

/// Adds `mask` to the phase of every mode on `port`.
pub fn apply_mask(state: &PhotonState, port: Port, mask: &PhaseMask) -> Result<PhotonState> {
    on_port(state, port, |m| (Complex64::new(1.0, 0.0), m.clone().with_mask(m.mask.clone().compose(mask.clone()))))
}

/// Polarization-sensitive variant of [`apply_mask`].
pub fn apply_mask_pol(state: &PhotonState, port: Port, pol: Polarization, mask: &PhaseMask) -> Result<PhotonState> {
    state.map_modes(|m| {
        let out = if m.port == port && m.pol == pol {
            m.clone().with_mask(m.mask.clone().compose(mask.clone()))
        } else {
            m.clone()
        };
        Ok(vec![(Complex64::new(1.0, 0.0), out)])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fockstate::{inner_product, SpacePoint};
    use crate::pulses::BesselGaussEnvelope;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn env() -> Arc<BesselGaussEnvelope> {
        Arc::new(BesselGaussEnvelope::reference().normalized().unwrap())
    }

    fn mode(port: Port, oam: i32) -> SinglePhotonMode {
        SinglePhotonMode::new(port, Polarization::H, env(), oam)
    }

    fn product(ma: i32, mb: i32) -> PhotonState {
        let mut s = PhotonState::new(2).unwrap();
        s.add_term(Complex64::new(1.0, 0.0), vec![mode(Port::A, ma), mode(Port::B, mb)]).unwrap();
        s
    }

    #[test]
    fn coefficients_are_unitary() {
        assert!(BeamSplitterCoefficients::default().is_unitary(1e-15));
    }

    #[test]
    fn reflection_is_an_involution() {
        let m = mode(Port::A, 3).with_mask(PhaseMask::sector_b(2, 0.3).unwrap()).with_delay(1e-4);
        let r = reflect_mode(&m);
        assert_eq!(r.oam, -3);
        assert_eq!(reflect_mode(&r), m);
    }

    #[test]
    fn reflected_helical_mask_is_consistent() {
        // the total azimuthal factor of a reflected mode at r equals the
        // original mode's factor at r̄
        let m = mode(Port::A, 2).with_mask(PhaseMask::Helical(1));
        let r = reflect_mode(&m);
        for i in 0..20 {
            let p = SpacePoint::polar(2e-6 + 1e-7 * i as f64, -2.9 + 0.3 * i as f64);
            let a = r.evaluate(&p).unwrap();
            let b = m.evaluate(&p.reflected()).unwrap();
            assert!((a - b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn delay_is_additive() {
        let s = product(1, -1);
        assert_eq!(apply_delay(&s, Port::A, 0.0).unwrap(), s);
        let twice = apply_delay(&apply_delay(&s, Port::A, 1e-4).unwrap(), Port::A, 1e-4).unwrap();
        assert_eq!(twice, apply_delay(&s, Port::A, 2e-4).unwrap());
    }

    #[test]
    fn beam_splitter_preserves_norm() {
        let mut s = product(1, -1);
        s.add_term(Complex64::new(0.2, 0.7), vec![mode(Port::A, 2), mode(Port::B, 0)]).unwrap();
        let s = apply_mask(&s, Port::A, &PhaseMask::SectorA(2)).unwrap();
        let out = beam_splitter(&s).unwrap();
        let a = inner_product(&s, &s).unwrap().re;
        let b = inner_product(&out, &out).unwrap().re;
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn beam_splitter_rejects_output_ports() {
        let mut s = PhotonState::new(1).unwrap();
        s.add_term(Complex64::new(1.0, 0.0), vec![mode(Port::C, 0)]).unwrap();
        assert!(matches!(beam_splitter(&s), Err(Error::UnsupportedPortLayout(_))));
    }

    #[test]
    fn dove_prism_phases() {
        let s = product(0, 0);
        assert_eq!(dove_prism(&s, Port::A, 0.4).unwrap(), s);
        let s = product(2, 0);
        let rotated = dove_prism(&s, Port::A, 0.1).unwrap();
        let c = rotated.terms()[0].coeff;
        assert!((c - Complex64::from_polar(1.0, 0.4)).norm() < 1e-15);
    }

    #[test]
    fn masks_compose_in_any_order() {
        let s = product(1, 1);
        let (m1, m2) = (PhaseMask::Helical(2), PhaseMask::SectorA(3));
        let ab = apply_mask(&apply_mask(&s, Port::A, &m1).unwrap(), Port::A, &m2).unwrap();
        let ba = apply_mask(&apply_mask(&s, Port::A, &m2).unwrap(), Port::A, &m1).unwrap();
        let ma = &ab.modes().iter().find(|m| m.port == Port::A).unwrap().mask;
        let mb = &ba.modes().iter().find(|m| m.port == Port::A).unwrap().mask;
        for i in 0..50 {
            let (x, y) = ((0.3 * i as f64).cos(), (0.3 * i as f64).sin());
            assert_relative_eq!(ma.evaluate(x, y), mb.evaluate(x, y), max_relative = 1e-14);
        }
        assert_eq!(apply_mask(&s, Port::B, &PhaseMask::none()).unwrap(), s);
    }
}
