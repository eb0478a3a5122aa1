//! Exchange-reflection symmetry of two-photon wave-packet functions.
//!
//! A pair amplitude `ξ_{λλ'}(r, r')` (photon on A at `r` with polarization
//! `λ`, photon on B at `r'` with `λ'`) has index `s` when
//! `ξ_{λλ'}(r, r') = s ξ_{λ'λ}(r̄', r̄)` with `r̄ = (x, −y)`. An index of `+1`
//! gives a coincidence dip at zero delay and `−1` gives a peak.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fockstate::{PhotonState, Polarization, Port, SinglePhotonMode, SpacePoint};
use crate::pulses::BesselGaussEnvelope;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryIndex {
    Plus,
    Minus,
    None,
}

impl SymmetryIndex {
    pub fn sign(self) -> Option<i32> {
        match self {
            Self::Plus => Some(1),
            Self::Minus => Some(-1),
            Self::None => None,
        }
    }
}

impl fmt::Display for SymmetryIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plus => "+1",
            Self::Minus => "-1",
            Self::None => "none",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prediction {
    Dip,
    Peak,
    None,
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dip => "dip",
            Self::Peak => "peak",
            Self::None => "none",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub s: SymmetryIndex,
    /// `‖ξ − Sξ‖ / ‖ξ‖`.
    pub residual_plus: f64,
    /// `‖ξ + Sξ‖ / ‖ξ‖`.
    pub residual_minus: f64,
    pub prediction: Prediction,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyOptions {
    /// Samples per transverse axis for each photon.
    pub samples: usize,
    /// Half-width of the square sampling window (m); defaults to four
    /// main-lobe radii of the widest envelope.
    pub half_width: Option<f64>,
    pub accept: f64,
    pub reject: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { samples: 12, half_width: None, accept: 1e-6, reject: 1e-3 }
    }
}

pub fn predict_hom(report: &SymmetryReport) -> Prediction {
    match report.s {
        SymmetryIndex::Plus => Prediction::Dip,
        SymmetryIndex::Minus => Prediction::Peak,
        SymmetryIndex::None => Prediction::None,
    }
}

pub fn classify(state: &PhotonState, opts: &ClassifyOptions) -> Result<SymmetryReport> {
    if state.n() != 2 {
        return Err(Error::UnsupportedPhotonNumber(state.n()));
    }
    if opts.samples < 8 {
        return Err(Error::GridTooSmall(opts.samples));
    }
    // (coeff, A-mode index, B-mode index)
    let mut terms = Vec::with_capacity(state.terms().len());
    for t in state.terms() {
        let (i, j) = (t.modes[0], t.modes[1]);
        match (state.modes()[i].port, state.modes()[j].port) {
            (Port::A, Port::B) => terms.push((t.coeff, i, j)),
            (Port::B, Port::A) => terms.push((t.coeff, j, i)),
            (p, q) => {
                return Err(Error::UnsupportedPortLayout(format!(
                    "expected one photon on A and one on B, got {p}{q}"
                )))
            }
        }
    }
    if terms.is_empty() {
        return Err(Error::NullState("state has no terms".into()));
    }

    let half = match opts.half_width {
        Some(h) => h,
        None => 4.0 * state.modes().iter().map(|m| m.envelope.main_lobe_radius()).fold(0.0, f64::max),
    };
    let n = opts.samples;
    let step = 2.0 * half / n as f64;
    let points: Vec<SpacePoint> = (0..n * n)
        .map(|k| {
            let (row, col) = (k / n, k % n);
            SpacePoint::transverse(-half + (col as f64 + 0.5) * step, half - (row as f64 + 0.5) * step)
        })
        .collect();

    let mut direct = Vec::with_capacity(state.modes().len());
    let mut mirrored = Vec::with_capacity(state.modes().len());
    for mode in state.modes() {
        direct.push(points.iter().map(|p| mode.evaluate(p)).collect::<Result<Vec<_>>>()?);
        mirrored.push(points.iter().map(|p| mode.evaluate(&p.reflected())).collect::<Result<Vec<_>>>()?);
    }

    let pols = [Polarization::H, Polarization::V];
    let pol = |i: usize| state.modes()[i].pol;
    let (mut norm, mut plus, mut minus) = (0.0, 0.0, 0.0);
    for &l1 in &pols {
        for &l2 in &pols {
            for i in 0..points.len() {
                for j in 0..points.len() {
                    let mut xi = Complex64::new(0.0, 0.0);
                    let mut swapped = Complex64::new(0.0, 0.0);
                    for &(c, a, b) in &terms {
                        if pol(a) == l1 && pol(b) == l2 {
                            xi += c * direct[a][i] * direct[b][j];
                        }
                        if pol(a) == l2 && pol(b) == l1 {
                            swapped += c * mirrored[a][j] * mirrored[b][i];
                        }
                    }
                    norm += xi.norm_sqr();
                    plus += (xi - swapped).norm_sqr();
                    minus += (xi + swapped).norm_sqr();
                }
            }
        }
    }
    if !(norm > 0.0) {
        return Err(Error::NullState("pair amplitude vanishes on the sampling grid".into()));
    }
    let residual_plus = (plus / norm).sqrt();
    let residual_minus = (minus / norm).sqrt();
    let s = if residual_plus <= opts.accept && residual_minus > opts.reject {
        SymmetryIndex::Plus
    } else if residual_minus <= opts.accept && residual_plus > opts.reject {
        SymmetryIndex::Minus
    } else {
        SymmetryIndex::None
    };
    let mut report = SymmetryReport { s, residual_plus, residual_minus, prediction: Prediction::None };
    report.prediction = predict_hom(&report);
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolarizationBell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OamBell {
    MuPlus,
    MuMinus,
    NuPlus,
    NuMinus,
}

impl PolarizationBell {
    pub const ALL: [Self; 4] = [Self::PhiPlus, Self::PhiMinus, Self::PsiPlus, Self::PsiMinus];

    pub fn symbol(self) -> &'static str {
        match self {
            Self::PhiPlus => "φ+",
            Self::PhiMinus => "φ-",
            Self::PsiPlus => "ψ+",
            Self::PsiMinus => "ψ-",
        }
    }

    /// Terms `(sign, photon 1, photon 2)`.
    fn terms(self) -> [(f64, Polarization, Polarization); 2] {
        use Polarization::{H, V};
        match self {
            Self::PhiPlus => [(1.0, H, H), (1.0, V, V)],
            Self::PhiMinus => [(1.0, H, H), (-1.0, V, V)],
            Self::PsiPlus => [(1.0, H, V), (1.0, V, H)],
            Self::PsiMinus => [(1.0, H, V), (-1.0, V, H)],
        }
    }
}

impl OamBell {
    pub const ALL: [Self; 4] = [Self::MuPlus, Self::MuMinus, Self::NuPlus, Self::NuMinus];

    pub fn symbol(self) -> &'static str {
        match self {
            Self::MuPlus => "μ+",
            Self::MuMinus => "μ-",
            Self::NuPlus => "ν+",
            Self::NuMinus => "ν-",
        }
    }

    fn terms(self, m: i32) -> [(f64, i32, i32); 2] {
        match self {
            Self::MuPlus => [(1.0, m, -m), (1.0, -m, m)],
            Self::MuMinus => [(1.0, m, -m), (-1.0, -m, m)],
            Self::NuPlus => [(1.0, m, m), (1.0, -m, -m)],
            Self::NuMinus => [(1.0, m, m), (-1.0, -m, -m)],
        }
    }
}

#[derive(Clone, Debug)]
pub struct HyperBellState {
    pub pol: PolarizationBell,
    pub oam: OamBell,
    pub state: PhotonState,
    /// Index and outcome as tabulated in the reference catalog.
    pub tabulated_s: SymmetryIndex,
    pub tabulated_outcome: Prediction,
}

impl HyperBellState {
    pub fn label(&self) -> String {
        format!("{}⊗{}", self.pol.symbol(), self.oam.symbol())
    }
}

fn tabulated(pol: PolarizationBell, oam: OamBell) -> (SymmetryIndex, Prediction) {
    use OamBell::*;
    use PolarizationBell::*;
    match (pol, oam) {
        (PhiPlus | PhiMinus, NuMinus) => (SymmetryIndex::Minus, Prediction::Peak),
        (PhiPlus | PhiMinus, _) => (SymmetryIndex::Plus, Prediction::Dip),
        (PsiPlus, NuMinus) => (SymmetryIndex::Plus, Prediction::Peak),
        (PsiPlus, _) => (SymmetryIndex::Plus, Prediction::Dip),
        (PsiMinus, NuMinus) => (SymmetryIndex::Plus, Prediction::Dip),
        (PsiMinus, _) => (SymmetryIndex::Minus, Prediction::Peak),
    }
}

/// The sixteen polarization ⊗ OAM Bell products, photon 1 on A and photon 2 on B.
pub fn bell_catalog(envelope: Arc<BesselGaussEnvelope>, m: i32) -> Result<Vec<HyperBellState>> {
    envelope.require_normalized()?;
    let mut out = Vec::with_capacity(16);
    for pol in PolarizationBell::ALL {
        for oam in OamBell::ALL {
            let mut state = PhotonState::new(2)?;
            for (sp, p1, p2) in pol.terms() {
                for (so, m1, m2) in oam.terms(m) {
                    state.add_term(
                        Complex64::new(0.5 * sp * so, 0.0),
                        vec![
                            SinglePhotonMode::new(Port::A, p1, envelope.clone(), m1),
                            SinglePhotonMode::new(Port::B, p2, envelope.clone(), m2),
                        ],
                    )?;
                }
            }
            let (tabulated_s, tabulated_outcome) = tabulated(pol, oam);
            out.push(HyperBellState { pol, oam, state, tabulated_s, tabulated_outcome });
        }
    }
    Ok(out)
}
