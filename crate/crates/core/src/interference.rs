//! Two-photon coincidence probabilities behind a 50:50 beam splitter.
//!
//! [`coincidence_with`] has two independent routes. The separable route
//! sends the input through [`beam_splitter`] and projects the output on the
//! one-photon-per-port subspace using exact mode overlaps. The quadrature
//! route evaluates `P = ½ − ½ Re Σ c_t* c_u ⟨a_t|R b_u⟩⟨b_t|R a_u⟩ / ⟨ψ|ψ⟩`
//! directly on the input pair with brute-force transverse integrals; it is
//! used for radius-dependent masks and on request.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::{self, Exec};
use crate::fockstate::{
    inner_product, mode_overlap_with, reflected_overlap_quadrature, OverlapMethod, PhotonState, Polarization, Port,
    QuadratureSpec, SinglePhotonMode,
};
use crate::masks::PhaseMask;
use crate::optics::{apply_delay, apply_mask, beam_splitter, dove_prism};
use crate::pulses::BesselGaussEnvelope;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// `|m⟩_A |−m⟩_B`.
    ProductOppositeOam,
    /// `|m⟩_A |m⟩_B`.
    ProductSameOam,
    /// `|m, m⟩ + |−m, −m⟩`.
    EntangledSymSameOam,
    /// `|m, m⟩ − |−m, −m⟩`.
    EntangledAntisymSameOam,
    /// `|m, −m⟩ + |−m, m⟩`.
    EntangledOppositeOamPlus,
    /// `|m, −m⟩ − |−m, m⟩`.
    EntangledOppositeOamMinus,
    /// `cos θ |H, V⟩ + sin θ |V, H⟩` on an `|m⟩|−m⟩` spatial pair.
    Polarization,
    /// `m = 0` product pair with sector masks on both inputs.
    SectorMasked,
    /// Symmetric same-OAM pair with a Dove prism rotated by `φ₀` on path A.
    DovePrism,
    /// `m = 0` product pair with arbitrary masks.
    ImageMasked,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 10] = [
        Self::ProductOppositeOam,
        Self::ProductSameOam,
        Self::EntangledSymSameOam,
        Self::EntangledAntisymSameOam,
        Self::EntangledOppositeOamPlus,
        Self::EntangledOppositeOamMinus,
        Self::Polarization,
        Self::SectorMasked,
        Self::DovePrism,
        Self::ImageMasked,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::ProductOppositeOam => "product-opposite-oam",
            Self::ProductSameOam => "product-same-oam",
            Self::EntangledSymSameOam => "entangled-sym-same-oam",
            Self::EntangledAntisymSameOam => "entangled-antisym-same-oam",
            Self::EntangledOppositeOamPlus => "entangled-opposite-oam-plus",
            Self::EntangledOppositeOamMinus => "entangled-opposite-oam-minus",
            Self::Polarization => "polarization",
            Self::SectorMasked => "sector-masked",
            Self::DovePrism => "dove-prism",
            Self::ImageMasked => "image-masked",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let alias = match s {
            "polarization-entangled" => "polarization",
            other => other,
        };
        Self::ALL
            .into_iter()
            .find(|k| k.name() == alias)
            .ok_or_else(|| Error::OutOfRange(format!("unknown scenario `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    /// OAM charge, or the sector count for [`ScenarioKind::SectorMasked`].
    pub m: i32,
    /// Polarization mixing angle (rad).
    pub theta: f64,
    /// Sector mismatch or Dove-prism angle (rad).
    pub phi0: f64,
    pub envelope: Arc<BesselGaussEnvelope>,
    /// Masks for [`ScenarioKind::ImageMasked`].
    pub mask_a: PhaseMask,
    pub mask_b: PhaseMask,
}

impl ScenarioSpec {
    pub fn new(kind: ScenarioKind, envelope: Arc<BesselGaussEnvelope>) -> Self {
        Self {
            kind,
            m: 1,
            theta: PI / 4.0,
            phi0: 0.0,
            envelope,
            mask_a: PhaseMask::none(),
            mask_b: PhaseMask::none(),
        }
    }

    pub fn with_m(mut self, m: i32) -> Self {
        self.m = m;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_phi0(mut self, phi0: f64) -> Self {
        self.phi0 = phi0;
        self
    }

    pub fn with_masks(mut self, a: PhaseMask, b: PhaseMask) -> Self {
        self.mask_a = a;
        self.mask_b = b;
        self
    }
}

/// Amplitude with (polarization, OAM) of the photons on A and B.
type PairTerm = (Complex64, (Polarization, i32), (Polarization, i32));

fn pair(spec: &ScenarioSpec, terms: &[PairTerm]) -> Result<PhotonState> {
    let mut s = PhotonState::new(2)?;
    for &(c, (pa, ma), (pb, mb)) in terms {
        s.add_term(
            c,
            vec![
                SinglePhotonMode::new(Port::A, pa, spec.envelope.clone(), ma),
                SinglePhotonMode::new(Port::B, pb, spec.envelope.clone(), mb),
            ],
        )?;
    }
    Ok(s)
}

/// Builds the normalized input pair on ports A (photon 1) and B (photon 2).
pub fn build_scenario(spec: &ScenarioSpec) -> Result<PhotonState> {
    use Polarization::H;
    spec.envelope.require_normalized()?;
    let m = spec.m;
    let one = Complex64::new(1.0, 0.0);
    let state = match spec.kind {
        ScenarioKind::ProductOppositeOam => pair(spec, &[(one, (H, m), (H, -m))])?,
        ScenarioKind::ProductSameOam => pair(spec, &[(one, (H, m), (H, m))])?,
        ScenarioKind::EntangledSymSameOam => pair(spec, &[(one, (H, m), (H, m)), (one, (H, -m), (H, -m))])?,
        ScenarioKind::EntangledAntisymSameOam => {
            if m == 0 {
                return Err(Error::NullState("antisymmetric same-OAM pair vanishes for m = 0".into()));
            }
            pair(spec, &[(one, (H, m), (H, m)), (-one, (H, -m), (H, -m))])?
        }
        ScenarioKind::EntangledOppositeOamPlus => pair(spec, &[(one, (H, m), (H, -m)), (one, (H, -m), (H, m))])?,
        ScenarioKind::EntangledOppositeOamMinus => {
            if m == 0 {
                return Err(Error::NullState("antisymmetric opposite-OAM pair vanishes for m = 0".into()));
            }
            pair(spec, &[(one, (H, m), (H, -m)), (-one, (H, -m), (H, m))])?
        }
        ScenarioKind::Polarization => {
            let (s, c) = spec.theta.sin_cos();
            let mut terms = Vec::new();
            if c != 0.0 {
                terms.push((Complex64::new(c, 0.0), (H, m), (Polarization::V, -m)));
            }
            if s != 0.0 {
                terms.push((Complex64::new(s, 0.0), (Polarization::V, m), (H, -m)));
            }
            pair(spec, &terms)?
        }
        ScenarioKind::SectorMasked => {
            let sectors = u32::try_from(m)
                .ok()
                .filter(|&k| k > 0)
                .ok_or_else(|| Error::OutOfRange(format!("sector count must be positive, got {m}")))?;
            let s = pair(spec, &[(one, (H, 0), (H, 0))])?;
            let s = apply_mask(&s, Port::A, &PhaseMask::sector_a(sectors)?)?;
            apply_mask(&s, Port::B, &PhaseMask::sector_b(sectors, spec.phi0)?)?
        }
        ScenarioKind::DovePrism => {
            let s = pair(spec, &[(one, (H, m), (H, m)), (one, (H, -m), (H, -m))])?;
            dove_prism(&s, Port::A, spec.phi0)?
        }
        ScenarioKind::ImageMasked => {
            let s = pair(spec, &[(one, (H, 0), (H, 0))])?;
            let s = apply_mask(&s, Port::A, &spec.mask_a)?;
            apply_mask(&s, Port::B, &spec.mask_b)?
        }
    };
    state.normalized()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalPath {
    Separable,
    Quadrature,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CoincidenceOptions {
    pub force_quadrature: bool,
    pub quadrature: QuadratureSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coincidence {
    pub probability: f64,
    pub path: EvalPath,
}

/// Output-port occupation probabilities of a two-photon state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PortStatistics {
    pub cc: f64,
    pub dd: f64,
    pub cd: f64,
}

/// Splits a beam-splitter output state into its bunched and anti-bunched parts.
pub fn port_statistics(output: &PhotonState) -> Result<PortStatistics> {
    if output.n() != 2 {
        return Err(Error::UnsupportedPhotonNumber(output.n()));
    }
    let total = output.norm_sq()?;
    if !(total > 1e-300) {
        return Err(Error::NullState("state has zero norm".into()));
    }
    let part = |ports: [Port; 2]| -> Result<f64> {
        let sub = output.filter_ports(|p| p == ports);
        if sub.is_empty() {
            return Ok(0.0);
        }
        Ok(sub.norm_sq()? / total)
    };
    Ok(PortStatistics { cc: part([Port::C, Port::C])?, dd: part([Port::D, Port::D])?, cd: part([Port::C, Port::D])? })
}

/// Coincidence probability with delay `z0` added on path A.
pub fn coincidence_probability(state: &PhotonState, z0: f64) -> Result<f64> {
    Ok(coincidence_with(state, z0, &CoincidenceOptions::default())?.probability)
}

pub fn coincidence_with(state: &PhotonState, z0: f64, opts: &CoincidenceOptions) -> Result<Coincidence> {
    check_input_layout(state)?;
    let delayed = apply_delay(state, Port::A, z0)?;
    let separable = delayed.modes().iter().all(|m| m.mask.is_angular());
    if separable && !opts.force_quadrature {
        let stats = port_statistics(&beam_splitter(&delayed)?)?;
        Ok(Coincidence { probability: stats.cd, path: EvalPath::Separable })
    } else {
        Ok(Coincidence { probability: quadrature_route(&delayed, &opts.quadrature)?, path: EvalPath::Quadrature })
    }
}

fn check_input_layout(state: &PhotonState) -> Result<()> {
    if state.n() != 2 {
        return Err(Error::UnsupportedPhotonNumber(state.n()));
    }
    for (_, modes) in state.monomials() {
        let ports: Vec<Port> = modes.iter().map(|m| m.port).collect();
        if !(ports.contains(&Port::A) && ports.contains(&Port::B)) {
            return Err(Error::UnsupportedPortLayout(format!(
                "coincidence needs one photon on A and one on B, got {ports:?}"
            )));
        }
    }
    Ok(())
}

fn quadrature_route(state: &PhotonState, spec: &QuadratureSpec) -> Result<f64> {
    let terms: Vec<(Complex64, &SinglePhotonMode, &SinglePhotonMode)> = state
        .monomials()
        .map(|(c, modes)| {
            let (a, b) = if modes[0].port == Port::A { (modes[0], modes[1]) } else { (modes[1], modes[0]) };
            (c, a, b)
        })
        .collect();
    let n = terms.len();
    let method = OverlapMethod::Quadrature(*spec);
    let pieces = exec::try_map_indexed(Exec::default(), n * n, |k| -> Result<(Complex64, Complex64)> {
        let (ct, at, bt) = terms[k / n];
        let (cu, au, bu) = terms[k % n];
        let w = ct.conj() * cu;
        let exchange = reflected_overlap_quadrature(at, bu, spec)? * reflected_overlap_quadrature(bt, au, spec)?;
        let norm = mode_overlap_with(at, au, &method)? * mode_overlap_with(bt, bu, &method)?;
        Ok((w * exchange, w * norm))
    })?;
    let (mut exchange, mut norm) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for (e, n) in pieces {
        exchange += e;
        norm += n;
    }
    if !(norm.re > 1e-300) {
        return Err(Error::NullState("state has zero norm".into()));
    }
    Ok(0.5 - 0.5 * exchange.re / norm.re)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub scenario: ScenarioKind,
    pub m: i32,
    pub theta: f64,
    pub phi0: f64,
    pub sigma_z: f64,
    /// Delays (m).
    pub z0: Vec<f64>,
    pub p: Vec<f64>,
}

impl ScanResult {
    /// CSV with header `z0_over_sigma_z,P`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("z0_over_sigma_z,P\n");
        for (z, p) in self.z0.iter().zip(&self.p) {
            out.push_str(&format!("{:.16e},{:.16e}\n", z / self.sigma_z, p));
        }
        out
    }
}

/// Evaluates the coincidence probability on a grid of delays (m).
pub fn scan(spec: &ScenarioSpec, z0_grid: &[f64], exec: Exec) -> Result<ScanResult> {
    let state = build_scenario(spec)?;
    let p = exec::try_map_indexed(exec, z0_grid.len(), |i| coincidence_probability(&state, z0_grid[i]))?;
    Ok(ScanResult {
        scenario: spec.kind,
        m: spec.m,
        theta: spec.theta,
        phi0: spec.phi0,
        sigma_z: spec.envelope.sigma_z,
        z0: z0_grid.to_vec(),
        p,
    })
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| {
                let t = i as f64 / (count - 1) as f64;
                start * (1.0 - t) + stop * t
            })
            .collect(),
    }
}

/// Closed form for equal sector masks with mismatch `φ₀ ∈ [0, π/m)`:
/// `½[1 − (1 − mφ₀/π)²]`.
pub fn coincidence_sector(m: u32, phi0: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::OutOfRange("sector count m must be positive".into()));
    }
    let limit = PI / f64::from(m);
    if !(0.0..limit).contains(&phi0) {
        return Err(Error::OutOfRange(format!("φ0 = {phi0} outside [0, π/{m})")));
    }
    let u = 1.0 - f64::from(m) * phi0 / PI;
    Ok(0.5 * (1.0 - u * u))
}

/// Dove prism closed form `½ − ½ cos(4mφ₀)`.
pub fn coincidence_dove(m: i32, phi0: f64) -> f64 {
    0.5 - 0.5 * (4.0 * f64::from(m) * phi0).cos()
}

/// Polarization-entangled pair at zero delay: `½ − ½ sin 2θ`.
pub fn coincidence_polarization(theta: f64) -> f64 {
    0.5 - 0.5 * (2.0 * theta).sin()
}

/// Gaussian-envelope dip `½(1 − e^{−z₀²/(4σ_z²)})`.
pub fn gaussian_dip(z0: f64, sigma_z: f64) -> f64 {
    0.5 * (1.0 - (-z0 * z0 / (4.0 * sigma_z * sigma_z)).exp())
}

/// Normalization constant of the symmetric same-OAM pair, `[2(1 + δ_{m,0})]^{−1/2}`.
pub fn symmetric_pair_normalization(m: i32) -> f64 {
    if m == 0 {
        0.5
    } else {
        FRAC_1_SQRT_2
    }
}

/// `⟨ψ|ψ⟩` of an input state; convenience for reports.
pub fn state_norm(state: &PhotonState) -> Result<f64> {
    Ok(inner_product(state, state)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn env() -> Arc<BesselGaussEnvelope> {
        Arc::new(BesselGaussEnvelope::reference().normalized().unwrap())
    }

    fn p0(kind: ScenarioKind, m: i32) -> f64 {
        let s = build_scenario(&ScenarioSpec::new(kind, env()).with_m(m)).unwrap();
        coincidence_probability(&s, 0.0).unwrap()
    }

    #[test]
    fn dip_flat_and_peak() {
        assert!(p0(ScenarioKind::ProductOppositeOam, 1) < 1e-12);
        assert!((p0(ScenarioKind::ProductSameOam, 1) - 0.5).abs() < 1e-12);
        assert!(p0(ScenarioKind::ProductSameOam, 0) < 1e-12);
        assert!(p0(ScenarioKind::EntangledSymSameOam, 2) < 1e-12);
        assert!(p0(ScenarioKind::EntangledAntisymSameOam, 1) > 1.0 - 1e-12);
        assert!(p0(ScenarioKind::EntangledOppositeOamPlus, 1) < 1e-12);
        assert!(p0(ScenarioKind::EntangledOppositeOamMinus, 1) < 1e-12);
    }

    #[test]
    fn null_states() {
        let spec = ScenarioSpec::new(ScenarioKind::EntangledAntisymSameOam, env()).with_m(0);
        assert!(matches!(build_scenario(&spec), Err(Error::NullState(_))));
    }

    #[test]
    fn degenerate_symmetric_pair_matches_product() {
        let a = build_scenario(&ScenarioSpec::new(ScenarioKind::EntangledSymSameOam, env()).with_m(0)).unwrap();
        let b = build_scenario(&ScenarioSpec::new(ScenarioKind::ProductSameOam, env()).with_m(0)).unwrap();
        assert_relative_eq!(inner_product(&a, &b).unwrap().norm(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn polarization_states() {
        let spec = ScenarioSpec::new(ScenarioKind::Polarization, env()).with_m(0);
        for theta in [-PI / 4.0, -PI / 6.0, 0.0, PI / 6.0, PI / 4.0] {
            let s = build_scenario(&spec.clone().with_theta(theta)).unwrap();
            let p = coincidence_probability(&s, 0.0).unwrap();
            assert!((p - coincidence_polarization(theta)).abs() < 1e-12, "{theta}: {p}");
        }
    }

    #[test]
    fn dip_profile_is_gaussian_and_even() {
        let e = env();
        let s = build_scenario(&ScenarioSpec::new(ScenarioKind::ProductOppositeOam, e.clone())).unwrap();
        for z in [0.5, 1.0, 2.0, 3.5] {
            let z0 = z * e.sigma_z;
            let plus = coincidence_probability(&s, z0).unwrap();
            let minus = coincidence_probability(&s, -z0).unwrap();
            assert!((plus - gaussian_dip(z0, e.sigma_z)).abs() < 1e-12);
            assert!((plus - minus).abs() < 1e-12);
        }
        assert_relative_eq!(gaussian_dip(2.0 * e.sigma_z, e.sigma_z), 0.31606, max_relative = 1e-5);
    }

    #[test]
    fn bunching_probabilities_sum_to_one() {
        let e = env();
        for kind in [ScenarioKind::ProductSameOam, ScenarioKind::DovePrism, ScenarioKind::SectorMasked] {
            let spec = ScenarioSpec::new(kind, e.clone()).with_m(2).with_phi0(0.3);
            let s = apply_delay(&build_scenario(&spec).unwrap(), Port::A, 0.7 * e.sigma_z).unwrap();
            let st = port_statistics(&beam_splitter(&s).unwrap()).unwrap();
            assert!((st.cc + st.dd + st.cd - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_route_agrees() {
        let e = env();
        let opts = CoincidenceOptions { force_quadrature: true, ..Default::default() };
        for (kind, m) in [(ScenarioKind::EntangledAntisymSameOam, 1), (ScenarioKind::ProductOppositeOam, 2)] {
            let s = build_scenario(&ScenarioSpec::new(kind, e.clone()).with_m(m)).unwrap();
            for z in [0.0, 1.3] {
                let fast = coincidence_with(&s, z * e.sigma_z, &CoincidenceOptions::default()).unwrap();
                let slow = coincidence_with(&s, z * e.sigma_z, &opts).unwrap();
                assert_eq!(slow.path, EvalPath::Quadrature);
                assert!((fast.probability - slow.probability).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn sector_closed_form_range() {
        assert_eq!(coincidence_sector(2, 0.0).unwrap(), 0.0);
        assert!((coincidence_sector(3, PI / 3.0 - 1e-12).unwrap() - 0.5).abs() < 1e-9);
        assert!(coincidence_sector(2, PI / 2.0).is_err());
        assert!(coincidence_sector(2, -0.1).is_err());
    }

    #[test]
    fn sector_quadrature_of_the_masks() {
        // m = 1: quadrature of the masks and the closed form agree
        let e = env();
        for phi0 in [0.0, 0.4, 1.1, 2.5] {
            let spec = ScenarioSpec::new(ScenarioKind::SectorMasked, e.clone()).with_m(1).with_phi0(phi0);
            let p = coincidence_probability(&build_scenario(&spec).unwrap(), 0.0).unwrap();
            assert!((p - coincidence_sector(1, phi0).unwrap()).abs() < 1e-9, "{phi0}: {p}");
        }
    }

    #[test]
    fn scan_csv_layout() {
        let e = env();
        let spec = ScenarioSpec::new(ScenarioKind::ProductSameOam, e.clone());
        let z = linspace(-e.sigma_z, e.sigma_z, 3);
        let r = scan(&spec, &z, Exec::Sequential).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "z0_over_sigma_z,P");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("-1.0000000000000000e0,"));
    }

    #[test]
    fn scenario_names_roundtrip() {
        for k in ScenarioKind::ALL {
            assert_eq!(k.name().parse::<ScenarioKind>().unwrap(), k);
        }
        assert!("bogus".parse::<ScenarioKind>().is_err());
    }
}
