//! Self-check suite: every closed form in the crate against the contraction
//! engine or the quadrature route, with per-check residuals.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coherence::{
    entangled_pair, four_photon_correlation, four_photon_state, g2_cd_engine, g2_entangled, g2_entangled_engine,
    g2_sector_map, g4, g4_engine, intensity, HomPair, TransverseGrid,
};
use crate::exec::Exec;
use crate::fockstate::{
    inner_product, mode_overlap_with, CorrelationEngine, DetectorSpec, OverlapMethod, Port, Projection,
    QuadratureSpec, SinglePhotonMode, SpacePoint, Polarization,
};
use crate::interference::{
    build_scenario, coincidence_dove, coincidence_polarization, coincidence_probability, coincidence_sector,
    gaussian_dip, linspace, port_statistics, scan, ScenarioKind, ScenarioSpec,
};
use crate::masks::PhaseMask;
use crate::optics::{apply_delay, beam_splitter, reflect_mode};
use crate::pulses::{bessel_j, BesselGaussEnvelope};
use crate::symmetry::{bell_catalog, classify, ClassifyOptions, Prediction};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    /// Acceptance criterion the check belongs to.
    pub criterion: u8,
    pub name: String,
    pub formula: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Smaller samples and a `1e−4` tolerance floor.
    pub fast: bool,
    pub exec: Exec,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { fast: false, exec: Exec::default(), seed: 0x5eed }
    }
}

struct Suite {
    opts: VerifyOptions,
    env: Arc<BesselGaussEnvelope>,
    rng: ChaCha8Rng,
    checks: Vec<Check>,
}

impl Suite {
    fn push(&mut self, criterion: u8, name: &str, formula: &str, residual: f64, tolerance: f64) {
        let tolerance = if self.opts.fast && tolerance > 0.0 { tolerance.max(1e-4) } else { tolerance };
        self.checks.push(Check {
            criterion,
            name: name.to_owned(),
            formula: formula.to_owned(),
            residual,
            tolerance,
            passed: residual <= tolerance,
        });
    }

    fn size(&self, full: usize, fast: usize) -> usize {
        if self.opts.fast {
            fast
        } else {
            full
        }
    }

    fn spec(&self, kind: ScenarioKind) -> ScenarioSpec {
        ScenarioSpec::new(kind, self.env.clone())
    }

    fn p0(&self, spec: &ScenarioSpec) -> Result<f64> {
        coincidence_probability(&build_scenario(spec)?, 0.0)
    }

    fn random_point(&mut self) -> (f64, f64) {
        let r = 2.0 * self.env.main_lobe_radius() * self.rng.random::<f64>().sqrt();
        let phi = self.rng.random_range(0.0..TAU);
        (r * phi.cos(), r * phi.sin())
    }

    fn random_mask(&mut self) -> PhaseMask {
        match self.rng.random_range(0..4) {
            0 => PhaseMask::helical(self.rng.random_range(-3..=3)),
            1 => PhaseMask::SectorA(self.rng.random_range(1..=4)),
            2 => PhaseMask::SectorB { m: self.rng.random_range(1..=4), phi0: self.rng.random_range(0.0..1.0) },
            _ => PhaseMask::helical(self.rng.random_range(-2..=2))
                .compose(PhaseMask::Constant(self.rng.random_range(-PI..PI))),
        }
    }
}

impl Suite {
    /// Mask with no symmetry that would hide the sign of its phase.
    fn generic_mask(&mut self) -> PhaseMask {
        let m = self.rng.random_range(1..=3) * if self.rng.random::<bool>() { 1 } else { -1 };
        let offset = PhaseMask::Constant(self.rng.random_range(-PI..PI));
        match self.rng.random_range(0..2) {
            0 => PhaseMask::helical(m).compose(offset),
            _ => PhaseMask::SectorB { m: self.rng.random_range(1..=4), phi0: self.rng.random_range(0.0..1.0) }
                .compose(PhaseMask::helical(m))
                .compose(offset),
        }
    }
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |a, b| a.max(b.abs()))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn run(opts: VerifyOptions) -> Result<Vec<Check>> {
    let env = Arc::new(BesselGaussEnvelope::reference().normalized()?);
    let mut s = Suite { opts, env, rng: ChaCha8Rng::seed_from_u64(opts.seed), checks: Vec::new() };
    hom_curves(&mut s)?;
    bell_table(&mut s)?;
    phase_scenarios(&mut s)?;
    sector_maps(&mut s)?;
    density_invariance(&mut s)?;
    oracles(&mut s)?;
    properties(&mut s)?;
    Ok(s.checks)
}

fn hom_curves(s: &mut Suite) -> Result<()> {
    let sz = s.env.sigma_z;
    let grid = linspace(-4.0 * sz, 4.0 * sz, s.size(161, 33));
    let dip = scan(&s.spec(ScenarioKind::ProductOppositeOam), &grid, s.opts.exec)?;
    let centre = dip.p[grid.len() / 2];
    s.push(1, "dip-centre", "P(0) of |m,−m⟩", centre, 1e-6);
    let r = max_abs(grid.iter().zip(&dip.p).map(|(&z, &p)| p - gaussian_dip(z, sz)));
    s.push(1, "dip-profile", "P(z0) = ½(1 − e^{−z0²/4σz²})", r, 1e-6);

    let flat = scan(&s.spec(ScenarioKind::ProductSameOam), &grid, s.opts.exec)?;
    s.push(2, "flat", "P(z0) = ½ for |m,m⟩, m = 1", max_abs(flat.p.iter().map(|p| p - 0.5)), 1e-9);

    let peak = s.p0(&s.spec(ScenarioKind::EntangledAntisymSameOam))?;
    s.push(3, "peak", "P(0) = 1 for |m,m⟩ − |−m,−m⟩", 1.0 - peak, 1e-6);
    for kind in [ScenarioKind::EntangledOppositeOamPlus, ScenarioKind::EntangledOppositeOamMinus] {
        let sc = scan(&s.spec(kind), &grid, s.opts.exec)?;
        let r = max_abs(grid.iter().zip(&sc.p).map(|(&z, &p)| p - gaussian_dip(z, sz)));
        s.push(3, kind.name(), "dip profile", r, 1e-6);
    }

    let thetas = [-PI / 4.0, -PI / 6.0, 0.0, PI / 6.0, PI / 4.0];
    let mut r: f64 = 0.0;
    for t in thetas {
        r = r.max((s.p0(&s.spec(ScenarioKind::Polarization).with_theta(t))? - coincidence_polarization(t)).abs());
    }
    s.push(4, "polarization", "P(0) = ½ − ½ sin 2θ", r, 1e-6);
    Ok(())
}

fn bell_table(s: &mut Suite) -> Result<()> {
    let opts = ClassifyOptions::default();
    let (mut s_bad, mut outcome_bad, mut p_bad) = (0, 0, 0);
    for h in bell_catalog(s.env.clone(), 1)? {
        let report = classify(&h.state, &opts)?;
        let p = coincidence_probability(&h.state, 0.0)?;
        s_bad += usize::from(report.s != h.tabulated_s);
        outcome_bad += usize::from(report.prediction != h.tabulated_outcome);
        p_bad += usize::from(match report.prediction {
            Prediction::Dip => p > 0.01,
            Prediction::Peak => p < 0.99,
            Prediction::None => true,
        });
    }
    s.push(5, "bell-s", "tabulated s (mismatched rows)", s_bad as f64, 0.0);
    s.push(5, "bell-outcome", "tabulated dip/peak (mismatched rows)", outcome_bad as f64, 0.0);
    s.push(5, "bell-p0", "P(0) consistent with s (mismatched rows)", p_bad as f64, 0.0);
    Ok(())
}

fn phase_scenarios(s: &mut Suite) -> Result<()> {
    for m in [1u32, 2, 4] {
        let n = s.size(20, 5);
        let mut r: f64 = 0.0;
        for j in 0..n {
            let phi0 = PI / f64::from(m) * j as f64 / n as f64;
            let spec = s.spec(ScenarioKind::SectorMasked).with_m(m as i32).with_phi0(phi0);
            r = r.max((s.p0(&spec)? - coincidence_sector(m, phi0)?).abs());
        }
        s.push(6, &format!("sector-m{m}"), "P(0) = ½[1 − (1 − mφ0/π)²]", r, 1e-6);
    }
    for m in [1, 2] {
        let mut r: f64 = 0.0;
        for j in 0..s.size(16, 4) {
            let phi0 = PI * j as f64 / 16.0;
            let spec = s.spec(ScenarioKind::DovePrism).with_m(m).with_phi0(phi0);
            r = r.max((s.p0(&spec)? - coincidence_dove(m, phi0)).abs());
        }
        s.push(7, &format!("dove-m{m}"), "P(0) = ½ − ½ cos 4mφ0", r, 1e-6);
    }
    Ok(())
}

/// Distance from `(x, y)` to the nearest ray at one of `angles`.
fn ray_distance(x: f64, y: f64, angles: &[f64]) -> f64 {
    let (rho, phi) = (x.hypot(y), y.atan2(x));
    angles
        .iter()
        .map(|&b| {
            let d = (phi - b).rem_euclid(TAU);
            let d = d.min(TAU - d);
            if d < FRAC_PI_2 {
                rho * d.sin()
            } else {
                rho
            }
        })
        .fold(f64::INFINITY, f64::min)
}

fn sector_maps(s: &mut Suite) -> Result<()> {
    let (m, phi0) = (4u32, PI / 8.0);
    let grid = TransverseGrid::new(s.size(128, 48), 1.0)?;
    let top = sector_map_pair(grid, m, phi0, s.opts.exec)?;
    s.push(8, "sector-map-complement", "g(φ'=0) + g(φ'=3π/16) = 1, binary off-boundary", top, 0.0);
    Ok(())
}

/// Largest violation of binarity or complementarity away from boundaries.
pub fn sector_map_pair(grid: TransverseGrid, m: u32, phi0: f64, exec: Exec) -> Result<f64> {
    let a = g2_sector_map(m, phi0, grid, 0.0, exec)?;
    let b = g2_sector_map(m, phi0, grid, 3.0 * PI / 16.0, exec)?;
    let step = PI / f64::from(m);
    let mut rays: Vec<f64> = (0..2 * m).map(|j| f64::from(j) * step).collect();
    rays.extend((0..2 * m).map(|j| phi0 + f64::from(j) * step));
    let mirrored: Vec<f64> = rays.iter().map(|r| -r).collect();
    rays.extend(mirrored);
    let mut worst: f64 = 0.0;
    for (i, (&ga, &gb)) in a.values.iter().zip(&b.values).enumerate() {
        let (x, y) = grid.point(i);
        if ray_distance(x, y, &rays) <= grid.cell() {
            continue;
        }
        worst = worst.max((ga * (1.0 - ga)).abs()).max((gb * (1.0 - gb)).abs()).max((ga + gb - 1.0).abs());
    }
    Ok(worst)
}

fn density_invariance(s: &mut Suite) -> Result<()> {
    let masks: Vec<PhaseMask> = (0..5).map(|_| s.random_mask()).collect();
    let points: Vec<(f64, f64)> = (0..s.size(8, 3)).map(|_| s.random_point()).collect();

    let density = |pair: &HomPair, port: Port| -> Result<Vec<f64>> {
        let out = pair.output_state()?;
        let engine = CorrelationEngine::new(&out)?;
        points
            .iter()
            .map(|&(x, y)| engine.correlate(&[DetectorSpec::new(port, Projection::Sum, SpacePoint::transverse(x, y))]))
            .collect()
    };
    let bare = HomPair::new(s.env.clone(), PhaseMask::none(), PhaseMask::none());
    let (ref_c, ref_d) = (density(&bare, Port::C)?, density(&bare, Port::D)?);
    let mut r: f64 = 0.0;
    for w in masks.windows(2) {
        let pair = HomPair::new(s.env.clone(), w[0].clone(), w[1].clone());
        for (got, want) in [(density(&pair, Port::C)?, &ref_c), (density(&pair, Port::D)?, &ref_d)] {
            r = r.max(got.iter().zip(want).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max));
        }
    }
    s.push(9, "density-hom", "n_c = n_d = ½(|η_A|² + |η_B|²) under masks", r, 1e-9);

    let none = [PhaseMask::none(), PhaseMask::none(), PhaseMask::none(), PhaseMask::none()];
    let bare4 = four_photon_state(s.env.clone(), &none, false)?;
    let e0 = CorrelationEngine::new(&bare4)?;
    let masked = [masks[0].clone(), masks[1].clone(), masks[2].clone(), masks[3].clone()];
    let st = four_photon_state(s.env.clone(), &masked, false)?;
    let e1 = CorrelationEngine::new(&st)?;
    let mut r4: f64 = 0.0;
    for &(x, y) in &points {
        for port in Port::ALL {
            let d = [DetectorSpec::new(port, Projection::Sum, SpacePoint::transverse(x, y))];
            r4 = r4.max(rel(e1.correlate(&d)?, e0.correlate(&d)?));
        }
    }
    s.push(9, "density-four-photon", "n_i = |η|² under masks", r4, 1e-9);
    Ok(())
}

fn oracles(s: &mut Suite) -> Result<()> {
    let n = s.size(100, 10);

    let mut r: f64 = 0.0;
    for chunk in 0..4 {
        let pair = HomPair::new(s.env.clone(), s.generic_mask(), s.generic_mask());
        let out = pair.output_state()?;
        let engine = CorrelationEngine::new(&out)?;
        for _ in 0..n.div_ceil(4) {
            let (p, q) = (s.random_point(), s.random_point());
            let oracle = g2_cd_engine(&engine, p, q)?;
            r = r.max((pair.g2(p, q)? - oracle).abs() / oracle.abs().max(1e-3));
        }
        let _ = chunk;
    }
    s.push(10, "g2-hom", "½{1 − cos[Φ_A(r) − Φ_B(r̄) + Φ_B(r') − Φ_A(r̄')]}", r, 1e-9);

    let mut r: f64 = 0.0;
    for _ in 0..4 {
        let (ma, mb) = (s.generic_mask(), s.generic_mask());
        let st = entangled_pair(s.env.clone(), &ma, &mb)?;
        let engine = CorrelationEngine::new(&st)?;
        for _ in 0..n.div_ceil(4) {
            let (p, q) = (s.random_point(), s.random_point());
            let oracle = g2_entangled_engine(&engine, p, q)?;
            r = r.max((g2_entangled(&ma, &mb, p, q) - oracle).abs() / oracle.abs().max(1e-3));
        }
    }
    s.push(10, "g2-entangled", "1 + cos[2Φ_A(r) + 2Φ_B(r')]", r, 1e-9);

    let masks = [s.generic_mask(), s.generic_mask(), s.generic_mask(), s.generic_mask()];
    let st = four_photon_state(s.env.clone(), &masks, false)?;
    let engine = CorrelationEngine::new(&st)?;
    for order in 2..=4usize {
        let mut r: f64 = 0.0;
        for _ in 0..n {
            let ports: Vec<Port> = (0..order).map(|_| Port::ALL[s.rng.random_range(0..4)]).collect();
            let pts: Vec<(f64, f64)> = (0..order).map(|_| s.random_point()).collect();
            let dets: Vec<DetectorSpec> = ports
                .iter()
                .zip(&pts)
                .map(|(&p, &(x, y))| DetectorSpec::new(p, Projection::Sum, SpacePoint::transverse(x, y)))
                .collect();
            let ints = pts.iter().map(|&(x, y)| intensity(&s.env, x, y)).collect::<Result<Vec<_>>>()?;
            let closed = four_photon_correlation(&ports, &ints)?;
            let oracle = engine.correlate(&dets)?;
            let scale = ints.iter().product::<f64>();
            r = r.max((closed - oracle).abs() / scale);
        }
        s.push(10, &format!("G{order}-four-photon"), "Kronecker / Levi-Civita closed form", r, 1e-9);
    }

    for conj in [false, true] {
        let st = four_photon_state(s.env.clone(), &masks, conj)?;
        let engine = CorrelationEngine::new(&st)?;
        let mut r: f64 = 0.0;
        for _ in 0..n {
            let pts = [s.random_point(), s.random_point(), s.random_point(), s.random_point()];
            let oracle = g4_engine(&engine, &pts)?;
            r = r.max((g4(&masks, &pts, conj) - oracle).abs() / oracle.abs().max(1e-3));
        }
        let name = if conj { "g4-conjugate" } else { "g4" };
        s.push(10, name, "¼{1 + cos[Φ_A + Φ_B − Φ_C − Φ_D]}", r, 1e-9);
    }
    Ok(())
}

fn properties(s: &mut Suite) -> Result<()> {
    let sz = s.env.sigma_z;
    let mut norm_r: f64 = 0.0;
    let mut sum_r: f64 = 0.0;
    for kind in [ScenarioKind::ProductSameOam, ScenarioKind::Polarization, ScenarioKind::DovePrism] {
        let z0 = s.rng.random_range(-2.0..2.0) * sz;
        let spec = s.spec(kind).with_m(s.rng.random_range(1..=3)).with_phi0(0.3).with_theta(0.4);
        let input = apply_delay(&build_scenario(&spec)?, Port::A, z0)?;
        let out = beam_splitter(&input)?;
        norm_r = norm_r.max((inner_product(&out, &out)?.re - inner_product(&input, &input)?.re).abs());
        let st = port_statistics(&out)?;
        sum_r = sum_r.max((st.cc + st.dd + st.cd - 1.0).abs());
    }
    s.push(11, "bs-norm", "‖U ψ‖ = ‖ψ‖", norm_r, 1e-9);
    s.push(11, "bs-probabilities", "P_cc + P_dd + P_cd = 1", sum_r, 1e-9);

    let mode = SinglePhotonMode::new(Port::A, Polarization::H, s.env.clone(), 3).with_mask(s.random_mask());
    let twice = reflect_mode(&reflect_mode(&mode));
    let p = s.random_point();
    let pt = SpacePoint::transverse(p.0, p.1);
    s.push(11, "reflection-involution", "R R f = f", (twice.evaluate(&pt)? - mode.evaluate(&pt)?).norm(), 1e-12);

    let mut parity: f64 = 0.0;
    let mut recurrence: f64 = 0.0;
    for _ in 0..50 {
        let x = s.rng.random_range(0.0..50.0);
        for m in 0..8 {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            parity = parity.max((bessel_j(-m, x) - sign * bessel_j(m, x)).abs());
            if m >= 1 && x > 0.0 {
                let lhs = bessel_j(m - 1, x) + bessel_j(m + 1, x);
                recurrence = recurrence.max((lhs - 2.0 * f64::from(m) / x * bessel_j(m, x)).abs());
            }
        }
    }
    s.push(11, "bessel-parity", "J_{−m} = (−1)^m J_m", parity, 1e-12);
    s.push(11, "bessel-recurrence", "J_{m−1} + J_{m+1} = (2m/x) J_m", recurrence, 1e-9);

    let unit = SinglePhotonMode::new(Port::A, Polarization::H, s.env.clone(), 1);
    let quad = OverlapMethod::Quadrature(QuadratureSpec::default());
    let norm = mode_overlap_with(&unit, &unit, &quad)?.re;
    s.push(11, "envelope-norm", "⟨f|f⟩ = 1 by quadrature", (norm - 1.0).abs(), 1e-6);

    let a = SinglePhotonMode::new(Port::A, Polarization::H, s.env.clone(), 2);
    let b = a.clone().with_mask(PhaseMask::helical(-1)).with_delay(0.5 * sz);
    let coarse = OverlapMethod::Quadrature(QuadratureSpec { angular_nodes: 512, radial_refinement: 1 });
    let fine = OverlapMethod::Quadrature(QuadratureSpec { angular_nodes: 1024, radial_refinement: 2 });
    let d = (mode_overlap_with(&a, &b, &coarse)? - mode_overlap_with(&a, &b, &fine)?).norm();
    s.push(11, "quadrature-convergence", "halving the step changes the overlap by ≤ 1e−6", d, 1e-6);
    Ok(())
}
