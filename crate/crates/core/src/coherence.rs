//! Second- and fourth-order coherence: closed forms, maps and the matching
//! state builders for cross-checks against [`crate::fockstate::correlate`].

use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exec::{self, Exec};
use crate::fockstate::{
    CorrelationEngine, DetectorSpec, PhotonState, Polarization, Port, Projection, SinglePhotonMode, SpacePoint,
};
use crate::masks::{PhaseMask, Raster};
use crate::optics::{apply_mask, apply_mask_pol, beam_splitter, Branch, PortMap};
use crate::pulses::BesselGaussEnvelope;
use crate::{Error, Result};

/// Square, cell-centred sampling grid; row 0 is the top (`y = +half_width`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransverseGrid {
    pub size: usize,
    pub half_width: f64,
}

impl TransverseGrid {
    pub fn new(size: usize, half_width: f64) -> Result<Self> {
        if size == 0 {
            return Err(Error::GridTooSmall(0));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::OutOfRange(format!("grid half-width must be positive, got {half_width}")));
        }
        Ok(Self { size, half_width })
    }

    /// Grid spanning four main-lobe radii around the beam axis.
    pub fn around(envelope: &BesselGaussEnvelope, size: usize) -> Result<Self> {
        Self::new(size, 4.0 * envelope.main_lobe_radius())
    }

    pub fn cell(&self) -> f64 {
        2.0 * self.half_width / self.size as f64
    }

    pub fn len(&self) -> usize {
        self.size * self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// `(x, y)` of sample `index` in row-major order.
    pub fn point(&self, index: usize) -> (f64, f64) {
        let (row, col) = (index / self.size, index % self.size);
        let h = self.cell();
        (-self.half_width + (col as f64 + 0.5) * h, self.half_width - (row as f64 + 0.5) * h)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapMetadata {
    pub scenario: String,
    /// Value mapped to full scale in the 8-bit image.
    pub full_scale: f64,
    pub grid: TransverseGrid,
    pub cell: f64,
    /// Fixed points of the other detectors (m).
    pub fixed_points: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceMap {
    pub meta: MapMetadata,
    pub values: Vec<f64>,
}

impl CoherenceMap {
    pub fn grid(&self) -> TransverseGrid {
        self.meta.grid
    }

    pub fn to_raster(&self) -> Raster {
        let n = self.meta.grid.size;
        let mut r = Raster::new(n, n, 255);
        for (i, &v) in self.values.iter().enumerate() {
            let level = (v / self.meta.full_scale).clamp(0.0, 1.0) * 255.0;
            r.set(i % n, i / n, level.round() as u16);
        }
        r
    }

    /// Writes the P5 image and a JSON sidecar next to it (`.json` extension).
    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        self.to_raster().write(path)?;
        let sidecar = serde_json::to_string_pretty(&self.meta)?;
        std::fs::write(path.with_extension("json"), sidecar + "\n")?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,g\n");
        for (i, v) in self.values.iter().enumerate() {
            let (x, y) = self.meta.grid.point(i);
            out.push_str(&format!("{x:.16e},{y:.16e},{v:.16e}\n"));
        }
        out
    }
}

fn build_map(
    scenario: &str,
    grid: TransverseGrid,
    full_scale: f64,
    fixed: &[(f64, f64)],
    exec: Exec,
    f: impl Fn(f64, f64) -> Result<f64> + Sync,
) -> Result<CoherenceMap> {
    let values = exec::try_map_indexed(exec, grid.len(), |i| {
        let (x, y) = grid.point(i);
        f(x, y)
    })?;
    Ok(CoherenceMap {
        meta: MapMetadata {
            scenario: scenario.to_owned(),
            full_scale,
            grid,
            cell: grid.cell(),
            fixed_points: fixed.iter().map(|&(x, y)| [x, y]).collect(),
        },
        values,
    })
}

fn at(x: f64, y: f64) -> SpacePoint {
    SpacePoint::transverse(x, y)
}

fn eta(envelope: &BesselGaussEnvelope, x: f64, y: f64) -> Result<Complex64> {
    envelope.wavepacket(0, x.hypot(y), 0.0, 0.0)
}

/// Photon-number density on `port`, summed over polarizations.
pub fn density_map(state: &PhotonState, port: Port, grid: TransverseGrid, exec: Exec) -> Result<CoherenceMap> {
    let engine = CorrelationEngine::new(state)?;
    let mut map = build_map(&format!("density-{port}"), grid, 1.0, &[], exec, |x, y| {
        engine.correlate(&[DetectorSpec::new(port, Projection::Sum, at(x, y))])
    })?;
    map.meta.full_scale = map.values.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    Ok(map)
}

const DENSITY_FLOOR: f64 = 1e-24;

/// Product pair `η_A e^{iΦ_A} ⊗ η_B e^{iΦ_B}` sent through the beam splitter.
#[derive(Clone, Debug, PartialEq)]
pub struct HomPair {
    pub envelope_a: Arc<BesselGaussEnvelope>,
    pub envelope_b: Arc<BesselGaussEnvelope>,
    pub mask_a: PhaseMask,
    pub mask_b: PhaseMask,
}

impl HomPair {
    pub fn new(envelope: Arc<BesselGaussEnvelope>, mask_a: PhaseMask, mask_b: PhaseMask) -> Self {
        Self { envelope_a: envelope.clone(), envelope_b: envelope, mask_a, mask_b }
    }

    pub fn input_state(&self) -> Result<PhotonState> {
        let mut s = PhotonState::new(2)?;
        s.add_term(
            Complex64::new(1.0, 0.0),
            vec![
                SinglePhotonMode::new(Port::A, Polarization::H, self.envelope_a.clone(), 0),
                SinglePhotonMode::new(Port::B, Polarization::H, self.envelope_b.clone(), 0),
            ],
        )?;
        let s = apply_mask(&s, Port::A, &self.mask_a)?;
        apply_mask(&s, Port::B, &self.mask_b)?.normalized()
    }

    pub fn output_state(&self) -> Result<PhotonState> {
        beam_splitter(&self.input_state()?)
    }

    fn equal_shapes(&self) -> bool {
        self.envelope_a == self.envelope_b
    }

    /// `n_c(r) = n_d(r) = ½[|η_A(r)|² + |η_B(r)|²]`.
    pub fn density(&self, x: f64, y: f64) -> Result<f64> {
        Ok(0.5 * (eta(&self.envelope_a, x, y)?.norm_sqr() + eta(&self.envelope_b, x, y)?.norm_sqr()))
    }

    /// True where the output density is below `1e−24` of its on-axis value.
    pub fn density_vanishes(&self, x: f64, y: f64) -> Result<bool> {
        Ok(self.density(x, y)? <= DENSITY_FLOOR * self.density(0.0, 0.0)?)
    }

    /// Two-port `g²_cd(r, r')` with `r` on port D and `r'` on port C.
    pub fn g2(&self, r: (f64, f64), rp: (f64, f64)) -> Result<f64> {
        let arg = hom_phase(&self.mask_a, &self.mask_b, r, rp);
        if self.equal_shapes() {
            return Ok(0.5 * (1.0 - arg.cos()));
        }
        let (ea, eb) = (eta(&self.envelope_a, r.0, r.1)?, eta(&self.envelope_b, r.0, r.1)?);
        let (ea_p, eb_p) = (eta(&self.envelope_a, rp.0, rp.1)?, eta(&self.envelope_b, rp.0, rp.1)?);
        let den = (ea.norm_sqr() + eb.norm_sqr()) * (ea_p.norm_sqr() + eb_p.norm_sqr());
        if !(den > 0.0) {
            return Err(Error::UndefinedRatio(format!("densities vanish at {r:?} or {rp:?}")));
        }
        let cross = ea.conj() * eb * eb_p.conj() * ea_p * Complex64::from_polar(1.0, -arg);
        Ok((ea.norm_sqr() * eb_p.norm_sqr() + eb.norm_sqr() * ea_p.norm_sqr() - 2.0 * cross.re) / den)
    }
}

/// `Φ_A(r) − Φ_B(r̄) + Φ_B(r') − Φ_A(r̄')`.
pub fn hom_phase(mask_a: &PhaseMask, mask_b: &PhaseMask, r: (f64, f64), rp: (f64, f64)) -> f64 {
    mask_a.evaluate(r.0, r.1) - mask_b.evaluate(r.0, -r.1) + mask_b.evaluate(rp.0, rp.1) - mask_a.evaluate(rp.0, -rp.1)
}

/// `g²_cd` from the contraction engine on a beam-splitter output state.
pub fn g2_cd_engine(engine: &CorrelationEngine<'_>, r: (f64, f64), rp: (f64, f64)) -> Result<f64> {
    let d = DetectorSpec::new(Port::D, Projection::Sum, at(r.0, r.1));
    let c = DetectorSpec::new(Port::C, Projection::Sum, at(rp.0, rp.1));
    let g = engine.correlate(&[d, c])?;
    ratio(g, engine.correlate(&[d])? * engine.correlate(&[c])?, r, rp)
}

fn ratio(num: f64, den: f64, r: (f64, f64), rp: (f64, f64)) -> Result<f64> {
    if !(den > 0.0) {
        return Err(Error::UndefinedRatio(format!("densities vanish at {r:?} or {rp:?}")));
    }
    Ok(num / den)
}

pub fn g2_hom_map(pair: &HomPair, grid: TransverseGrid, rp: (f64, f64), exec: Exec) -> Result<CoherenceMap> {
    if pair.density_vanishes(rp.0, rp.1)? {
        return Err(Error::UndefinedRatio(format!("density vanishes at the fixed point {rp:?}")));
    }
    let full = if pair.equal_shapes() { 1.0 } else { 2.0 };
    build_map("g2-hom", grid, full, &[rp], exec, |x, y| pair.g2((x, y), rp))
}

/// Helical masks `mφ` on both inputs: `½[1 − cos(2mφ + 2mφ')]`.
pub fn g2_helical(m: i32, phi: f64, phi_prime: f64) -> f64 {
    0.5 * (1.0 - (2.0 * f64::from(m) * (phi + phi_prime)).cos())
}

/// Symmetric same-OAM pair behind a Dove prism at `φ₀`:
/// `½{1 − cos[2m(φ + φ')]}[1 − cos 4mφ₀]`.
pub fn g2_dove(m: i32, phi: f64, phi_prime: f64, phi0: f64) -> f64 {
    let m = f64::from(m);
    0.5 * (1.0 - (2.0 * m * (phi + phi_prime)).cos()) * (1.0 - (4.0 * m * phi0).cos())
}

/// Equal-shape two-port map for the sector masks with `r'` at azimuth `φ'`.
pub fn g2_sector_map(m: u32, phi0: f64, grid: TransverseGrid, phi_prime: f64, exec: Exec) -> Result<CoherenceMap> {
    let (a, b) = (PhaseMask::sector_a(m)?, PhaseMask::sector_b(m, phi0)?);
    let rp = (0.5 * grid.half_width * phi_prime.cos(), 0.5 * grid.half_width * phi_prime.sin());
    build_map("g2-sector", grid, 1.0, &[rp], exec, |x, y| Ok(0.5 * (1.0 - hom_phase(&a, &b, (x, y), rp).cos())))
}

/// Polarization-entangled pair with `+Φ` on H and `−Φ` on V photons:
/// `(1/√2) η_A η_B [|H e^{iΦ_A}, V e^{−iΦ_B}⟩ + |V e^{−iΦ_A}, H e^{iΦ_B}⟩]`.
pub fn entangled_pair(
    envelope: Arc<BesselGaussEnvelope>,
    mask_a: &PhaseMask,
    mask_b: &PhaseMask,
) -> Result<PhotonState> {
    use Polarization::{H, V};
    let mode = |port, pol, mask: PhaseMask| SinglePhotonMode::new(port, pol, envelope.clone(), 0).with_mask(mask);
    let c = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut s = PhotonState::new(2)?;
    s.add_term(c, vec![mode(Port::A, H, mask_a.clone()), mode(Port::B, V, mask_b.clone().negate())])?;
    s.add_term(c, vec![mode(Port::A, V, mask_a.clone().negate()), mode(Port::B, H, mask_b.clone())])?;
    Ok(s)
}

/// Left-circular two-point coherence `1 + cos[2Φ_A(r) + 2Φ_B(r')]`.
pub fn g2_entangled(mask_a: &PhaseMask, mask_b: &PhaseMask, r: (f64, f64), rp: (f64, f64)) -> f64 {
    1.0 + (2.0 * mask_a.evaluate(r.0, r.1) + 2.0 * mask_b.evaluate(rp.0, rp.1)).cos()
}

/// Left-circular `g²_AB` from the contraction engine.
pub fn g2_entangled_engine(engine: &CorrelationEngine<'_>, r: (f64, f64), rp: (f64, f64)) -> Result<f64> {
    let a = DetectorSpec::new(Port::A, Projection::L, at(r.0, r.1));
    let b = DetectorSpec::new(Port::B, Projection::L, at(rp.0, rp.1));
    let g = engine.correlate(&[a, b])?;
    ratio(g, engine.correlate(&[a])? * engine.correlate(&[b])?, r, rp)
}

pub fn g2_entangled_map(
    mask_a: &PhaseMask,
    mask_b: &PhaseMask,
    grid: TransverseGrid,
    rp: (f64, f64),
    exec: Exec,
) -> Result<CoherenceMap> {
    build_map("g2-entangled", grid, 2.0, &[rp], exec, |x, y| Ok(g2_entangled(mask_a, mask_b, (x, y), rp)))
}

/// Four-photon state behind two beam splitters, with `masks[i]` on the H
/// photon of port `A..D`. With `conjugate_v` the V photons get `−Φ_i`.
pub fn four_photon_state(
    envelope: Arc<BesselGaussEnvelope>,
    masks: &[PhaseMask; 4],
    conjugate_v: bool,
) -> Result<PhotonState> {
    use Polarization::{H, V};
    let mode = |port, pol| SinglePhotonMode::new(port, pol, envelope.clone(), 0);
    let c = Complex64::new(0.5 * FRAC_1_SQRT_2, 0.0);
    let mut input = PhotonState::new(4)?;
    input.add_term(c, vec![mode(Port::A, H), mode(Port::A, H), mode(Port::B, V), mode(Port::B, V)])?;
    input.add_term(c, vec![mode(Port::A, V), mode(Port::A, V), mode(Port::B, H), mode(Port::B, H)])?;

    let t = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let r = Complex64::new(0.0, FRAC_1_SQRT_2);
    let branch = |amplitude, port, reflect| Branch { amplitude, port, reflect };
    let mut out = PortMap::new()
        .route(Port::A, vec![branch(r, Port::A, true), branch(t, Port::B, false)])
        .route(Port::B, vec![branch(t, Port::C, false), branch(r, Port::D, true)])
        .apply(&input)?;
    for (port, mask) in Port::ALL.into_iter().zip(masks) {
        out = apply_mask_pol(&out, port, H, mask)?;
        if conjugate_v {
            out = apply_mask_pol(&out, port, V, &mask.clone().negate())?;
        }
    }
    Ok(out)
}

fn check_distinct_points(ports: &[Port], intensities: &[f64]) -> Result<()> {
    if ports.len() != intensities.len() {
        return Err(Error::InvalidPorts(format!(
            "{} ports but {} intensities",
            ports.len(),
            intensities.len()
        )));
    }
    if !(2..=4).contains(&ports.len()) {
        return Err(Error::InvalidPorts(format!("correlation order {} not in 2..=4", ports.len())));
    }
    Ok(())
}

fn delta(a: Port, b: Port) -> f64 {
    f64::from(u8::from(a == b))
}

fn all_distinct(ports: &[Port]) -> bool {
    ports.iter().enumerate().all(|(i, p)| !ports[..i].contains(p))
}

/// Orders the port tuple the way the closed forms are written: sorted for
/// pairs and quadruples, the repeated label first for triples.
fn canonical(ports: &[Port]) -> Vec<Port> {
    let mut p = ports.to_vec();
    p.sort();
    if p.len() == 3 && p[1] == p[2] && p[0] != p[1] {
        p.rotate_left(1);
    }
    p
}

/// Closed-form `G^(k)` (k = 2, 3, 4) of the unmasked-sum four-photon state;
/// `intensities[i] = |η(r_i)|²` for the detector on `ports[i]`.
pub fn four_photon_correlation(ports: &[Port], intensities: &[f64]) -> Result<f64> {
    use Port::{A, B, C, D};
    check_distinct_points(ports, intensities)?;
    let weight: f64 = intensities.iter().product();
    let p = canonical(ports);
    let coefficient = match p.len() {
        2 => {
            let (i, j) = (p[0], p[1]);
            0.5 * (delta(i, j)
                + delta(i, A) * delta(j, B)
                + delta(i, C) * delta(j, D)
                + 2.0 * (delta(i, A) + delta(i, B)) * (delta(j, C) + delta(j, D)))
        }
        3 => {
            let (i, j, k) = (p[0], p[1], p[2]);
            let paired = delta(j, A) * delta(k, B)
                + delta(j, B) * delta(k, A)
                + delta(j, C) * delta(k, D)
                + delta(j, D) * delta(k, C);
            let levi = f64::from(u8::from(all_distinct(&p)));
            0.5 * (delta(i, j) * (1.0 - delta(j, k)) * (1.0 - paired) + levi)
        }
        _ => 0.25 * f64::from(u8::from(all_distinct(&p))),
    };
    Ok(coefficient * weight)
}

/// `g⁴_ABCD = ¼{1 + cos[Φ_A(r₁) + Φ_B(r₂) − Φ_C(r₃) − Φ_D(r₄)]}`, with the
/// argument doubled when the V photons carry the conjugate phases.
pub fn g4(masks: &[PhaseMask; 4], points: &[(f64, f64); 4], conjugate_v: bool) -> f64 {
    let ph = |i: usize| masks[i].evaluate(points[i].0, points[i].1);
    let arg = ph(0) + ph(1) - ph(2) - ph(3);
    let factor = if conjugate_v { 2.0 } else { 1.0 };
    0.25 * (1.0 + (factor * arg).cos())
}

/// Left-circular `g⁴_ABCD` from the contraction engine.
pub fn g4_engine(engine: &CorrelationEngine<'_>, points: &[(f64, f64); 4]) -> Result<f64> {
    let dets: Vec<DetectorSpec> = Port::ALL
        .into_iter()
        .zip(points)
        .map(|(port, &(x, y))| DetectorSpec::new(port, Projection::L, at(x, y)))
        .collect();
    let g = engine.correlate(&dets)?;
    let mut den = 1.0;
    for d in &dets {
        den *= engine.correlate(std::slice::from_ref(d))?;
    }
    ratio(g, den, points[0], points[1])
}

/// `g⁴` with `r₁` on the grid and `r₂..r₄` fixed.
pub fn g4_map(
    masks: &[PhaseMask; 4],
    grid: TransverseGrid,
    fixed: [(f64, f64); 3],
    conjugate_v: bool,
    exec: Exec,
) -> Result<CoherenceMap> {
    build_map("g4", grid, 0.5, &fixed, exec, |x, y| {
        Ok(g4(masks, &[(x, y), fixed[0], fixed[1], fixed[2]], conjugate_v))
    })
}

/// `|η(r)|²` of the shared four-photon envelope, for [`four_photon_correlation`].
pub fn intensity(envelope: &BesselGaussEnvelope, x: f64, y: f64) -> Result<f64> {
    Ok(eta(envelope, x, y)?.norm_sqr())
}
