//! Few-photon states and the contraction engine.
//!
//! A [`PhotonState`] is a sum of monomials `c · a†_{f₁} … a†_{fₙ} |0⟩` over
//! single-photon modes. Inner products and normally ordered intensity
//! correlators reduce to permanents of mode-overlap (Gram) matrices, which
//! is all this module computes. Nothing here knows about beam splitters or
//! closed-form results.

mod overlap;
mod permanent;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use overlap::{
    mode_overlap, mode_overlap_with, reflected_overlap_quadrature, OverlapMethod, QuadratureSpec,
};
pub use permanent::{permanent, permanent_ryser};

use crate::exec::{self, Exec};
use crate::masks::PhaseMask;
use crate::pulses::BesselGaussEnvelope;
use crate::{Error, Result};

/// Path label. `A`, `B` are beam-splitter inputs, `C`, `D` its outputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Port {
    A,
    B,
    C,
    D,
}

impl Port {
    pub const ALL: [Port; 4] = [Port::A, Port::B, Port::C, Port::D];
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::H, Polarization::V];
}

/// Polarization filter in front of a detector.
///
/// `L = (H + iV)/√2` and `R = (H − iV)/√2` refer to the field operators, so
/// `ψ_L` picks up `1/√2` from an H photon and `i/√2` from a V photon.
/// `Sum` traces over both linear polarizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Projection {
    H,
    V,
    L,
    R,
    Sum,
}

impl Projection {
    /// Amplitude with which the projected field operator annihilates a
    /// photon of polarization `pol`; `None` for [`Projection::Sum`].
    pub fn coefficient(self, pol: Polarization) -> Option<Complex64> {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let v = Complex64::new(0.0, FRAC_1_SQRT_2);
        Some(match (self, pol) {
            (Self::H, Polarization::H) | (Self::V, Polarization::V) => Complex64::new(1.0, 0.0),
            (Self::H, Polarization::V) | (Self::V, Polarization::H) => Complex64::new(0.0, 0.0),
            (Self::L | Self::R, Polarization::H) => h,
            (Self::L, Polarization::V) => v,
            (Self::R, Polarization::V) => -v,
            (Self::Sum, _) => return None,
        })
    }
}

/// Point in a photon's own frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacePoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub t: f64,
}

impl SpacePoint {
    pub fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        Self { x, y, z, t }
    }

    /// Point in the transverse plane `z = 0` at `t = 0`.
    pub fn transverse(x: f64, y: f64) -> Self {
        Self::new(x, y, 0.0, 0.0)
    }

    pub fn polar(rho: f64, phi: f64) -> Self {
        Self::transverse(rho * phi.cos(), rho * phi.sin())
    }

    pub fn rho(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn phi(&self) -> f64 {
        self.y.atan2(self.x)
    }

    /// `r̄ = (x, −y, z)`.
    pub fn reflected(&self) -> Self {
        Self { y: -self.y, ..*self }
    }
}

/// One photon's amplitude: `η_|m|(ρ, z − z₀, t) e^{imφ} e^{iΦ(x, y)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SinglePhotonMode {
    pub port: Port,
    pub pol: Polarization,
    pub envelope: Arc<BesselGaussEnvelope>,
    pub oam: i32,
    pub mask: PhaseMask,
    /// Longitudinal delay `z₀` (m).
    pub delay: f64,
}

impl SinglePhotonMode {
    pub fn new(port: Port, pol: Polarization, envelope: Arc<BesselGaussEnvelope>, oam: i32) -> Self {
        Self { port, pol, envelope, oam, mask: PhaseMask::none(), delay: 0.0 }
    }

    pub fn with_mask(mut self, mask: PhaseMask) -> Self {
        self.mask = mask;
        self
    }

    pub fn with_delay(mut self, delay: f64) -> Self {
        self.delay = delay;
        self
    }

    pub fn evaluate(&self, p: &SpacePoint) -> Result<Complex64> {
        let eta = self.envelope.wavepacket(self.oam, p.rho(), p.z - self.delay, p.t)?;
        let phase = f64::from(self.oam) * p.phi() + self.mask.evaluate(p.x, p.y);
        Ok(eta * Complex64::from_polar(1.0, phase))
    }
}

/// `coeff · Π a†_{modes[i]}`; mode indices point into the owning state's table.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coeff: Complex64,
    pub modes: Vec<usize>,
}

/// Superposition of `n`-photon monomials. Kept unnormalized; see
/// [`PhotonState::normalized`].
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonState {
    n: usize,
    modes: Vec<SinglePhotonMode>,
    terms: Vec<Monomial>,
}

impl PhotonState {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 4 {
            return Err(Error::UnsupportedPhotonNumber(n));
        }
        Ok(Self { n, modes: Vec::new(), terms: Vec::new() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> &[SinglePhotonMode] {
        &self.modes
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Monomials with their modes resolved.
    pub fn monomials(&self) -> impl Iterator<Item = (Complex64, Vec<&SinglePhotonMode>)> + '_ {
        self.terms
            .iter()
            .map(|t| (t.coeff, t.modes.iter().map(|&i| &self.modes[i]).collect()))
    }

    fn intern(&mut self, mode: SinglePhotonMode) -> usize {
        if let Some(i) = self.modes.iter().position(|m| *m == mode) {
            return i;
        }
        self.modes.push(mode);
        self.modes.len() - 1
    }

    /// Adds `coeff · Π a†`; identical monomials are merged.
    pub fn add_term(&mut self, coeff: Complex64, modes: Vec<SinglePhotonMode>) -> Result<()> {
        if modes.len() != self.n {
            return Err(Error::PhotonNumberMismatch { left: self.n, right: modes.len() });
        }
        let mut idx: Vec<usize> = modes.into_iter().map(|m| self.intern(m)).collect();
        idx.sort_unstable();
        self.push_indices(coeff, idx);
        Ok(())
    }

    fn push_indices(&mut self, coeff: Complex64, idx: Vec<usize>) {
        if let Some(t) = self.terms.iter_mut().find(|t| t.modes == idx) {
            t.coeff += coeff;
        } else {
            self.terms.push(Monomial { coeff, modes: idx });
        }
        self.terms.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
    }

    /// Replaces every mode `f` by the linear combination `map(f)` and
    /// expands the products.
    pub fn map_modes<F>(&self, map: F) -> Result<Self>
    where
        F: Fn(&SinglePhotonMode) -> Result<Vec<(Complex64, SinglePhotonMode)>>,
    {
        let images: Vec<Vec<(Complex64, SinglePhotonMode)>> =
            self.modes.iter().map(&map).collect::<Result<_>>()?;
        let mut out = Self::new(self.n)?;
        let image_idx: Vec<Vec<(Complex64, usize)>> = images
            .into_iter()
            .map(|img| img.into_iter().map(|(c, m)| (c, out.intern(m))).collect())
            .collect();
        for term in &self.terms {
            let mut partial: Vec<(Complex64, Vec<usize>)> = vec![(term.coeff, Vec::new())];
            for &mi in &term.modes {
                let mut next = Vec::with_capacity(partial.len() * image_idx[mi].len());
                for (c, idx) in &partial {
                    for &(c2, j) in &image_idx[mi] {
                        let mut v = idx.clone();
                        v.push(j);
                        next.push((c * c2, v));
                    }
                }
                partial = next;
            }
            for (c, mut idx) in partial {
                idx.sort_unstable();
                out.push_indices(c, idx);
            }
        }
        out.compact();
        Ok(out)
    }

    /// Drops modes no longer referenced by any monomial.
    fn compact(&mut self) {
        let mut used = vec![false; self.modes.len()];
        for t in &self.terms {
            for &i in &t.modes {
                used[i] = true;
            }
        }
        let mut remap = vec![usize::MAX; self.modes.len()];
        let mut kept = Vec::new();
        for (i, m) in self.modes.drain(..).enumerate() {
            if used[i] {
                remap[i] = kept.len();
                kept.push(m);
            }
        }
        self.modes = kept;
        for t in &mut self.terms {
            for i in &mut t.modes {
                *i = remap[*i];
            }
            t.modes.sort_unstable();
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff *= c;
        }
        out
    }

    /// Sum of two states with the same photon number.
    pub fn plus(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::PhotonNumberMismatch { left: self.n, right: other.n });
        }
        let mut out = self.clone();
        for (c, modes) in other.monomials() {
            out.add_term(c, modes.into_iter().cloned().collect())?;
        }
        Ok(out)
    }

    pub fn norm_sq(&self) -> Result<f64> {
        Ok(inner_product(self, self)?.re)
    }

    /// Copy rescaled to `⟨ψ|ψ⟩ = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sq()?;
        if !(n2 > 1e-300) {
            return Err(Error::NullState("state has zero norm".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n2.sqrt(), 0.0)))
    }

    /// Sub-state of the monomials whose sorted port list satisfies `keep`.
    pub fn filter_ports<F: Fn(&[Port]) -> bool>(&self, keep: F) -> Self {
        let mut out = self.clone();
        out.terms.retain(|t| {
            let mut ports: Vec<Port> = t.modes.iter().map(|&i| self.modes[i].port).collect();
            ports.sort_unstable();
            keep(&ports)
        });
        out.compact();
        out
    }
}

fn gram(left: &[SinglePhotonMode], right: &[SinglePhotonMode], method: &OverlapMethod) -> Result<Vec<Complex64>> {
    let n = right.len();
    exec::try_map_indexed(Exec::default(), left.len() * n, |k| {
        mode_overlap_with(&left[k / n], &right[k % n], method)
    })
}

fn contract(
    left: &[(Complex64, Vec<usize>)],
    right: &[(Complex64, Vec<usize>)],
    gram: &[Complex64],
    stride: usize,
) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let mut sub = Vec::with_capacity(16);
    for (cl, il) in left {
        for (cr, ir) in right {
            let n = il.len();
            sub.clear();
            for &a in il {
                for &b in ir {
                    sub.push(gram[a * stride + b]);
                }
            }
            total += cl.conj() * cr * permanent(&sub, n);
        }
    }
    total
}

/// `⟨s1|s2⟩ = Σ c₁* c₂ perm(G)` with `G_ij = ⟨f_i|g_j⟩`.
pub fn inner_product(s1: &PhotonState, s2: &PhotonState) -> Result<Complex64> {
    inner_product_with(s1, s2, &OverlapMethod::Auto)
}

pub fn inner_product_with(s1: &PhotonState, s2: &PhotonState, method: &OverlapMethod) -> Result<Complex64> {
    if s1.n != s2.n {
        return Err(Error::PhotonNumberMismatch { left: s1.n, right: s2.n });
    }
    let g = gram(&s1.modes, &s2.modes, method)?;
    let l: Vec<_> = s1.terms.iter().map(|t| (t.coeff, t.modes.clone())).collect();
    let r: Vec<_> = s2.terms.iter().map(|t| (t.coeff, t.modes.clone())).collect();
    Ok(contract(&l, &r, &g, s2.modes.len()))
}

/// Detector: port, polarization filter and space-time point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorSpec {
    pub port: Port,
    pub projection: Projection,
    pub point: SpacePoint,
}

impl DetectorSpec {
    pub fn new(port: Port, projection: Projection, point: SpacePoint) -> Self {
        Self { port, projection, point }
    }
}

/// Gram matrix and norm of one state, reused across many correlator
/// evaluations.
pub struct CorrelationEngine<'a> {
    state: &'a PhotonState,
    gram: Vec<Complex64>,
    norm: f64,
}

impl<'a> CorrelationEngine<'a> {
    pub fn new(state: &'a PhotonState) -> Result<Self> {
        let gram = gram(&state.modes, &state.modes, &OverlapMethod::Auto)?;
        let terms: Vec<_> = state.terms.iter().map(|t| (t.coeff, t.modes.clone())).collect();
        let norm = contract(&terms, &terms, &gram, state.modes.len()).re;
        if !(norm > 1e-300) {
            return Err(Error::NullState("state has zero norm".into()));
        }
        Ok(Self { state, gram, norm })
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm
    }

    /// Normally ordered correlator `⟨Π ψ_d† Π ψ_d⟩ / ⟨ψ|ψ⟩`.
    pub fn correlate(&self, detectors: &[DetectorSpec]) -> Result<f64> {
        let k = detectors.len();
        if k > self.state.n {
            return Err(Error::TooManyDetectors { detectors: k, photons: self.state.n });
        }
        // mode values at each detector point (port filter applied)
        let mut values = vec![Complex64::new(0.0, 0.0); k * self.state.modes.len()];
        for (d, det) in detectors.iter().enumerate() {
            for (i, mode) in self.state.modes.iter().enumerate() {
                if mode.port == det.port {
                    values[d * self.state.modes.len() + i] = mode.evaluate(&det.point)?;
                }
            }
        }
        // sum-over-polarization detectors expand into 2^s linear filters
        let sum_slots: Vec<usize> = (0..k).filter(|&d| detectors[d].projection == Projection::Sum).collect();
        let mut total = 0.0;
        for combo in 0..(1usize << sum_slots.len()) {
            let projections: Vec<Projection> = (0..k)
                .map(|d| match sum_slots.iter().position(|&s| s == d) {
                    Some(bit) if combo & (1 << bit) != 0 => Projection::V,
                    Some(_) => Projection::H,
                    None => detectors[d].projection,
                })
                .collect();
            total += self.projected_norm(&projections, &values);
        }
        Ok(total / self.norm)
    }

    fn projected_norm(&self, projections: &[Projection], values: &[Complex64]) -> f64 {
        let nm = self.state.modes.len();
        let k = projections.len();
        // e_d(f) for every detector/mode pair
        let amps: Vec<Complex64> = (0..k * nm)
            .map(|j| {
                let (d, i) = (j / nm, j % nm);
                let c = projections[d]
                    .coefficient(self.state.modes[i].pol)
                    .expect("linear projection");
                c * values[j]
            })
            .collect();
        let mut residual: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
        let mut assignment = vec![0usize; k];
        for term in &self.state.terms {
            assign(term, &amps, nm, 0, &mut assignment, &mut residual);
        }
        let items: Vec<(Complex64, Vec<usize>)> = residual.into_iter().map(|(idx, c)| (c, idx)).collect();
        contract(&items, &items, &self.gram, nm).re
    }
}

/// Enumerates injective detector → photon assignments for one monomial and
/// accumulates the amplitude of each residual monomial.
fn assign(
    term: &Monomial,
    amps: &[Complex64],
    nm: usize,
    d: usize,
    assignment: &mut Vec<usize>,
    residual: &mut BTreeMap<Vec<usize>, Complex64>,
) {
    let k = assignment.len();
    if d == k {
        let mut c = term.coeff;
        for (det, &pos) in assignment.iter().enumerate() {
            c *= amps[det * nm + term.modes[pos]];
        }
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        let rest: Vec<usize> = (0..term.modes.len())
            .filter(|p| !assignment.contains(p))
            .map(|p| term.modes[p])
            .collect();
        *residual.entry(rest).or_insert(Complex64::new(0.0, 0.0)) += c;
        return;
    }
    for pos in 0..term.modes.len() {
        if assignment[..d].contains(&pos) {
            continue;
        }
        assignment[d] = pos;
        assign(term, amps, nm, d + 1, assignment, residual);
    }
}

/// One-shot correlator; see [`CorrelationEngine`] for repeated use.
pub fn correlate(state: &PhotonState, detectors: &[DetectorSpec]) -> Result<f64> {
    if detectors.len() > state.n {
        return Err(Error::TooManyDetectors { detectors: detectors.len(), photons: state.n });
    }
    CorrelationEngine::new(state)?.correlate(detectors)
}

/// `⟨n̂(r)⟩` summed over polarizations.
pub fn number_density(state: &PhotonState, port: Port, point: SpacePoint) -> Result<f64> {
    correlate(state, &[DetectorSpec::new(port, Projection::Sum, point)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn env() -> Arc<BesselGaussEnvelope> {
        Arc::new(BesselGaussEnvelope::reference().normalized().unwrap())
    }

    fn mode(port: Port, oam: i32) -> SinglePhotonMode {
        SinglePhotonMode::new(port, Polarization::H, env(), oam)
    }

    #[test]
    fn self_overlap_is_one() {
        for m in [0, 1, -2] {
            let a = mode(Port::A, m).with_mask(PhaseMask::SectorA(2));
            assert_relative_eq!(mode_overlap(&a, &a).unwrap().re, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn orthogonal_modes() {
        assert!(mode_overlap(&mode(Port::A, 1), &mode(Port::A, 2)).unwrap().norm() < 1e-12);
        assert_eq!(mode_overlap(&mode(Port::A, 0), &mode(Port::B, 0)).unwrap().norm(), 0.0);
        let v = SinglePhotonMode::new(Port::A, Polarization::V, env(), 0);
        assert_eq!(mode_overlap(&mode(Port::A, 0), &v).unwrap().norm(), 0.0);
    }

    #[test]
    fn unnormalized_envelope_is_rejected() {
        let raw = Arc::new(BesselGaussEnvelope::reference());
        let a = SinglePhotonMode::new(Port::A, Polarization::H, raw, 0);
        assert!(matches!(mode_overlap(&a, &a), Err(Error::UnnormalizedEnvelope)));
    }

    fn eq23(m: i32) -> PhotonState {
        let mut s = PhotonState::new(2).unwrap();
        let one = Complex64::new(1.0, 0.0);
        s.add_term(one, vec![mode(Port::A, m), mode(Port::B, m)]).unwrap();
        s.add_term(one, vec![mode(Port::A, -m), mode(Port::B, -m)]).unwrap();
        s
    }

    #[test]
    fn unnormalized_norms() {
        assert_relative_eq!(eq23(1).norm_sq().unwrap(), 2.0, max_relative = 1e-12);
        assert_relative_eq!(eq23(0).norm_sq().unwrap(), 4.0, max_relative = 1e-12);
        assert_relative_eq!(eq23(1).normalized().unwrap().norm_sq().unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn hermitian_inner_product() {
        let a = eq23(1);
        let mut b = PhotonState::new(2).unwrap();
        b.add_term(
            Complex64::new(0.3, -0.8),
            vec![mode(Port::A, 1).with_mask(PhaseMask::Helical(1)), mode(Port::B, 2)],
        )
        .unwrap();
        b.add_term(Complex64::new(-0.2, 0.1), vec![mode(Port::A, -1), mode(Port::B, -1)]).unwrap();
        let ab = inner_product(&a, &b).unwrap();
        let ba = inner_product(&b, &a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-14);
        assert!(inner_product(&b, &b).unwrap().re >= 0.0);
    }

    #[test]
    fn photon_number_mismatch() {
        let one = PhotonState::new(1).unwrap();
        assert!(matches!(inner_product(&one, &eq23(1)), Err(Error::PhotonNumberMismatch { .. })));
        assert!(matches!(PhotonState::new(5), Err(Error::UnsupportedPhotonNumber(5))));
    }

    #[test]
    fn single_photon_density() {
        let m = mode(Port::A, 0);
        let mut s = PhotonState::new(1).unwrap();
        s.add_term(Complex64::new(1.0, 0.0), vec![m.clone()]).unwrap();
        let p = SpacePoint::new(3e-6, -1e-6, 2e-5, 0.0);
        let expected = m.evaluate(&p).unwrap().norm_sqr();
        let got = correlate(&s, &[DetectorSpec::new(Port::A, Projection::H, p)]).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-12);
        assert_relative_eq!(number_density(&s, Port::A, p).unwrap(), expected, max_relative = 1e-12);
        assert_eq!(number_density(&s, Port::B, p).unwrap(), 0.0);
        let two = [DetectorSpec::new(Port::A, Projection::Sum, p); 2];
        assert!(matches!(correlate(&s, &two), Err(Error::TooManyDetectors { .. })));
    }

    #[test]
    fn circular_filters_split_density() {
        let m = mode(Port::A, 0);
        let mut s = PhotonState::new(1).unwrap();
        s.add_term(Complex64::new(1.0, 0.0), vec![m.clone()]).unwrap();
        let p = SpacePoint::transverse(1e-6, 0.0);
        let full = number_density(&s, Port::A, p).unwrap();
        for proj in [Projection::L, Projection::R] {
            let got = correlate(&s, &[DetectorSpec::new(Port::A, proj, p)]).unwrap();
            assert_relative_eq!(got, 0.5 * full, max_relative = 1e-12);
        }
    }

    #[test]
    fn doubly_occupied_mode() {
        // two photons in one mode: G² = 2|f|⁴, n = 2|f|²
        let m = mode(Port::A, 0);
        let mut s = PhotonState::new(2).unwrap();
        s.add_term(Complex64::new(1.0, 0.0), vec![m.clone(), m.clone()]).unwrap();
        assert_relative_eq!(s.norm_sq().unwrap(), 2.0, max_relative = 1e-12);
        let p = SpacePoint::transverse(2e-6, 1e-6);
        let f2 = m.evaluate(&p).unwrap().norm_sqr();
        let det = DetectorSpec::new(Port::A, Projection::H, p);
        assert_relative_eq!(correlate(&s, &[det, det]).unwrap(), 2.0 * f2 * f2, max_relative = 1e-12);
        assert_relative_eq!(correlate(&s, &[det]).unwrap(), 2.0 * f2, max_relative = 1e-12);
    }

    #[test]
    fn tail_density_is_negligible() {
        let e = env();
        let m = mode(Port::A, 0);
        let mut s = PhotonState::new(1).unwrap();
        s.add_term(Complex64::new(1.0, 0.0), vec![m]).unwrap();
        let peak = number_density(&s, Port::A, SpacePoint::transverse(0.0, 0.0)).unwrap();
        let far = number_density(&s, Port::A, SpacePoint::transverse(8.0 * e.sigma_rho, 0.0)).unwrap();
        assert!(far < 1e-6 * peak);
    }

    #[test]
    fn filter_ports_and_map_modes() {
        let s = eq23(1);
        let swapped = s
            .map_modes(|m| {
                let mut m2 = m.clone();
                m2.port = if m.port == Port::A { Port::C } else { Port::D };
                Ok(vec![(Complex64::new(2.0, 0.0), m2)])
            })
            .unwrap();
        assert_relative_eq!(swapped.norm_sq().unwrap(), 32.0, max_relative = 1e-12);
        assert!(s.filter_ports(|p| p == [Port::A, Port::A]).is_empty());
        assert_eq!(s.filter_ports(|p| p == [Port::A, Port::B]).terms().len(), 2);
    }
}
