//! Bessel–Gauss spectral envelopes and the real-space wave packets they
//! generate.
//!
//! The spectral amplitude is a product of a Gaussian in `k_z` and a
//! Gaussian in the transverse wave number `ρ̃` centred on the Bessel cone.
//! Because the two factors are independent, every mode overlap splits into
//! a longitudinal factor ([`BesselGaussEnvelope::longitudinal_visibility`])
//! and a transverse one built from [`RadialGrid`] profiles.

mod bessel;

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use bessel::{bessel_j, bessel_j_table};

use crate::exec::{self, Exec};
use crate::quadrature::Rule;
use crate::{Error, Result, SPEED_OF_LIGHT};

/// Half-width of the spectral integration windows in units of the Gaussian
/// width parameter (`8/σ` puts the truncated tail below `e^{-64}`).
pub const SPECTRAL_HALF_WIDTH: f64 = 8.0;
/// Transverse quadrature extent in units of `σ_ρ`.
pub const RADIAL_EXTENT: f64 = 6.0;
/// Largest admissible fraction of radial spectral mass below `ρ̃ = 0`.
pub const MAX_CONE_LEAK: f64 = 1e-3;

const GL_DEGREE: usize = 16;

/// Bessel–Gauss spectral envelope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselGaussEnvelope {
    /// Centre wavelength (m).
    pub lambda_c: f64,
    /// Polar angle of the Bessel cone (rad).
    pub theta_c: f64,
    /// Longitudinal width (m).
    pub sigma_z: f64,
    /// Transverse spectral width parameter (m).
    pub sigma_rho: f64,
    norm_correction: f64,
    normalized: bool,
}

impl BesselGaussEnvelope {
    pub fn new(lambda_c: f64, theta_c: f64, sigma_z: f64, sigma_rho: f64) -> Result<Self> {
        for (name, v) in [("lambda_c", lambda_c), ("sigma_z", sigma_z), ("sigma_rho", sigma_rho)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidEnvelope(format!("{name} must be positive, got {v}")));
            }
        }
        if !(theta_c.is_finite() && theta_c > 0.0 && theta_c < PI / 2.0) {
            return Err(Error::InvalidEnvelope(format!(
                "theta_c must lie in (0, π/2), got {theta_c}"
            )));
        }
        Ok(Self {
            lambda_c,
            theta_c,
            sigma_z,
            sigma_rho,
            norm_correction: 1.0,
            normalized: false,
        })
    }

    /// Reference parameters: λ_c = 500 nm, σ_z = σ_ρ = 1000 λ_c, θ_c = 0.01 rad.
    pub fn reference() -> Self {
        let lambda = 500e-9;
        Self::new(lambda, 0.01, 1000.0 * lambda, 1000.0 * lambda).expect("valid reference")
    }

    /// Normalized copy.
    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn k_c(&self) -> f64 {
        TAU / self.lambda_c
    }

    pub fn k_z_c(&self) -> f64 {
        self.k_c() * self.theta_c.cos()
    }

    pub fn rho_tilde_c(&self) -> f64 {
        self.k_c() * self.theta_c.sin()
    }

    pub fn omega_c(&self) -> f64 {
        SPEED_OF_LIGHT * self.k_c()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_correction(&self) -> f64 {
        self.norm_correction
    }

    /// Radius of the central lobe of the Bessel profile (first zero of J_0).
    pub fn main_lobe_radius(&self) -> f64 {
        2.404_825_557_695_773 / self.rho_tilde_c()
    }

    /// Fraction of the radial spectral density `exp(-2σ_ρ²(ρ̃-ρ̃_c)²)` lying at `ρ̃ < 0`.
    pub fn cone_leak(&self) -> f64 {
        0.5 * libm::erfc(std::f64::consts::SQRT_2 * self.sigma_rho * self.rho_tilde_c())
    }

    pub(crate) fn require_normalized(&self) -> Result<()> {
        if self.normalized {
            Ok(())
        } else {
            Err(Error::UnnormalizedEnvelope)
        }
    }

    /// Longitudinal Gaussian factor of the amplitude (normalized in `k_z`).
    fn longitudinal_factor(&self, k_z: f64) -> f64 {
        let d = k_z - self.k_z_c();
        (2.0 * self.sigma_z * self.sigma_z / PI).powf(0.25) * (-(self.sigma_z * d).powi(2)).exp()
    }

    /// Radial Gaussian factor of the amplitude with its nominal prefactor.
    fn radial_factor(&self, rho_tilde: f64) -> f64 {
        let rc = self.rho_tilde_c();
        let d = rho_tilde - rc;
        (2.0 * self.sigma_rho * self.sigma_rho / (PI * rc * rc)).powf(0.25)
            * (-(self.sigma_rho * d).powi(2)).exp()
    }

    pub(crate) fn k_z_rule(&self, panels: usize) -> Rule {
        let half = SPECTRAL_HALF_WIDTH / self.sigma_z;
        Rule::gauss_legendre(self.k_z_c() - half, self.k_z_c() + half, panels, GL_DEGREE)
    }

    pub(crate) fn rho_tilde_rule(&self, panels: usize) -> Rule {
        let half = SPECTRAL_HALF_WIDTH / self.sigma_rho;
        let lo = (self.rho_tilde_c() - half).max(0.0);
        Rule::gauss_legendre(lo, self.rho_tilde_c() + half, panels, GL_DEGREE)
    }

    /// `∫dk_z ∫ρ̃dρ̃ ∫dφ̃ |η̃|²` with the current correction applied.
    fn spectral_norm(&self) -> f64 {
        let c2 = self.norm_correction * self.norm_correction;
        let z = self.k_z_rule(8).integrate(|k| self.longitudinal_factor(k).powi(2));
        let r = self
            .rho_tilde_rule(8)
            .integrate(|q| q * self.radial_factor(q).powi(2));
        c2 * z * r * TAU
    }

    /// Rescales the amplitude so that `∫dk |η̃(k)|² = 1` and returns the
    /// applied scale factor.
    pub fn normalize(&mut self) -> Result<f64> {
        let leak = self.cone_leak();
        if leak > MAX_CONE_LEAK {
            return Err(Error::ConeApproximationInvalid { leak });
        }
        let scale = 1.0 / self.spectral_norm().sqrt();
        self.norm_correction *= scale;
        self.normalized = true;
        Ok(scale)
    }

    /// Spectral amplitude `η̃(k_z, ρ̃)` (azimuth-independent part).
    pub fn spectral_amplitude(&self, k_z: f64, rho_tilde: f64) -> Result<f64> {
        if rho_tilde < 0.0 {
            return Err(Error::NegativeRadialWaveNumber(rho_tilde));
        }
        self.require_normalized()?;
        Ok(self.norm_correction * self.longitudinal_factor(k_z) * self.radial_factor(rho_tilde))
    }

    /// `F(z₀) = ∫dk_z |η̃_z(k_z)|² e^{i k_z z₀}` by quadrature.
    pub fn longitudinal_visibility(&self, z0: f64) -> Complex64 {
        let panels = 8 + (4.0 * z0.abs() / self.sigma_z).ceil() as usize;
        let kzc = self.k_z_c();
        let envelope = self
            .k_z_rule(panels)
            .integrate_complex(|k| {
                let w = self.longitudinal_factor(k).powi(2);
                Complex64::from_polar(w, (k - kzc) * z0)
            });
        Complex64::from_polar(1.0, kzc * z0) * envelope
    }

    /// Closed form of [`Self::longitudinal_visibility`] for the Gaussian
    /// envelope: `e^{i k_{z,c} z₀} e^{-z₀²/(8σ_z²)}`.
    pub fn longitudinal_visibility_analytic(&self, z0: f64) -> Complex64 {
        let s = self.sigma_z;
        Complex64::from_polar((-z0 * z0 / (8.0 * s * s)).exp(), self.k_z_c() * z0)
    }

    /// Longitudinal cross factor `∫dk_z η̃_z,a(k_z) η̃_z,b(k_z) e^{i k_z dz}` of two
    /// envelopes by quadrature. Equals [`Self::longitudinal_visibility`]
    /// when `other == self`.
    pub fn longitudinal_overlap(&self, other: &Self, dz: f64) -> Complex64 {
        let (lo_a, hi_a) = self.k_z_window();
        let (lo_b, hi_b) = other.k_z_window();
        let (lo, hi) = (lo_a.max(lo_b), hi_a.min(hi_b));
        if hi <= lo {
            return Complex64::new(0.0, 0.0);
        }
        let panels = 16 + (4.0 * dz.abs() / self.sigma_z.min(other.sigma_z)).ceil() as usize;
        let kzc = 0.5 * (self.k_z_c() + other.k_z_c());
        let env = Rule::gauss_legendre(lo, hi, panels, GL_DEGREE).integrate_complex(|k| {
            let w = self.longitudinal_factor(k) * other.longitudinal_factor(k);
            Complex64::from_polar(w, (k - kzc) * dz)
        });
        Complex64::from_polar(1.0, kzc * dz) * env
    }

    fn k_z_window(&self) -> (f64, f64) {
        let half = SPECTRAL_HALF_WIDTH / self.sigma_z;
        (self.k_z_c() - half, self.k_z_c() + half)
    }

    /// Real-space wave packet `η_m(ρ, z, t)` evaluated by quadrature of the
    /// spectral integral with exact dispersion `ω = c|k|`.
    pub fn wavepacket(&self, m: i32, rho: f64, z: f64, t: f64) -> Result<Complex64> {
        self.require_normalized()?;
        let n = m.unsigned_abs() as usize;
        let kzc = self.k_z_c();
        let rc = self.rho_tilde_c();
        let carrier = Complex64::from_polar(1.0, kzc * z - self.omega_c() * t);
        let prefactor = i_pow(n) * (self.norm_correction / TAU.sqrt());

        let ct = SPEED_OF_LIGHT * t.abs();
        let z_panels = 8 + (2.5 * (z.abs() + ct) / self.sigma_z).ceil() as usize;
        let r_panels =
            8 + (2.5 * (rho + ct * self.theta_c.sin()) / self.sigma_rho).ceil() as usize;
        let kz_rule = self.k_z_rule(z_panels);
        let rt_rule = self.rho_tilde_rule(r_panels);

        let value = if t == 0.0 {
            let zpart = kz_rule.integrate_complex(|k| {
                Complex64::from_polar(self.longitudinal_factor(k), (k - kzc) * z)
            });
            let rpart = rt_rule.integrate(|q| q * self.radial_factor(q) * bessel_j(n as i32, rho * q));
            zpart * rpart
        } else {
            let bessel: Vec<f64> = rt_rule
                .iter()
                .map(|(q, w)| w * q * self.radial_factor(q) * bessel_j(n as i32, rho * q))
                .collect();
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, wk) in kz_rule.iter() {
                let dk = k - kzc;
                let lz = wk * self.longitudinal_factor(k);
                let mut inner = Complex64::new(0.0, 0.0);
                for (j, (q, _)) in rt_rule.iter().enumerate() {
                    let dq = q - rc;
                    let k_norm_sq_diff = dk * (2.0 * kzc + dk) + dq * (2.0 * rc + dq);
                    let k_abs = (k * k + q * q).sqrt();
                    let d_omega = SPEED_OF_LIGHT * k_norm_sq_diff / (k_abs + self.k_c());
                    inner += Complex64::from_polar(bessel[j], dk * z - d_omega * t);
                }
                acc += inner * lz;
            }
            acc
        };
        Ok(prefactor * carrier * value)
    }

    /// Narrow-cone closed form of the wave packet: the Bessel factor is
    /// taken out of the `ρ̃` integral at the cone centre.
    pub fn wavepacket_closed(&self, m: i32, rho: f64, z: f64, t: f64) -> Result<Complex64> {
        self.require_normalized()?;
        let n = m.unsigned_abs() as usize;
        let (sz, sr) = (self.sigma_z, self.sigma_rho);
        let rc = self.rho_tilde_c();
        let cos = self.theta_c.cos();
        let amp_z = (2.0 * sz * sz / PI).powf(0.25) * PI.sqrt() / sz;
        let amp_r = (2.0 * sr * sr / (PI * rc * rc)).powf(0.25) * rc * PI.sqrt() / sr;
        let arg = SPEED_OF_LIGHT * t - z * cos;
        let gauss = (-(arg * arg) / (4.0 * sz * sz * cos * cos)).exp();
        let magnitude =
            self.norm_correction / TAU.sqrt() * amp_z * amp_r * bessel_j(n as i32, rho * rc) * gauss;
        Ok(i_pow(n) * Complex64::from_polar(magnitude, self.k_z_c() * z - self.omega_c() * t))
    }

    /// Normalized transverse profile `H_|m|(ρ)` with `∫ρdρ H² = 1`.
    pub fn transverse_profile(&self, m: i32, rho: f64) -> f64 {
        let n = m.unsigned_abs() as i32;
        let panels = 8 + (2.5 * rho / self.sigma_rho).ceil() as usize;
        let rule = self.rho_tilde_rule(panels);
        let norm = self
            .rho_tilde_rule(8)
            .integrate(|q| q * self.radial_factor(q).powi(2))
            .sqrt();
        rule.integrate(|q| q * self.radial_factor(q) * bessel_j(n, rho * q)) / norm
    }

    fn cache_key(&self) -> [u64; 5] {
        [
            self.lambda_c.to_bits(),
            self.theta_c.to_bits(),
            self.sigma_z.to_bits(),
            self.sigma_rho.to_bits(),
            self.norm_correction.to_bits(),
        ]
    }
}

/// `i^n` for non-negative `n`.
pub(crate) fn i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Gauss–Legendre grid on `[0, ρ_max]` used for transverse overlap integrals.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    pub rule: Rule,
    pub rho_max: f64,
    panels: usize,
    degree: usize,
}

impl RadialGrid {
    /// Grid covering all given envelopes: extent `6·max σ_ρ`, one panel per
    /// half period of the fastest Bessel oscillation.
    pub fn for_envelopes(envs: &[&BesselGaussEnvelope]) -> Self {
        Self::with_refinement(envs, 1)
    }

    /// Same as [`Self::for_envelopes`] with `refine` times more panels.
    pub fn with_refinement(envs: &[&BesselGaussEnvelope], refine: usize) -> Self {
        let sigma = envs.iter().map(|e| e.sigma_rho).fold(0.0, f64::max);
        let q_max = envs
            .iter()
            .map(|e| e.rho_tilde_c() + SPECTRAL_HALF_WIDTH / e.sigma_rho)
            .fold(0.0, f64::max);
        let rho_max = RADIAL_EXTENT * sigma;
        let panels = ((rho_max * q_max / PI).ceil() as usize).max(16) * refine.max(1);
        let degree = 12;
        Self {
            rule: Rule::gauss_legendre(0.0, rho_max, panels, degree),
            rho_max,
            panels,
            degree,
        }
    }

    fn key(&self) -> (u64, usize, usize) {
        (self.rho_max.to_bits(), self.panels, self.degree)
    }

    /// Profile `H_|m|` of `env` sampled at the grid nodes; cached process-wide.
    pub fn profile(&self, env: &BesselGaussEnvelope, m: i32) -> Arc<Vec<f64>> {
        type Key = ([u64; 5], u32, (u64, usize, usize));
        static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<f64>>>>> = OnceLock::new();
        let key = (env.cache_key(), m.unsigned_abs(), self.key());
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(hit) = cache.lock().expect("profile cache poisoned").get(&key) {
            return hit.clone();
        }
        let nodes = &self.rule.nodes;
        let values = exec::map_indexed(Exec::default(), nodes.len(), |i| {
            env.transverse_profile(m, nodes[i])
        });
        let values = Arc::new(values);
        cache
            .lock()
            .expect("profile cache poisoned")
            .insert(key, values.clone());
        values
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn env() -> BesselGaussEnvelope {
        BesselGaussEnvelope::reference().normalized().unwrap()
    }

    #[test]
    fn normalization_is_idempotent() {
        let mut e = BesselGaussEnvelope::reference();
        let first = e.normalize().unwrap();
        assert!(first.is_finite() && first > 0.0);
        let second = e.normalize().unwrap();
        assert_relative_eq!(second, 1.0, max_relative = 1e-13);
    }

    #[test]
    fn normalized_amplitude_has_unit_norm() {
        // independent 2D product rule on a wider window
        let e = env();
        let hz = 9.0 / e.sigma_z;
        let hr = 9.0 / e.sigma_rho;
        let kz = Rule::gauss_legendre(e.k_z_c() - hz, e.k_z_c() + hz, 24, 10);
        let rt = Rule::gauss_legendre(e.rho_tilde_c() - hr, e.rho_tilde_c() + hr, 24, 10);
        let mut total = 0.0;
        for (k, wk) in kz.iter() {
            for (q, wq) in rt.iter() {
                total += wk * wq * q * e.spectral_amplitude(k, q).unwrap().powi(2);
            }
        }
        assert_relative_eq!(total * TAU, 1.0, max_relative = 1e-6);
    }

    #[test]
    fn peak_amplitude_matches_gaussian_prefactors() {
        let e = env();
        let rc = e.rho_tilde_c();
        let expected = (2.0 * e.sigma_z.powi(2) / PI).powf(0.25)
            * (2.0 * e.sigma_rho.powi(2) / (PI * rc * rc)).powf(0.25)
            * e.norm_correction();
        let got = e.spectral_amplitude(e.k_z_c(), rc).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-14);
        let off = e.spectral_amplitude(e.k_z_c() + 3.0 / e.sigma_z, rc).unwrap();
        assert_relative_eq!(off, expected * (-9.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn negative_rho_tilde_rejected() {
        assert!(matches!(
            env().spectral_amplitude(1.0, -1.0),
            Err(Error::NegativeRadialWaveNumber(_))
        ));
    }

    #[test]
    fn unnormalized_envelope_rejected() {
        let e = BesselGaussEnvelope::reference();
        assert!(matches!(e.spectral_amplitude(1.0, 1.0), Err(Error::UnnormalizedEnvelope)));
        assert!(matches!(e.wavepacket(0, 0.0, 0.0, 0.0), Err(Error::UnnormalizedEnvelope)));
    }

    #[test]
    fn leaky_cone_rejected() {
        // 1/σ_ρ comparable to the cone radius
        let lambda = 500e-9;
        let mut e = BesselGaussEnvelope::new(lambda, 0.01, 1000.0 * lambda, 5.0 * lambda).unwrap();
        assert!(matches!(e.normalize(), Err(Error::ConeApproximationInvalid { .. })));
    }

    #[test]
    fn doubling_sigma_z_scale_matches_1d_norm_ratio() {
        let lambda = 500e-9;
        let mut a = BesselGaussEnvelope::new(lambda, 0.01, 1000.0 * lambda, 1000.0 * lambda).unwrap();
        let mut b = BesselGaussEnvelope::new(lambda, 0.01, 2000.0 * lambda, 1000.0 * lambda).unwrap();
        let sa = a.normalize().unwrap();
        let sb = b.normalize().unwrap();
        // 1D oracle: ∫ (2σ²/π)^{1/2} e^{-2σ²x²} dx by midpoint on a wide window
        let norm_1d = |s: f64| {
            Rule::midpoint(-10.0 / s, 10.0 / s, 20_000)
                .integrate(|x| (2.0 * s * s / PI).sqrt() * (-2.0 * s * s * x * x).exp())
        };
        let ratio = (norm_1d(1000.0 * lambda) / norm_1d(2000.0 * lambda)).sqrt();
        assert_relative_eq!(sb / sa, ratio, max_relative = 1e-9);
    }

    #[test]
    fn visibility_matches_gaussian_moment() {
        let e = env();
        assert_relative_eq!(e.longitudinal_visibility(0.0).re, 1.0, max_relative = 1e-12);
        for i in -8..=8 {
            let z0 = 0.5 * i as f64 * e.sigma_z;
            let q = e.longitudinal_visibility(z0);
            let a = e.longitudinal_visibility_analytic(z0);
            assert!((q - a).norm() <= 1e-8, "z0={z0}: {q} vs {a}");
        }
        let two_sigma = e.longitudinal_visibility(2.0 * e.sigma_z).norm();
        assert_relative_eq!(two_sigma, (-0.5f64).exp(), max_relative = 1e-9);
        assert_relative_eq!(two_sigma, 0.60653, max_relative = 1e-5);
    }

    #[test]
    fn visibility_conjugate_symmetry() {
        let e = env();
        for i in 1..6 {
            let z0 = 0.7 * i as f64 * e.sigma_z;
            let plus = e.longitudinal_visibility(z0);
            let minus = e.longitudinal_visibility(-z0);
            assert_relative_eq!(plus.norm(), minus.norm(), max_relative = 1e-10);
            assert!((plus - minus.conj()).norm() < 1e-9);
        }
    }

    #[test]
    fn wavepacket_center_matches_closed_form() {
        let e = env();
        let q = e.wavepacket(0, 0.0, 0.0, 0.0).unwrap();
        let c = e.wavepacket_closed(0, 0.0, 0.0, 0.0).unwrap();
        assert!((q - c).norm() / c.norm() < 1e-2);
        // magnitude of the closed form: √(ρ̃_c/(σ_zσ_ρ))·correction
        let expected = (e.rho_tilde_c() / (e.sigma_z * e.sigma_rho)).sqrt() * e.norm_correction();
        assert_relative_eq!(c.norm(), expected, max_relative = 1e-12);
    }

    #[test]
    fn wavepacket_independent_of_oam_sign() {
        let e = env();
        for &(rho, z, t) in &[(3e-6, 0.0, 0.0), (2e-5, 1e-4, 0.0), (1e-4, -3e-4, 2e-13)] {
            for m in 1..4 {
                let a = e.wavepacket(m, rho, z, t).unwrap();
                let b = e.wavepacket(-m, rho, z, t).unwrap();
                assert_relative_eq!(a.norm(), b.norm(), max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn wavepacket_longitudinal_tail() {
        let e = env();
        let center = e.wavepacket(0, 0.0, 0.0, 0.0).unwrap().norm();
        let z = 6.0 * e.sigma_z / e.theta_c.cos();
        let tail = e.wavepacket(0, 0.0, z, 0.0).unwrap().norm();
        assert!(tail <= (-9.0f64).exp() * center);
    }

    #[test]
    fn wavepacket_time_evolution_matches_closed_form_near_axis() {
        let e = env();
        let t = 0.3 * e.sigma_z / SPEED_OF_LIGHT;
        let z = SPEED_OF_LIGHT * t / e.theta_c.cos();
        let q = e.wavepacket(0, 0.0, z, t).unwrap();
        let c = e.wavepacket_closed(0, 0.0, z, t).unwrap();
        assert!((q.norm() - c.norm()).abs() / c.norm() < 1e-2);
    }

    #[test]
    fn transverse_profile_is_normalized() {
        let e = env();
        let grid = RadialGrid::for_envelopes(&[&e]);
        for m in [0, 1, 3] {
            let h = grid.profile(&e, m);
            let norm: f64 = grid.rule.iter().zip(h.iter()).map(|((r, w), v)| w * r * v * v).sum();
            assert_relative_eq!(norm, 1.0, max_relative = 1e-6);
        }
    }

    #[test]
    fn radial_quadrature_converges() {
        let e = env();
        let coarse = RadialGrid::with_refinement(&[&e], 1);
        let fine = RadialGrid::with_refinement(&[&e], 2);
        let cross = |g: &RadialGrid| {
            let a = g.profile(&e, 0);
            let b = g.profile(&e, 2);
            g.rule.iter().zip(a.iter().zip(b.iter())).map(|((r, w), (x, y))| w * r * x * y).sum::<f64>()
        };
        assert!((cross(&coarse) - cross(&fine)).abs() <= 1e-6);
    }

    #[test]
    fn wavepacket_quadrature_converges() {
        let e = env();
        let (rho, z) = (4e-5, 2e-4);
        let base = e.wavepacket(1, rho, z, 0.0).unwrap();
        // refined rules: integrate directly with doubled panels
        let n = 1;
        let kzc = e.k_z_c();
        let zpart = e.k_z_rule(2 * (8 + (2.5 * z / e.sigma_z).ceil() as usize)).integrate_complex(|k| {
            Complex64::from_polar(e.longitudinal_factor(k), (k - kzc) * z)
        });
        let rpart = e
            .rho_tilde_rule(2 * (8 + (2.5 * rho / e.sigma_rho).ceil() as usize))
            .integrate(|q| q * e.radial_factor(q) * bessel_j(n, rho * q));
        let refined = i_pow(1) * (e.norm_correction() / TAU.sqrt())
            * Complex64::from_polar(1.0, kzc * z)
            * zpart
            * rpart;
        assert!((base - refined).norm() <= 1e-6 * base.norm());
    }
}
