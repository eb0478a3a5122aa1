//! Single-photon mode overlaps `⟨a|b⟩ = ∫d³r a*(r) b(r)`.
//!
//! At `t = 0` every mode factorizes into a longitudinal part, a radial
//! profile `H_|m|(ρ)` and an azimuthal phase. The default path exploits
//! that: the longitudinal factor is the Gaussian moment, the radial factor
//! is one for equal `|m|` on a shared envelope, and the azimuthal integral
//! of piecewise-affine mask phases is done exactly. Radius-dependent
//! (image) masks and explicit requests go through a tensor quadrature on
//! the transverse plane instead.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::SinglePhotonMode;
use crate::masks::{angular_integral, sum_profiles, Segment};
use crate::pulses::{i_pow, RadialGrid};
use crate::Result;

/// Node counts for the brute-force transverse quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Uniform midpoint nodes in `φ`.
    pub angular_nodes: usize,
    /// Panel multiplier for the radial Gauss–Legendre grid.
    pub radial_refinement: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { angular_nodes: 1024, radial_refinement: 1 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum OverlapMethod {
    /// Separable evaluation when all masks are angle-only, quadrature otherwise.
    #[default]
    Auto,
    /// Always integrate the transverse plane numerically.
    Quadrature(QuadratureSpec),
}

pub fn mode_overlap(a: &SinglePhotonMode, b: &SinglePhotonMode) -> Result<Complex64> {
    mode_overlap_with(a, b, &OverlapMethod::Auto)
}

pub fn mode_overlap_with(a: &SinglePhotonMode, b: &SinglePhotonMode, method: &OverlapMethod) -> Result<Complex64> {
    a.envelope.require_normalized()?;
    b.envelope.require_normalized()?;
    if a.port != b.port || a.pol != b.pol {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let value = match method {
        OverlapMethod::Auto => match (a.mask.angular_profile(), b.mask.angular_profile()) {
            (Some(pa), Some(pb)) => longitudinal(a, b) * separable_transverse(a, b, &pa, &pb),
            _ => {
                longitudinal_quadrature(a, b)
                    * transverse_quadrature(a, b, false, &QuadratureSpec::default())
            }
        },
        OverlapMethod::Quadrature(spec) => {
            longitudinal_quadrature(a, b) * transverse_quadrature(a, b, false, spec)
        }
    };
    Ok(value)
}

/// `⟨a|R b⟩` where `(R b)(r) = b(r̄)`, compared irrespective of port labels,
/// by brute-force quadrature.
pub fn reflected_overlap_quadrature(
    a: &SinglePhotonMode,
    b: &SinglePhotonMode,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    a.envelope.require_normalized()?;
    b.envelope.require_normalized()?;
    if a.pol != b.pol {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(longitudinal_quadrature(a, b) * transverse_quadrature(a, b, true, spec))
}

fn longitudinal(a: &SinglePhotonMode, b: &SinglePhotonMode) -> Complex64 {
    let dz = a.delay - b.delay;
    if a.envelope == b.envelope {
        a.envelope.longitudinal_visibility_analytic(dz)
    } else {
        a.envelope.longitudinal_overlap(&b.envelope, dz)
    }
}

fn longitudinal_quadrature(a: &SinglePhotonMode, b: &SinglePhotonMode) -> Complex64 {
    a.envelope.longitudinal_overlap(&b.envelope, a.delay - b.delay)
}

fn separable_transverse(a: &SinglePhotonMode, b: &SinglePhotonMode, pa: &[Segment], pb: &[Segment]) -> Complex64 {
    let (ma, mb) = (a.oam.unsigned_abs() as usize, b.oam.unsigned_abs() as usize);
    let radial = if ma == mb && a.envelope == b.envelope {
        1.0
    } else {
        let grid = RadialGrid::for_envelopes(&[&a.envelope, &b.envelope]);
        let ha = grid.profile(&a.envelope, a.oam);
        let hb = grid.profile(&b.envelope, b.oam);
        grid.rule
            .iter()
            .zip(ha.iter().zip(hb.iter()))
            .map(|((r, w), (x, y))| w * r * x * y)
            .sum()
    };
    if radial == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let neg_a: Vec<Segment> = pa
        .iter()
        .map(|s| Segment { c: -s.c, k: -s.k, ..*s })
        .collect();
    let diff = sum_profiles(&[neg_a, pb.to_vec()]);
    let angular = angular_integral(&diff, f64::from(b.oam - a.oam));
    i_pow(mb) * i_pow(ma).conj() * radial * angular
}

/// `(1/2π) ∫ρdρ∫dφ conj(a_⊥) b_⊥`, optionally with `b` evaluated at `r̄`.
fn transverse_quadrature(a: &SinglePhotonMode, b: &SinglePhotonMode, reflect_b: bool, spec: &QuadratureSpec) -> Complex64 {
    let grid = RadialGrid::with_refinement(&[&a.envelope, &b.envelope], spec.radial_refinement);
    let ha = grid.profile(&a.envelope, a.oam);
    let hb = grid.profile(&b.envelope, b.oam);
    let n_phi = spec.angular_nodes.max(1);
    let dphi = TAU / n_phi as f64;
    let trig: Vec<(f64, f64, f64)> = (0..n_phi)
        .map(|j| {
            let phi = dphi * (j as f64 + 0.5);
            (phi, phi.cos(), phi.sin())
        })
        .collect();
    let (fa, fb) = (f64::from(a.oam), f64::from(b.oam));
    let mut total = Complex64::new(0.0, 0.0);
    for (i, (rho, w)) in grid.rule.iter().enumerate() {
        let amp = w * rho * ha[i] * hb[i];
        if amp == 0.0 {
            continue;
        }
        let mut ring = Complex64::new(0.0, 0.0);
        for &(phi, c, s) in &trig {
            let (x, y) = (rho * c, rho * s);
            let pa = fa * phi + a.mask.evaluate(x, y);
            let pb = if reflect_b {
                -fb * phi + b.mask.evaluate(x, -y)
            } else {
                fb * phi + b.mask.evaluate(x, y)
            };
            ring += Complex64::from_polar(1.0, pb - pa);
        }
        total += ring * amp;
    }
    let ma = a.oam.unsigned_abs() as usize;
    let mb = b.oam.unsigned_abs() as usize;
    i_pow(mb) * i_pow(ma).conj() * total * (dphi / TAU)
}
