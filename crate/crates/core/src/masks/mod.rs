//! Transverse phase masks `Φ(x, y)`.
//!
//! Masks are small expression trees. Angle-only masks (everything except
//! [`PhaseMask::Image`]) also expose an exact piecewise-affine description
//! of `Φ(φ)` through [`PhaseMask::angular_profile`], which lets overlap
//! integrals over the azimuth be done in closed form.

mod pgm;

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use pgm::Raster;

use crate::{Error, Result};

/// Affine pixel-to-phase rule: `phase = offset + gain · v / maxval`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseMapping {
    pub gain: f64,
    pub offset: f64,
}

impl Default for PhaseMapping {
    fn default() -> Self {
        Self { gain: PI, offset: 0.0 }
    }
}

impl PhaseMapping {
    pub fn phase(&self, v: u16, maxval: u16) -> f64 {
        self.offset + self.gain * f64::from(v) / f64::from(maxval)
    }
}

/// Raster-backed mask. The image centre sits on the optical axis and the
/// raster spans `physical_width` metres horizontally with square pixels.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageMask {
    pub raster: Raster,
    pub physical_width: f64,
    pub mapping: PhaseMapping,
}

impl ImageMask {
    pub fn pitch(&self) -> f64 {
        self.physical_width / self.raster.width as f64
    }

    /// Nearest-neighbour lookup; zero phase outside the raster.
    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        let p = self.pitch();
        let col = (x / p + self.raster.width as f64 / 2.0).floor();
        let row = (self.raster.height as f64 / 2.0 - y / p).floor();
        if col < 0.0 || row < 0.0 {
            return 0.0;
        }
        let (col, row) = (col as usize, row as usize);
        if col >= self.raster.width || row >= self.raster.height {
            return 0.0;
        }
        self.mapping.phase(self.raster.get(col, row), self.raster.maxval)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhaseMask {
    Constant(f64),
    /// `m·φ` with `φ = atan2(y, x)`.
    Helical(i32),
    /// `π` on `[(2j−2)π/m, (2j−1)π/m)`, `0` on `[(2j−1)π/m, 2jπ/m)`.
    SectorA(u32),
    /// `0` on `[(2j−2)π/m+φ₀, (2j−1)π/m+φ₀)`, `π` on
    /// `[(2j−1)π/m+φ₀, 2jπ/m+φ₀)`, `j = 1..m`, with `φ ∈ [0, 2π)`.
    /// Azimuths below `φ₀` belong to no interval and carry zero phase.
    SectorB { m: u32, phi0: f64 },
    Image(Arc<ImageMask>),
    Sum(Vec<PhaseMask>),
    /// `inner(x, −y)`.
    Mirror(Box<PhaseMask>),
    Negate(Box<PhaseMask>),
}

impl Default for PhaseMask {
    fn default() -> Self {
        Self::none()
    }
}

/// One piece of an angular profile: `Φ(φ) = c + k·φ` on `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub c: f64,
    pub k: f64,
}

impl Segment {
    fn at(&self, phi: f64) -> f64 {
        self.c + self.k * phi
    }
}

/// Azimuth folded into `[0, 2π)`.
pub fn azimuth(x: f64, y: f64) -> f64 {
    let phi = y.atan2(x);
    if phi < 0.0 {
        phi + TAU
    } else {
        phi
    }
}

impl PhaseMask {
    pub fn none() -> Self {
        Self::Constant(0.0)
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, Self::Constant(c) if *c == 0.0)
    }

    pub fn helical(m: i32) -> Self {
        Self::Helical(m)
    }

    pub fn sector_a(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::OutOfRange("sector count m must be positive".into()));
        }
        Ok(Self::SectorA(m))
    }

    pub fn sector_b(m: u32, phi0: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::OutOfRange("sector count m must be positive".into()));
        }
        if !(phi0.is_finite() && (0.0..TAU).contains(&phi0)) {
            return Err(Error::OutOfRange(format!("sector offset φ0 = {phi0} outside [0, 2π)")));
        }
        Ok(Self::SectorB { m, phi0 })
    }

    /// Mask built from a grayscale raster. A uniform raster collapses to
    /// a constant phase.
    pub fn from_image(raster: Raster, physical_width: f64, mapping: PhaseMapping) -> Result<Self> {
        if !(physical_width.is_finite() && physical_width > 0.0) {
            return Err(Error::OutOfRange(format!("image width {physical_width} must be positive")));
        }
        if let Some(&first) = raster.data.first() {
            if raster.data.iter().all(|&v| v == first) {
                return Ok(Self::Constant(mapping.phase(first, raster.maxval)));
            }
        }
        Ok(Self::Image(Arc::new(ImageMask { raster, physical_width, mapping })))
    }

    /// `Φ(x, −y)`; mirroring twice returns the original expression.
    pub fn mirror(self) -> Self {
        match self {
            Self::Mirror(inner) => *inner,
            c @ Self::Constant(_) => c,
            other => Self::Mirror(Box::new(other)),
        }
    }

    /// `−Φ`; negating twice returns the original expression.
    pub fn negate(self) -> Self {
        match self {
            Self::Negate(inner) => *inner,
            Self::Constant(c) => Self::Constant(-c),
            other => Self::Negate(Box::new(other)),
        }
    }

    /// Phases add; trivial masks are absorbed.
    pub fn compose(self, other: Self) -> Self {
        match (self, other) {
            (a, b) if b.is_trivial() => a,
            (a, b) if a.is_trivial() => b,
            (Self::Constant(a), Self::Constant(b)) => Self::Constant(a + b),
            (Self::Sum(mut xs), Self::Sum(ys)) => {
                xs.extend(ys);
                Self::Sum(xs)
            }
            (Self::Sum(mut xs), b) => {
                xs.push(b);
                Self::Sum(xs)
            }
            (a, b) => Self::Sum(vec![a, b]),
        }
    }

    /// Partner mask with `Φ_B(r̄) = −Φ_A(r)`.
    pub fn conjugate_pair(&self) -> Self {
        self.clone().negate().mirror()
    }

    pub fn evaluate(&self, x: f64, y: f64) -> f64 {
        match self {
            Self::Constant(c) => *c,
            Self::Helical(m) => f64::from(*m) * y.atan2(x),
            Self::SectorA(m) => {
                let idx = (azimuth(x, y) * f64::from(*m) / PI).floor() as i64;
                if idx % 2 == 0 {
                    PI
                } else {
                    0.0
                }
            }
            Self::SectorB { m, phi0 } => {
                let psi = azimuth(x, y) - phi0;
                if psi < 0.0 {
                    return 0.0;
                }
                let idx = (psi * f64::from(*m) / PI).floor() as i64;
                if idx % 2 == 0 {
                    0.0
                } else {
                    PI
                }
            }
            Self::Image(img) => img.evaluate(x, y),
            Self::Sum(parts) => parts.iter().map(|p| p.evaluate(x, y)).sum(),
            Self::Mirror(inner) => inner.evaluate(x, -y),
            Self::Negate(inner) => -inner.evaluate(x, y),
        }
    }

    pub fn phasor(&self, x: f64, y: f64) -> Complex64 {
        if self.is_trivial() {
            return Complex64::new(1.0, 0.0);
        }
        Complex64::from_polar(1.0, self.evaluate(x, y))
    }

    /// Whether the mask depends on the azimuth only.
    pub fn is_angular(&self) -> bool {
        match self {
            Self::Image(_) => false,
            Self::Sum(parts) => parts.iter().all(Self::is_angular),
            Self::Mirror(inner) | Self::Negate(inner) => inner.is_angular(),
            _ => true,
        }
    }

    /// Exact piecewise-affine description of `Φ(φ)` on `[0, 2π)`, or `None`
    /// when the mask depends on the radius.
    pub fn angular_profile(&self) -> Option<Vec<Segment>> {
        let seg = |start, end, c, k| Segment { start, end, c, k };
        Some(match self {
            Self::Constant(c) => vec![seg(0.0, TAU, *c, 0.0)],
            Self::Helical(m) => {
                // atan2 branch: φ on [0, π], φ − 2π beyond
                let m = f64::from(*m);
                vec![seg(0.0, PI, 0.0, m), seg(PI, TAU, -TAU * m, m)]
            }
            Self::SectorA(m) => {
                let w = PI / f64::from(*m);
                (0..2 * *m)
                    .map(|j| {
                        let v = if j % 2 == 0 { PI } else { 0.0 };
                        let end = if j + 1 == 2 * *m { TAU } else { w * f64::from(j + 1) };
                        seg(w * f64::from(j), end, v, 0.0)
                    })
                    .collect()
            }
            Self::SectorB { m, phi0 } => {
                let w = PI / f64::from(*m);
                let mut out = Vec::new();
                if *phi0 > 0.0 {
                    out.push(seg(0.0, *phi0, 0.0, 0.0));
                }
                let mut j = 0u32;
                loop {
                    let start = phi0 + w * f64::from(j);
                    if start >= TAU {
                        break;
                    }
                    let end = (phi0 + w * f64::from(j + 1)).min(TAU);
                    let v = if j.is_multiple_of(2) { 0.0 } else { PI };
                    out.push(seg(start, end, v, 0.0));
                    j += 1;
                }
                out
            }
            Self::Image(_) => return None,
            Self::Sum(parts) => {
                let profiles = parts
                    .iter()
                    .map(Self::angular_profile)
                    .collect::<Option<Vec<_>>>()?;
                sum_profiles(&profiles)
            }
            Self::Mirror(inner) => {
                // φ ↦ 2π − φ; c + kφ becomes (c + 2πk) − kφ
                let mut out: Vec<Segment> = inner
                    .angular_profile()?
                    .into_iter()
                    .map(|s| seg(TAU - s.end, TAU - s.start, s.c + TAU * s.k, -s.k))
                    .collect();
                out.reverse();
                out
            }
            Self::Negate(inner) => inner
                .angular_profile()?
                .into_iter()
                .map(|s| seg(s.start, s.end, -s.c, -s.k))
                .collect(),
        })
    }
}

/// Pointwise sum of profiles on the union of their breakpoints.
pub fn sum_profiles(profiles: &[Vec<Segment>]) -> Vec<Segment> {
    let mut cuts: Vec<f64> = profiles
        .iter()
        .flat_map(|p| p.iter().flat_map(|s| [s.start, s.end]))
        .chain([0.0, TAU])
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let (mut c, mut k) = (0.0, 0.0);
        for p in profiles {
            if let Some(s) = p.iter().find(|s| s.start <= mid && mid < s.end) {
                c += s.c;
                k += s.k;
            }
        }
        out.push(Segment { start: a, end: b, c, k });
    }
    out
}

/// `(1/2π) ∫₀^{2π} e^{i(q φ + Φ(φ))} dφ` evaluated exactly segment by segment.
pub fn angular_integral(profile: &[Segment], q: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for s in profile {
        let kk = s.k + q;
        let piece = if kk == 0.0 {
            Complex64::from_polar(s.end - s.start, s.c)
        } else {
            let a = Complex64::from_polar(1.0, s.at(s.end) + q * s.end);
            let b = Complex64::from_polar(1.0, s.at(s.start) + q * s.start);
            (a - b) / Complex64::new(0.0, kk)
        };
        acc += piece;
    }
    acc / TAU
}

/// Renders a mask onto a `size × size` raster spanning `physical_width`,
/// inverting `mapping` after folding phases into `[offset, offset + gain)`.
pub fn render(mask: &PhaseMask, size: usize, physical_width: f64, mapping: PhaseMapping) -> Raster {
    let mut raster = Raster::new(size, size, 255);
    let pitch = physical_width / size as f64;
    for row in 0..size {
        let y = (size as f64 / 2.0 - row as f64 - 0.5) * pitch;
        for col in 0..size {
            let x = (col as f64 + 0.5 - size as f64 / 2.0) * pitch;
            let phase = mask.evaluate(x, y) - mapping.offset;
            let folded = if mapping.gain.abs() >= TAU - 1e-12 {
                phase.rem_euclid(TAU)
            } else {
                phase.rem_euclid(TAU).min(mapping.gain.abs())
            };
            let v = (255.0 * folded / mapping.gain.abs()).round().clamp(0.0, 255.0);
            raster.set(col, row, v as u16);
        }
    }
    raster
}

/// Binary Taiji (yin-yang) symbol of diameter `size` pixels: 255 on the
/// dark half, 0 elsewhere (including outside the disc).
pub fn taiji(size: usize) -> Raster {
    let mut raster = Raster::new(size, size, 255);
    let r = size as f64 / 2.0;
    for row in 0..size {
        let y = r - row as f64 - 0.5;
        for col in 0..size {
            let x = col as f64 + 0.5 - r;
            let d2 = x * x + y * y;
            if d2 > r * r {
                continue;
            }
            let upper = (x * x + (y - r / 2.0).powi(2)).sqrt();
            let lower = (x * x + (y + r / 2.0).powi(2)).sqrt();
            let mut dark = if upper < r / 2.0 {
                false
            } else if lower < r / 2.0 {
                true
            } else {
                x < 0.0
            };
            if upper < r / 8.0 {
                dark = true;
            } else if lower < r / 8.0 {
                dark = false;
            }
            if dark {
                raster.set(col, row, 255);
            }
        }
    }
    raster
}

/// Parses `helical:m | sector-a:m | sector-b:m:phi0 | image:path:width | none`.
/// Image widths are in metres.
pub fn parse_spec(spec: &str) -> Result<PhaseMask> {
    parse_spec_with_unit(spec, 1.0)
}

/// As [`parse_spec`], with image widths given in multiples of `unit` metres.
pub fn parse_spec_with_unit(spec: &str, unit: f64) -> Result<PhaseMask> {
    let bad = || Error::MaskSpec(spec.to_string());
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["none"] => Ok(PhaseMask::none()),
        ["helical", m] => Ok(PhaseMask::Helical(m.parse().map_err(|_| bad())?)),
        ["sector-a", m] => PhaseMask::sector_a(m.parse().map_err(|_| bad())?),
        ["sector-b", m, phi0] => {
            PhaseMask::sector_b(m.parse().map_err(|_| bad())?, phi0.parse().map_err(|_| bad())?)
        }
        ["image", rest @ ..] if rest.len() >= 2 => {
            // the path itself may contain ':'
            let width: f64 = rest[rest.len() - 1].parse().map_err(|_| bad())?;
            let path = rest[..rest.len() - 1].join(":");
            let raster = Raster::read(std::path::Path::new(&path))?;
            PhaseMask::from_image(raster, width * unit, PhaseMapping::default())
        }
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn at_angle(phi: f64) -> (f64, f64) {
        (phi.cos(), phi.sin())
    }

    #[test]
    fn helical_value() {
        let (x, y) = at_angle(PI / 4.0);
        assert_relative_eq!(PhaseMask::Helical(2).evaluate(x, y), PI / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn sector_values() {
        let (x, y) = at_angle(0.1);
        assert_eq!(PhaseMask::SectorA(2).evaluate(x, y), PI);
        let (x, y) = at_angle(PI / 8.0 + 0.01);
        assert_eq!(PhaseMask::sector_b(2, PI / 8.0).unwrap().evaluate(x, y), 0.0);
        let (x, y) = at_angle(PI / 8.0 + PI / 2.0 + 0.01);
        assert_eq!(PhaseMask::sector_b(2, PI / 8.0).unwrap().evaluate(x, y), PI);
        // azimuths below φ0 carry no phase
        let (x, y) = at_angle(0.05);
        assert_eq!(PhaseMask::sector_b(2, PI / 8.0).unwrap().evaluate(x, y), 0.0);
    }

    #[test]
    fn sector_a_has_two_m_jumps_per_turn() {
        for m in 1..6u32 {
            let mask = PhaseMask::SectorA(m);
            let n = 20_000;
            let vals: Vec<f64> = (0..n)
                .map(|i| {
                    let (x, y) = at_angle(TAU * (i as f64 + 0.5) / n as f64);
                    mask.evaluate(x, y)
                })
                .collect();
            let jumps = (0..n).filter(|&i| vals[i] != vals[(i + 1) % n]).count();
            assert_eq!(jumps, 2 * m as usize);
            assert!(vals.iter().all(|&v| v == 0.0 || v == PI));
        }
    }

    #[test]
    fn conjugate_pair_of_helical_and_constant() {
        let b = PhaseMask::Helical(3).conjugate_pair();
        for i in 0..50 {
            let phi = -3.0 + 0.117 * i as f64;
            let (x, y) = at_angle(phi);
            let expected = 3.0 * y.atan2(x);
            let diff = (b.evaluate(x, y) - expected).rem_euclid(TAU);
            assert!(diff.min(TAU - diff) < 1e-12);
        }
        assert_eq!(PhaseMask::Constant(0.7).conjugate_pair(), PhaseMask::Constant(-0.7));
    }

    #[test]
    fn profiles_match_pointwise_evaluation() {
        let masks = [
            PhaseMask::Helical(2),
            PhaseMask::SectorA(3),
            PhaseMask::sector_b(4, PI / 8.0).unwrap(),
            PhaseMask::SectorA(2).compose(PhaseMask::Helical(-1)).mirror(),
            PhaseMask::sector_b(2, 0.3).unwrap().conjugate_pair().compose(PhaseMask::Constant(0.2)),
        ];
        for mask in &masks {
            let prof = mask.angular_profile().unwrap();
            for i in 0..997 {
                let phi = TAU * (i as f64 + 0.31) / 997.0;
                let (x, y) = at_angle(phi);
                let s = prof.iter().find(|s| s.start <= phi && phi < s.end).unwrap();
                let d = (s.at(phi) - mask.evaluate(x, y)).rem_euclid(TAU);
                assert!(d.min(TAU - d) < 1e-9, "{mask:?} at {phi}");
            }
        }
    }

    #[test]
    fn exact_angular_integral_matches_fine_midpoint() {
        let prof = PhaseMask::sector_b(2, 0.4)
            .unwrap()
            .compose(PhaseMask::Helical(1))
            .angular_profile()
            .unwrap();
        for q in [-2.0, 0.0, 1.0, 3.0] {
            let exact = angular_integral(&prof, q);
            let n = 1 << 20;
            let mut mid = Complex64::new(0.0, 0.0);
            for i in 0..n {
                let phi = TAU * (i as f64 + 0.5) / n as f64;
                let s = prof.iter().find(|s| s.start <= phi && phi < s.end).unwrap();
                mid += Complex64::from_polar(1.0, q * phi + s.at(phi));
            }
            mid /= n as f64;
            assert!((exact - mid).norm() < 1e-5);
        }
        // orthogonality of helical harmonics
        let flat = PhaseMask::none().angular_profile().unwrap();
        assert!(angular_integral(&flat, 1.0).norm() < 1e-15);
        assert_relative_eq!(angular_integral(&flat, 0.0).re, 1.0);
    }

    #[test]
    fn uniform_images_collapse() {
        let mut r = Raster::new(4, 4, 255);
        assert_eq!(PhaseMask::from_image(r.clone(), 1.0, PhaseMapping::default()).unwrap(), PhaseMask::Constant(0.0));
        r.data.iter_mut().for_each(|v| *v = 255);
        assert_eq!(PhaseMask::from_image(r, 1.0, PhaseMapping::default()).unwrap(), PhaseMask::Constant(PI));
    }

    #[test]
    fn sector_render_roundtrip() {
        let width = 2.0;
        let mask = PhaseMask::SectorA(2);
        let raster = render(&mask, 512, width, PhaseMapping::default());
        let back = Raster::parse(&raster.to_p5()).unwrap();
        let img = PhaseMask::from_image(back, width, PhaseMapping::default()).unwrap();
        let pitch = width / 512.0;
        let mut worst: f64 = 0.0;
        for i in 0..4000 {
            let phi = TAU * (i as f64 + 0.5) / 4000.0;
            let rho = 0.05 + 0.9 * (i % 37) as f64 / 37.0;
            let (x, y) = (rho * phi.cos(), rho * phi.sin());
            // skip samples within two pixels of a sector boundary
            let near = (0..4).any(|j| {
                let b = j as f64 * PI / 2.0;
                let d = (phi - b).abs().min(TAU - (phi - b).abs());
                rho * d.sin().abs() < 2.0 * pitch
            });
            if near {
                continue;
            }
            worst = worst.max((img.evaluate(x, y) - mask.evaluate(x, y)).abs());
        }
        assert!(worst <= PI / 255.0, "{worst}");
    }

    #[test]
    fn image_lookup_is_centred_and_zero_outside() {
        let mut r = Raster::new(2, 2, 255);
        r.set(0, 0, 255); // top-left
        let mask = PhaseMask::from_image(r, 2.0, PhaseMapping::default()).unwrap();
        assert_eq!(mask.evaluate(-0.5, 0.5), PI);
        assert_eq!(mask.evaluate(0.5, 0.5), 0.0);
        assert_eq!(mask.evaluate(-0.5, -0.5), 0.0);
        assert_eq!(mask.evaluate(-1.5, 0.5), 0.0);
    }

    #[test]
    fn taiji_is_half_dark() {
        let t = taiji(400);
        let dark = t.data.iter().filter(|&&v| v == 255).count() as f64;
        let disc = PI * 200.0 * 200.0;
        assert!((dark / disc - 0.5).abs() < 0.01);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(parse_spec("none").unwrap(), PhaseMask::none());
        assert_eq!(parse_spec("helical:-2").unwrap(), PhaseMask::Helical(-2));
        assert_eq!(parse_spec("sector-a:4").unwrap(), PhaseMask::SectorA(4));
        assert_eq!(parse_spec("sector-b:4:0.5").unwrap(), PhaseMask::SectorB { m: 4, phi0: 0.5 });
        assert!(matches!(parse_spec("spiral:3"), Err(Error::MaskSpec(_))));
        assert!(matches!(parse_spec("image:/nonexistent/x.pgm:1e-3"), Err(Error::Io(_))));
    }

    fn arb_mask() -> impl Strategy<Value = PhaseMask> {
        let leaf = prop_oneof![
            (-4i32..=4).prop_map(PhaseMask::Helical),
            (1u32..=6).prop_map(PhaseMask::SectorA),
            ((1u32..=6), 0.0..TAU).prop_map(|(m, p)| PhaseMask::SectorB { m, phi0: p }),
            (-3.0..3.0f64).prop_map(PhaseMask::Constant),
        ];
        leaf.prop_recursive(3, 12, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..3).prop_map(PhaseMask::Sum),
                inner.clone().prop_map(|m| PhaseMask::Mirror(Box::new(m))),
                inner.prop_map(|m| PhaseMask::Negate(Box::new(m))),
            ]
        })
    }

    proptest! {
        #[test]
        fn mirror_and_negate_are_involutions(mask in arb_mask(), x in -2.0..2.0f64, y in -2.0..2.0f64) {
            let mm = PhaseMask::Mirror(Box::new(PhaseMask::Mirror(Box::new(mask.clone()))));
            let nn = PhaseMask::Negate(Box::new(PhaseMask::Negate(Box::new(mask.clone()))));
            prop_assert_eq!(mm.evaluate(x, y), mask.evaluate(x, y));
            prop_assert_eq!(nn.evaluate(x, y), mask.evaluate(x, y));
            prop_assert_eq!(mask.clone().mirror().mirror().evaluate(x, y), mask.evaluate(x, y));
            prop_assert_eq!(mask.clone().negate().negate().evaluate(x, y), mask.evaluate(x, y));
        }

        #[test]
        fn sector_a_is_periodic(m in 1u32..8, phi in 0.0..TAU, rho in 0.1..5.0f64) {
            let mask = PhaseMask::SectorA(m);
            let shifted = phi + TAU / f64::from(m);
            let a = mask.evaluate(rho * phi.cos(), rho * phi.sin());
            let b = mask.evaluate(rho * shifted.cos(), rho * shifted.sin());
            // stay away from the boundaries where rounding may flip the side
            let frac = (phi * f64::from(m) / PI).fract();
            prop_assume!(frac > 1e-9 && frac < 1.0 - 1e-9);
            prop_assert_eq!(a, b);
        }
    }
}
