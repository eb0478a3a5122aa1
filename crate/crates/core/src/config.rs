//! Run configuration shared by the command-line tools.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fockstate::QuadratureSpec;
use crate::pulses::BesselGaussEnvelope;
use crate::symmetry::ClassifyOptions;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PulseConfig {
    pub lambda_c_m: f64,
    pub theta_c_rad: f64,
    pub sigma_z_in_lambda: f64,
    pub sigma_rho_in_lambda: f64,
}

impl Default for PulseConfig {
    fn default() -> Self {
        Self { lambda_c_m: 500e-9, theta_c_rad: 0.01, sigma_z_in_lambda: 1000.0, sigma_rho_in_lambda: 1000.0 }
    }
}

impl PulseConfig {
    pub fn envelope(&self) -> Result<Arc<BesselGaussEnvelope>> {
        let l = self.lambda_c_m;
        let env = BesselGaussEnvelope::new(l, self.theta_c_rad, self.sigma_z_in_lambda * l, self.sigma_rho_in_lambda * l)?;
        Ok(Arc::new(env.normalized()?))
    }

    /// Temporal pulse length `σ_z / c` (s).
    pub fn duration(&self) -> f64 {
        self.sigma_z_in_lambda * self.lambda_c_m / crate::SPEED_OF_LIGHT
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericsConfig {
    pub angular_nodes: usize,
    pub radial_refinement: usize,
    pub classify_samples: usize,
    pub accept_residual: f64,
    pub reject_residual: f64,
    pub map_grid: usize,
    pub tolerance: f64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        let c = ClassifyOptions::default();
        Self {
            angular_nodes: q.angular_nodes,
            radial_refinement: q.radial_refinement,
            classify_samples: c.samples,
            accept_residual: c.accept,
            reject_residual: c.reject,
            map_grid: 256,
            tolerance: 1e-6,
        }
    }
}

impl NumericsConfig {
    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec { angular_nodes: self.angular_nodes, radial_refinement: self.radial_refinement }
    }

    pub fn classify(&self) -> ClassifyOptions {
        ClassifyOptions {
            samples: self.classify_samples,
            half_width: None,
            accept: self.accept_residual,
            reject: self.reject_residual,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapFormat {
    #[default]
    Pgm,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub map_format: MapFormat,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: PathBuf::from("."), map_format: MapFormat::Pgm }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub pulse: PulseConfig,
    pub numerics: NumericsConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let n = &self.numerics;
        for (name, v) in [("accept_residual", n.accept_residual), ("reject_residual", n.reject_residual), ("tolerance", n.tolerance)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::OutOfRange(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("angular_nodes", n.angular_nodes), ("radial_refinement", n.radial_refinement), ("map_grid", n.map_grid)] {
            if v == 0 {
                return Err(Error::OutOfRange(format!("{name} must be positive")));
            }
        }
        if n.classify_samples < 8 {
            return Err(Error::GridTooSmall(n.classify_samples));
        }
        self.pulse.envelope().map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_are_the_reference_pulse() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let env = cfg.pulse.envelope().unwrap();
        let r = BesselGaussEnvelope::reference();
        assert_eq!((env.lambda_c, env.sigma_z, env.sigma_rho), (r.lambda_c, r.sigma_z, r.sigma_rho));
        assert!((cfg.pulse.duration() - 1.67e-12).abs() < 0.01e-12);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg = RunConfig::from_json(r#"{"numerics": {"angular_nodes": 2048}}"#).unwrap();
        assert_eq!(cfg.numerics.angular_nodes, 2048);
        assert_eq!(cfg.pulse, PulseConfig::default());
        assert!(RunConfig::from_json(r#"{"numerics": {"tolerance": -1}}"#).is_err());
        assert!(RunConfig::from_json(r#"{"bogus": 1}"#).is_err());
    }

    proptest! {
        #[test]
        fn json_roundtrip(
            lambda in 300e-9..900e-9f64,
            theta in 0.005..0.05f64,
            nodes in 16usize..8192,
            tol in 1e-12..1e-2f64,
            csv in any::<bool>(),
        ) {
            let mut cfg = RunConfig::default();
            cfg.pulse.lambda_c_m = lambda;
            cfg.pulse.theta_c_rad = theta;
            cfg.numerics.angular_nodes = nodes;
            cfg.numerics.tolerance = tol;
            cfg.output.map_format = if csv { MapFormat::Csv } else { MapFormat::Pgm };
            let text = cfg.to_json().unwrap();
            let back: RunConfig = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(&back, &cfg);
            prop_assert_eq!(back.to_json().unwrap(), text);
        }
    }
}
