use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use platelab::geometry::Point2;
use platelab::plate::LoadSpec;
use platelab::positivity::PositivityConfig;
use serde::{Deserialize, Serialize};

/// Every knob of every subcommand. Read from an optional JSON file and then
/// overlaid with command-line flags, which win on conflict.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: Option<PathBuf>,
    pub h: Option<f64>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,

    pub f_const: Option<f64>,
    /// `[x0, y0, width, amplitude]`.
    pub f_bump: Option<[f64; 4]>,
    pub f_grid: Option<PathBuf>,

    pub gamma: Option<f64>,
    pub scheme: Option<String>,

    pub gamma_max: Option<f64>,
    pub scan_points: Option<usize>,
    pub tol_pos: Option<f64>,
    pub bisection_tol: Option<f64>,
    pub raw_min: Option<bool>,

    pub iterations: Option<usize>,
    pub vertices: Option<usize>,
    pub sigma0: Option<f64>,
    pub t0: Option<f64>,
    pub area: Option<f64>,

    pub other: Option<PathBuf>,
    pub sequence: Option<Vec<PathBuf>>,
    pub compact: Option<PathBuf>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid config file {}", path.display()))
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overlay(mut self, flags: ExperimentConfig) -> Self {
        // The load is one choice: a load flag replaces any load from the file.
        if flags.f_const.is_some() || flags.f_bump.is_some() || flags.f_grid.is_some() {
            self.f_const = None;
            self.f_bump = None;
            self.f_grid = None;
        }
        overlay!(self, flags;
            domain, h, out, seed, f_const, f_bump, f_grid, gamma, scheme,
            gamma_max, scan_points, tol_pos, bisection_tol, raw_min,
            iterations, vertices, sigma0, t0, area, other, sequence, compact);
        self
    }

    pub fn domain_path(&self) -> Result<&Path> {
        self.domain.as_deref().context("missing --domain")
    }

    pub fn out_dir(&self) -> Result<&Path> {
        self.out.as_deref().context("missing --out")
    }

    pub fn grid_h(&self) -> Result<f64> {
        let h = self.h.context("missing --h")?;
        if h > 0.0 && h.is_finite() {
            Ok(h)
        } else {
            bail!("--h must be positive and finite, got {h}")
        }
    }

    pub fn load(&self) -> Result<LoadSpec> {
        let given = [self.f_const.is_some(), self.f_bump.is_some(), self.f_grid.is_some()];
        match given.iter().filter(|&&g| g).count() {
            0 => bail!("no load given; pass one of --f-const, --f-bump, --f-grid"),
            1 => {}
            _ => bail!("conflicting loads; pass only one of --f-const, --f-bump, --f-grid"),
        }
        let load = if let Some(a) = self.f_const {
            LoadSpec::constant(a)
        } else if let Some([x0, y0, s, a]) = self.f_bump {
            LoadSpec::GaussianBump {
                center: Point2::new(x0, y0),
                width: s,
                amplitude: a,
            }
        } else {
            let path = self.f_grid.as_deref().unwrap();
            platelab::io::read_grid_load(path)
                .with_context(|| format!("cannot load grid samples from {}", path.display()))?
        };
        load.validate()?;
        Ok(load)
    }

    pub fn positivity(&self) -> Result<PositivityConfig> {
        let mut cfg = PositivityConfig {
            gamma_max: self.gamma_max,
            bisection_tol: self.bisection_tol,
            ..PositivityConfig::default()
        };
        if let Some(n) = self.scan_points {
            if n < 2 {
                bail!("--scan-points must be at least 2, got {n}");
            }
            cfg.scan_points = n;
        }
        if let Some(t) = self.tol_pos {
            if t.is_nan() || t < 0.0 || t.is_infinite() {
                bail!("--tol-pos must be nonnegative and finite, got {t}");
            }
            cfg.tol_pos = t;
        }
        if self.raw_min == Some(true) {
            cfg.use_interior_min = false;
        }
        Ok(cfg)
    }

    /// Input files whose contents determine the run.
    pub fn input_files(&self) -> Vec<PathBuf> {
        let mut files: Vec<PathBuf> = [&self.domain, &self.f_grid, &self.other, &self.compact]
            .into_iter()
            .flatten()
            .cloned()
            .collect();
        files.extend(self.sequence.iter().flatten().cloned());
        files
    }
}

pub fn parse_bump(s: &str) -> std::result::Result<[f64; 4], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("expected x0,y0,s,A but got {} values", parts.len()));
    }
    let mut out = [0.0; 4];
    for (slot, p) in out.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|e| format!("bad number {p:?}: {e}"))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_and_load_is_replaced_as_a_unit() {
        let file: ExperimentConfig =
            serde_json::from_str(r#"{"h": 0.1, "seed": 3, "f_bump": [0, 0, 0.1, 1]}"#).unwrap();
        let flags = ExperimentConfig {
            h: Some(0.05),
            f_const: Some(2.0),
            ..Default::default()
        };
        let merged = file.overlay(flags);
        assert_eq!(merged.h, Some(0.05));
        assert_eq!(merged.seed, Some(3));
        assert_eq!(merged.f_bump, None);
        assert_eq!(merged.load().unwrap(), LoadSpec::constant(2.0));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r: std::result::Result<ExperimentConfig, _> = serde_json::from_str(r#"{"hh": 0.1}"#);
        assert!(r.unwrap_err().to_string().contains("unknown field"));
    }

    #[test]
    fn bump_parsing() {
        assert_eq!(parse_bump("1, 2,0.5,3").unwrap(), [1.0, 2.0, 0.5, 3.0]);
        assert!(parse_bump("1,2,3").is_err());
        assert!(parse_bump("1,2,x,3").is_err());
    }

    #[test]
    fn range_checks() {
        let c = ExperimentConfig {
            h: Some(-1.0),
            scan_points: Some(1),
            ..Default::default()
        };
        assert!(c.grid_h().is_err());
        assert!(c.positivity().is_err());
        assert!(c.load().is_err());
    }
}
