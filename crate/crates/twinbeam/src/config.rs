//! Scenario files: flat key-value sections with units spelled out in the key
//! names, loaded from TOML.
//!
//! A scenario fully determines a run together with a seed: grid, pump,
//! crystal, optics, detector, optional object, ensemble size and sweep
//! axes.  The SHA-256 hash of the canonical serialization identifies the
//! scenario in output manifests, so two runs can be compared by hash alone.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::BufReader;
use std::path::Path;

use crate::crystal::CrystalSpec;
use crate::error::{Result, TwinError};
use crate::grid::GridSpec;
use crate::object::ObjectMask;
use crate::pixel::DetectorSpec;
use crate::pump::PumpSpec;

fn config_err(msg: impl Into<String>) -> TwinError {
    TwinError::Config(msg.into())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    pub waist_um: f64,
    pub duration_ps: f64,
    pub gain: f64,
    pub wavelength_um: f64,
}

/// Crystal parameters: either a named preset, a preset with individual
/// overrides, or a fully explicit coefficient set.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalConfig {
    /// Currently "bbo-type2-704".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta0_per_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k1_per_um: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k2_per_um: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_delay1_ps_per_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_delay2_ps_per_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gvd1_ps2_per_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gvd2_ps2_per_mm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walkoff1_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walkoff2_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub walkoff_pump_rad: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
    pub dx_um: f64,
    pub dy_um: f64,
    /// Duration of one simulated temporal window (one pump slice), ps.
    pub slice_ps: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpticsConfig {
    /// Focal length of the far-field lens, um.
    pub focal_um: f64,
}

fn default_binning() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorConfig {
    pub pixel_pitch_um: f64,
    #[serde(default = "default_binning")]
    pub binning: usize,
    pub eta1: f64,
    pub eta2: f64,
    #[serde(default)]
    pub x_shift_um: f64,
    /// Additive Gaussian background count variance per pixel per arm;
    /// disabled by default.
    #[serde(default)]
    pub background_var: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectConfig {
    /// "uniform" (whole plane), "rect", "stencil" (letter glyph), or "file"
    /// (text mask next to the scenario file).
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Cell-index bounds `[first, last)` for "rect".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cols: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

fn default_steps() -> usize {
    16
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub trajectories: usize,
    pub seed: u64,
    /// Split-step count through the crystal.
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Ensemble size used when the run is promoted to paper scale.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paper_trajectories: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Symmetry-center displacements for the shift scan, um.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub x_shift_um: Vec<f64>,
    /// Pump pulse durations for the photon-number sweep, ps.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub durations_ps: Vec<f64>,
    /// Noise-reduction factors for the closed-form sweep.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sigmas: Vec<f64>,
    /// Absorption coefficients for the closed-form sweep.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alphas: Vec<f64>,
    /// Excess-noise values for the closed-form sweep.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excess: Vec<f64>,
    /// Correlation scan half-width in cells.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_offset_cells: Option<usize>,
    /// Mean photon number per pixel assumed by the closed-form sweep.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_photons: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Also write the raw per-trajectory pixel counts (can be large).
    #[serde(default)]
    pub write_frames: bool,
    /// Dump the first trajectory's detection-plane fields in binary form.
    #[serde(default)]
    pub dump_first_field: bool,
}

/// One fully specified run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub pump: PumpConfig,
    #[serde(default)]
    pub crystal: CrystalConfig,
    pub grid: GridConfig,
    pub optics: OpticsConfig,
    pub detector: DetectorConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub object: Option<ObjectConfig>,
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl Scenario {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let scenario: Scenario = toml::from_str(&text)
            .map_err(|e| config_err(format!("{}: {e}", path.as_ref().display())))?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Cross-field validation beyond what the individual spec builders check.
    pub fn validate(&self) -> Result<()> {
        self.grid_spec()?;
        self.pump_spec()?;
        self.crystal_spec()?;
        self.detector_spec()?;
        if self.ensemble.trajectories < 2 {
            return Err(config_err("ensemble.trajectories must be at least 2"));
        }
        if self.ensemble.steps < 4 {
            return Err(config_err("ensemble.steps must be at least 4"));
        }
        if let Some(obj) = &self.object {
            match obj.kind.as_str() {
                "uniform" | "rect" | "stencil" => {
                    if obj.alpha.is_none() {
                        return Err(config_err("object.alpha is required for this object kind"));
                    }
                }
                "file" => {
                    if obj.path.is_none() {
                        return Err(config_err("object.path is required for kind = \"file\""));
                    }
                }
                other => {
                    return Err(config_err(format!(
                        "unknown object.kind \"{other}\" (expected uniform, rect, stencil or file)"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        let g = &self.grid;
        if g.nt == 0 {
            return Err(config_err("grid.nt must be positive"));
        }
        GridSpec::new(g.nx, g.ny, g.nt, g.dx_um, g.dy_um, g.slice_ps / g.nt as f64)
    }

    pub fn pump_spec(&self) -> Result<PumpSpec> {
        let p = &self.pump;
        PumpSpec::new(p.waist_um, p.duration_ps, p.gain, p.wavelength_um)
    }

    pub fn crystal_spec(&self) -> Result<CrystalSpec> {
        let c = &self.crystal;
        let mut spec = match c.preset.as_deref() {
            Some("bbo-type2-704") | None => CrystalSpec::bbo_type2_704(),
            Some(other) => {
                return Err(config_err(format!(
                    "unknown crystal.preset \"{other}\" (expected \"bbo-type2-704\")"
                )))
            }
        };
        if c.preset.is_none() {
            // Without a named preset every coefficient must be explicit.
            let complete = c.length_mm.is_some()
                && c.k1_per_um.is_some()
                && c.k2_per_um.is_some()
                && c.group_delay1_ps_per_mm.is_some()
                && c.group_delay2_ps_per_mm.is_some()
                && c.gvd1_ps2_per_mm.is_some()
                && c.gvd2_ps2_per_mm.is_some()
                && c.walkoff1_rad.is_some()
                && c.walkoff2_rad.is_some()
                && c.walkoff_pump_rad.is_some();
            if !complete {
                return Err(config_err(
                    "crystal section needs either preset = \"bbo-type2-704\" or a complete \
                     coefficient set",
                ));
            }
        }
        if let Some(v) = c.length_mm {
            spec.length_mm = v;
        }
        if let Some(v) = c.delta0_per_mm {
            spec.delta0_per_mm = v;
        }
        if let Some(v) = c.k1_per_um {
            spec.k1_per_um = v;
        }
        if let Some(v) = c.k2_per_um {
            spec.k2_per_um = v;
        }
        if let Some(v) = c.group_delay1_ps_per_mm {
            spec.group_delay1_ps_per_mm = v;
        }
        if let Some(v) = c.group_delay2_ps_per_mm {
            spec.group_delay2_ps_per_mm = v;
        }
        if let Some(v) = c.gvd1_ps2_per_mm {
            spec.gvd1_ps2_per_mm = v;
        }
        if let Some(v) = c.gvd2_ps2_per_mm {
            spec.gvd2_ps2_per_mm = v;
        }
        if let Some(v) = c.walkoff1_rad {
            spec.walkoff1_rad = v;
        }
        if let Some(v) = c.walkoff2_rad {
            spec.walkoff2_rad = v;
        }
        if let Some(v) = c.walkoff_pump_rad {
            spec.walkoff_pump_rad = v;
        }
        spec.wavelength_um = self.pump.wavelength_um;
        spec.validate()?;
        Ok(spec)
    }

    pub fn detector_spec(&self) -> Result<DetectorSpec> {
        let d = &self.detector;
        DetectorSpec::new(
            d.pixel_pitch_um,
            d.binning,
            d.eta1,
            d.eta2,
            d.x_shift_um,
            d.background_var,
        )
    }

    /// Builds the absorption mask on the detection-plane cell grid.
    /// `base_dir` resolves relative mask file paths (usually the scenario
    /// file's directory).
    pub fn object_mask(&self, base_dir: &Path) -> Result<Option<ObjectMask>> {
        let Some(obj) = &self.object else {
            return Ok(None);
        };
        let (ny, nx) = (self.grid.ny, self.grid.nx);
        let mask = match obj.kind.as_str() {
            "uniform" => ObjectMask::uniform(ny, nx, obj.alpha.unwrap())?,
            "rect" => {
                let rows = obj.rows.ok_or_else(|| config_err("object.rows is required"))?;
                let cols = obj.cols.ok_or_else(|| config_err("object.cols is required"))?;
                ObjectMask::uniform_rect(ny, nx, obj.alpha.unwrap(), rows[0]..rows[1], cols[0]..cols[1])?
            }
            "stencil" => ObjectMask::letter_stencil(ny, nx, obj.alpha.unwrap())?,
            "file" => {
                let path = base_dir.join(obj.path.as_ref().unwrap());
                let file = std::fs::File::open(&path)
                    .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
                let mask = ObjectMask::from_text(BufReader::new(file))?;
                if mask.shape() != (ny, nx) {
                    return Err(config_err(format!(
                        "mask {} is {:?}, grid is {:?}",
                        path.display(),
                        mask.shape(),
                        (ny, nx)
                    )));
                }
                mask
            }
            _ => unreachable!("validated in Scenario::validate"),
        };
        Ok(Some(mask))
    }

    /// SHA-256 of the canonical serialization; identifies the scenario in
    /// manifests independently of file formatting.
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(self).expect("scenario serialization cannot fail");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut out = String::with_capacity(64);
        for byte in digest {
            use std::fmt::Write;
            write!(out, "{byte:02x}").unwrap();
        }
        out
    }
}
