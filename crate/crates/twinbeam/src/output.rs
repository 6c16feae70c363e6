//! Output files shared by the command layer: portable graymaps for retrieved
//! images, CSV cells with explicit absent markers, and the per-run manifest.

use ndarray::Array2;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// Writes an 8-bit binary PGM, mapping `[lo, hi]` linearly onto `[0, 255]`
/// with clamping.  Passing the same bounds for several images puts them on a
/// common gray scale, which is what makes retrieved-image triplets comparable
/// by eye.
pub fn write_pgm(path: &Path, data: &Array2<f64>, lo: f64, hi: f64) -> io::Result<()> {
    let (ny, nx) = data.dim();
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{nx} {ny}\n255\n")?;
    let mut bytes = Vec::with_capacity(nx * ny);
    for v in data.iter() {
        let t = ((v - lo) / span).clamp(0.0, 1.0);
        bytes.push((t * 255.0).round() as u8);
    }
    w.write_all(&bytes)
}

/// One CSV cell: the shortest exact decimal form of the value, or `NA` when
/// the estimate does not exist.  Never silently writes zero for a missing
/// number.
pub fn csv_cell(value: Option<f64>) -> String {
    match value {
        Some(v) if v.is_finite() => format!("{v}"),
        _ => "NA".to_string(),
    }
}

/// Provenance record written next to every command's outputs so a result file
/// can be traced back to the exact scenario and seed that produced it.
#[derive(Debug, Clone)]
pub struct Manifest {
    pub command: String,
    pub scenario_hash: String,
    pub seed: u64,
    pub trajectories: usize,
    pub wall_seconds: f64,
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> io::Result<()> {
        let mut w = BufWriter::new(File::create(dir.join("run_manifest.txt"))?);
        writeln!(w, "command = {}", self.command)?;
        writeln!(w, "scenario_sha256 = {}", self.scenario_hash)?;
        writeln!(w, "seed = {}", self.seed)?;
        writeln!(w, "trajectories = {}", self.trajectories)?;
        writeln!(w, "version = {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "wall_seconds = {:.3}", self.wall_seconds)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn pgm_maps_linearly_with_clamping() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pgm");
        let data = array![[0.0, 0.05], [0.1, 0.2]];
        write_pgm(&path, &data, 0.0, 0.1).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let header = b"P5\n2 2\n255\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], &[0, 128, 255, 255]);
    }

    #[test]
    fn absent_cells_are_na_not_zero() {
        assert_eq!(csv_cell(Some(2.5)), "2.5");
        assert_eq!(csv_cell(Some(f64::NAN)), "NA");
        assert_eq!(csv_cell(None), "NA");
        assert_ne!(csv_cell(None), "0");
    }

    #[test]
    fn manifest_round_trips_the_key_fields() {
        let dir = tempfile::tempdir().unwrap();
        let m = Manifest {
            command: "correlation".into(),
            scenario_hash: "abc123".into(),
            seed: 9,
            trajectories: 42,
            wall_seconds: 1.25,
        };
        m.write(dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("run_manifest.txt")).unwrap();
        assert!(text.contains("scenario_sha256 = abc123"));
        assert!(text.contains("seed = 9"));
        assert!(text.contains("trajectories = 42"));
    }
}
