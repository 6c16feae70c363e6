//! From detection-plane fields to per-pixel photon counts.
//!
//! Counting happens in two stages.  [`pixelize_cells`] collapses the
//! temporal-frequency axis of one trajectory into per-cell counts,
//! subtracting the half photon of symmetric-ordering noise that every mode
//! carries in the Wigner representation.  [`bin_pixels`] then groups cells
//! into detector pixels and pairs each arm-one pixel with the arm-two pixel
//! mirrored through the assumed symmetry centre, which may be displaced from
//! the true centre by `x_shift` along the walk-off axis.
//!
//! Counts stay real-valued: single-trajectory values fluctuate below zero,
//! and only ensemble means are constrained to be non-negative.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use std::io::Write;

use crate::error::{invalid, Result, TwinError};
use crate::field::{FieldPair, Plane};

/// Detector geometry and imperfections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec {
    /// Physical pixel pitch, um; must be an integer multiple of the
    /// detection-plane cell pitch.
    pub pixel_pitch_um: f64,
    /// Post-detection binning factor: `b` merges `b x b` pixels.
    pub binning: usize,
    /// Quantum efficiency of arm one.
    pub eta1: f64,
    /// Quantum efficiency of arm two.
    pub eta2: f64,
    /// Displacement of the assumed symmetry centre along x, um.
    pub x_shift_um: f64,
    /// Additive zero-mean Gaussian count variance per pixel per arm.
    pub background_var: f64,
}

impl DetectorSpec {
    pub fn new(
        pixel_pitch_um: f64,
        binning: usize,
        eta1: f64,
        eta2: f64,
        x_shift_um: f64,
        background_var: f64,
    ) -> Result<Self> {
        if !pixel_pitch_um.is_finite() || pixel_pitch_um <= 0.0 {
            return Err(invalid(format!("pixel pitch must be > 0, got {pixel_pitch_um}")));
        }
        if binning == 0 {
            return Err(invalid("binning factor must be >= 1"));
        }
        for eta in [eta1, eta2] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(invalid(format!("efficiency must lie in [0, 1], got {eta}")));
            }
        }
        if !x_shift_um.is_finite() {
            return Err(invalid("x_shift must be finite"));
        }
        if !background_var.is_finite() || background_var < 0.0 {
            return Err(invalid("background variance must be >= 0"));
        }
        Ok(Self { pixel_pitch_um, binning, eta1, eta2, x_shift_um, background_var })
    }

    /// Resolves this spec against a concrete cell grid.
    pub fn geometry(&self, cells: &CellFrame) -> Result<PixelGeometry> {
        let (ny, nx) = cells.counts1.dim();
        let effective_um = self.pixel_pitch_um * self.binning as f64;
        let per_x = effective_um / cells.pitch_x_um;
        let per_y = effective_um / cells.pitch_y_um;
        let cells_x = per_x.round() as usize;
        let cells_y = per_y.round() as usize;
        if cells_x == 0
            || cells_y == 0
            || (per_x - cells_x as f64).abs() > 1e-9
            || (per_y - cells_y as f64).abs() > 1e-9
        {
            return Err(invalid(format!(
                "pixel size {effective_um} um is not an integer multiple of the \
                 cell pitch ({}, {}) um",
                cells.pitch_x_um, cells.pitch_y_um
            )));
        }
        if nx % cells_x != 0 || ny % cells_y != 0 {
            return Err(invalid(format!(
                "pixel tiling {cells_x}x{cells_y} cells does not divide the \
                 {nx}x{ny} cell grid"
            )));
        }
        if self.x_shift_um.abs() >= nx as f64 * cells.pitch_x_um / 2.0 {
            return Err(invalid("x_shift exceeds half the field of view"));
        }
        let shift_exact = self.x_shift_um / cells.pitch_x_um;
        let shift_cells = shift_exact.round() as i64;
        let snapped = (shift_exact - shift_cells as f64).abs() > 1e-9;
        Ok(PixelGeometry {
            cells_x,
            cells_y,
            npx: nx / cells_x,
            npy: ny / cells_y,
            shift_cells,
            snapped,
            snapped_shift_um: shift_cells as f64 * cells.pitch_x_um,
            pixel_size_um: effective_um,
        })
    }
}

/// A [`DetectorSpec`] resolved against a cell grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelGeometry {
    /// Cells per pixel along x.
    pub cells_x: usize,
    /// Cells per pixel along y.
    pub cells_y: usize,
    /// Pixels along x.
    pub npx: usize,
    /// Pixels along y.
    pub npy: usize,
    /// Assumed-centre displacement snapped to whole cells.
    pub shift_cells: i64,
    /// Whether the requested `x_shift` had to be snapped to the cell grid.
    /// The caller decides how to surface the warning; sub-cell shifts would
    /// need Fourier interpolation of the fields, which is not implemented.
    pub snapped: bool,
    /// The shift actually applied, um.
    pub snapped_shift_um: f64,
    /// Effective pixel size after binning, um.
    pub pixel_size_um: f64,
}

/// Ordering-corrected photon counts per transverse cell, summed over the
/// temporal-frequency axis, for one trajectory.  Slices of a long pulse are
/// accumulated into the same frame, which adds their counts and their mode
/// budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFrame {
    pub(crate) counts1: Array2<f64>,
    pub(crate) counts2: Array2<f64>,
    /// Number of elementary modes already collapsed into each cell count.
    pub(crate) modes_per_cell: f64,
    pub(crate) pitch_x_um: f64,
    pub(crate) pitch_y_um: f64,
}

impl CellFrame {
    pub fn counts1(&self) -> &Array2<f64> {
        &self.counts1
    }

    pub fn counts2(&self) -> &Array2<f64> {
        &self.counts2
    }

    pub fn modes_per_cell(&self) -> f64 {
        self.modes_per_cell
    }

    pub fn pitch_um(&self) -> (f64, f64) {
        (self.pitch_x_um, self.pitch_y_um)
    }

    /// Adds the counts of another slice of the same pulse: photon numbers
    /// and mode budgets are both additive across independent slices.
    pub fn accumulate(&mut self, other: &CellFrame) -> Result<()> {
        if self.counts1.dim() != other.counts1.dim()
            || self.pitch_x_um != other.pitch_x_um
            || self.pitch_y_um != other.pitch_y_um
        {
            return Err(TwinError::ShapeMismatch("cell frames do not align".into()));
        }
        self.counts1 += &other.counts1;
        self.counts2 += &other.counts2;
        self.modes_per_cell += other.modes_per_cell;
        Ok(())
    }
}

/// Collapses one detection-plane trajectory into per-cell counts:
/// `N(x, y) = sum_Omega (|c|^2 - 1/2)`, removing the half photon of
/// symmetric-ordering noise per temporal mode.
pub fn pixelize_cells(fields: &FieldPair) -> Result<CellFrame> {
    let (pitch_x_um, pitch_y_um) = match fields.plane() {
        Plane::Detection { pitch_x_um, pitch_y_um } => (pitch_x_um, pitch_y_um),
        Plane::Source => return Err(invalid("pixelize requires a detection-plane field")),
    };
    let grid = fields.grid();
    let (ny, nx) = (grid.ny(), grid.nx());
    let mut counts1 = Array2::zeros((ny, nx));
    let mut counts2 = Array2::zeros((ny, nx));
    for (field, counts) in [(fields.c1(), &mut counts1), (fields.c2(), &mut counts2)] {
        for plane in field.outer_iter() {
            for j in 0..ny {
                for i in 0..nx {
                    counts[[j, i]] += plane[[j, i]].norm_sqr() - 0.5;
                }
            }
        }
    }
    Ok(CellFrame {
        counts1,
        counts2,
        modes_per_cell: grid.nt() as f64,
        pitch_x_um,
        pitch_y_um,
    })
}

/// Per-pixel counts of one trajectory.  `counts2[p]` holds the counts of the
/// arm-two pixel *paired* with arm-one pixel `p`: the reflection of `p`
/// through the assumed symmetry centre, so `counts2 - counts1` is directly
/// the differential signal.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelFrame {
    pub(crate) counts1: Array2<f64>,
    pub(crate) counts2: Array2<f64>,
    /// Elementary modes per pixel (0 for count ensembles that carry no
    /// Wigner vacuum residue, e.g. Poisson baselines).
    pub(crate) modes_per_pixel: f64,
}

impl PixelFrame {
    pub fn new(counts1: Array2<f64>, counts2: Array2<f64>, modes_per_pixel: f64) -> Result<Self> {
        if counts1.dim() != counts2.dim() {
            return Err(TwinError::ShapeMismatch("pixel count arrays differ in shape".into()));
        }
        Ok(Self { counts1, counts2, modes_per_pixel })
    }

    pub fn counts1(&self) -> &Array2<f64> {
        &self.counts1
    }

    pub fn counts2(&self) -> &Array2<f64> {
        &self.counts2
    }

    pub fn modes_per_pixel(&self) -> f64 {
        self.modes_per_pixel
    }

    pub fn shape(&self) -> (usize, usize) {
        self.counts1.dim()
    }
}

/// Groups cells into pixels and pairs mirror pixels.
///
/// The arm-one pixel grid tiles the cell grid directly.  For each of its
/// cells `(j, i)` the paired arm-two cell is the reflection through the
/// assumed centre: `((ny - j) % ny, (nx - i + 2 s) % nx)` with `s` the
/// centre displacement in cells; the factor of two arises because shifting
/// the mirror by `s` displaces the reflected point by `2 s`.  Mirroring cell
/// sets rather than pixel indices keeps pairs exact when `2 s` is not a
/// multiple of the pixel size.  Background noise, when enabled, adds an
/// independent Gaussian per pixel per arm.
pub fn bin_pixels(
    cells: &CellFrame,
    det: &DetectorSpec,
    rng: &mut impl Rng,
) -> Result<PixelFrame> {
    let geom = det.geometry(cells)?;
    let (ny, nx) = cells.counts1.dim();
    let mut counts1 = Array2::zeros((geom.npy, geom.npx));
    let mut counts2 = Array2::zeros((geom.npy, geom.npx));
    for j in 0..ny {
        let pj = j / geom.cells_y;
        let jm = (ny - j) % ny;
        for i in 0..nx {
            let pi = i / geom.cells_x;
            let im = (nx as i64 - i as i64 + 2 * geom.shift_cells).rem_euclid(nx as i64) as usize;
            counts1[[pj, pi]] += cells.counts1[[j, i]];
            counts2[[pj, pi]] += cells.counts2[[jm, im]];
        }
    }
    if det.background_var > 0.0 {
        let noise = Normal::new(0.0, det.background_var.sqrt())
            .map_err(|e| invalid(format!("background: {e}")))?;
        for counts in [&mut counts1, &mut counts2] {
            for c in counts.iter_mut() {
                *c += noise.sample(rng);
            }
        }
    }
    let modes_per_pixel = cells.modes_per_cell * (geom.cells_x * geom.cells_y) as f64;
    PixelFrame::new(counts1, counts2, modes_per_pixel)
}

/// One-step convenience: cell counting followed by pixel binning.
pub fn pixelize(fields: &FieldPair, det: &DetectorSpec, rng: &mut impl Rng) -> Result<PixelFrame> {
    bin_pixels(&pixelize_cells(fields)?, det, rng)
}

/// Writes a pixel-frame ensemble as CSV rows
/// `trajectory,pixel_x,pixel_y,arm,count`.
pub fn write_frames_csv(frames: &[PixelFrame], w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "trajectory,pixel_x,pixel_y,arm,count")?;
    for (t, frame) in frames.iter().enumerate() {
        for (arm, counts) in [(1, &frame.counts1), (2, &frame.counts2)] {
            for ((j, i), c) in counts.indexed_iter() {
                writeln!(w, "{t},{i},{j},{arm},{c}")?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{sample_vacuum, FieldPair};
    use crate::grid::GridSpec;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn det(pitch: f64, binning: usize, shift: f64) -> DetectorSpec {
        DetectorSpec::new(pitch, binning, 1.0, 1.0, shift, 0.0).unwrap()
    }

    fn cell_frame_from_fn(n: usize, f: impl Fn(usize, usize) -> (f64, f64)) -> CellFrame {
        let mut counts1 = Array2::zeros((n, n));
        let mut counts2 = Array2::zeros((n, n));
        for j in 0..n {
            for i in 0..n {
                let (a, b) = f(j, i);
                counts1[[j, i]] = a;
                counts2[[j, i]] = b;
            }
        }
        CellFrame { counts1, counts2, modes_per_cell: 4.0, pitch_x_um: 5.0, pitch_y_um: 5.0 }
    }

    fn far_field(grid: &GridSpec, seed: u64) -> FieldPair {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        sample_vacuum(grid, &mut rng).to_far_field(5.0e4, 0.704).unwrap()
    }

    #[test]
    fn vacuum_counts_average_to_zero() {
        let g = GridSpec::new(16, 16, 8, 440.0, 440.0, 0.625).unwrap();
        let draws = 400;
        let mut total = 0.0;
        for s in 0..draws {
            let cells = pixelize_cells(&far_field(&g, s as u64)).unwrap();
            total += cells.counts1.sum() + cells.counts2.sum();
        }
        let mean_per_mode = total / (2.0 * draws as f64 * g.cells() as f64);
        // SE of |c|^2 - 1/2 per mode is 1/2 per draw.
        let se = 0.5 / (2.0 * draws as f64 * g.cells() as f64).sqrt();
        assert!(
            mean_per_mode.abs() < 5.0 * se,
            "vacuum residue {mean_per_mode} vs se {se}"
        );
    }

    #[test]
    fn binning_partitions_all_counts() {
        let cells = cell_frame_from_fn(16, |j, i| ((j * 16 + i) as f64, 1.0));
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let frame = bin_pixels(&cells, &det(20.0, 1, 0.0), &mut rng).unwrap();
        assert_eq!(frame.shape(), (4, 4));
        assert_relative_eq!(frame.counts1.sum(), cells.counts1.sum());
        assert_relative_eq!(frame.counts2.sum(), cells.counts2.sum());
        assert_relative_eq!(frame.modes_per_pixel, 4.0 * 16.0);
        // Binning 2 doubles the pixel edge.
        let frame2 = bin_pixels(&cells, &det(20.0, 2, 0.0), &mut rng).unwrap();
        assert_eq!(frame2.shape(), (2, 2));
    }

    #[test]
    fn mirror_pairing_matches_centre_reflection() {
        // Put a lone bright arm-two cell at the reflection of a chosen
        // arm-one cell and check it lands in the paired pixel.
        let n = 16;
        let (j1, i1) = (5, 3);
        let (jm, im) = ((n - j1) % n, (n - i1) % n);
        let cells = cell_frame_from_fn(n, |j, i| {
            let a = if (j, i) == (j1, i1) { 7.0 } else { 0.0 };
            let b = if (j, i) == (jm, im) { 11.0 } else { 0.0 };
            (a, b)
        });
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let frame = bin_pixels(&cells, &det(10.0, 1, 0.0), &mut rng).unwrap();
        let (pj, pi) = (j1 / 2, i1 / 2);
        assert_relative_eq!(frame.counts1[[pj, pi]], 7.0);
        assert_relative_eq!(frame.counts2[[pj, pi]], 11.0);
    }

    #[test]
    fn shifted_centre_displaces_the_partner_by_twice_the_shift() {
        let n = 16;
        let (j1, i1) = (6, 4);
        let shift_cells = 2i64;
        let im = (n as i64 - i1 as i64 + 2 * shift_cells).rem_euclid(n as i64) as usize;
        let jm = (n - j1) % n;
        let cells = cell_frame_from_fn(n, |j, i| {
            let a = if (j, i) == (j1, i1) { 1.0 } else { 0.0 };
            let b = if (j, i) == (jm, im) { 5.0 } else { 0.0 };
            (a, b)
        });
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let frame = bin_pixels(&cells, &det(10.0, 1, 10.0), &mut rng).unwrap();
        assert_relative_eq!(frame.counts2[[j1 / 2, i1 / 2]], 5.0);
        // Geometry reports the snap decision.
        let geom = det(10.0, 1, 10.0).geometry(&cells).unwrap();
        assert_eq!(geom.shift_cells, 2);
        assert!(!geom.snapped);
        let geom = det(10.0, 1, 7.0).geometry(&cells).unwrap();
        assert_eq!(geom.shift_cells, 1);
        assert!(geom.snapped);
        assert_relative_eq!(geom.snapped_shift_um, 5.0);
    }

    #[test]
    fn geometry_rejects_misaligned_specs() {
        let cells = cell_frame_from_fn(16, |_, _| (0.0, 0.0));
        // 12 um is not a multiple of the 5 um cell pitch.
        assert!(det(12.0, 1, 0.0).geometry(&cells).is_err());
        // 30 um tiles would leave 16 cells / 6 ragged.
        assert!(det(30.0, 1, 0.0).geometry(&cells).is_err());
        // Shift beyond half the 80 um field of view.
        assert!(det(20.0, 1, 45.0).geometry(&cells).is_err());
        assert!(DetectorSpec::new(20.0, 0, 1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn background_adds_variance_but_no_mean() {
        let cells = cell_frame_from_fn(16, |_, _| (0.0, 0.0));
        let spec = DetectorSpec::new(20.0, 1, 1.0, 1.0, 0.0, 9.0).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let draws = 2000;
        let (mut sum, mut sumsq) = (0.0, 0.0);
        for _ in 0..draws {
            let frame = bin_pixels(&cells, &spec, &mut rng).unwrap();
            for c in frame.counts1.iter() {
                sum += c;
                sumsq += c * c;
            }
        }
        let n = (draws * 16) as f64;
        let mean = sum / n;
        let var = sumsq / n - mean * mean;
        assert!(mean.abs() < 5.0 * (9.0f64 / n).sqrt());
        assert_relative_eq!(var, 9.0, max_relative = 0.1);
    }

    #[test]
    fn slice_accumulation_adds_counts_and_modes() {
        let mut a = cell_frame_from_fn(16, |_, _| (1.0, 2.0));
        let b = cell_frame_from_fn(16, |_, _| (0.5, 0.25));
        a.accumulate(&b).unwrap();
        assert_relative_eq!(a.counts1[[0, 0]], 1.5);
        assert_relative_eq!(a.counts2[[0, 0]], 2.25);
        assert_relative_eq!(a.modes_per_cell, 8.0);
    }

    #[test]
    fn csv_rows_cover_every_pixel_and_arm() {
        let cells = cell_frame_from_fn(16, |j, i| (j as f64, i as f64));
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let frame = bin_pixels(&cells, &det(40.0, 1, 0.0), &mut rng).unwrap();
        let mut buf = Vec::new();
        write_frames_csv(&[frame.clone(), frame], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "trajectory,pixel_x,pixel_y,arm,count");
        // 16x16 cells at 5 um bin into 2x2 pixels of 40 um.
        assert_eq!(lines.len(), 1 + 2 * 4 * 2);
        assert!(lines[1].starts_with("0,0,0,1,"));
    }
}
