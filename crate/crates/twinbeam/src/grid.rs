//! Discretization of the transverse plane and of the temporal-frequency axis.
//!
//! All fields live on a rectangular grid of `nx * ny` transverse cells and
//! `nt` temporal-frequency cells.  Lengths are micrometres, times picoseconds,
//! so transverse wavevectors come out in rad/um and frequencies in rad/ps.
//! Spectral axes follow the natural FFT layout: index `i` carries frequency
//! `i * dq` for `i < n/2` and `(i - n) * dq` above, so the conjugate partner
//! of index `i` is `(n - i) % n`.

use crate::error::{invalid, Result};

/// Sampling of the simulation volume: cell counts and cell sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    nx: usize,
    ny: usize,
    nt: usize,
    dx_um: f64,
    dy_um: f64,
    dt_ps: f64,
}

impl GridSpec {
    /// Builds a grid, requiring even cell counts of at least two per axis and
    /// strictly positive cell sizes.  Even counts keep the conjugate-partner
    /// map `i -> (n - i) % n` an involution that pairs every cell.
    pub fn new(nx: usize, ny: usize, nt: usize, dx_um: f64, dy_um: f64, dt_ps: f64) -> Result<Self> {
        for (label, n) in [("nx", nx), ("ny", ny), ("nt", nt)] {
            if n < 2 || n % 2 != 0 {
                return Err(invalid(format!("{label} must be even and >= 2, got {n}")));
            }
        }
        for (label, d) in [("dx_um", dx_um), ("dy_um", dy_um), ("dt_ps", dt_ps)] {
            if !d.is_finite() || d <= 0.0 {
                return Err(invalid(format!("{label} must be finite and > 0, got {d}")));
            }
        }
        Ok(Self { nx, ny, nt, dx_um, dy_um, dt_ps })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn dx_um(&self) -> f64 {
        self.dx_um
    }

    pub fn dy_um(&self) -> f64 {
        self.dy_um
    }

    pub fn dt_ps(&self) -> f64 {
        self.dt_ps
    }

    /// Number of transverse cells, `nx * ny`.
    pub fn transverse_cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Total number of cells, `nx * ny * nt`.
    pub fn cells(&self) -> usize {
        self.nx * self.ny * self.nt
    }

    /// Transverse-wavevector step along x: `2 pi / (nx dx)`, rad/um.
    pub fn dqx(&self) -> f64 {
        std::f64::consts::TAU / (self.nx as f64 * self.dx_um)
    }

    /// Transverse-wavevector step along y: `2 pi / (ny dy)`, rad/um.
    pub fn dqy(&self) -> f64 {
        std::f64::consts::TAU / (self.ny as f64 * self.dy_um)
    }

    /// Temporal-frequency step: `2 pi / (nt dt)`, rad/ps.
    pub fn domega(&self) -> f64 {
        std::f64::consts::TAU / (self.nt as f64 * self.dt_ps)
    }

    /// Signed frequency index in natural FFT order: `i` for the first half of
    /// the axis, `i - n` for the second.
    pub fn signed_index(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Transverse wavevector carried by x-index `i`, natural order, rad/um.
    pub fn qx(&self, i: usize) -> f64 {
        Self::signed_index(i, self.nx) as f64 * self.dqx()
    }

    /// Transverse wavevector carried by y-index `j`, natural order, rad/um.
    pub fn qy(&self, j: usize) -> f64 {
        Self::signed_index(j, self.ny) as f64 * self.dqy()
    }

    /// Frequency offset from degeneracy carried by index `k`, natural order,
    /// rad/ps.
    pub fn omega(&self, k: usize) -> f64 {
        Self::signed_index(k, self.nt) as f64 * self.domega()
    }

    /// Direct-space x coordinate of column `i`, with the origin at column
    /// `nx / 2` so that a centred pump sits mid-array, um.
    pub fn x_um(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.dx_um
    }

    /// Direct-space y coordinate of row `j`, um.
    pub fn y_um(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.dy_um
    }

    /// Cell pitch in the focal plane of a lens performing the far-field map
    /// `x = (lambda f / 2 pi) q`: one spectral step `dq` spans
    /// `lambda f / (n d)` there.  Returns `(pitch_x, pitch_y)` in um.
    pub fn detection_pitch_um(&self, focal_um: f64, lambda_um: f64) -> (f64, f64) {
        let scale = lambda_um * focal_um / std::f64::consts::TAU;
        (scale * self.dqx(), scale * self.dqy())
    }

    /// Checks that the far-field pitch resolves the transverse coherence
    /// length `x_coh ~ lambda f / w_p` set by a pump of waist `waist_um`:
    /// correlated partner cells spread over a spot of that size, so the pitch
    /// must not exceed `x_coh / 2` on either axis.
    pub fn validate_far_field_resolution(
        &self,
        focal_um: f64,
        lambda_um: f64,
        waist_um: f64,
    ) -> Result<()> {
        let x_coh = lambda_um * focal_um / waist_um;
        let (px, py) = self.detection_pitch_um(focal_um, lambda_um);
        if px > x_coh / 2.0 || py > x_coh / 2.0 {
            return Err(invalid(format!(
                "far-field pitch ({px:.3}, {py:.3}) um undersamples the \
                 coherence spot x_coh = {x_coh:.3} um; need pitch <= x_coh / 2"
            )));
        }
        Ok(())
    }
}
