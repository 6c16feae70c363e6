//! Stochastic field amplitudes of the twin beams.
//!
//! A [`FieldPair`] holds the two complex envelopes `c1`, `c2` on a
//! `[nt][ny][nx]` grid in the mixed representation: direct transverse
//! coordinates `(x, y)` and temporal frequency `Omega`.  In the Wigner
//! picture each cell is a bosonic mode whose vacuum fluctuations carry
//! `<|c|^2> = 1/2`; photon numbers are recovered from moments of `|c|^2`
//! after subtracting that half photon per mode.

use ndarray::Array3;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::io::{self, Read, Write};

use crate::error::{invalid, Result, TwinError};
use crate::fft::Fft2;
use crate::grid::GridSpec;
use crate::Arm;

/// Where a [`FieldPair`] currently lives along the optical train.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Plane {
    /// Near field at the crystal, direct transverse coordinates in um.
    Source,
    /// Focal plane of the far-field lens; cell `(j, i)` is centred at
    /// `((i - nx/2) pitch_x, (j - ny/2) pitch_y)` um.
    Detection { pitch_x_um: f64, pitch_y_um: f64 },
}

/// The pair of stochastic envelopes for the two downconverted beams.
#[derive(Debug, Clone)]
pub struct FieldPair {
    pub(crate) c1: Array3<Complex64>,
    pub(crate) c2: Array3<Complex64>,
    pub(crate) grid: GridSpec,
    pub(crate) plane: Plane,
    pub(crate) z_um: f64,
}

impl FieldPair {
    pub(crate) fn zeros(grid: GridSpec) -> Self {
        let shape = (grid.nt(), grid.ny(), grid.nx());
        Self {
            c1: Array3::zeros(shape),
            c2: Array3::zeros(shape),
            grid,
            plane: Plane::Source,
            z_um: 0.0,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn plane(&self) -> Plane {
        self.plane
    }

    /// Propagation coordinate, um.
    pub fn z_um(&self) -> f64 {
        self.z_um
    }

    pub fn c1(&self) -> &Array3<Complex64> {
        &self.c1
    }

    pub fn c2(&self) -> &Array3<Complex64> {
        &self.c2
    }

    pub fn arm(&self, arm: Arm) -> &Array3<Complex64> {
        match arm {
            Arm::One => &self.c1,
            Arm::Two => &self.c2,
        }
    }

    /// Wigner intensities `sum |c|^2` of the two arms.  Each includes the
    /// vacuum contribution of half a photon per cell.
    pub fn wigner_intensity(&self) -> (f64, f64) {
        let s = |a: &Array3<Complex64>| a.iter().map(|c| c.norm_sqr()).sum();
        (s(&self.c1), s(&self.c2))
    }

    /// Mean photon number per cell in each arm, with the vacuum half photon
    /// removed.  Unbiased over a vacuum ensemble, noisy for a single draw.
    pub fn mean_photons_per_mode(&self) -> (f64, f64) {
        let n = self.grid.cells() as f64;
        let (i1, i2) = self.wigner_intensity();
        (i1 / n - 0.5, i2 / n - 0.5)
    }

    pub(crate) fn assert_finite(&self, context: &str) -> Result<()> {
        let (i1, i2) = self.wigner_intensity();
        if !(i1.is_finite() && i2.is_finite()) {
            return Err(TwinError::Numeric(format!(
                "non-finite field amplitudes during {context}"
            )));
        }
        Ok(())
    }

    /// Transports the pair from the source plane to the focal plane of a lens
    /// of focal length `focal_um`, which maps transverse wavevector `q` to
    /// position `x = (lambda f / 2 pi) q`.  The transform is unitary, so
    /// Wigner intensities are conserved; axes are rotated so cell `(ny/2,
    /// nx/2)` sits at `q = 0`.
    pub fn to_far_field(mut self, focal_um: f64, lambda_um: f64) -> Result<Self> {
        if !matches!(self.plane, Plane::Source) {
            return Err(invalid("to_far_field requires a source-plane field"));
        }
        if !focal_um.is_finite() || focal_um <= 0.0 || !lambda_um.is_finite() || lambda_um <= 0.0 {
            return Err(invalid("focal length and wavelength must be > 0"));
        }
        let mut fft = Fft2::new(self.grid.nx(), self.grid.ny());
        for field in [&mut self.c1, &mut self.c2] {
            for mut plane in field.outer_iter_mut() {
                fft.forward(plane.as_slice_mut().expect("contiguous plane"));
            }
        }
        fftshift_transverse(&mut self.c1);
        fftshift_transverse(&mut self.c2);
        let (px, py) = self.grid.detection_pitch_um(focal_um, lambda_um);
        self.plane = Plane::Detection { pitch_x_um: px, pitch_y_um: py };
        Ok(self)
    }

    /// Serializes the pair with a self-describing little-endian header:
    /// magic `TBFP`, format version, plane tag and pitches, z, grid shape and
    /// cell sizes, the caller's RNG seed, then `c1` and `c2` as interleaved
    /// `(re, im)` doubles in `[nt][ny][nx]` row-major order.
    pub fn write_binary(&self, w: &mut impl Write, seed: u64) -> io::Result<()> {
        w.write_all(b"TBFP")?;
        w.write_all(&1u32.to_le_bytes())?;
        let (tag, px, py) = match self.plane {
            Plane::Source => (0u8, 0.0, 0.0),
            Plane::Detection { pitch_x_um, pitch_y_um } => (1u8, pitch_x_um, pitch_y_um),
        };
        w.write_all(&[tag])?;
        for v in [px, py, self.z_um] {
            w.write_all(&v.to_le_bytes())?;
        }
        for n in [self.grid.nt(), self.grid.ny(), self.grid.nx()] {
            w.write_all(&(n as u32).to_le_bytes())?;
        }
        for v in [self.grid.dx_um(), self.grid.dy_um(), self.grid.dt_ps()] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&seed.to_le_bytes())?;
        for field in [&self.c1, &self.c2] {
            for c in field.iter() {
                w.write_all(&c.re.to_le_bytes())?;
                w.write_all(&c.im.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads a pair written by [`FieldPair::write_binary`], returning the
    /// fields and the recorded seed.
    pub fn read_binary(r: &mut impl Read) -> Result<(Self, u64)> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"TBFP" {
            return Err(invalid("not a field-pair dump (bad magic)"));
        }
        let version = read_u32(r)?;
        if version != 1 {
            return Err(invalid(format!("unsupported dump version {version}")));
        }
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag)?;
        let px = read_f64(r)?;
        let py = read_f64(r)?;
        let z_um = read_f64(r)?;
        let nt = read_u32(r)? as usize;
        let ny = read_u32(r)? as usize;
        let nx = read_u32(r)? as usize;
        let dx = read_f64(r)?;
        let dy = read_f64(r)?;
        let dt = read_f64(r)?;
        let seed = {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            u64::from_le_bytes(b)
        };
        let grid = GridSpec::new(nx, ny, nt, dx, dy, dt)?;
        let plane = match tag[0] {
            0 => Plane::Source,
            1 => Plane::Detection { pitch_x_um: px, pitch_y_um: py },
            t => return Err(invalid(format!("unknown plane tag {t}"))),
        };
        let mut read_field = || -> Result<Array3<Complex64>> {
            let mut data = Vec::with_capacity(nt * ny * nx);
            for _ in 0..nt * ny * nx {
                data.push(Complex64::new(read_f64(r)?, read_f64(r)?));
            }
            Array3::from_shape_vec((nt, ny, nx), data)
                .map_err(|e| invalid(format!("dump shape error: {e}")))
        };
        let c1 = read_field()?;
        let c2 = read_field()?;
        Ok((Self { c1, c2, grid, plane, z_um }, seed))
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

/// Swaps transverse half-planes so the zero-frequency cell moves from index 0
/// to index `n/2` on both axes (its own inverse for even grids).
pub(crate) fn fftshift_transverse(field: &mut Array3<Complex64>) {
    let (nt, ny, nx) = field.dim();
    let mut shifted = Array3::zeros((nt, ny, nx));
    for k in 0..nt {
        for j in 0..ny {
            for i in 0..nx {
                shifted[[k, (j + ny / 2) % ny, (i + nx / 2) % nx]] = field[[k, j, i]];
            }
        }
    }
    *field = shifted;
}

/// Draws the vacuum state: every cell of both arms is an independent circular
/// Gaussian with `<|c|^2> = 1/2` (quadrature variance 1/4 each), the Wigner
/// representation of the bosonic ground state.
pub fn sample_vacuum(grid: &GridSpec, rng: &mut impl Rng) -> FieldPair {
    let mut fields = FieldPair::zeros(*grid);
    for field in [&mut fields.c1, &mut fields.c2] {
        for c in field.iter_mut() {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *c = Complex64::new(0.5 * re, 0.5 * im);
        }
    }
    fields
}

/// A deterministic probe that is unity across all of `(q, Omega)` in one arm
/// and zero in the other.  Because propagation is linear in the input
/// amplitudes, running this probe through any gain stage reads out the
/// stage's transfer functions: the excited arm returns its self-gain
/// spectrum, the empty arm the cross-gain spectrum.
pub fn spectral_probe(grid: &GridSpec, arm: Arm) -> FieldPair {
    let mut fields = FieldPair::zeros(*grid);
    let amp = Complex64::new((grid.transverse_cells() as f64).sqrt(), 0.0);
    let target = match arm {
        Arm::One => &mut fields.c1,
        Arm::Two => &mut fields.c2,
    };
    for k in 0..grid.nt() {
        target[[k, 0, 0]] = amp;
    }
    fields
}
