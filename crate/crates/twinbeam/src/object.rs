//! Absorbing objects and detection losses.
//!
//! An absorber of coefficient `alpha` transmits the field amplitude with
//! `t = sqrt(1 - alpha)` and couples in fresh vacuum through the open port:
//! `a' = t a + i sqrt(1 - t^2) v`.  In the Wigner representation the vacuum
//! injection is not optional: it keeps the half-photon noise floor of every
//! cell intact, which is what the ordering corrections later remove.
//! Detector quantum efficiency is the same transformation with `t = sqrt(eta)`
//! applied to both arms.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{invalid, Result, TwinError};
use crate::field::FieldPair;

/// Per-cell absorption coefficient `alpha(x, y)` on the detection grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectMask {
    alpha: Array2<f64>,
}

impl ObjectMask {
    pub fn new(alpha: Array2<f64>) -> Result<Self> {
        if alpha.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(invalid("absorption coefficients must lie in [0, 1]"));
        }
        Ok(Self { alpha })
    }

    /// A mask absorbing uniformly over the whole grid.
    pub fn uniform(ny: usize, nx: usize, alpha: f64) -> Result<Self> {
        Self::new(Array2::from_elem((ny, nx), alpha))
    }

    /// A rectangle of uniform absorption on an otherwise transparent grid;
    /// bounds are half-open cell ranges.
    pub fn uniform_rect(
        ny: usize,
        nx: usize,
        alpha: f64,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> Result<Self> {
        if rows.end > ny || cols.end > nx {
            return Err(invalid("rectangle exceeds the grid"));
        }
        let mut map = Array2::zeros((ny, nx));
        for j in rows {
            for i in cols.clone() {
                map[[j, i]] = alpha;
            }
        }
        Self::new(map)
    }

    /// A block-letter R stencil (for "ratio"), scaled to fill the central
    /// region of the grid: a recognizable shape for by-eye checks of
    /// retrieved images.
    pub fn letter_stencil(ny: usize, nx: usize, alpha: f64) -> Result<Self> {
        const GLYPH: [&str; 7] = [
            "####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#",
        ];
        let (gh, gw) = (GLYPH.len(), GLYPH[0].len());
        let mut map = Array2::zeros((ny, nx));
        // Occupy the middle ~60% of the grid, nearest-neighbour scaled.
        let (h, w) = (ny * 3 / 5, nx * 3 / 5);
        let (j0, i0) = ((ny - h) / 2, (nx - w) / 2);
        for dj in 0..h {
            for di in 0..w {
                let gj = dj * gh / h;
                let gi = di * gw / w;
                if GLYPH[gj].as_bytes()[gi] == b'#' {
                    map[[j0 + dj, i0 + di]] = alpha;
                }
            }
        }
        Self::new(map)
    }

    pub fn alpha(&self) -> &Array2<f64> {
        &self.alpha
    }

    pub fn shape(&self) -> (usize, usize) {
        self.alpha.dim()
    }

    /// Mean absorption inside each pixel of `cells x cells` mask cells,
    /// for comparing pixel-level estimates against the ground truth.
    pub fn pixel_average(&self, cells_y: usize, cells_x: usize) -> Result<Array2<f64>> {
        let (ny, nx) = self.alpha.dim();
        if cells_y == 0 || cells_x == 0 || ny % cells_y != 0 || nx % cells_x != 0 {
            return Err(invalid("pixel size must evenly divide the mask grid"));
        }
        let (py, px) = (ny / cells_y, nx / cells_x);
        let mut out = Array2::zeros((py, px));
        for j in 0..ny {
            for i in 0..nx {
                out[[j / cells_y, i / cells_x]] += self.alpha[[j, i]];
            }
        }
        out /= (cells_y * cells_x) as f64;
        Ok(out)
    }

    /// Parses the plain-text format: a `width height` header line followed by
    /// `height` rows of `width` whitespace-separated absorption values.
    pub fn from_text(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| invalid("empty mask file"))??;
        let mut dims = header.split_whitespace();
        let parse_dim = |tok: Option<&str>| -> Result<usize> {
            tok.ok_or_else(|| invalid("mask header needs `width height`"))?
                .parse()
                .map_err(|e| invalid(format!("bad mask dimension: {e}")))
        };
        let nx = parse_dim(dims.next())?;
        let ny = parse_dim(dims.next())?;
        let mut values = Vec::with_capacity(nx * ny);
        for line in lines {
            let line = line?;
            for tok in line.split_whitespace() {
                values.push(
                    tok.parse::<f64>()
                        .map_err(|e| invalid(format!("bad mask value {tok:?}: {e}")))?,
                );
            }
        }
        if values.len() != nx * ny {
            return Err(invalid(format!(
                "mask body has {} values, expected {} x {} = {}",
                values.len(),
                nx,
                ny,
                nx * ny
            )));
        }
        let alpha = Array2::from_shape_vec((ny, nx), values)
            .map_err(|e| invalid(format!("mask shape: {e}")))?;
        Self::new(alpha)
    }

    /// Writes the same plain-text format read by [`ObjectMask::from_text`].
    pub fn to_text(&self, w: &mut impl Write) -> std::io::Result<()> {
        let (ny, nx) = self.alpha.dim();
        writeln!(w, "{nx} {ny}")?;
        let mut line = String::new();
        for row in self.alpha.outer_iter() {
            line.clear();
            for (i, a) in row.iter().enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                let _ = write!(line, "{a}");
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

fn vacuum_draw(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(0.5 * re, 0.5 * im)
}

/// Passes arm one through the absorber: per cell
/// `a_1' = t a_1 + i sqrt(1 - t^2) v` with `t = sqrt(1 - alpha)` and `v` a
/// fresh vacuum sample.  The mask is applied identically to every temporal
/// frequency (the absorber is taken as spectrally flat over the simulated
/// window).
pub fn apply_object(mut fields: FieldPair, mask: &ObjectMask, rng: &mut impl Rng) -> Result<FieldPair> {
    let (ny, nx) = mask.shape();
    if (fields.grid.ny(), fields.grid.nx()) != (ny, nx) {
        return Err(TwinError::ShapeMismatch(format!(
            "mask {ny}x{nx} does not match grid {}x{}",
            fields.grid.ny(),
            fields.grid.nx()
        )));
    }
    for k in 0..fields.grid.nt() {
        for j in 0..ny {
            for i in 0..nx {
                let alpha = mask.alpha[[j, i]];
                if alpha == 0.0 {
                    continue;
                }
                let t = (1.0 - alpha).sqrt();
                let open = Complex64::new(0.0, alpha.sqrt());
                let v = vacuum_draw(rng);
                let a = fields.c1[[k, j, i]];
                fields.c1[[k, j, i]] = t * a + open * v;
            }
        }
    }
    Ok(fields)
}

/// Models detector quantum efficiency as a beam splitter of transmission
/// `sqrt(eta)` in front of each arm, with independent vacuum on the open
/// ports.  `eta = 1` leaves the fields untouched.
pub fn apply_efficiency(
    mut fields: FieldPair,
    eta1: f64,
    eta2: f64,
    rng: &mut impl Rng,
) -> Result<FieldPair> {
    for eta in [eta1, eta2] {
        if !(0.0..=1.0).contains(&eta) {
            return Err(invalid(format!("efficiency must lie in [0, 1], got {eta}")));
        }
    }
    for (field, eta) in [(&mut fields.c1, eta1), (&mut fields.c2, eta2)] {
        if eta == 1.0 {
            continue;
        }
        let t = eta.sqrt();
        let open = Complex64::new(0.0, (1.0 - eta).sqrt());
        for c in field.iter_mut() {
            *c = t * *c + open * vacuum_draw(rng);
        }
    }
    Ok(fields)
}
