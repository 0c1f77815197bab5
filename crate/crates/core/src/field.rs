//! The coefficient grid and occupancy reconstruction from it.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::basis::CosineBasis;
use crate::error::{Error, Result};

/// `H x W` grid of `N` cosine coefficients per pixel.
///
/// Storage is row-major with the coefficient index fastest:
/// `data[(y * W + x) * N + n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FofGrid {
    height: usize,
    width: usize,
    terms: usize,
    data: Vec<f64>,
}

impl FofGrid {
    pub fn zeros(height: usize, width: usize, terms: usize) -> Result<Self> {
        check_dims(height, width, terms)?;
        Ok(Self {
            height,
            width,
            terms,
            data: vec![0.0; height * width * terms],
        })
    }

    pub fn from_data(height: usize, width: usize, terms: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(height, width, terms)?;
        if data.len() != height * width * terms {
            return Err(Error::Shape {
                what: "coefficient data",
                expected: height * width * terms,
                actual: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("coefficients must be finite"));
        }
        Ok(Self {
            height,
            width,
            terms,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn coeffs(&self, x: usize, y: usize) -> &[f64] {
        let start = (y * self.width + x) * self.terms;
        &self.data[start..start + self.terms]
    }

    #[inline]
    pub fn coeffs_mut(&mut self, x: usize, y: usize) -> &mut [f64] {
        let start = (y * self.width + x) * self.terms;
        &mut self.data[start..start + self.terms]
    }

    pub fn checked_coeffs(&self, x: usize, y: usize) -> Result<&[f64]> {
        if x >= self.width {
            return Err(Error::Index {
                index: x,
                len: self.width,
            });
        }
        if y >= self.height {
            return Err(Error::Index {
                index: y,
                len: self.height,
            });
        }
        Ok(self.coeffs(x, y))
    }

    /// Keeps the first `terms` coefficients of every pixel.
    pub fn truncated(&self, terms: usize) -> Result<FofGrid> {
        if terms == 0 || terms > self.terms {
            return Err(Error::InvalidParameter("truncation must keep 1..=N terms"));
        }
        let data = self
            .data
            .chunks_exact(self.terms)
            .flat_map(|c| c[..terms].iter().copied())
            .collect();
        FofGrid::from_data(self.height, self.width, terms, data)
    }

    /// Resizes the grid in the image plane.
    ///
    /// Integer downsampling factors use box averaging, which keeps the
    /// coefficients of the averaged occupancy exact since the field is linear
    /// in `C`. Other sizes are bilinearly interpolated between pixel centers.
    pub fn resampled(&self, height: usize, width: usize) -> Result<FofGrid> {
        check_dims(height, width, self.terms)?;
        if height == self.height && width == self.width {
            return Ok(self.clone());
        }
        let n = self.terms;
        let mut out = FofGrid::zeros(height, width, n)?;
        if self.height % height == 0 && self.width % width == 0 {
            let (fy, fx) = (self.height / height, self.width / width);
            let norm = 1.0 / (fx * fy) as f64;
            for y in 0..height {
                for x in 0..width {
                    let dst = out.coeffs_mut(x, y);
                    for sy in y * fy..(y + 1) * fy {
                        for sx in x * fx..(x + 1) * fx {
                            let src = &self.data[(sy * self.width + sx) * n..][..n];
                            dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
                        }
                    }
                    dst.iter_mut().for_each(|d| *d *= norm);
                }
            }
            return Ok(out);
        }
        let source = |t: usize, count: usize, src_count: usize| {
            let c = crate::geometry::to_pixel(crate::geometry::pixel_center(t as i64, count), src_count);
            let c = c.clamp(0.0, (src_count - 1) as f64);
            let i0 = libm::floor(c) as usize;
            let i1 = (i0 + 1).min(src_count - 1);
            (i0, i1, c - i0 as f64)
        };
        for y in 0..height {
            let (y0, y1, wy) = source(y, height, self.height);
            for x in 0..width {
                let (x0, x1, wx) = source(x, width, self.width);
                let taps = [
                    (x0, y0, (1.0 - wx) * (1.0 - wy)),
                    (x1, y0, wx * (1.0 - wy)),
                    (x0, y1, (1.0 - wx) * wy),
                    (x1, y1, wx * wy),
                ];
                let dst = out.coeffs_mut(x, y);
                for (sx, sy, w) in taps {
                    if w == 0.0 {
                        continue;
                    }
                    let src = &self.data[(sy * self.width + sx) * n..][..n];
                    dst.iter_mut().zip(src).for_each(|(d, s)| *d += w * s);
                }
            }
        }
        Ok(out)
    }
}

fn check_dims(height: usize, width: usize, terms: usize) -> Result<()> {
    if height == 0 || width == 0 || terms == 0 {
        return Err(Error::InvalidParameter("grid dimensions must be at least 1"));
    }
    Ok(())
}

/// Reconstructed occupancy sampled on an `H x W x D` grid, z fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyVolume {
    pub height: usize,
    pub width: usize,
    pub z_grid: Vec<f64>,
    pub data: Vec<f64>,
}

impl OccupancyVolume {
    pub fn depth(&self) -> usize {
        self.z_grid.len()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, d: usize) -> f64 {
        self.data[(y * self.width + x) * self.z_grid.len() + d]
    }

    /// The samples of one pixel column.
    pub fn column(&self, x: usize, y: usize) -> &[f64] {
        let depth = self.z_grid.len();
        &self.data[(y * self.width + x) * depth..][..depth]
    }
}

/// Writes `b(z_d)^T c` for every sample of `basis` into `out`.
#[inline]
pub(crate) fn evaluate_column(coeffs: &[f64], basis: &CosineBasis, out: &mut [f64]) {
    if coeffs.iter().all(|&c| c == 0.0) {
        out.fill(0.0);
        return;
    }
    // accumulate term by term; each sample sums in increasing n
    out.fill(0.0);
    for (n, &c) in coeffs.iter().enumerate() {
        for (o, &b) in out.iter_mut().zip(basis.column(n)) {
            *o += c * b;
        }
    }
}

/// `F(x, y, z_d) = b(z_d)^T C(x, y)` on every pixel and every basis sample.
pub fn evaluate_field(fof: &FofGrid, basis: &CosineBasis) -> Result<OccupancyVolume> {
    if basis.terms() != fof.terms() {
        return Err(Error::Shape {
            what: "basis terms",
            expected: fof.terms(),
            actual: basis.terms(),
        });
    }
    let depth = basis.samples();
    let mut data = vec![0.0; fof.height() * fof.width() * depth];
    if depth > 0 {
        for (pixel, column) in data.chunks_exact_mut(depth).enumerate() {
            let start = pixel * fof.terms();
            evaluate_column(&fof.data()[start..start + fof.terms()], basis, column);
        }
    }
    Ok(OccupancyVolume {
        height: fof.height(),
        width: fof.width(),
        z_grid: basis.z_grid().to_vec(),
        data,
    })
}

/// Value of the truncated cosine series with coefficients `coeffs` at `z`.
///
/// Clenshaw recurrence on `cos(n theta)`, `theta = pi (z + 1) / 2`.
pub fn series_value(coeffs: &[f64], z: f64) -> f64 {
    let Some((&a0, rest)) = coeffs.split_first() else {
        return 0.0;
    };
    let x = libm::cos(PI * 0.5 * (z + 1.0));
    let (mut b1, mut b2) = (0.0f64, 0.0f64);
    for &c in rest.iter().rev() {
        let b0 = c + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    // sum_{n>=1} a_n cos(n theta) = b_1 cos(theta) - b_2
    0.5 * a0 + b1 * x - b2
}

/// [`series_value`] for `K` pixels at once. Every lane performs the same
/// operations as the scalar version, so results are identical; interleaving
/// independent recurrences only hides their latency.
pub(crate) fn series_values<const K: usize>(coeffs: &[&[f64]; K], z: &[f64; K]) -> [f64; K] {
    let terms = coeffs[0].len();
    debug_assert!(coeffs.iter().all(|c| c.len() == terms));
    if terms == 0 {
        return [0.0; K];
    }
    let x: [f64; K] = core::array::from_fn(|l| libm::cos(PI * 0.5 * (z[l] + 1.0)));
    let (mut b1, mut b2) = ([0.0f64; K], [0.0f64; K]);
    for n in (1..terms).rev() {
        for l in 0..K {
            let b0 = coeffs[l][n] + 2.0 * x[l] * b1[l] - b2[l];
            b2[l] = b1[l];
            b1[l] = b0;
        }
    }
    core::array::from_fn(|l| 0.5 * coeffs[l][0] + b1[l] * x[l] - b2[l])
}

/// Reconstructed occupancy at a single pixel and depth.
pub fn evaluate_point(fof: &FofGrid, x_pix: usize, y_pix: usize, z: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&z) {
        return Err(Error::Domain { value: z });
    }
    Ok(series_value(fof.checked_coeffs(x_pix, y_pix)?, z))
}
