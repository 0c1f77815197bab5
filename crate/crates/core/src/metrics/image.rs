//! PSNR and SSIM on normal maps encoded to `[0, 1]`.

use alloc::vec;
use alloc::vec::Vec;

use super::normals::{check_same_size, NormalMapImage};
use crate::error::{Error, Result};

/// Gaussian window of the SSIM statistics: standard deviation and radius
/// (an 11 x 11 window).
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_RADIUS: usize = 5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

/// Peak signal-to-noise ratio in dB for signals in `[0, 1]`. Identical inputs
/// give `f64::INFINITY`.
pub fn psnr(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Shape {
            what: "image samples",
            expected: a.len(),
            actual: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mse = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / a.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-10.0 * libm::log10(mse))
}

fn gaussian_window() -> [f64; 2 * SSIM_RADIUS + 1] {
    let mut w = [0.0; 2 * SSIM_RADIUS + 1];
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - SSIM_RADIUS as f64;
        *v = libm::exp(-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA));
    }
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= sum);
    w
}

/// Separable Gaussian filter keeping only fully covered positions.
fn filter_valid(src: &[f64], height: usize, width: usize, window: &[f64]) -> Vec<f64> {
    let k = window.len();
    let (vh, vw) = (height + 1 - k, width + 1 - k);
    let mut rows = vec![0.0; height * vw];
    for y in 0..height {
        for x in 0..vw {
            rows[y * vw + x] = window.iter().enumerate().map(|(i, w)| w * src[y * width + x + i]).sum();
        }
    }
    let mut out = vec![0.0; vh * vw];
    for y in 0..vh {
        for x in 0..vw {
            out[y * vw + x] = window.iter().enumerate().map(|(i, w)| w * rows[(y + i) * vw + x]).sum();
        }
    }
    out
}

/// Mean structural similarity of two channel-interleaved images with values
/// in `[0, 1]`, averaged over channels. Local statistics use the Gaussian
/// window with population (not sample) variances, evaluated where the window
/// fits inside the image.
pub fn ssim(a: &[f64], b: &[f64], height: usize, width: usize, channels: usize) -> Result<f64> {
    let len = height * width * channels;
    for (what, actual) in [("first image samples", a.len()), ("second image samples", b.len())] {
        if actual != len {
            return Err(Error::Shape {
                what,
                expected: len,
                actual,
            });
        }
    }
    let k = 2 * SSIM_RADIUS + 1;
    if height < k || width < k {
        return Err(Error::InvalidParameter("image smaller than the 11x11 SSIM window"));
    }
    if channels == 0 {
        return Err(Error::EmptyInput);
    }
    let window = gaussian_window();
    let (c1, c2) = ((K1 * 1.0) * (K1 * 1.0), (K2 * 1.0) * (K2 * 1.0));
    let mut total = 0.0;
    for ch in 0..channels {
        let x: Vec<f64> = a.iter().skip(ch).step_by(channels).copied().collect();
        let y: Vec<f64> = b.iter().skip(ch).step_by(channels).copied().collect();
        let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
        let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
        let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p * q).collect();
        let [mx, my, mxx, myy, mxy] = [&x, &y, &xx, &yy, &xy].map(|s| filter_valid(s, height, width, &window));
        let mut sum = 0.0;
        for i in 0..mx.len() {
            let (ux, uy) = (mx[i], my[i]);
            let vx = mxx[i] - ux * ux;
            let vy = myy[i] - uy * uy;
            let vxy = mxy[i] - ux * uy;
            sum += ((2.0 * ux * uy + c1) * (2.0 * vxy + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2));
        }
        total += sum / mx.len() as f64;
    }
    Ok(total / channels as f64)
}

/// PSNR (peak 1) and SSIM of two normal maps after encoding to `(n + 1) / 2`.
pub fn psnr_ssim(a: &NormalMapImage, b: &NormalMapImage) -> Result<(f64, f64)> {
    check_same_size(a, b)?;
    let (ea, eb) = (a.encoded(), b.encoded());
    Ok((psnr(&ea, &eb)?, ssim(&ea, &eb, a.height, a.width, 3)?))
}
