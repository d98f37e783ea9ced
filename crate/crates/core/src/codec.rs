//! Block transform coding experiment: 8×8 separable transform, zig-zag
//! truncation to `r` coefficients, inverse transform and quality scores.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{ApproxTransform, RealMatrix};
use crate::{Error, Result, EIGEN_TOL};

pub const BLOCK: usize = 8;
const AREA: usize = BLOCK * BLOCK;

/// SSIM constants: window side, `K1`, `K2` and dynamic range.
pub const SSIM_WINDOW: usize = 8;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;
pub const SSIM_L: f64 = 255.0;

/// MSE at or below this is floating-point residue of an exact
/// reconstruction (RMS error under 1e-9 of a gray level) and is reported
/// as 0, so PSNR takes its infinite sentinel.
pub const EXACT_MSE_FLOOR: f64 = 1e-18;

/// 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidArgument("image must be non-empty".into()));
        }
        if samples.len() != width * height {
            return Err(Error::DimensionMismatch(format!("{} samples for {width}x{height}", samples.len())));
        }
        Ok(Self { width, height, samples })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut samples = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                samples.push(f(x, y));
            }
        }
        Self { width, height, samples }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }

    pub fn to_plane(&self) -> Vec<f64> {
        self.samples.iter().map(|&v| v as f64).collect()
    }

    /// Round and clip a real plane to 8 bits.
    pub fn from_plane(width: usize, height: usize, plane: &[f64]) -> Result<Self> {
        Self::new(width, height, plane.iter().map(|v| libm::round(v.clamp(0.0, 255.0)) as u8).collect())
    }

    /// Sub-image with top-left corner `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<Self> {
        if x0 + width > self.width || y0 + height > self.height {
            return Err(Error::InvalidArgument("crop exceeds image bounds".into()));
        }
        Ok(Self::from_fn(width, height, |x, y| self.get(x0 + x, y0 + y)))
    }

    pub fn inverted(&self) -> Self {
        Self { samples: self.samples.iter().map(|v| 255 - v).collect(), ..self.clone() }
    }
}

/// JPEG zig-zag scan as row-major positions in an 8×8 block.
pub fn zigzag_order() -> [usize; AREA] {
    let mut order = [0; AREA];
    let mut k = 0;
    for s in 0..(2 * BLOCK - 1) {
        let lo = s.saturating_sub(BLOCK - 1);
        let hi = s.min(BLOCK - 1);
        if s % 2 == 0 {
            for row in (lo..=hi).rev() {
                order[k] = row * BLOCK + (s - row);
                k += 1;
            }
        } else {
            for row in lo..=hi {
                order[k] = row * BLOCK + (s - row);
                k += 1;
            }
        }
    }
    order
}

fn check_r(r: usize) -> Result<()> {
    if (1..=AREA).contains(&r) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("retained coefficients r = {r} is outside 1..=64")))
    }
}

/// Keep the first `r` coefficients in zig-zag order and zero the rest.
pub fn zigzag_retain(coeffs: &RealMatrix, r: usize) -> Result<RealMatrix> {
    check_r(r)?;
    check_block(coeffs)?;
    let mut data = [0.0; AREA];
    for &p in &zigzag_order()[..r] {
        data[p] = coeffs.data()[p];
    }
    RealMatrix::new(BLOCK, BLOCK, data.to_vec())
}

fn check_block(m: &RealMatrix) -> Result<()> {
    if m.rows() != BLOCK || m.cols() != BLOCK {
        return Err(Error::DimensionMismatch(format!("expected an 8x8 block, got {}x{}", m.rows(), m.cols())));
    }
    Ok(())
}

/// `B = Ĉ·A·Ĉᵀ`.
pub fn forward_2d(c_hat: &RealMatrix, block: &RealMatrix) -> Result<RealMatrix> {
    check_block(c_hat)?;
    check_block(block)?;
    c_hat.matmul(block)?.matmul(&c_hat.transpose())
}

fn require_orthonormal(c_hat: &RealMatrix) -> Result<()> {
    check_block(c_hat)?;
    if !c_hat.has_orthonormal_rows(EIGEN_TOL) {
        return Err(Error::Precondition("inverse transform needs orthonormal rows"));
    }
    Ok(())
}

/// `A = Ĉᵀ·B·Ĉ`, the inverse of [`forward_2d`] for orthonormal `Ĉ`.
pub fn inverse_2d(c_hat: &RealMatrix, coeffs: &RealMatrix) -> Result<RealMatrix> {
    require_orthonormal(c_hat)?;
    check_block(coeffs)?;
    c_hat.transpose().matmul(coeffs)?.matmul(c_hat)
}

/// Fixed-size kernels used on the hot path.
struct BlockCodec {
    c: [f64; AREA],
    keep: [bool; AREA],
}

impl BlockCodec {
    fn new(c_hat: &RealMatrix, r: usize) -> Self {
        let mut c = [0.0; AREA];
        c.copy_from_slice(c_hat.data());
        let mut keep = [false; AREA];
        for &p in &zigzag_order()[..r] {
            keep[p] = true;
        }
        Self { c, keep }
    }

    /// `Ĉᵀ·mask(Ĉ·A·Ĉᵀ)·Ĉ`.
    fn process(&self, a: &[f64; AREA]) -> [f64; AREA] {
        let c = &self.c;
        let mut t = [0.0; AREA];
        // t = Ĉ·A
        for i in 0..BLOCK {
            for j in 0..BLOCK {
                let mut acc = 0.0;
                for k in 0..BLOCK {
                    acc += c[i * BLOCK + k] * a[k * BLOCK + j];
                }
                t[i * BLOCK + j] = acc;
            }
        }
        // b = t·Ĉᵀ, then truncate.
        let mut b = [0.0; AREA];
        for i in 0..BLOCK {
            for j in 0..BLOCK {
                if !self.keep[i * BLOCK + j] {
                    continue;
                }
                let mut acc = 0.0;
                for k in 0..BLOCK {
                    acc += t[i * BLOCK + k] * c[j * BLOCK + k];
                }
                b[i * BLOCK + j] = acc;
            }
        }
        // t = Ĉᵀ·b
        for i in 0..BLOCK {
            for j in 0..BLOCK {
                let mut acc = 0.0;
                for k in 0..BLOCK {
                    acc += c[k * BLOCK + i] * b[k * BLOCK + j];
                }
                t[i * BLOCK + j] = acc;
            }
        }
        // out = t·Ĉ
        let mut out = [0.0; AREA];
        for i in 0..BLOCK {
            for j in 0..BLOCK {
                let mut acc = 0.0;
                for k in 0..BLOCK {
                    acc += t[i * BLOCK + k] * c[k * BLOCK + j];
                }
                out[i * BLOCK + j] = acc;
            }
        }
        out
    }
}

/// Quality figures of one reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionResult {
    pub transform: String,
    pub r: usize,
    pub bpp: f64,
    pub mse: f64,
    /// `f64::INFINITY` when the reconstruction is exact.
    pub psnr: f64,
    pub ssim: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionOutput {
    /// Real-valued reconstruction clipped to `[0, 255]`; metrics use this.
    pub plane: Vec<f64>,
    /// The same reconstruction rounded to 8 bits, for export.
    pub image: GrayImage,
    pub result: CompressionResult,
}

/// Transform, truncate and reconstruct every 8×8 block, then score the
/// clipped real-valued reconstruction against the original.
///
/// Images whose sides are not multiples of 8 are edge-replicated for the
/// block stage; metrics cover the original extent only.
pub fn compress_image(img: &GrayImage, transform: &ApproxTransform, r: usize) -> Result<CompressionOutput> {
    check_r(r)?;
    require_orthonormal(&transform.c_hat)?;
    let plane = reconstruct(img, &transform.c_hat, r);
    let original = img.to_plane();
    let mse = mean_squared_error(&original, &plane)?;
    let mse = if mse <= EXACT_MSE_FLOOR { 0.0 } else { mse };
    let ssim = ssim_planes(img.width, img.height, &original, &plane)?;
    let result = CompressionResult { transform: transform.name.clone(), r, bpp: r as f64 / 8.0, mse, psnr: psnr_from_mse(mse), ssim };
    let image = GrayImage::from_plane(img.width, img.height, &plane)?;
    Ok(CompressionOutput { plane, image, result })
}

fn reconstruct(img: &GrayImage, c_hat: &RealMatrix, r: usize) -> Vec<f64> {
    let codec = BlockCodec::new(c_hat, r);
    let (w, h) = (img.width, img.height);
    let mut out = vec![0.0; w * h];
    for by in (0..h).step_by(BLOCK) {
        for bx in (0..w).step_by(BLOCK) {
            let mut a = [0.0; AREA];
            for y in 0..BLOCK {
                for x in 0..BLOCK {
                    let sx = (bx + x).min(w - 1);
                    let sy = (by + y).min(h - 1);
                    a[y * BLOCK + x] = img.get(sx, sy) as f64;
                }
            }
            let rec = codec.process(&a);
            for y in 0..BLOCK.min(h - by) {
                for x in 0..BLOCK.min(w - bx) {
                    out[(by + y) * w + bx + x] = rec[y * BLOCK + x].clamp(0.0, 255.0);
                }
            }
        }
    }
    out
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 16 {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        acc
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

pub fn mean_squared_error(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::DimensionMismatch(format!("planes of {} and {} samples", a.len(), b.len())));
    }
    let sq: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).collect();
    Ok(pairwise_sum(&sq) / a.len() as f64)
}

/// `10·log10(255²/MSE)`, infinite for a zero MSE.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * libm::log10(SSIM_L * SSIM_L / mse)
    }
}

/// Summed-area table with a zero border row and column.
fn integral(w: usize, h: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    let stride = w + 1;
    let mut s = vec![0.0; stride * (h + 1)];
    for y in 0..h {
        let mut row = 0.0;
        for x in 0..w {
            row += f(y * w + x);
            s[(y + 1) * stride + x + 1] = s[y * stride + x + 1] + row;
        }
    }
    s
}

fn window_sum(s: &[f64], w: usize, x: usize, y: usize, k: usize) -> f64 {
    let stride = w + 1;
    s[(y + k) * stride + x + k] - s[y * stride + x + k] - s[(y + k) * stride + x] + s[y * stride + x]
}

/// Mean SSIM over all 8×8 windows with uniform weights and population
/// statistics.
pub fn ssim_planes(width: usize, height: usize, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != width * height || b.len() != width * height {
        return Err(Error::DimensionMismatch("SSIM inputs must match the stated size".into()));
    }
    let k = SSIM_WINDOW;
    if width < k || height < k {
        return Err(Error::InvalidArgument(format!("SSIM needs at least {k}x{k} pixels")));
    }
    let c1 = (SSIM_K1 * SSIM_L) * (SSIM_K1 * SSIM_L);
    let c2 = (SSIM_K2 * SSIM_L) * (SSIM_K2 * SSIM_L);
    let sa = integral(width, height, |i| a[i]);
    let sb = integral(width, height, |i| b[i]);
    let saa = integral(width, height, |i| a[i] * a[i]);
    let sbb = integral(width, height, |i| b[i] * b[i]);
    let sab = integral(width, height, |i| a[i] * b[i]);
    let n = (k * k) as f64;
    let mut map = Vec::with_capacity((width - k + 1) * (height - k + 1));
    for y in 0..=(height - k) {
        for x in 0..=(width - k) {
            let ma = window_sum(&sa, width, x, y, k) / n;
            let mb = window_sum(&sb, width, x, y, k) / n;
            let va = (window_sum(&saa, width, x, y, k) / n - ma * ma).max(0.0);
            let vb = (window_sum(&sbb, width, x, y, k) / n - mb * mb).max(0.0);
            let cov = window_sum(&sab, width, x, y, k) / n - ma * mb;
            map.push(((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2)));
        }
    }
    Ok(pairwise_sum(&map) / map.len() as f64)
}

pub fn ssim(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::DimensionMismatch(format!("{}x{} vs {}x{}", a.width, a.height, b.width, b.height)));
    }
    ssim_planes(a.width, a.height, &a.to_plane(), &b.to_plane())
}

/// `(μ(C) − μ(Ĉ)) / μ(C)`.
pub fn relative_difference(mu_dct: f64, mu_hat: f64) -> Result<f64> {
    if mu_dct == 0.0 {
        return Err(Error::Domain("relative difference against a zero reference"));
    }
    Ok((mu_dct - mu_hat) / mu_dct)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::get_transform;
    use crate::linalg::exact_dct_matrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn test_image(w: usize, h: usize, seed: u64) -> GrayImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GrayImage::from_fn(w, h, |x, y| {
            let base = 128.0 + 60.0 * libm::sin(x as f64 / 9.0) + 40.0 * libm::cos(y as f64 / 13.0);
            (base + rng.gen_range(-10.0..10.0)).clamp(0.0, 255.0) as u8
        })
    }

    fn random_block(seed: u64) -> RealMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RealMatrix::from_fn(8, 8, |_, _| rng.gen_range(0.0..255.0))
    }

    #[test]
    fn zigzag_prefix() {
        let z = zigzag_order();
        assert_eq!(&z[..10], &[0, 1, 8, 16, 9, 2, 3, 10, 17, 24]);
        assert_eq!(z[63], 63);
        let mut sorted = z;
        sorted.sort_unstable();
        assert_eq!(sorted, core::array::from_fn(|i| i));
    }

    #[test]
    fn retain_counts() {
        let b = random_block(1);
        assert_eq!(zigzag_retain(&b, 64).unwrap(), b);
        let one = zigzag_retain(&b, 1).unwrap();
        assert_eq!(one.data().iter().filter(|v| **v != 0.0).count(), 1);
        assert_eq!(one[(0, 0)], b[(0, 0)]);
        let three = zigzag_retain(&b, 3).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 0)] {
            assert_eq!(three[(i, j)], b[(i, j)]);
        }
        assert_eq!(three.data().iter().filter(|v| **v != 0.0).count(), 3);
        assert!(zigzag_retain(&b, 0).is_err() && zigzag_retain(&b, 65).is_err());
    }

    #[test]
    fn forward_inverse() {
        let c = exact_dct_matrix(8).unwrap();
        let a = random_block(2);
        let b = forward_2d(&c, &a).unwrap();
        assert!(inverse_2d(&c, &b).unwrap().max_abs_diff(&a) < 1e-10);
        // Transform every row, then every column.
        let rows = RealMatrix::from_fn(8, 8, |i, k| crate::linalg::dot(c.row(k), a.row(i)));
        let two_pass = RealMatrix::from_fn(8, 8, |k, j| (0..8).map(|i| c[(k, i)] * rows[(i, j)]).sum());
        assert!(two_pass.max_abs_diff(&b) < 1e-9);
        let zero = RealMatrix::zeros(8, 8);
        assert_eq!(forward_2d(&c, &zero).unwrap().max_abs(), 0.0);
        assert_eq!(inverse_2d(&c, &zero).unwrap().max_abs(), 0.0);
        let mut dc = RealMatrix::zeros(8, 8).data().to_vec();
        dc[0] = 40.0;
        let flat = inverse_2d(&c, &RealMatrix::new(8, 8, dc).unwrap()).unwrap();
        assert!(flat.data().iter().all(|v| (v - 5.0).abs() < 1e-12));
    }

    #[test]
    fn constant_block_has_only_dc() {
        let c1 = get_transform("T1").unwrap().c_hat;
        let a = RealMatrix::from_fn(8, 8, |_, _| 77.0);
        let b = forward_2d(&c1, &a).unwrap();
        for (p, v) in b.data().iter().enumerate() {
            if p != 0 {
                assert!(v.abs() < 1e-10);
            }
        }
        assert!((b[(0, 0)] - 77.0 * 8.0).abs() < 1e-10);
    }

    #[test]
    fn non_orthonormal_inverse_rejected() {
        let sdct = get_transform("SDCT").unwrap();
        assert!(matches!(inverse_2d(&sdct.c_hat, &random_block(3)), Err(Error::Precondition(_))));
        assert!(matches!(compress_image(&test_image(16, 16, 0), &sdct, 10), Err(Error::Precondition(_))));
    }

    #[test]
    fn lossless_at_full_retention() {
        let img = test_image(40, 24, 4);
        for name in ["DCT", "T1", "T2", "RDCT"] {
            let out = compress_image(&img, &get_transform(name).unwrap(), 64).unwrap();
            let orig = img.to_plane();
            assert!(out.plane.iter().zip(&orig).all(|(a, b)| (a - b).abs() < 1e-8), "{name}");
            assert_eq!(out.image, img);
            assert!(out.result.mse < 1e-16);
        }
    }

    #[test]
    fn mse_non_increasing_in_r() {
        let img = test_image(32, 32, 5);
        let dct = get_transform("DCT").unwrap();
        let mut prev = f64::INFINITY;
        for r in 1..=64 {
            let res = compress_image(&img, &dct, r).unwrap().result;
            assert!(res.mse <= prev + 1e-9, "r = {r}");
            prev = res.mse;
            if res.mse > 0.0 {
                assert!((res.psnr - 10.0 * libm::log10(255.0 * 255.0 / res.mse)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn padding_covers_original_extent() {
        let img = test_image(13, 11, 6);
        let out = compress_image(&img, &get_transform("T1").unwrap(), 64).unwrap();
        assert_eq!(out.plane.len(), 13 * 11);
        assert_eq!(out.image, img);
    }

    #[test]
    fn tiles_commute() {
        let img = test_image(32, 16, 7);
        let t = get_transform("T1").unwrap();
        let whole = compress_image(&img, &t, 6).unwrap().plane;
        let left = compress_image(&img.crop(0, 0, 16, 16).unwrap(), &t, 6).unwrap().plane;
        let right = compress_image(&img.crop(16, 0, 16, 16).unwrap(), &t, 6).unwrap().plane;
        for y in 0..16 {
            for x in 0..32 {
                let part = if x < 16 { left[y * 16 + x] } else { right[y * 16 + x - 16] };
                assert_eq!(whole[y * 32 + x], part);
            }
        }
    }

    #[test]
    fn ssim_sanity() {
        let img = test_image(48, 48, 8);
        assert_eq!(ssim(&img, &img).unwrap(), 1.0);
        assert!(ssim(&img, &img.inverted()).unwrap() < 0.5);
        let mut last = 1.0;
        for amp in [2.0, 6.0, 12.0, 24.0] {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            let noisy: Vec<f64> = img.to_plane().iter().map(|v| v + rng.gen_range(-amp..amp)).collect();
            let s = ssim_planes(48, 48, &img.to_plane(), &noisy).unwrap();
            assert!(s < last);
            last = s;
        }
        assert!(ssim(&img, &test_image(40, 48, 8)).is_err());
    }

    #[test]
    fn relative_differences() {
        assert_eq!(relative_difference(3.0, 3.0).unwrap(), 0.0);
        assert!((relative_difference(27.34, 27.18).unwrap() - 0.00585).abs() < 1e-5);
        assert!(relative_difference(0.0, 1.0).is_err());
        assert_eq!(psnr_from_mse(0.0), f64::INFINITY);
    }
}
