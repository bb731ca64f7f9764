//! Uniformly sampled functions on a symmetric window `[-L, L)`.
//!
//! A [`GridFunction`] carries its samples together with a *scale*: an upper
//! estimate of the magnitude of the quantities that were combined to produce
//! the samples. Rounding errors are proportional to that scale, not to the
//! samples themselves, so after a cancellation (e.g. `Phi_eps f - f`) the scale
//! stays large while the samples become small. Spectral differentiation drops
//! Fourier modes that sit below the rounding level implied by the scale, and
//! seminorms report a floor below which a value is indistinguishable from zero.
//!
//! The continuous Fourier transform is approximated with the `2 pi` convention
//! `F g(xi) = int g(x) exp(-2 pi i x xi) dx`. On a grid with `N` points and
//! spacing `h` the transform lives on the *dual* grid with spacing `1/(2L)` and
//! half-width `N/(4L)`; with the default `L = 32`, `N = 4096` the grid is
//! self-dual.

use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Largest derivative order accepted by [`spectral_derivative`].
pub const MAX_SPECTRAL_ORDER: u32 = 6;
/// Largest derivative order allowed in a seminorm query.
pub const MAX_SEMINORM_ORDER: u32 = 4;

const ROUNDING: f64 = f64::EPSILON;
/// Spectral coefficients below `CHOP * eps_mach * scale * h * sqrt(N)` are noise.
const CHOP: f64 = 64.0;
/// Relative floor used by [`seminorm_with_floor`].
pub const FLOOR_REL: f64 = 1e-12;

/// Sampling window `[-half_width, half_width)` with `points` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    half_width: f64,
    points: usize,
}

impl GridSpec {
    /// Validated constructor; see [`make_grid`] for the stricter user-facing one.
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half_width must be positive, got {half_width}"
            )));
        }
        if points < 4 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points must be a power of two, got {points}"
            )));
        }
        Ok(Self { half_width, points })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Grid on which the discrete transform of a function on `self` lives.
    pub fn dual(&self) -> GridSpec {
        GridSpec {
            half_width: self.points as f64 / (4.0 * self.half_width),
            points: self.points,
        }
    }

    /// Index of the sample at `x = 0`.
    pub fn origin_index(&self) -> usize {
        self.points / 2
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |j| self.x(j))
    }

    fn same_as(&self, other: &GridSpec) -> bool {
        self.points == other.points
            && (self.half_width - other.half_width).abs() <= 1e-12 * self.half_width
    }
}

/// User-facing grid constructor: power-of-two `points >= 256`, `half_width >= 8`.
pub fn make_grid(half_width: f64, points: usize) -> Result<GridSpec> {
    if !(half_width > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "half_width must be positive, got {half_width}"
        )));
    }
    if !points.is_power_of_two() {
        return Err(Error::InvalidGrid(format!(
            "points must be a power of two, got {points}"
        )));
    }
    if points < 256 || half_width < 8.0 {
        return Err(Error::InvalidGrid(format!(
            "grid too small: need points >= 256 and half_width >= 8, got ({half_width}, {points})"
        )));
    }
    GridSpec::new(half_width, points)
}

/// Samples of a complex function on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    samples: Vec<Complex64>,
    scale: f64,
}

impl GridFunction {
    pub fn new(spec: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != spec.points {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} points",
                samples.len(),
                spec.points
            )));
        }
        if let Some(index) = samples
            .iter()
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite { index });
        }
        let scale = sup_abs(&samples);
        Ok(Self {
            spec,
            samples,
            scale,
        })
    }

    pub(crate) fn from_parts(spec: GridSpec, samples: Vec<Complex64>, scale: f64) -> Self {
        debug_assert_eq!(samples.len(), spec.points);
        let scale = scale.max(sup_abs(&samples));
        Self {
            spec,
            samples,
            scale,
        }
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            samples: vec![Complex64::new(0.0, 0.0); spec.points],
            scale: 0.0,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Magnitude estimate of the operands that produced these samples.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = self.scale.max(scale);
        self
    }

    pub fn sup(&self) -> f64 {
        sup_abs(&self.samples)
    }

    /// Sample magnitude indistinguishable from rounding noise.
    pub fn noise_level(&self) -> f64 {
        FLOOR_REL * self.scale
    }

    /// Largest sample magnitude within `margin` of either window edge.
    pub fn edge_magnitude(&self, margin: f64) -> f64 {
        let l = self.spec.half_width;
        self.spec
            .xs()
            .zip(&self.samples)
            .filter(|(x, _)| x.abs() >= l - margin)
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            spec: self.spec,
            samples: self.samples.iter().map(|z| z * c).collect(),
            scale: self.scale * c.norm(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: Complex64, other: &GridFunction, b: Complex64) -> Result<Self> {
        self.check_same(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(u, v)| a * u + b * v)
            .collect();
        let scale = (a.norm() * self.scale).max(b.norm() * other.scale);
        Ok(Self::from_parts(self.spec, samples, scale))
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        self.combine(one, other, one)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        self.combine(one, other, -one)
    }

    pub fn mul(&self, other: &GridFunction) -> Result<Self> {
        self.check_same(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(u, v)| u * v)
            .collect();
        Ok(Self::from_parts(
            self.spec,
            samples,
            self.scale * other.scale,
        ))
    }

    /// Pointwise multiplication by `m(x)`.
    pub fn mul_fn(&self, m: impl Fn(f64) -> Complex64) -> Self {
        let mut peak: f64 = 0.0;
        let samples = self
            .spec
            .xs()
            .zip(&self.samples)
            .map(|(x, z)| {
                let w = m(x);
                peak = peak.max(w.norm());
                z * w
            })
            .collect();
        Self::from_parts(self.spec, samples, self.scale * peak)
    }

    pub fn mul_coordinate(&self) -> Self {
        self.mul_fn(|x| Complex64::new(x, 0.0))
    }

    pub fn conj_reflect_check(&self) -> f64 {
        // max |g(x) - conj(g(-x))|: zero for the transform of a real function
        let n = self.spec.points;
        (1..n)
            .map(|j| (self.samples[j] - self.samples[n - j].conj()).norm())
            .fold(0.0, f64::max)
    }

    fn check_same(&self, other: &GridFunction) -> Result<()> {
        if self.spec.same_as(&other.spec) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{:?} vs {:?}",
                self.spec, other.spec
            )))
        }
    }

    /// Sup-norm distance, for tests and property checks.
    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(u, v)| (u - v).norm())
            .fold(0.0, f64::max))
    }
}

fn sup_abs(samples: &[Complex64]) -> f64 {
    samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Samples `f` at `x_j = -L + j h`.
pub fn sample(f: impl Fn(f64) -> Complex64, spec: GridSpec) -> Result<GridFunction> {
    GridFunction::new(spec, spec.xs().map(f).collect())
}

/// Samples a real-valued function.
pub fn sample_real(f: impl Fn(f64) -> f64, spec: GridSpec) -> Result<GridFunction> {
    sample(|x| Complex64::new(f(x), 0.0), spec)
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let planner = PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()));
    let mut guard = planner.lock().unwrap_or_else(|e| e.into_inner());
    if forward {
        guard.plan_fft_forward(n)
    } else {
        guard.plan_fft_inverse(n)
    }
}

#[inline]
fn alternate(j: usize) -> f64 {
    if j % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Raw bridge to the continuous transform: returns samples of `F g` on the
/// dual grid, `F_k = h (-1)^k sum_j (-1)^j g_j exp(-2 pi i j k / N)`.
pub(crate) fn forward_samples(spec: &GridSpec, samples: &[Complex64]) -> Vec<Complex64> {
    let n = spec.points;
    let h = spec.spacing();
    let mut buf: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(j, z)| z * alternate(j))
        .collect();
    plan(n, true).process(&mut buf);
    for (k, z) in buf.iter_mut().enumerate() {
        *z *= h * alternate(k);
    }
    buf
}

/// Inverse of [`forward_samples`]: takes samples on `spec.dual()`.
pub(crate) fn inverse_samples(spec: &GridSpec, spectrum: &[Complex64]) -> Vec<Complex64> {
    let n = spec.points;
    let dxi = 1.0 / (2.0 * spec.half_width);
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .enumerate()
        .map(|(k, z)| z * alternate(k))
        .collect();
    plan(n, false).process(&mut buf);
    for (j, z) in buf.iter_mut().enumerate() {
        *z *= dxi * alternate(j);
    }
    buf
}

/// Continuous-transform approximation under the `2 pi` convention.
pub fn dft_forward(g: &GridFunction) -> GridFunction {
    let spec = g.spec;
    let out = forward_samples(&spec, &g.samples);
    let scale = g.scale * spec.spacing() * (spec.points as f64).sqrt();
    GridFunction::from_parts(spec.dual(), out, scale)
}

/// Inverse transform; `g` lives on a dual grid and the result on its dual.
pub fn dft_inverse(g: &GridFunction) -> GridFunction {
    let target = g.spec.dual();
    let out = inverse_samples(&target, &g.samples);
    let dxi = 1.0 / (2.0 * target.half_width);
    let scale = g.scale * dxi * (g.spec.points as f64).sqrt();
    GridFunction::from_parts(target, out, scale)
}

fn chop_level(g: &GridFunction) -> f64 {
    CHOP * ROUNDING * g.scale * g.spec.spacing() * (g.spec.points as f64).sqrt()
}

/// Multiplies the spectrum by `(2 pi i xi)^order` after discarding modes at
/// the rounding level. Periodic extension error is the caller's concern.
pub fn spectral_derivative(g: &GridFunction, order: u32) -> Result<GridFunction> {
    if order > MAX_SPECTRAL_ORDER {
        return Err(Error::OrderTooHigh {
            order,
            cap: MAX_SPECTRAL_ORDER,
        });
    }
    if order == 0 {
        return Ok(g.clone());
    }
    let spec = g.spec;
    let dual = spec.dual();
    let mut spectrum = forward_samples(&spec, &g.samples);
    let tau = chop_level(g);
    let mut xi_max: f64 = 0.0;
    for (k, z) in spectrum.iter_mut().enumerate() {
        if k == 0 || z.norm() <= tau {
            *z = Complex64::new(0.0, 0.0);
            continue;
        }
        let xi = dual.x(k);
        xi_max = xi_max.max(xi.abs());
        *z *= Complex64::new(0.0, 2.0 * PI * xi).powu(order);
    }
    let out = inverse_samples(&spec, &spectrum);
    let gain = (2.0 * PI * xi_max.max(1.0)).powi(order as i32);
    Ok(GridFunction::from_parts(spec, out, g.scale * gain))
}

/// Which continuous seminorm family a query realizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeminormKind {
    /// `max_{|x| <= r} |d^beta g|`.
    CompactSup { radius: f64 },
    /// `max_x |x^alpha d^beta g|`.
    Schwartz { poly_order: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormQuery {
    pub kind: SeminormKind,
    pub deriv_order: u32,
}

impl SeminormQuery {
    pub fn schwartz(poly_order: u32, deriv_order: u32) -> Self {
        Self {
            kind: SeminormKind::Schwartz { poly_order },
            deriv_order,
        }
    }

    pub fn compact(radius: f64, deriv_order: u32) -> Self {
        Self {
            kind: SeminormKind::CompactSup { radius },
            deriv_order,
        }
    }

    /// Stable textual label used in reports, e.g. `S(a=1,b=2)` or `K(r=2,b=0)`.
    pub fn label(&self) -> String {
        match self.kind {
            SeminormKind::Schwartz { poly_order } => {
                format!("S(a={},b={})", poly_order, self.deriv_order)
            }
            SeminormKind::CompactSup { radius } => {
                format!("K(r={},b={})", radius, self.deriv_order)
            }
        }
    }

    pub fn validate(&self, spec: &GridSpec) -> Result<()> {
        if self.deriv_order > MAX_SEMINORM_ORDER {
            return Err(Error::InvalidQuery(format!(
                "derivative order {} above cap {}",
                self.deriv_order, MAX_SEMINORM_ORDER
            )));
        }
        if let SeminormKind::CompactSup { radius } = self.kind {
            if !(radius > 0.0) || radius > spec.half_width / 2.0 {
                return Err(Error::InvalidQuery(format!(
                    "compact radius {radius} outside (0, {}]",
                    spec.half_width / 2.0
                )));
            }
        }
        Ok(())
    }
}

/// Seminorm value and the rounding floor below which it is meaningless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormValue {
    pub value: f64,
    pub floor: f64,
}

impl SeminormValue {
    /// Value with everything at or below the floor reported as exactly zero.
    pub fn resolved(&self) -> f64 {
        if self.value <= self.floor {
            0.0
        } else {
            self.value
        }
    }
}

pub fn seminorm(g: &GridFunction, q: &SeminormQuery) -> Result<f64> {
    Ok(seminorm_with_floor(g, q)?.value)
}

/// Like [`seminorm`], additionally reporting the rounding floor.
pub fn seminorm_with_floor(g: &GridFunction, q: &SeminormQuery) -> Result<SeminormValue> {
    let d = spectral_derivative(g, q.deriv_order)?;
    seminorm_of_derivative(&d, q)
}

/// Seminorm of an already differentiated function (`d = D^beta g`).
pub fn seminorm_of_derivative(d: &GridFunction, q: &SeminormQuery) -> Result<SeminormValue> {
    q.validate(&d.spec)?;
    let spec = d.spec;
    let (value, weight) = match q.kind {
        SeminormKind::CompactSup { radius } => {
            let v = spec
                .xs()
                .zip(&d.samples)
                .filter(|(x, _)| x.abs() <= radius)
                .map(|(_, z)| z.norm())
                .fold(0.0, f64::max);
            (v, 1.0)
        }
        SeminormKind::Schwartz { poly_order } => {
            let v = spec
                .xs()
                .zip(&d.samples)
                .map(|(x, z)| x.abs().powi(poly_order as i32) * z.norm())
                .fold(0.0, f64::max);
            (v, spec.half_width.powi(poly_order as i32))
        }
    };
    Ok(SeminormValue {
        value,
        floor: FLOOR_REL * d.scale * weight,
    })
}

/// `int a conj(b)` by the Riemann sum.
pub fn inner(a: &GridFunction, b: &GridFunction) -> Result<Complex64> {
    a.check_same(b)?;
    Ok(a.samples
        .iter()
        .zip(&b.samples)
        .map(|(x, y)| x * y.conj())
        .sum::<Complex64>()
        * a.spec.spacing())
}

/// Riemann sum `h * sum g_j`; spectrally accurate for smooth decaying `g`.
pub fn quadrature(g: &GridFunction) -> Complex64 {
    let h = g.spec.spacing();
    g.samples.iter().sum::<Complex64>() * h
}

/// Evaluates `d^order g` at an arbitrary point via the band-limited interpolant.
pub fn interpolate(g: &GridFunction, x0: f64, order: u32) -> Complex64 {
    let spec = g.spec;
    let dual = spec.dual();
    let spectrum = forward_samples(&spec, &g.samples);
    let dxi = 1.0 / (2.0 * spec.half_width);
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, z) in spectrum.iter().enumerate().skip(1) {
        let xi = dual.x(k);
        let phase = Complex64::from_polar(1.0, 2.0 * PI * x0 * xi);
        acc += z * phase * Complex64::new(0.0, 2.0 * PI * xi).powu(order);
    }
    if order == 0 {
        // Nyquist mode contributes as a cosine
        let xi = dual.x(0);
        acc += spectrum[0] * (2.0 * PI * x0 * xi).cos();
    }
    acc * dxi
}

/// Samples of `A(x) = int_{-L}^{x} g`. Requires `g` to vanish near `-L`.
pub fn antiderivative(g: &GridFunction) -> GridFunction {
    let spec = g.spec;
    let dual = spec.dual();
    let mut spectrum = forward_samples(&spec, &g.samples);
    let dxi = 1.0 / (2.0 * spec.half_width);
    let origin = dual.origin_index();
    let mean = spectrum[origin];
    for (k, z) in spectrum.iter_mut().enumerate() {
        if k == origin || k == 0 {
            *z = Complex64::new(0.0, 0.0);
        } else {
            *z /= Complex64::new(0.0, 2.0 * PI * dual.x(k));
        }
    }
    let periodic = inverse_samples(&spec, &spectrum);
    let p0 = periodic[0];
    let samples = spec
        .xs()
        .zip(&periodic)
        .map(|(x, p)| mean * dxi * (x + spec.half_width) + p - p0)
        .collect();
    let scale = g.scale * 2.0 * spec.half_width;
    GridFunction::from_parts(spec, samples, scale)
}

/// `int_{a}^{L} g`, spectrally accurate for smooth `g` vanishing at the edges.
pub fn integral_from(g: &GridFunction, a: f64) -> Complex64 {
    let spec = g.spec;
    let dual = spec.dual();
    let spectrum = forward_samples(&spec, &g.samples);
    let dxi = 1.0 / (2.0 * spec.half_width);
    let origin = dual.origin_index();
    let l = spec.half_width;
    // int_{-L}^{a} of each Fourier mode
    let mut below = spectrum[origin] * (a + l);
    for (k, z) in spectrum.iter().enumerate() {
        if k == origin || k == 0 {
            continue;
        }
        let w = 2.0 * PI * dual.x(k);
        let e_a = Complex64::from_polar(1.0, w * a);
        let e_l = Complex64::from_polar(1.0, -w * l);
        below += z * (e_a - e_l) / Complex64::new(0.0, w);
    }
    quadrature(g) - below * dxi
}

/// `x -> g(x - a)` via a spectral phase shift.
pub fn translate(g: &GridFunction, a: f64) -> GridFunction {
    if a == 0.0 {
        return g.clone();
    }
    let spec = g.spec;
    let dual = spec.dual();
    let mut spectrum = forward_samples(&spec, &g.samples);
    for (k, z) in spectrum.iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0, -2.0 * PI * a * dual.x(k));
    }
    GridFunction::from_parts(spec, inverse_samples(&spec, &spectrum), g.scale)
}

/// `x -> exp(2 pi i a x) g(x)`.
pub fn modulate(g: &GridFunction, a: f64) -> GridFunction {
    g.mul_fn(|x| Complex64::from_polar(1.0, 2.0 * PI * a * x))
}

/// Circular convolution realizing `(g * k)(x)` for a kernel given by its
/// continuous transform `k_hat`, evaluated on the dual grid.
pub fn convolve_with_transform(g: &GridFunction, k_hat: &[Complex64]) -> Result<GridFunction> {
    let spec = g.spec;
    if k_hat.len() != spec.points {
        return Err(Error::GridMismatch("kernel transform length".into()));
    }
    let mut spectrum = forward_samples(&spec, &g.samples);
    let mut peak: f64 = 0.0;
    for (z, k) in spectrum.iter_mut().zip(k_hat) {
        peak = peak.max(k.norm());
        *z *= k;
    }
    let out = inverse_samples(&spec, &spectrum);
    Ok(GridFunction::from_parts(spec, out, g.scale * peak.max(1.0)))
}

/// Continuous convolution `g * k` of two decaying functions on one grid.
pub fn convolve(g: &GridFunction, k: &GridFunction) -> Result<GridFunction> {
    g.check_same(k)?;
    let k_hat = forward_samples(&k.spec, &k.samples);
    let mut out = convolve_with_transform(g, &k_hat)?;
    out.scale = out.scale.max(g.scale * k.scale * 2.0 * k.spec.half_width);
    Ok(out)
}

/// Moves `g` onto `target`: zero-extends or truncates in space, then pads or
/// truncates the spectrum. Both half-widths must be integer multiples of the
/// source spacing and the point counts must stay powers of two.
pub fn resample(g: &GridFunction, target: &GridSpec) -> Result<GridFunction> {
    if g.spec.same_as(target) {
        return Ok(g.clone());
    }
    let h = g.spec.spacing();
    let ratio = 2.0 * target.half_width / h;
    let n1 = ratio.round() as usize;
    if (ratio - n1 as f64).abs() > 1e-9 * ratio || !n1.is_power_of_two() {
        return Err(Error::GridMismatch(format!(
            "cannot resample {:?} onto {:?}",
            g.spec, target
        )));
    }
    // step 1: same spacing, new window
    let stage = GridSpec::new(target.half_width, n1)?;
    let offset = ((g.spec.half_width - target.half_width) / h).round() as i64;
    let mut samples = vec![Complex64::new(0.0, 0.0); n1];
    for (j, s) in samples.iter_mut().enumerate() {
        let src = j as i64 + offset;
        if src >= 0 && (src as usize) < g.spec.points {
            *s = g.samples[src as usize];
        }
    }
    if n1 == target.points {
        return Ok(GridFunction::from_parts(stage, samples, g.scale));
    }
    // step 2: spectral refinement / coarsening at fixed window
    let spectrum = forward_samples(&stage, &samples);
    let n2 = target.points;
    let mut padded = vec![Complex64::new(0.0, 0.0); n2];
    if n2 > n1 {
        let shift = (n2 - n1) / 2;
        padded[shift..shift + n1].copy_from_slice(&spectrum);
    } else {
        let shift = (n1 - n2) / 2;
        padded.copy_from_slice(&spectrum[shift..shift + n2]);
    }
    let out = inverse_samples(target, &padded);
    Ok(GridFunction::from_parts(*target, out, g.scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn base() -> GridSpec {
        make_grid(32.0, 4096).unwrap()
    }

    #[test]
    fn make_grid_examples() {
        assert_eq!(make_grid(32.0, 4096).unwrap().spacing(), 1.0 / 64.0);
        assert_eq!(make_grid(16.0, 1024).unwrap().spacing(), 1.0 / 32.0);
        assert!(make_grid(32.0, 4095).is_err());
        assert!(make_grid(-1.0, 4096).is_err());
        assert!(make_grid(0.0, 4096).is_err());
    }

    #[test]
    fn default_grid_is_self_dual() {
        let g = base();
        assert_eq!(g.dual(), g);
    }

    #[test]
    fn sample_examples() {
        let g = sample_real(|x| (-x * x).exp(), base()).unwrap();
        assert_eq!(g.samples()[2048], c(1.0));
        let z = sample_real(|_| 0.0, base()).unwrap();
        assert!(z.is_zero());
        let lin = sample_real(|x| x, base()).unwrap();
        assert_eq!(lin.samples()[0], c(-32.0));
        assert!(matches!(
            sample_real(|x| 1.0 / x, base()),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn spectral_derivative_of_gaussian() {
        let spec = base();
        let g = sample_real(|x| (-x * x).exp(), spec).unwrap();
        let d = spectral_derivative(&g, 1).unwrap();
        let exact = sample_real(|x| -2.0 * x * (-x * x).exp(), spec).unwrap();
        assert!(d.sup_distance(&exact).unwrap() < 1e-8);
        assert_eq!(spectral_derivative(&g, 0).unwrap(), g);
        let z = GridFunction::zeros(spec);
        assert!(spectral_derivative(&z, 2).unwrap().is_zero());
        assert!(spectral_derivative(&g, 7).is_err());
    }

    #[test]
    fn seminorm_examples() {
        let spec = base();
        let g = sample_real(|x| (-x * x).exp(), spec).unwrap();
        let s00 = seminorm(&g, &SeminormQuery::schwartz(0, 0)).unwrap();
        assert!((s00 - 1.0).abs() < 1e-10);
        let s10 = seminorm(&g, &SeminormQuery::schwartz(1, 0)).unwrap();
        // sup |x e^{-x^2}| on the grid; the grid misses the peak x = 1/sqrt 2
        // by at most h/2, costing O(h^2)
        let exact = (2.0 * std::f64::consts::E).powf(-0.5);
        assert!((s10 - exact).abs() < 1e-4, "{s10} vs {exact}");
        let z = GridFunction::zeros(spec);
        assert_eq!(seminorm(&z, &SeminormQuery::compact(2.0, 3)).unwrap(), 0.0);
        assert!(seminorm(&g, &SeminormQuery::compact(20.0, 0)).is_err());
        assert!(seminorm(&g, &SeminormQuery::schwartz(0, 5)).is_err());
    }

    #[test]
    fn schwartz_weighted_sup_on_refined_grid() {
        // on a grid containing the extremum the calculus value is hit closely
        let spec = GridSpec::new(16.0, 1 << 16).unwrap();
        let g = sample_real(|x| (-x * x).exp(), spec).unwrap();
        let s10 = seminorm(&g, &SeminormQuery::schwartz(1, 0)).unwrap();
        let exact = (2.0 * std::f64::consts::E).powf(-0.5);
        assert!((s10 - exact).abs() < 1e-8);
    }

    #[test]
    fn quadrature_examples() {
        let spec = base();
        let g = sample_real(|x| (-x * x).exp(), spec).unwrap();
        assert!((quadrature(&g) - c(PI.sqrt())).norm() < 1e-10);
        assert_eq!(quadrature(&GridFunction::zeros(spec)), c(0.0));
        let odd = sample_real(|x| x * (-x * x).exp(), spec).unwrap();
        assert!(quadrature(&odd).norm() < 1e-12);
    }

    #[test]
    fn forward_transform_of_self_dual_gaussian() {
        let spec = base();
        let g = sample_real(|x| (-PI * x * x).exp(), spec).unwrap();
        let f = dft_forward(&g);
        let exact = sample_real(|xi| (-PI * xi * xi).exp(), spec.dual()).unwrap();
        assert!(f.sup_distance(&exact).unwrap() < 1e-9);
        let back = dft_inverse(&f);
        assert!(back.sup_distance(&g).unwrap() < 1e-12);
    }

    #[test]
    fn shift_theorem() {
        let spec = base();
        let a = 0.75;
        let g = sample_real(|x| (-x * x).exp(), spec).unwrap();
        let lhs = dft_forward(&translate(&g, a));
        let rhs = modulate(&dft_forward(&g), -a);
        assert!(lhs.sup_distance(&rhs).unwrap() < 1e-9);
        let shifted = sample_real(|x| (-(x - a) * (x - a)).exp(), spec).unwrap();
        assert!(translate(&g, a).sup_distance(&shifted).unwrap() < 1e-10);
    }

    #[test]
    fn interpolation_and_antiderivative() {
        let spec = base();
        let g = sample_real(|x| (-x * x).exp(), spec).unwrap();
        let x0 = 0.3217;
        assert!((interpolate(&g, x0, 0) - c((-x0 * x0).exp())).norm() < 1e-12);
        let d1 = -2.0 * x0 * (-x0 * x0).exp();
        assert!((interpolate(&g, x0, 1) - c(d1)).norm() < 1e-10);
        let half = integral_from(&g, 0.0);
        assert!((half - c(PI.sqrt() / 2.0)).norm() < 1e-12);
        let a = antiderivative(&g);
        assert!((a.samples()[spec.points() - 1] - c(PI.sqrt())).norm() < 1e-10);
        assert!((a.samples()[spec.origin_index()] - c(PI.sqrt() / 2.0)).norm() < 1e-12);
    }

    #[test]
    fn resample_roundtrip() {
        let spec = base();
        let g = sample_real(|x| (-x * x).exp(), spec).unwrap();
        let wide = GridSpec::new(64.0, 1 << 15).unwrap();
        let r = resample(&g, &wide).unwrap();
        let exact = sample_real(|x| (-x * x).exp(), wide).unwrap();
        assert!(r.sup_distance(&exact).unwrap() < 1e-13);
        let back = resample(&r, &spec).unwrap();
        assert!(back.sup_distance(&g).unwrap() < 1e-13);
    }

    #[test]
    fn convolution_of_gaussians() {
        let spec = base();
        let g = sample_real(|x| (-x * x).exp(), spec).unwrap();
        let conv = convolve(&g, &g).unwrap();
        let exact = sample_real(|x| (PI / 2.0).sqrt() * (-x * x / 2.0).exp(), spec).unwrap();
        assert!(conv.sup_distance(&exact).unwrap() < 1e-12);
    }

    #[test]
    fn cancellation_is_chopped_before_differentiation() {
        let spec = GridSpec::new(32.0, 1 << 16).unwrap();
        let g = sample_real(|x| (-x * x).exp(), spec).unwrap();
        let tiny = sample_real(|x| 1e-9 * (-x * x).exp(), spec).unwrap();
        let noisy = g.add(&tiny).unwrap().sub(&g).unwrap();
        let d4 = spectral_derivative(&noisy, 4).unwrap();
        let exact = spectral_derivative(&tiny, 4).unwrap();
        let err = d4.sup_distance(&exact).unwrap();
        assert!(err < 1e-10, "{err}");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn bump(a: f64, s: f64) -> impl Fn(f64) -> f64 {
            move |x| (-(x - a) * (x - a) / s).exp()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn derivative_is_linear(a in -2.0..2.0f64, s in 0.5..3.0f64, c in -3.0..3.0f64) {
                let spec = GridSpec::new(32.0, 4096).unwrap();
                let g = sample_real(bump(a, s), spec).unwrap();
                let h = sample_real(bump(-a, 1.0), spec).unwrap();
                let lhs = spectral_derivative(&g.combine(Complex64::new(c, 0.0), &h, Complex64::new(1.0, 0.0)).unwrap(), 2).unwrap();
                let rhs = spectral_derivative(&g, 2).unwrap().combine(Complex64::new(c, 0.0), &spectral_derivative(&h, 2).unwrap(), Complex64::new(1.0, 0.0)).unwrap();
                prop_assert!(lhs.sup_distance(&rhs).unwrap() < 1e-11);
            }

            #[test]
            fn seminorm_is_homogeneous(a in -2.0..2.0f64, re in -3.0..3.0f64, im in -3.0..3.0f64, alpha in 0u32..4, beta in 0u32..3) {
                let spec = GridSpec::new(32.0, 4096).unwrap();
                let g = sample_real(bump(a, 1.0), spec).unwrap();
                let c = Complex64::new(re, im);
                let q = SeminormQuery::schwartz(alpha, beta);
                let lhs = seminorm(&g.scaled(c), &q).unwrap();
                let rhs = c.norm() * seminorm(&g, &q).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
            }

            #[test]
            fn derivative_integrates_to_zero(a in -3.0..3.0f64, s in 0.3..4.0f64) {
                let spec = GridSpec::new(32.0, 4096).unwrap();
                let g = sample_real(bump(a, s), spec).unwrap();
                let d = spectral_derivative(&g, 1).unwrap();
                prop_assert!(quadrature(&d).norm() < 1e-9);
            }

            #[test]
            fn doubling_points_keeps_quadrature(a in -3.0..3.0f64, s in 0.3..4.0f64) {
                let q1 = quadrature(&sample_real(bump(a, s), GridSpec::new(32.0, 4096).unwrap()).unwrap());
                let q2 = quadrature(&sample_real(bump(a, s), GridSpec::new(32.0, 8192).unwrap()).unwrap());
                prop_assert!((q1 - q2).norm() < 1e-10);
            }
        }
    }
}
