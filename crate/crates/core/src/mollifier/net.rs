//! Test-object nets: `Phi_eps u = psi(eps x) * (u * rho_eps)(x)` with
//! `rho_eps(t) = w^{-1} phi(t / w) T(t / eps)`, `w = eps^2` (or `eps`) and
//! `T` the inner truncation `psi` (or 1).
//!
//! Per `eps` the kernel is reduced to the profile `g(s) = phi(s) T(w s / eps)`,
//! so that `rho(t) = g(t / w) / w`. `g` is tabulated on the mollifier grid and
//! stored as a cosine series, which gives exact point values, derivatives and
//! antiderivatives of `rho` at any scale.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use super::cutoff::{build_cutoff, CutoffFunction};
use super::phi::{mollifier_grid, tabulate, MollifierPhi, MollifierProfile};
use crate::catalog::{Distribution, SmoothFn, SmoothTerm};
use crate::error::{Error, Result};
use crate::grid::{self, forward_samples, GridFunction, GridSpec};
use crate::jet::{binomial, JET_LEN};

const RELATIVE_TRIM: f64 = 1e-19;
/// Kernel is considered resolved by a grid when `h <= w / RESOLUTION`.
pub const RESOLUTION: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelWidth {
    EpsilonSquared,
    Epsilon,
}

impl KernelWidth {
    pub fn at(&self, eps: f64) -> f64 {
        match self {
            KernelWidth::EpsilonSquared => eps * eps,
            KernelWidth::Epsilon => eps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetConfig {
    pub cutoff: CutoffFunction,
    pub profile: MollifierProfile,
    pub width: KernelWidth,
    pub inner_truncation: bool,
    pub outer_cutoff: bool,
}

impl NetConfig {
    /// The construction with mollifier `F^{-1} psi` at width `eps^2`.
    pub fn standard(cutoff: CutoffFunction) -> Self {
        Self {
            cutoff,
            profile: MollifierProfile::BandLimited(cutoff),
            width: KernelWidth::EpsilonSquared,
            inner_truncation: true,
            outer_cutoff: true,
        }
    }

    /// Classical `eps`-scaled Gaussian mollifier; only second-order accurate.
    pub fn gaussian() -> Self {
        Self {
            cutoff: build_cutoff(),
            profile: MollifierProfile::Gaussian,
            width: KernelWidth::Epsilon,
            inner_truncation: false,
            outer_cutoff: true,
        }
    }
}

pub struct TestObjectNet {
    id: String,
    config: NetConfig,
    phi: MollifierPhi,
    epsilon_grid: Vec<f64>,
    kernels: Mutex<HashMap<u64, Arc<EpsKernel>>>,
    transforms: Mutex<HashMap<(u64, u64, usize), Arc<Vec<Complex64>>>>,
}

impl fmt::Debug for TestObjectNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestObjectNet")
            .field("id", &self.id)
            .field("config", &self.config)
            .field("epsilon_grid", &self.epsilon_grid)
            .finish()
    }
}

pub fn validate_epsilon_grid(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::InvalidEpsilon(f64::NAN));
    }
    for (i, &e) in eps.iter().enumerate() {
        if !(e > 0.0 && e <= 1.0) {
            return Err(Error::InvalidEpsilon(e));
        }
        if i > 0 && e >= eps[i - 1] {
            return Err(Error::Invalid(format!(
                "epsilon grid not strictly decreasing at {e}"
            )));
        }
    }
    Ok(())
}

impl TestObjectNet {
    pub fn new(
        id: impl Into<String>,
        config: NetConfig,
        epsilon_grid: Vec<f64>,
    ) -> Result<Arc<Self>> {
        validate_epsilon_grid(&epsilon_grid)?;
        let phi = tabulate(config.profile)?;
        Ok(Arc::new(Self {
            id: id.into(),
            config,
            phi,
            epsilon_grid,
            kernels: Mutex::new(HashMap::new()),
            transforms: Mutex::new(HashMap::new()),
        }))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &NetConfig {
        &self.config
    }

    pub fn phi(&self) -> &MollifierPhi {
        &self.phi
    }

    pub fn cutoff(&self) -> &CutoffFunction {
        &self.config.cutoff
    }

    pub fn epsilon_grid(&self) -> &[f64] {
        &self.epsilon_grid
    }

    pub fn width(&self, eps: f64) -> f64 {
        self.config.width.at(eps)
    }

    pub fn check_eps(&self, eps: f64) -> Result<()> {
        if self
            .epsilon_grid
            .iter()
            .any(|e| (e - eps).abs() <= 1e-12 * e)
        {
            Ok(())
        } else {
            Err(Error::InvalidEpsilon(eps))
        }
    }

    /// Same construction on another epsilon grid.
    pub fn with_epsilon_grid(&self, epsilon_grid: Vec<f64>) -> Result<Arc<Self>> {
        Self::new(self.id.clone(), self.config, epsilon_grid)
    }

    fn outer(&self, eps: f64, x: f64) -> f64 {
        if self.config.outer_cutoff {
            self.config.cutoff.eval(eps * x)
        } else {
            1.0
        }
    }

    fn inner(&self, eps: f64, t: f64) -> f64 {
        if self.config.inner_truncation {
            self.config.cutoff.eval(t / eps)
        } else {
            1.0
        }
    }

    /// `K_eps(x, y) = psi(eps x) w^{-1} phi((y - x) / w) T((y - x) / eps)`,
    /// evaluated directly from the mollifier and the cutoff.
    pub fn kernel_at(&self, eps: f64, x: f64, y: f64) -> Result<f64> {
        self.check_eps(eps)?;
        let w = self.width(eps);
        let t = y - x;
        let outer = self.outer(eps, x);
        let inner = self.inner(eps, t);
        if outer == 0.0 || inner == 0.0 {
            return Ok(0.0);
        }
        Ok(outer * self.phi.eval(t / w) / w * inner)
    }

    pub(crate) fn kernel(&self, eps: f64) -> Result<Arc<EpsKernel>> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::InvalidEpsilon(eps));
        }
        let key = eps.to_bits();
        if let Some(k) = self
            .kernels
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .get(&key)
        {
            return Ok(k.clone());
        }
        let k = Arc::new(EpsKernel::build(self, eps)?);
        self.kernels
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key, k.clone());
        Ok(k)
    }

    /// `rho_hat` on the dual of `spec`.
    fn transfer(&self, eps: f64, spec: &GridSpec) -> Result<Arc<Vec<Complex64>>> {
        let key = (eps.to_bits(), spec.half_width().to_bits(), spec.points());
        if let Some(t) = self
            .transforms
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .get(&key)
        {
            return Ok(t.clone());
        }
        let t = Arc::new(self.kernel(eps)?.transfer(spec));
        self.transforms
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key, t.clone());
        Ok(t)
    }

    /// Whether `spec` samples `rho_eps` finely enough for singular inputs.
    pub fn resolves(&self, eps: f64, spec: &GridSpec) -> bool {
        spec.spacing() <= self.width(eps) / RESOLUTION * (1.0 + 1e-12)
    }

    /// `x -> <u, K_eps(x, .)>` on `spec`.
    pub fn kernel_action(
        &self,
        u: &Distribution,
        eps: f64,
        spec: GridSpec,
    ) -> Result<GridFunction> {
        self.check_eps(eps)?;
        let k = self.kernel(eps)?;
        match u {
            Distribution::Sum(parts) => {
                let mut acc = GridFunction::zeros(spec);
                for (c, d) in parts {
                    if *c == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let v = self.kernel_action(d, eps, spec)?;
                    acc = acc.combine(Complex64::new(1.0, 0.0), &v, *c)?;
                }
                Ok(acc)
            }
            Distribution::Sample(g) => {
                self.convolve_decaying(&grid::resample(g, &spec)?, eps, spec)
            }
            Distribution::Smooth(f) => {
                let (decaying, growing): (Vec<SmoothTerm>, Vec<SmoothTerm>) =
                    f.terms.iter().cloned().partition(|t| t.decay > 0.0);
                let mut acc = GridFunction::zeros(spec);
                if !decaying.is_empty() {
                    let s = SmoothFn::new(decaying).sample(spec)?;
                    acc = self.convolve_decaying(&s, eps, spec)?;
                }
                for t in &growing {
                    let v = self.growing_term(&k, t, eps, spec)?;
                    acc = acc.add(&v)?;
                }
                Ok(acc)
            }
            Distribution::Dirac { at, order } => {
                self.require_resolved(eps, &spec)?;
                Ok(self.dirac(&k, *at, *order, eps, spec))
            }
            Distribution::Heaviside { at, power } => {
                self.require_resolved(eps, &spec)?;
                if !self.config.outer_cutoff {
                    return Err(Error::NonDecaying(f64::INFINITY));
                }
                Ok(self.ramp(&k, *at, *power, eps, spec))
            }
        }
    }

    fn require_resolved(&self, eps: f64, spec: &GridSpec) -> Result<()> {
        if self.resolves(eps, spec) {
            Ok(())
        } else {
            Err(Error::UnderResolved(format!(
                "spacing {} does not resolve kernel width {} at eps {eps}",
                spec.spacing(),
                self.width(eps)
            )))
        }
    }

    fn convolve_decaying(
        &self,
        u: &GridFunction,
        eps: f64,
        spec: GridSpec,
    ) -> Result<GridFunction> {
        let t = self.transfer(eps, &spec)?;
        let conv = grid::convolve_with_transform(u, &t)?;
        Ok(if self.config.outer_cutoff {
            conv.mul_fn(|x| Complex64::new(self.outer(eps, x), 0.0))
        } else {
            conv
        })
    }

    fn growing_term(
        &self,
        k: &EpsKernel,
        t: &SmoothTerm,
        eps: f64,
        spec: GridSpec,
    ) -> Result<GridFunction> {
        if !self.config.outer_cutoff {
            return Err(Error::NonDecaying(f64::INFINITY));
        }
        if t.freq.im != 0.0 && !k.finite_support {
            return Err(Error::Unsupported(
                "exponentially growing input needs a compactly supported kernel".into(),
            ));
        }
        // (u * rho)(x) = e^{2 pi i f x} sum_j C(n,j) (x - c)^{n-j} (-1)^j M_j(f)
        let n = t.power as usize;
        let m: Vec<Complex64> = (0..=n).map(|j| k.moment(j as u32, t.freq)).collect();
        let samples = spec
            .xs()
            .map(|x| {
                let o = self.outer(eps, x);
                if o == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let d = x - t.center;
                let poly: Complex64 = (0..=n)
                    .map(|j| {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        m[j] * binomial(n, j) * d.powi((n - j) as i32) * sign
                    })
                    .sum();
                t.coef * (2.0 * PI * Complex64::new(0.0, 1.0) * t.freq * x).exp() * poly * o
            })
            .collect();
        GridFunction::new(spec, samples)
    }

    fn dirac(&self, k: &EpsKernel, at: f64, order: u32, eps: f64, spec: GridSpec) -> GridFunction {
        // (-1)^k psi(eps x) rho^{(k)}(a - x),  rho^{(k)}(t) = w^{-1-k} g^{(k)}(t / w)
        let w = k.w;
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        let factor = sign * w.powi(-1 - order as i32);
        let reach = k.support * w;
        let samples: Vec<Complex64> = (0..spec.points())
            .into_par_iter()
            .map(|j| {
                let x = spec.x(j);
                let t = at - x;
                if t.abs() > reach {
                    return Complex64::new(0.0, 0.0);
                }
                let o = self.outer(eps, x);
                if o == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                Complex64::new(factor * o * k.profile_derivative(t / w, order), 0.0)
            })
            .collect();
        GridFunction::from_parts(spec, samples, 0.0)
    }

    fn ramp(&self, k: &EpsKernel, at: f64, power: u32, eps: f64, spec: GridSpec) -> GridFunction {
        // int rho(t) (x - a - t)^n H(x - a - t) dt
        //   = sum_j C(n,j) (x-a)^{n-j} (-1)^j w^j A_j((x - a) / w)
        let w = k.w;
        let n = power as usize;
        let samples: Vec<Complex64> = (0..spec.points())
            .into_par_iter()
            .map(|i| {
                let x = spec.x(i);
                let o = self.outer(eps, x);
                if o == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let d = x - at;
                let v: f64 = (0..=n)
                    .map(|j| {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        binomial(n, j)
                            * d.powi((n - j) as i32)
                            * sign
                            * w.powi(j as i32)
                            * k.partial_moment(j, d / w)
                    })
                    .sum();
                Complex64::new(v * o, 0.0)
            })
            .collect();
        GridFunction::from_parts(spec, samples, 0.0)
    }

    /// `d^k/dy^k K_eps(x, y)` from the profile series, used to cross-check
    /// singular kernel actions.
    pub fn kernel_y_derivative(&self, eps: f64, x: f64, y: f64, order: u32) -> Result<f64> {
        self.check_eps(eps)?;
        let k = self.kernel(eps)?;
        let w = k.w;
        let t = y - x;
        if t.abs() > k.support * w {
            return Ok(0.0);
        }
        Ok(self.outer(eps, x) * w.powi(-1 - order as i32) * k.profile_derivative(t / w, order))
    }
}

/// Per-`eps` reduction of the kernel to the profile `g`.
pub(crate) struct EpsKernel {
    w: f64,
    /// `g` vanishes (to rounding) for `|s| > support`.
    support: f64,
    finite_support: bool,
    /// `g(i / 32)` for `i >= 0`.
    g_half: Vec<f64>,
    ds: f64,
    /// `g(s) = sum dense[m] cos(2 pi m dxi s)`.
    dense: Vec<f64>,
    dxi: f64,
    band: f64,
    ramps: [OnceLock<RampSeries>; 5],
    totals: [OnceLock<f64>; 5],
}

/// `sum_m coeffs[m - lo] e^{2 pi i m dxi sigma} + dc (sigma + half) + offset`.
#[derive(Debug)]
struct RampSeries {
    lo: i64,
    dxi: f64,
    half: f64,
    coeffs: Vec<Complex64>,
    dc: Complex64,
    offset: Complex64,
}

impl RampSeries {
    fn sum(&self, sigma: f64) -> f64 {
        let theta = 2.0 * PI * self.dxi * sigma;
        let step = Complex64::from_polar(1.0, theta);
        let mut z = Complex64::new(1.0, 0.0);
        let mut acc = self.dc * (sigma + self.half) + self.offset;
        for (i, b) in self.coeffs.iter().enumerate() {
            if i % 64 == 0 {
                z = Complex64::from_polar(1.0, (self.lo + i as i64) as f64 * theta);
            }
            acc += b * z;
            z *= step;
        }
        acc.re
    }
}

impl EpsKernel {
    fn build(net: &TestObjectNet, eps: f64) -> Result<Self> {
        let table = mollifier_grid();
        let w = net.width(eps);
        let phi = net.phi.samples().samples();
        let g: Vec<f64> = table
            .xs()
            .zip(phi)
            .map(|(s, p)| p.re * net.inner(eps, w * s))
            .collect();
        let peak = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let origin = table.origin_index();
        let ds = table.spacing();
        let mut last = 0;
        for (i, v) in g.iter().enumerate().skip(origin) {
            if v.abs() > RELATIVE_TRIM * peak {
                last = i - origin;
            }
        }
        let support = (last + 1) as f64 * ds;
        let finite_support = net.config.inner_truncation;
        let g_half = g[origin..=origin + last].to_vec();

        let spectrum = forward_samples(
            &table,
            &g.iter()
                .map(|v| Complex64::new(*v, 0.0))
                .collect::<Vec<_>>(),
        );
        let dual = table.dual();
        let dxi = dual.spacing();
        let cpeak = spectrum.iter().fold(0.0f64, |m, z| m.max(z.norm())) * dxi;
        let mut series = Vec::new();
        let mut band: f64 = 0.0;
        for (k, z) in spectrum.iter().enumerate() {
            let xi = dual.x(k);
            if xi < 0.0 || k == 0 {
                continue;
            }
            let c = z.re * dxi;
            if c.abs() > RELATIVE_TRIM * cpeak {
                series.push((xi, if xi == 0.0 { c } else { 2.0 * c }));
                band = band.max(xi);
            }
        }
        let mut dense = vec![0.0; (band / dxi).round() as usize + 1];
        for &(xi, c) in &series {
            dense[(xi / dxi).round() as usize] = c;
        }
        Ok(Self {
            w,
            support,
            finite_support,
            g_half,
            ds,
            dense,
            dxi,
            band,
            ramps: Default::default(),
            totals: Default::default(),
        })
    }

    /// `g^{(k)}(s)`.
    fn profile_derivative(&self, s: f64, k: u32) -> f64 {
        if s.abs() > self.support {
            return 0.0;
        }
        // phasor recurrence, re-anchored every 64 terms
        let theta = 2.0 * PI * self.dxi * s;
        let step = Complex64::from_polar(1.0, theta);
        let mut z = Complex64::new(1.0, 0.0);
        let (mut cos_sum, mut sin_sum) = (0.0, 0.0);
        for (m, &c) in self.dense.iter().enumerate() {
            if m % 64 == 0 {
                z = Complex64::from_polar(1.0, m as f64 * theta);
            }
            if c != 0.0 {
                let a = c * (2.0 * PI * self.dxi * m as f64).powi(k as i32);
                cos_sum += a * z.re;
                sin_sum += a * z.im;
            }
            z *= step;
        }
        match k % 4 {
            0 => cos_sum,
            1 => -sin_sum,
            2 => -cos_sum,
            _ => sin_sum,
        }
    }

    /// `M_j(f) = int t^j exp(-2 pi i f t) rho(t) dt`.
    fn moment(&self, j: u32, f: Complex64) -> Complex64 {
        let w = self.w;
        let iw = Complex64::new(0.0, -2.0 * PI) * f * w;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &g) in self.g_half.iter().enumerate() {
            let s = i as f64 * self.ds;
            let pos = (w * s).powi(j as i32) * (iw * s).exp();
            if i == 0 {
                acc += pos * g;
            } else {
                let neg = (-w * s).powi(j as i32) * (-iw * s).exp();
                acc += (pos + neg) * g;
            }
        }
        acc * self.ds
    }

    /// Series of `s^j g(s)` on the mollifier period, pre-divided by `i omega`.
    fn ramp_series(&self, j: usize) -> &RampSeries {
        self.ramps[j].get_or_init(|| {
            let table = mollifier_grid();
            let origin = table.origin_index() as isize;
            let samples: Vec<Complex64> = (0..table.points())
                .map(|i| {
                    let off = (i as isize - origin).unsigned_abs();
                    let g = self.g_half.get(off).copied().unwrap_or(0.0);
                    Complex64::new(table.x(i).powi(j as i32) * g, 0.0)
                })
                .collect();
            let spectrum = forward_samples(&table, &samples);
            let dual = table.dual();
            let dxi = dual.spacing();
            let half = table.half_width();
            let peak = spectrum.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            let kept: Vec<(i64, Complex64)> = spectrum
                .iter()
                .enumerate()
                .filter(|(k, z)| *k != 0 && z.norm() > RELATIVE_TRIM * peak)
                .map(|(k, z)| ((dual.x(k) / dxi).round() as i64, z * dxi))
                .collect();
            let lo = kept.iter().map(|e| e.0).min().unwrap_or(0);
            let hi = kept.iter().map(|e| e.0).max().unwrap_or(0);
            let mut out = RampSeries {
                lo,
                dxi,
                half,
                coeffs: vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize],
                dc: Complex64::new(0.0, 0.0),
                offset: Complex64::new(0.0, 0.0),
            };
            for (m, d) in kept {
                if m == 0 {
                    out.dc = d;
                    continue;
                }
                let om = 2.0 * PI * dxi * m as f64;
                let b = d / Complex64::new(0.0, om);
                out.coeffs[(m - lo) as usize] = b;
                out.offset -= b * Complex64::from_polar(1.0, -om * half);
            }
            out
        })
    }

    /// `A_j(sigma) = int_{-inf}^{sigma} s^j g(s) ds`.
    fn partial_moment(&self, j: usize, sigma: f64) -> f64 {
        if sigma < -self.support {
            return 0.0;
        }
        if sigma >= self.support {
            return *self.totals[j].get_or_init(|| self.ramp_series(j).sum(self.support));
        }
        self.ramp_series(j).sum(sigma)
    }

    /// `rho_hat(nu) = g_hat(w nu)` on the dual of `spec`.
    fn transfer(&self, spec: &GridSpec) -> Vec<Complex64> {
        let w = self.w;
        let dual = spec.dual();
        if spec.spacing() <= w / RESOLUTION && self.support * w < spec.half_width() / 2.0 {
            let reach = self.support * w;
            let samples: Vec<Complex64> = (0..spec.points())
                .into_par_iter()
                .map(|j| {
                    let t = spec.x(j);
                    if t.abs() > reach {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::new(self.profile_derivative(t / w, 0) / w, 0.0)
                    }
                })
                .collect();
            return forward_samples(spec, &samples);
        }
        let band = self.band * 1.05 + 0.1;
        (0..dual.points())
            .into_par_iter()
            .map(|k| {
                let eta = w * dual.x(k);
                if eta.abs() > band {
                    return Complex64::new(0.0, 0.0);
                }
                let om = 2.0 * PI * eta * self.ds;
                let mut acc = self.g_half[0];
                for (i, g) in self.g_half.iter().enumerate().skip(1) {
                    acc += 2.0 * g * (om * i as f64).cos();
                }
                Complex64::new(acc * self.ds, 0.0)
            })
            .collect()
    }
}

/// Highest derivative order of `rho` the kernel series supports.
pub const MAX_KERNEL_ORDER: usize = JET_LEN - 1;
