//! Exact representations of the distributions used as embedding inputs.
//!
//! Smooth entries are finite sums of terms
//! `coef * (x - c)^n * exp(-b (x - c)^2) * exp(2 pi i f x)`, a family closed
//! under differentiation, multiplication by `x`, translation, modulation and
//! (for tempered members) the Fourier transform. A complex `f` with nonzero
//! imaginary part gives exponential growth, i.e. a member of `D'` only.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{self, GridFunction, GridSpec};
use crate::jet::binomial;

/// Highest Dirac derivative order and Heaviside ramp power in the catalog.
pub const MAX_ORDER: u32 = 4;
/// Nesting cap for [`Distribution::Sum`].
pub const MAX_SUM_DEPTH: usize = 4;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothTerm {
    pub coef: Complex64,
    pub center: f64,
    pub power: u32,
    /// Gaussian rate `b >= 0`.
    pub decay: f64,
    pub freq: Complex64,
}

impl SmoothTerm {
    pub fn new(coef: Complex64, center: f64, power: u32, decay: f64, freq: Complex64) -> Self {
        Self {
            coef,
            center,
            power,
            decay,
            freq,
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let d = x - self.center;
        let wave = (2.0 * PI * I * self.freq * x).exp();
        self.coef * d.powi(self.power as i32) * (-self.decay * d * d).exp() * wave
    }

    fn growth(&self) -> Growth {
        if self.coef == re(0.0) {
            Growth::Schwartz
        } else if self.decay > 0.0 {
            Growth::Schwartz
        } else if self.freq.im != 0.0 {
            Growth::Exponential
        } else {
            Growth::Polynomial(self.power)
        }
    }

    fn with(&self, coef: Complex64, power: u32) -> Self {
        Self {
            coef,
            power,
            ..self.clone()
        }
    }
}

/// Declared growth class of a smooth entry, derived from its terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Growth {
    Schwartz,
    Polynomial(u32),
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SmoothFn {
    pub terms: Vec<SmoothTerm>,
}

impl SmoothFn {
    pub fn new(terms: Vec<SmoothTerm>) -> Self {
        Self { terms }.pruned()
    }

    fn pruned(mut self) -> Self {
        self.terms.retain(|t| t.coef != re(0.0));
        self
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn growth(&self) -> Growth {
        self.terms
            .iter()
            .map(SmoothTerm::growth)
            .max()
            .unwrap_or(Growth::Schwartz)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| t.with(t.coef * c, t.power))
                .collect(),
        )
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::new();
        for t in &self.terms {
            if t.power > 0 {
                out.push(t.with(t.coef * t.power as f64, t.power - 1));
            }
            if t.decay > 0.0 {
                out.push(t.with(t.coef * (-2.0 * t.decay), t.power + 1));
            }
            out.push(t.with(t.coef * 2.0 * PI * I * t.freq, t.power));
        }
        Self::new(out)
    }

    pub fn mul_coordinate(&self) -> Self {
        let mut out = Vec::new();
        for t in &self.terms {
            out.push(t.with(t.coef, t.power + 1));
            if t.center != 0.0 {
                out.push(t.with(t.coef * t.center, t.power));
            }
        }
        Self::new(out)
    }

    /// `x -> f(x - a)`.
    pub fn translate(&self, a: f64) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| SmoothTerm {
                    coef: t.coef * (-2.0 * PI * I * t.freq * a).exp(),
                    center: t.center + a,
                    ..t.clone()
                })
                .collect(),
        )
    }

    pub fn modulate(&self, a: f64) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| SmoothTerm {
                    freq: t.freq + a,
                    ..t.clone()
                })
                .collect(),
        )
    }

    /// `x -> f(-x)`.
    pub fn reflect(&self) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| SmoothTerm {
                    coef: if t.power % 2 == 0 { t.coef } else { -t.coef },
                    center: -t.center,
                    freq: -t.freq,
                    ..t.clone()
                })
                .collect(),
        )
    }

    pub fn sample(&self, spec: GridSpec) -> Result<GridFunction> {
        grid::sample(|x| self.eval(x), spec)
    }
}

/// Tagged distribution with exact pairing and transform rules.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Smooth(SmoothFn),
    /// Sampled Schwartz-class function.
    Sample(GridFunction),
    /// `delta_at^{(order)}`.
    Dirac {
        at: f64,
        order: u32,
    },
    /// `(x - at)^power * H(x - at)`; `power = 0` is the Heaviside step.
    Heaviside {
        at: f64,
        power: u32,
    },
    Sum(Vec<(Complex64, Distribution)>),
}

impl Distribution {
    pub fn zero() -> Self {
        Distribution::Sum(Vec::new())
    }

    pub fn smooth(terms: Vec<SmoothTerm>) -> Self {
        Distribution::Smooth(SmoothFn::new(terms))
    }

    pub fn dirac(at: f64, order: u32) -> Result<Self> {
        if order > MAX_ORDER {
            return Err(Error::OrderTooHigh {
                order,
                cap: MAX_ORDER,
            });
        }
        Ok(Distribution::Dirac { at, order })
    }

    pub fn heaviside(at: f64) -> Self {
        Distribution::Heaviside { at, power: 0 }
    }

    /// `coef * exp(-b (x - c)^2)`.
    pub fn gaussian(coef: f64, center: f64, b: f64) -> Self {
        Self::smooth(vec![SmoothTerm::new(re(coef), center, 0, b, re(0.0))])
    }

    pub fn monomial(k: u32) -> Self {
        Self::smooth(vec![SmoothTerm::new(re(1.0), 0.0, k, 0.0, re(0.0))])
    }

    /// Linear combination; nested sums are kept up to [`MAX_SUM_DEPTH`].
    pub fn sum(parts: Vec<(Complex64, Distribution)>) -> Result<Self> {
        let d = Distribution::Sum(parts);
        if d.depth() > MAX_SUM_DEPTH {
            return Err(Error::TooDeep(d.depth()));
        }
        Ok(d)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        match self {
            Distribution::Smooth(f) => Distribution::Smooth(f.scaled(c)),
            Distribution::Sample(g) => Distribution::Sample(g.scaled(c)),
            Distribution::Sum(parts) => {
                Distribution::Sum(parts.iter().map(|(k, d)| (k * c, d.clone())).collect())
            }
            other => Distribution::Sum(vec![(c, other.clone())]),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Distribution::Sum(parts) => 1 + parts.iter().map(|(_, d)| d.depth()).max().unwrap_or(0),
            _ => 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Distribution::Smooth(f) => f.terms.is_empty(),
            Distribution::Sample(g) => g.is_zero(),
            Distribution::Sum(parts) => parts.iter().all(|(c, d)| *c == re(0.0) || d.is_zero()),
            _ => false,
        }
    }

    /// Rapid decay at infinity (Schwartz class or compact support).
    pub fn is_decaying(&self) -> bool {
        match self {
            Distribution::Smooth(f) => f.growth() == Growth::Schwartz,
            Distribution::Sample(_) | Distribution::Dirac { .. } => true,
            Distribution::Heaviside { .. } => false,
            Distribution::Sum(parts) => parts.iter().all(|(_, d)| d.is_decaying()),
        }
    }

    pub fn is_tempered(&self) -> bool {
        match self {
            Distribution::Smooth(f) => f.growth() != Growth::Exponential,
            Distribution::Sum(parts) => parts.iter().all(|(_, d)| d.is_tempered()),
            _ => true,
        }
    }

    /// Contains a singular part (Dirac or Heaviside) that a kernel has to resolve.
    pub fn is_singular(&self) -> bool {
        match self {
            Distribution::Dirac { .. } | Distribution::Heaviside { .. } => true,
            Distribution::Sum(parts) => parts.iter().any(|(_, d)| d.is_singular()),
            _ => false,
        }
    }

    /// Smooth-class members (valid inputs to the constant embedding).
    pub fn is_smooth(&self) -> bool {
        match self {
            Distribution::Smooth(_) | Distribution::Sample(_) => true,
            Distribution::Sum(parts) => parts.iter().all(|(_, d)| d.is_smooth()),
            _ => false,
        }
    }

    pub fn derivative(&self) -> Result<Self> {
        Ok(match self {
            Distribution::Smooth(f) => Distribution::Smooth(f.derivative()),
            Distribution::Sample(g) => Distribution::Sample(grid::spectral_derivative(g, 1)?),
            Distribution::Dirac { at, order } => Distribution::dirac(*at, order + 1)?,
            Distribution::Heaviside { at, power: 0 } => Distribution::Dirac { at: *at, order: 0 },
            Distribution::Heaviside { at, power } => Distribution::Sum(vec![(
                re(*power as f64),
                Distribution::Heaviside {
                    at: *at,
                    power: power - 1,
                },
            )]),
            Distribution::Sum(parts) => Distribution::Sum(
                parts
                    .iter()
                    .map(|(c, d)| Ok((*c, d.derivative()?)))
                    .collect::<Result<_>>()?,
            ),
        })
    }

    pub fn nth_derivative(&self, k: u32) -> Result<Self> {
        let mut d = self.clone();
        for _ in 0..k {
            d = d.derivative()?;
        }
        Ok(d)
    }

    /// Multiplication by the coordinate `x`.
    pub fn mul_coordinate(&self) -> Result<Self> {
        Ok(match self {
            Distribution::Smooth(f) => Distribution::Smooth(f.mul_coordinate()),
            Distribution::Sample(g) => Distribution::Sample(g.mul_coordinate()),
            Distribution::Dirac { at, order } => {
                // x delta_a^{(k)} = a delta_a^{(k)} - k delta_a^{(k-1)}
                let mut parts = vec![(re(*at), self.clone())];
                if *order > 0 {
                    parts.push((
                        re(-(*order as f64)),
                        Distribution::Dirac {
                            at: *at,
                            order: order - 1,
                        },
                    ));
                }
                Distribution::Sum(parts)
            }
            Distribution::Heaviside { at, power } => {
                if *power >= MAX_ORDER {
                    return Err(Error::OrderTooHigh {
                        order: power + 1,
                        cap: MAX_ORDER,
                    });
                }
                Distribution::Sum(vec![
                    (
                        re(1.0),
                        Distribution::Heaviside {
                            at: *at,
                            power: power + 1,
                        },
                    ),
                    (re(*at), self.clone()),
                ])
            }
            Distribution::Sum(parts) => Distribution::Sum(
                parts
                    .iter()
                    .map(|(c, d)| Ok((*c, d.mul_coordinate()?)))
                    .collect::<Result<_>>()?,
            ),
        })
    }

    /// `u(x - a)`.
    pub fn translate(&self, a: f64) -> Result<Self> {
        Ok(match self {
            Distribution::Smooth(f) => Distribution::Smooth(f.translate(a)),
            Distribution::Sample(g) => Distribution::Sample(grid::translate(g, a)),
            Distribution::Dirac { at, order } => Distribution::Dirac {
                at: at + a,
                order: *order,
            },
            Distribution::Heaviside { at, power } => Distribution::Heaviside {
                at: at + a,
                power: *power,
            },
            Distribution::Sum(parts) => Distribution::Sum(
                parts
                    .iter()
                    .map(|(c, d)| Ok((*c, d.translate(a)?)))
                    .collect::<Result<_>>()?,
            ),
        })
    }

    /// `exp(2 pi i a x) u`.
    pub fn modulate(&self, a: f64) -> Result<Self> {
        Ok(match self {
            Distribution::Smooth(f) => Distribution::Smooth(f.modulate(a)),
            Distribution::Sample(g) => Distribution::Sample(grid::modulate(g, a)),
            Distribution::Dirac { at, order } => {
                // g delta_b^{(k)} = sum_j C(k,j) (-1)^j g^{(j)}(b) delta_b^{(k-j)}
                let k = *order as usize;
                let w = 2.0 * PI * I * a;
                let g0 = (w * at).exp();
                let parts = (0..=k)
                    .map(|j| {
                        let c = binomial(k, j) * if j % 2 == 0 { 1.0 } else { -1.0 };
                        (
                            g0 * w.powu(j as u32) * c,
                            Distribution::Dirac {
                                at: *at,
                                order: (k - j) as u32,
                            },
                        )
                    })
                    .collect();
                Distribution::Sum(parts)
            }
            Distribution::Heaviside { .. } => {
                if a == 0.0 {
                    self.clone()
                } else {
                    return Err(Error::Unsupported(
                        "modulated Heaviside is not in the catalog".into(),
                    ));
                }
            }
            Distribution::Sum(parts) => Distribution::Sum(
                parts
                    .iter()
                    .map(|(c, d)| Ok((*c, d.modulate(a)?)))
                    .collect::<Result<_>>()?,
            ),
        })
    }

    /// `u(-x)`.
    pub fn reflect(&self) -> Result<Self> {
        Ok(match self {
            Distribution::Smooth(f) => Distribution::Smooth(f.reflect()),
            Distribution::Sample(g) => Distribution::Sample(reflect_samples(g)),
            Distribution::Dirac { at, order } => {
                let d = Distribution::Dirac {
                    at: -at,
                    order: *order,
                };
                if order % 2 == 0 {
                    d
                } else {
                    Distribution::Sum(vec![(re(-1.0), d)])
                }
            }
            Distribution::Heaviside { .. } => {
                return Err(Error::Unsupported(
                    "reflected Heaviside is not in the catalog".into(),
                ))
            }
            Distribution::Sum(parts) => Distribution::Sum(
                parts
                    .iter()
                    .map(|(c, d)| Ok((*c, d.reflect()?)))
                    .collect::<Result<_>>()?,
            ),
        })
    }

    /// Samples a smooth-class distribution on `spec`.
    pub fn sample(&self, spec: GridSpec) -> Result<GridFunction> {
        match self {
            Distribution::Smooth(f) => f.sample(spec),
            Distribution::Sample(g) => grid::resample(g, &spec),
            Distribution::Sum(parts) => {
                let mut acc = GridFunction::zeros(spec);
                for (c, d) in parts {
                    acc = acc.combine(re(1.0), &d.sample(spec)?, *c)?;
                }
                Ok(acc)
            }
            _ => Err(Error::Unsupported(format!("{} has no point values", self))),
        }
    }
}

fn reflect_samples(g: &GridFunction) -> GridFunction {
    let n = g.spec().points();
    let s = g.samples();
    let out = (0..n).map(|j| s[(n - j) % n]).collect();
    GridFunction::from_parts(*g.spec(), out, g.scale())
}

/// Fourier transform under the `2 pi` convention.
pub fn fourier_of(u: &Distribution) -> Result<Distribution> {
    match u {
        Distribution::Smooth(f) => fourier_smooth(f),
        Distribution::Sample(g) => Ok(Distribution::Sample(grid::dft_forward(g))),
        Distribution::Dirac { at, order } => {
            let k = *order;
            Ok(Distribution::smooth(vec![SmoothTerm::new(
                (2.0 * PI * I).powu(k),
                0.0,
                k,
                0.0,
                re(-at),
            )]))
        }
        Distribution::Heaviside { .. } => Err(Error::Unsupported(
            "the Heaviside function has no catalog Fourier transform".into(),
        )),
        Distribution::Sum(parts) => Ok(Distribution::Sum(
            parts
                .iter()
                .map(|(c, d)| Ok((*c, fourier_of(d)?)))
                .collect::<Result<_>>()?,
        )),
    }
}

/// Inverse transform, `F^{-1} u = R F u` with `R` the reflection.
pub fn inverse_fourier_of(u: &Distribution) -> Result<Distribution> {
    match u {
        Distribution::Sample(g) => Ok(Distribution::Sample(grid::dft_inverse(g))),
        Distribution::Sum(parts) => Ok(Distribution::Sum(
            parts
                .iter()
                .map(|(c, d)| Ok((*c, inverse_fourier_of(d)?)))
                .collect::<Result<_>>()?,
        )),
        other => fourier_of(other)?.reflect(),
    }
}

fn fourier_smooth(f: &SmoothFn) -> Result<Distribution> {
    let mut parts: Vec<(Complex64, Distribution)> = Vec::new();
    let mut smooth_terms: Vec<SmoothTerm> = Vec::new();
    for t in &f.terms {
        if t.freq.im != 0.0 {
            return Err(Error::NonDecaying(t.freq.im));
        }
        let fr = t.freq.re;
        let n = t.power as usize;
        // (x - c)^n = sum_j C(n,j) (-c)^{n-j} x^j and F[x^j h] = (i / 2 pi)^j (F h)^{(j)}
        let base = if t.decay > 0.0 {
            let b = t.decay;
            let coef = (PI / b).sqrt() * (2.0 * PI * I * fr * t.center).exp();
            Some(SmoothFn::new(vec![SmoothTerm::new(
                coef,
                fr,
                0,
                PI * PI / b,
                re(-t.center),
            )]))
        } else {
            None
        };
        for j in 0..=n {
            let c = t.coef
                * binomial(n, j)
                * (-t.center).powi((n - j) as i32)
                * (I / (2.0 * PI)).powu(j as u32);
            if c == re(0.0) {
                continue;
            }
            match &base {
                Some(h) => {
                    let mut d = h.clone();
                    for _ in 0..j {
                        d = d.derivative();
                    }
                    smooth_terms.extend(d.scaled(c).terms);
                }
                None => {
                    if j as u32 > MAX_ORDER {
                        return Err(Error::OrderTooHigh {
                            order: j as u32,
                            cap: MAX_ORDER,
                        });
                    }
                    parts.push((
                        c,
                        Distribution::Dirac {
                            at: fr,
                            order: j as u32,
                        },
                    ));
                }
            }
        }
    }
    if !smooth_terms.is_empty() {
        parts.push((re(1.0), Distribution::smooth(smooth_terms)));
    }
    Ok(match parts.len() {
        1 if parts[0].0 == re(1.0) => parts
            .pop()
            .map(|(_, d)| d)
            .unwrap_or_else(Distribution::zero),
        _ => Distribution::Sum(parts),
    })
}

fn check_decaying(chi: &GridFunction) -> Result<()> {
    let edge = chi.edge_magnitude(chi.spec().half_width() / 8.0);
    if edge > 1e-8 * chi.sup().max(1e-300) {
        return Err(Error::NonDecaying(edge));
    }
    Ok(())
}

/// `<u, chi>` for a test function decaying inside the window of `chi`.
pub fn pair(u: &Distribution, chi: &GridFunction) -> Result<Complex64> {
    check_decaying(chi)?;
    pair_unchecked(u, chi)
}

fn pair_unchecked(u: &Distribution, chi: &GridFunction) -> Result<Complex64> {
    Ok(match u {
        Distribution::Smooth(f) => grid::quadrature(&f.sample(*chi.spec())?.mul(chi)?),
        Distribution::Sample(g) => grid::quadrature(&grid::resample(g, chi.spec())?.mul(chi)?),
        Distribution::Dirac { at, order } => {
            let v = grid::interpolate(chi, *at, *order);
            if order % 2 == 0 {
                v
            } else {
                -v
            }
        }
        Distribution::Heaviside { at, power } => {
            let a = *at;
            let p = *power as i32;
            grid::integral_from(&chi.mul_fn(|x| re((x - a).powi(p))), a)
        }
        Distribution::Sum(parts) => {
            let mut acc = re(0.0);
            for (c, d) in parts {
                acc += c * pair_unchecked(d, chi)?;
            }
            acc
        }
    })
}

/// Looks up a named catalog entry: `delta`, `delta(a=..)`, `delta_prime`,
/// `delta_prime(a=..)`, `heaviside`, `heaviside(a=..)`, `gauss`, `gauss_pi`,
/// `one`, `x_poly(k)`, `exp`, `zero`.
pub fn lookup(name: &str) -> Result<Distribution> {
    let name = name.trim();
    let (head, args) = match name.find('(') {
        Some(p) if name.ends_with(')') => (&name[..p], Some(&name[p + 1..name.len() - 1])),
        Some(_) => return Err(Error::Invalid(format!("malformed catalog name `{name}`"))),
        None => (name, None),
    };
    let shift = |args: Option<&str>| -> Result<f64> {
        match args.map(str::trim) {
            None | Some("") => Ok(0.0),
            Some(a) => {
                let v = a
                    .strip_prefix("a=")
                    .or_else(|| a.strip_prefix("a ="))
                    .unwrap_or(a);
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Invalid(format!("bad argument `{a}` in `{name}`")))
            }
        }
    };
    let no_args = |args: Option<&str>| -> Result<()> {
        match args {
            None => Ok(()),
            Some(_) => Err(Error::Invalid(format!("`{head}` takes no arguments"))),
        }
    };
    match head.trim() {
        "delta" => Ok(Distribution::Dirac {
            at: shift(args)?,
            order: 0,
        }),
        "delta_prime" => Ok(Distribution::Dirac {
            at: shift(args)?,
            order: 1,
        }),
        "heaviside" => Ok(Distribution::heaviside(shift(args)?)),
        "gauss" => no_args(args).map(|_| Distribution::gaussian(1.0, 0.0, 1.0)),
        "gauss_pi" => no_args(args).map(|_| Distribution::gaussian(1.0, 0.0, PI)),
        "one" => no_args(args).map(|_| Distribution::monomial(0)),
        "exp" => no_args(args).map(|_| {
            Distribution::smooth(vec![SmoothTerm::new(
                re(1.0),
                0.0,
                0,
                0.0,
                Complex64::new(0.0, -1.0 / (2.0 * PI)),
            )])
        }),
        "zero" => no_args(args).map(|_| Distribution::zero()),
        "x_poly" => {
            let k = args
                .map(|a| a.trim().trim_start_matches("k=").trim())
                .ok_or_else(|| Error::Invalid("x_poly needs a power, e.g. x_poly(2)".into()))?
                .parse::<u32>()
                .map_err(|_| Error::Invalid(format!("bad power in `{name}`")))?;
            if k > 8 {
                return Err(Error::OrderTooHigh { order: k, cap: 8 });
            }
            Ok(Distribution::monomial(k))
        }
        other => Err(Error::Invalid(format!("unknown catalog entry `{other}`"))),
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Smooth(s) => write!(f, "smooth[{} terms]", s.terms.len()),
            Distribution::Sample(g) => write!(f, "sample[{} pts]", g.spec().points()),
            Distribution::Dirac { at, order } => write!(f, "delta^({order})@{at}"),
            Distribution::Heaviside { at, power: 0 } => write!(f, "H@{at}"),
            Distribution::Heaviside { at, power } => write!(f, "(x-{at})^{power} H@{at}"),
            Distribution::Sum(parts) => write!(f, "sum[{}]", parts.len()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, sample_real};

    fn base() -> GridSpec {
        make_grid(32.0, 4096).unwrap()
    }

    fn gauss() -> GridFunction {
        sample_real(|x| (-x * x).exp(), base()).unwrap()
    }

    #[test]
    fn pair_examples() {
        let chi = gauss();
        let d = pair(&lookup("delta").unwrap(), &chi).unwrap();
        assert!((d - re(1.0)).norm() < 1e-12);
        let dp = pair(&Distribution::Dirac { at: 0.0, order: 1 }, &chi).unwrap();
        assert!(dp.norm() < 1e-10);
        let h = pair(&lookup("heaviside").unwrap(), &chi).unwrap();
        assert!((h - re(PI.sqrt() / 2.0)).norm() < 1e-9);
        let flat = sample_real(|_| 1.0, base()).unwrap();
        assert!(pair(&lookup("delta").unwrap(), &flat).is_err());
    }

    #[test]
    fn dirac_pairing_at_offset() {
        // <delta_a', chi> = -chi'(a)
        let a = 0.5;
        let v = pair(&Distribution::Dirac { at: a, order: 1 }, &gauss()).unwrap();
        assert!((v - re(2.0 * a * (-a * a).exp())).norm() < 1e-10);
    }

    #[test]
    fn fourier_examples() {
        let fd = fourier_of(&lookup("delta").unwrap()).unwrap();
        let s = fd.sample(base()).unwrap();
        assert!(s.samples().iter().all(|z| (z - re(1.0)).norm() < 1e-15));
        let fg = fourier_of(&lookup("gauss_pi").unwrap())
            .unwrap()
            .sample(base())
            .unwrap();
        let exact = sample_real(|xi| (-PI * xi * xi).exp(), base()).unwrap();
        assert!(fg.sup_distance(&exact).unwrap() < 1e-12);
        assert!(matches!(
            fourier_of(&lookup("heaviside").unwrap()),
            Err(Error::Unsupported(_))
        ));
        assert!(fourier_of(&lookup("exp").unwrap()).is_err());
    }

    #[test]
    fn closed_form_matches_dft_bridge() {
        // F[x exp(-(x-0.3)^2) e^{2 pi i 0.2 x}]
        let u = Distribution::smooth(vec![SmoothTerm::new(re(1.0), 0.3, 1, 1.0, re(0.2))]);
        let closed = fourier_of(&u).unwrap().sample(base()).unwrap();
        let bridge = grid::dft_forward(&u.sample(base()).unwrap());
        assert!(closed.sup_distance(&bridge).unwrap() < 1e-12);
    }

    #[test]
    fn transform_of_polynomial_is_dirac_derivative() {
        // F[x] = (i / 2 pi) delta'
        let f = fourier_of(&lookup("x_poly(1)").unwrap()).unwrap();
        let chi = gauss();
        let lhs = pair(&f, &chi).unwrap();
        let rhs =
            (I / (2.0 * PI)) * pair(&Distribution::Dirac { at: 0.0, order: 1 }, &chi).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn coordinate_multiplication_of_dirac() {
        let chi = gauss().mul_fn(|x| re((x - 0.2).cos()));
        let u = Distribution::Dirac { at: 0.4, order: 2 };
        let lhs = pair(&u.mul_coordinate().unwrap(), &chi).unwrap();
        let rhs = pair(&u, &chi.mul_coordinate()).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn modulation_of_dirac() {
        let chi = gauss();
        let u = Distribution::Dirac { at: 0.3, order: 2 };
        let a = 0.7;
        let lhs = pair(&u.modulate(a).unwrap(), &chi).unwrap();
        let rhs = pair(&u, &grid::modulate(&chi, a)).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn heaviside_ramp_rules() {
        let chi = gauss();
        let h = lookup("heaviside(a=0.25)").unwrap();
        let xh = h.mul_coordinate().unwrap();
        let lhs = pair(&xh, &chi).unwrap();
        let rhs = pair(&h, &chi.mul_coordinate()).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
        // derivative of the ramp is the step
        let d = xh.derivative().unwrap();
        let lhs = pair(&d, &chi).unwrap();
        let rhs = -pair(&xh, &grid::spectral_derivative(&chi, 1).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn lookup_names() {
        for n in [
            "delta",
            "delta_prime(a=0.5)",
            "heaviside",
            "gauss",
            "one",
            "x_poly(3)",
            "exp",
            "gauss_pi",
        ] {
            assert!(lookup(n).is_ok(), "{n}");
        }
        assert!(lookup("nope").is_err());
        assert!(lookup("gauss(1)").is_err());
        assert_eq!(
            lookup("delta_prime(a=0.5)").unwrap(),
            Distribution::Dirac { at: 0.5, order: 1 }
        );
    }

    #[test]
    fn order_cap() {
        assert!(Distribution::dirac(0.0, 5).is_err());
        let d4 = Distribution::Dirac { at: 0.0, order: 4 };
        assert!(d4.derivative().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn catalog() -> Vec<Distribution> {
            vec![
                lookup("delta").unwrap(),
                lookup("delta_prime(a=0.5)").unwrap(),
                lookup("heaviside").unwrap(),
                lookup("gauss").unwrap(),
                lookup("one").unwrap(),
                lookup("x_poly(2)").unwrap(),
            ]
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn pairing_is_bilinear(i in 0usize..6, j in 0usize..6, a in -2.0..2.0f64, c in -1.0..1.0f64) {
                let spec = base();
                let us = catalog();
                let chi1 = sample_real(|x| (-(x - c) * (x - c)).exp(), spec).unwrap();
                let chi2 = sample_real(|x| x * (-x * x).exp(), spec).unwrap();
                let ca = re(a);
                let u = Distribution::Sum(vec![(ca, us[i].clone()), (re(1.0), us[j].clone())]);
                let lhs = pair(&u, &chi1).unwrap();
                let rhs = ca * pair(&us[i], &chi1).unwrap() + pair(&us[j], &chi1).unwrap();
                prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
                let chi = chi1.combine(ca, &chi2, re(1.0)).unwrap();
                let lhs = pair(&us[i], &chi).unwrap();
                let rhs = ca * pair(&us[i], &chi1).unwrap() + pair(&us[i], &chi2).unwrap();
                prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
            }

            #[test]
            fn fourier_round_trip(a in -1.0..1.0f64, k in 0u32..3, b in 0.5..2.0f64, f in -0.5..0.5f64) {
                let spec = base();
                let chi = sample_real(|x| (-x * x).exp(), spec).unwrap();
                let d = Distribution::Dirac { at: a, order: k };
                let back = inverse_fourier_of(&fourier_of(&d).unwrap()).unwrap();
                prop_assert!((pair(&back, &chi).unwrap() - pair(&d, &chi).unwrap()).norm() < 1e-9);
                let g = Distribution::smooth(vec![SmoothTerm::new(re(1.0), a, k, b, re(f))]);
                let back = inverse_fourier_of(&fourier_of(&g).unwrap()).unwrap();
                let err = back.sample(spec).unwrap().sup_distance(&g.sample(spec).unwrap()).unwrap();
                prop_assert!(err < 1e-9);
            }
        }
    }
}
