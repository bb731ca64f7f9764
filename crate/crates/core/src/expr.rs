//! Representatives: expression trees for maps from smoothing operators to
//! smooth functions, with evaluation at an operator handle and the structural
//! differential in the operator argument.

use std::fmt;

use num_complex::Complex64;

use crate::catalog::{self, Distribution};
use crate::error::{Error, Result};
use crate::grid::{self, GridFunction, GridSpec};
use crate::mollifier::net::RESOLUTION;
use crate::mollifier::operator::{
    apply, collect_needs, unify, CommutatorKind, DomainTag, GridNeeds, Operator, OperatorHandle,
    Transform,
};

pub const MAX_DEPTH: usize = 16;
/// Largest differential order accepted from callers.
pub const MAX_DIFFERENTIAL: usize = 2;
/// Internal cap; hat derivations raise the order of their child.
const MAX_SLOTS: usize = 8;
const DECAY_REL: f64 = 1e-8;
/// Samples per kernel width below a Fourier node, where the kernel's transform
/// has to fit inside the dual window.
const TRANSFORM_RESOLUTION: f64 = 2.0 * RESOLUTION;

#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    pub dist: Distribution,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representative {
    Iota(Leaf),
    Sigma(Leaf),
    Sum(Vec<Representative>),
    Scale(Complex64, Box<Representative>),
    Product(Box<Representative>, Box<Representative>),
    Convolve(Box<Representative>, Box<Representative>),
    Deriv(u32, Box<Representative>),
    MulCoordinate(Box<Representative>),
    HatDeriv(u32, Box<Representative>),
    HatMulCoordinate(Box<Representative>),
    Fourier(Box<Representative>),
    InvFourier(Box<Representative>),
    Translate(f64, Box<Representative>),
    Modulate(f64, Box<Representative>),
    HatTranslate(f64, Box<Representative>),
    HatModulate(f64, Box<Representative>),
}

use Representative as R;

pub fn iota(u: Distribution) -> Representative {
    let label = u.to_string();
    iota_labeled(u, label)
}

pub fn iota_labeled(u: Distribution, label: impl Into<String>) -> Representative {
    R::Iota(Leaf {
        dist: u,
        label: label.into(),
    })
}

/// Constant embedding; only smooth-class inputs.
pub fn sigma(f: Distribution) -> Result<Representative> {
    let label = f.to_string();
    sigma_labeled(f, label)
}

pub fn sigma_labeled(f: Distribution, label: impl Into<String>) -> Result<Representative> {
    if !f.is_smooth() {
        return Err(Error::Invalid(format!(
            "sigma needs a smooth function, got {f}"
        )));
    }
    Ok(R::Sigma(Leaf {
        dist: f,
        label: label.into(),
    }))
}

/// `iota` of a named catalog entry.
pub fn iota_named(name: &str) -> Result<Representative> {
    Ok(R::Iota(Leaf {
        dist: catalog::lookup(name)?,
        label: name.trim().to_string(),
    }))
}

pub fn sigma_named(name: &str) -> Result<Representative> {
    let f = catalog::lookup(name)?;
    if !f.is_smooth() {
        return Err(Error::Invalid(format!(
            "sigma needs a smooth function, got `{name}`"
        )));
    }
    Ok(R::Sigma(Leaf {
        dist: f,
        label: name.trim().to_string(),
    }))
}

fn b(r: Representative) -> Box<Representative> {
    Box::new(r)
}

impl Representative {
    pub fn zero() -> Self {
        R::Sum(Vec::new())
    }

    pub fn add(self, other: Representative) -> Self {
        R::Sum(vec![self, other])
    }

    pub fn sub(self, other: Representative) -> Self {
        R::Sum(vec![self, R::Scale(Complex64::new(-1.0, 0.0), b(other))])
    }

    pub fn scale(self, c: Complex64) -> Self {
        R::Scale(c, b(self))
    }

    pub fn mul(self, other: Representative) -> Self {
        R::Product(b(self), b(other))
    }

    pub fn conv(self, other: Representative) -> Self {
        R::Convolve(b(self), b(other))
    }

    pub fn deriv(self, k: u32) -> Self {
        R::Deriv(k, b(self))
    }

    pub fn mul_coordinate(self) -> Self {
        R::MulCoordinate(b(self))
    }

    pub fn hat_deriv(self, k: u32) -> Self {
        R::HatDeriv(k, b(self))
    }

    pub fn hat_mul_coordinate(self) -> Self {
        R::HatMulCoordinate(b(self))
    }

    pub fn fourier(self) -> Self {
        R::Fourier(b(self))
    }

    pub fn inv_fourier(self) -> Self {
        R::InvFourier(b(self))
    }

    pub fn translate(self, a: f64) -> Self {
        R::Translate(a, b(self))
    }

    pub fn modulate(self, a: f64) -> Self {
        R::Modulate(a, b(self))
    }

    pub fn hat_translate(self, a: f64) -> Self {
        R::HatTranslate(a, b(self))
    }

    pub fn hat_modulate(self, a: f64) -> Self {
        R::HatModulate(a, b(self))
    }

    fn children(&self) -> Vec<&Representative> {
        match self {
            R::Iota(_) | R::Sigma(_) => Vec::new(),
            R::Sum(parts) => parts.iter().collect(),
            R::Product(l, r) | R::Convolve(l, r) => vec![l, r],
            R::Scale(_, c)
            | R::Deriv(_, c)
            | R::MulCoordinate(c)
            | R::HatDeriv(_, c)
            | R::HatMulCoordinate(c)
            | R::Fourier(c)
            | R::InvFourier(c)
            | R::Translate(_, c)
            | R::Modulate(_, c)
            | R::HatTranslate(_, c)
            | R::HatModulate(_, c) => vec![c],
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Domain tag of the tree; `None` when no Fourier node pins it.
    pub fn domain(&self) -> Result<Option<DomainTag>> {
        match self {
            R::Fourier(c) => match c.domain()? {
                Some(DomainTag::Frequency) => Err(Error::DomainMismatch(
                    "F applied to a frequency-domain representative".into(),
                )),
                _ => Ok(Some(DomainTag::Frequency)),
            },
            R::InvFourier(c) => match c.domain()? {
                Some(DomainTag::Spatial) => Err(Error::DomainMismatch(
                    "Finv applied to a spatial-domain representative".into(),
                )),
                _ => Ok(Some(DomainTag::Spatial)),
            },
            _ => {
                let mut tag = None;
                for c in self.children() {
                    tag = unify(tag, c.domain()?)?;
                }
                Ok(tag)
            }
        }
    }

    /// Checks depth, domain tags and that every `iota` leaf under a Fourier
    /// node has a catalog transform; returns the tag.
    pub fn validate(&self) -> Result<Option<DomainTag>> {
        let d = self.depth();
        if d > MAX_DEPTH {
            return Err(Error::TooDeep(d));
        }
        self.check_transformable(false)?;
        self.domain()
    }

    fn check_transformable(&self, under: bool) -> Result<()> {
        match self {
            R::Iota(leaf) if under => catalog::fourier_of(&leaf.dist)
                .map(|_| ())
                .map_err(|_| Error::Unsupported(format!("no catalog transform for `{}`", leaf.label))),
            R::Fourier(c) | R::InvFourier(c) => c.check_transformable(true),
            _ => self.children().into_iter().try_for_each(|c| c.check_transformable(under)),
        }
    }

    /// Tree built only from sigma leaves (constant in the operator).
    pub fn is_constant(&self) -> bool {
        match self {
            R::Iota(_) => false,
            R::Sigma(_) => true,
            _ => self.children().iter().all(|c| c.is_constant()),
        }
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

impl fmt::Display for Representative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            R::Iota(l) => write!(f, "iota({})", l.label),
            R::Sigma(l) => write!(f, "sigma({})", l.label),
            R::Sum(parts) if parts.is_empty() => write!(f, "0"),
            R::Sum(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "({})", s.join(" + "))
            }
            R::Scale(c, r) if c.im == 0.0 => write!(f, "{} {}", fmt_num(c.re), r),
            R::Scale(c, r) => write!(f, "({}{:+}i) {}", c.re, c.im, r),
            R::Product(l, r) => write!(f, "({l} * {r})"),
            R::Convolve(l, r) => write!(f, "({l} conv {r})"),
            R::Deriv(k, r) => write!(f, "D^{k}({r})"),
            R::MulCoordinate(r) => write!(f, "M({r})"),
            R::HatDeriv(k, r) => write!(f, "Dhat^{k}({r})"),
            R::HatMulCoordinate(r) => write!(f, "Mhat({r})"),
            R::Fourier(r) => write!(f, "F({r})"),
            R::InvFourier(r) => write!(f, "Finv({r})"),
            R::Translate(a, r) => write!(f, "tau({})({r})", fmt_num(*a)),
            R::Modulate(a, r) => write!(f, "chi({})({r})", fmt_num(*a)),
            R::HatTranslate(a, r) => write!(f, "tauhat({})({r})", fmt_num(*a)),
            R::HatModulate(a, r) => write!(f, "chihat({})({r})", fmt_num(*a)),
        }
    }
}

/// Evaluates representatives on grids planned from a base grid.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator {
    pub base: GridSpec,
}

impl Evaluator {
    pub fn new(base: GridSpec) -> Self {
        Self { base }
    }

    /// `R(Phi_eps)`.
    pub fn eval(&self, r: &Representative, h: &OperatorHandle) -> Result<GridFunction> {
        self.differential(r, h, &[])
    }

    /// `(d^l R)(Phi_eps)(Psi_1, ..., Psi_l)` with `l = slots.len() <= 2`.
    pub fn differential(
        &self,
        r: &Representative,
        h: &OperatorHandle,
        slots: &[Operator],
    ) -> Result<GridFunction> {
        let spec = self.plan(&[r], h, slots)?;
        self.eval_on(r, h, slots, spec)
    }

    /// Grid on which every tree in `reps` can be evaluated at `h`.
    pub fn plan(
        &self,
        reps: &[&Representative],
        h: &OperatorHandle,
        slots: &[Operator],
    ) -> Result<GridSpec> {
        let mut needs = GridNeeds::default();
        for r in reps {
            needs_rep(
                r,
                &h.operator,
                slots,
                h.epsilon,
                false,
                RESOLUTION,
                &mut needs,
            );
        }
        needs.plan(&self.base)
    }

    /// Evaluation on a caller-chosen grid.
    pub fn eval_on(
        &self,
        r: &Representative,
        h: &OperatorHandle,
        slots: &[Operator],
        spec: GridSpec,
    ) -> Result<GridFunction> {
        if slots.len() > MAX_DIFFERENTIAL {
            return Err(Error::OrderTooHigh {
                order: slots.len() as u32,
                cap: MAX_DIFFERENTIAL as u32,
            });
        }
        let tag = r.validate()?;
        if let (Some(t), Some(ht)) = (tag, h.operator.domain()?) {
            if t != ht {
                return Err(Error::DomainMismatch(format!(
                    "{t:?} representative at a {ht:?} handle"
                )));
            }
        }
        for s in slots {
            s.check_eps(h.epsilon)?;
        }
        h.operator.check_eps(h.epsilon)?;
        let cx = Ctx {
            eps: h.epsilon,
            window: spec.half_width(),
        };
        cx.ev(r, &h.operator, slots, spec)
    }
}

struct Ctx {
    eps: f64,
    window: f64,
}

#[cfg(test)]
fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn conj_all(slots: &[Operator], f: Transform) -> Vec<Operator> {
    slots.iter().map(|s| s.conjugate(f)).collect()
}

fn require_decay(g: &GridFunction) -> Result<()> {
    let edge = g.edge_magnitude(g.spec().half_width() / 16.0);
    if edge > (DECAY_REL * g.sup()).max(g.noise_level()) {
        return Err(Error::NonDecaying(edge));
    }
    Ok(())
}

impl Ctx {
    fn ev(
        &self,
        r: &Representative,
        h: &Operator,
        slots: &[Operator],
        spec: GridSpec,
    ) -> Result<GridFunction> {
        if slots.len() > MAX_SLOTS {
            return Err(Error::OrderTooHigh {
                order: slots.len() as u32,
                cap: MAX_SLOTS as u32,
            });
        }
        let l = slots.len();
        match r {
            R::Iota(leaf) => match l {
                0 => apply(h, self.eps, &leaf.dist, spec),
                1 => apply(&slots[0], self.eps, &leaf.dist, spec),
                _ => Ok(GridFunction::zeros(spec)),
            },
            R::Sigma(leaf) => {
                if l == 0 {
                    leaf.dist.sample(spec)
                } else {
                    Ok(GridFunction::zeros(spec))
                }
            }
            R::Sum(parts) => {
                let mut acc = GridFunction::zeros(spec);
                for p in parts {
                    acc = acc.add(&self.ev(p, h, slots, spec)?)?;
                }
                Ok(acc)
            }
            R::Scale(c, child) => Ok(self.ev(child, h, slots, spec)?.scaled(*c)),
            R::Product(a, bb) => self.leibniz(a, bb, h, slots, spec, |x, y| x.mul(y)),
            R::Convolve(a, bb) => self.leibniz(a, bb, h, slots, spec, |x, y| {
                require_decay(x)?;
                require_decay(y)?;
                grid::convolve(x, y)
            }),
            R::Deriv(k, child) => grid::spectral_derivative(&self.ev(child, h, slots, spec)?, *k),
            R::MulCoordinate(child) => Ok(self.ev(child, h, slots, spec)?.mul_coordinate()),
            R::Translate(a, child) => Ok(grid::translate(&self.ev(child, h, slots, spec)?, *a)),
            R::Modulate(a, child) => Ok(grid::modulate(&self.ev(child, h, slots, spec)?, *a)),
            R::Fourier(child) => {
                let inner = self.ev(
                    child,
                    &h.conjugate(Transform::Fourier),
                    &conj_all(slots, Transform::Fourier),
                    spec.dual(),
                )?;
                require_decay(&inner)?;
                Ok(grid::dft_forward(&inner))
            }
            R::InvFourier(child) => {
                let inner = self.ev(
                    child,
                    &h.conjugate(Transform::InvFourier),
                    &conj_all(slots, Transform::InvFourier),
                    spec.dual(),
                )?;
                require_decay(&inner)?;
                Ok(grid::dft_inverse(&inner))
            }
            R::HatTranslate(a, child) => {
                self.check_shift(*a)?;
                let f = Transform::Translate(*a);
                Ok(grid::translate(
                    &self.ev(child, &h.conjugate(f), &conj_all(slots, f), spec)?,
                    *a,
                ))
            }
            R::HatModulate(a, child) => {
                self.check_shift(*a)?;
                let f = Transform::Modulate(*a);
                Ok(grid::modulate(
                    &self.ev(child, &h.conjugate(f), &conj_all(slots, f), spec)?,
                    *a,
                ))
            }
            R::HatDeriv(k, child) => {
                self.hat(CommutatorKind::Derivative(1), *k, child, h, slots, spec)
            }
            R::HatMulCoordinate(child) => {
                self.hat(CommutatorKind::MulCoordinate, 1, child, h, slots, spec)
            }
        }
    }

    fn check_shift(&self, a: f64) -> Result<()> {
        if a.abs() > self.window / 4.0 {
            return Err(Error::InvalidQuery(format!(
                "shift {a} exceeds a quarter of the window"
            )));
        }
        Ok(())
    }

    /// Bilinear node: sum over splittings of the slots.
    fn leibniz(
        &self,
        a: &Representative,
        bb: &Representative,
        h: &Operator,
        slots: &[Operator],
        spec: GridSpec,
        op: impl Fn(&GridFunction, &GridFunction) -> Result<GridFunction>,
    ) -> Result<GridFunction> {
        let l = slots.len();
        let mut acc = GridFunction::zeros(spec);
        for mask in 0u32..(1 << l) {
            let (left, right): (Vec<_>, Vec<_>) = (0..l).partition(|i| mask & (1 << i) != 0);
            let ls: Vec<Operator> = left.iter().map(|&i| slots[i].clone()).collect();
            let rs: Vec<Operator> = right.iter().map(|&i| slots[i].clone()).collect();
            if a.is_constant() && !ls.is_empty() || bb.is_constant() && !rs.is_empty() {
                continue;
            }
            let x = self.ev(a, h, &ls, spec)?;
            let y = self.ev(bb, h, &rs, spec)?;
            acc = acc.add(&op(&x, &y)?)?;
        }
        Ok(acc)
    }

    /// `(T R)(Phi) = T(R(Phi)) - dR(Phi)([T, Phi])`, applied `k` times, and its
    /// differentials.
    fn hat(
        &self,
        t: CommutatorKind,
        k: u32,
        child: &Representative,
        h: &Operator,
        slots: &[Operator],
        spec: GridSpec,
    ) -> Result<GridFunction> {
        if k == 0 {
            return self.ev(child, h, slots, spec);
        }
        let main = t.on_grid(&self.hat(t, k - 1, child, h, slots, spec)?)?;
        if child.is_constant() {
            return Ok(main);
        }
        let mut extended = vec![h.commutator(t)];
        extended.extend_from_slice(slots);
        let mut acc = main.sub(&self.hat(t, k - 1, child, h, &extended, spec)?)?;
        for i in 0..slots.len() {
            let mut s = slots.to_vec();
            s[i] = slots[i].commutator(t);
            acc = acc.sub(&self.hat(t, k - 1, child, h, &s, spec)?)?;
        }
        Ok(acc)
    }
}

/// Mirrors `Ctx::ev`, collecting the grid requirements of every kernel
/// application.
fn needs_rep(
    r: &Representative,
    h: &Operator,
    slots: &[Operator],
    eps: f64,
    dual: bool,
    res: f64,
    needs: &mut GridNeeds,
) {
    match r {
        R::Iota(leaf) => {
            collect_needs(h, eps, &leaf.dist, dual, res, needs);
            for s in slots {
                collect_needs(s, eps, &leaf.dist, dual, res, needs);
            }
        }
        R::Sigma(_) => {}
        R::Fourier(c) => needs_rep(
            c,
            &h.conjugate(Transform::Fourier),
            &conj_all(slots, Transform::Fourier),
            eps,
            !dual,
            res.max(TRANSFORM_RESOLUTION),
            needs,
        ),
        R::InvFourier(c) => needs_rep(
            c,
            &h.conjugate(Transform::InvFourier),
            &conj_all(slots, Transform::InvFourier),
            eps,
            !dual,
            res.max(TRANSFORM_RESOLUTION),
            needs,
        ),
        R::HatTranslate(a, c) => {
            let f = Transform::Translate(*a);
            needs_rep(
                c,
                &h.conjugate(f),
                &conj_all(slots, f),
                eps,
                dual,
                res,
                needs,
            )
        }
        R::HatModulate(a, c) => {
            let f = Transform::Modulate(*a);
            needs_rep(
                c,
                &h.conjugate(f),
                &conj_all(slots, f),
                eps,
                dual,
                res,
                needs,
            )
        }
        R::HatDeriv(_, c) | R::HatMulCoordinate(c) => {
            let t = match r {
                R::HatDeriv(..) => CommutatorKind::Derivative(1),
                _ => CommutatorKind::MulCoordinate,
            };
            let mut ext = vec![h.commutator(t)];
            ext.extend(slots.iter().cloned());
            ext.extend(slots.iter().map(|s| s.commutator(t)));
            needs_rep(c, h, &ext, eps, dual, res, needs)
        }
        _ => {
            for c in r.children() {
                needs_rep(c, h, slots, eps, dual, res, needs);
            }
        }
    }
}
