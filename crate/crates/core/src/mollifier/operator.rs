//! Linear operators built from test-object nets: kernels, commutators,
//! conjugations `f^{-1} o A o f` and finite linear combinations.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::net::{TestObjectNet, RESOLUTION};
use crate::catalog::{fourier_of, inverse_fourier_of, Distribution};
use crate::error::{Error, Result};
use crate::grid::{self, GridFunction, GridSpec};

/// Largest grid the planner hands out.
pub const MAX_PLANNED_POINTS: usize = 1 << 20;

/// Isomorphisms used for conjugation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    Fourier,
    InvFourier,
    Translate(f64),
    Modulate(f64),
}

impl Transform {
    pub fn inverse(&self) -> Transform {
        match *self {
            Transform::Fourier => Transform::InvFourier,
            Transform::InvFourier => Transform::Fourier,
            Transform::Translate(a) => Transform::Translate(-a),
            Transform::Modulate(a) => Transform::Modulate(-a),
        }
    }

    pub fn apply_to(&self, u: &Distribution) -> Result<Distribution> {
        match *self {
            Transform::Fourier => fourier_of(u),
            Transform::InvFourier => inverse_fourier_of(u),
            Transform::Translate(a) => u.translate(a),
            Transform::Modulate(a) => u.modulate(a),
        }
    }

    fn flips_domain(&self) -> bool {
        matches!(self, Transform::Fourier | Transform::InvFourier)
    }
}

/// `T` in `[T, A] = T o A - A o T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommutatorKind {
    Derivative(u32),
    MulCoordinate,
}

impl CommutatorKind {
    pub fn on_distribution(&self, u: &Distribution) -> Result<Distribution> {
        match *self {
            CommutatorKind::Derivative(k) => u.nth_derivative(k),
            CommutatorKind::MulCoordinate => u.mul_coordinate(),
        }
    }

    pub fn on_grid(&self, g: &GridFunction) -> Result<GridFunction> {
        match *self {
            CommutatorKind::Derivative(k) => grid::spectral_derivative(g, k),
            CommutatorKind::MulCoordinate => Ok(g.mul_coordinate()),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Operator {
    Kernel(Arc<TestObjectNet>),
    Zero,
    Commutator(CommutatorKind, Box<Operator>),
    /// `f^{-1} o A o f`.
    Conjugate(Transform, Box<Operator>),
    Combination(Vec<(Complex64, Operator)>),
}

/// Which of the two paired algebras an operator (or representative) lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DomainTag {
    Spatial,
    Frequency,
}

impl DomainTag {
    pub fn flipped(self) -> DomainTag {
        match self {
            DomainTag::Spatial => DomainTag::Frequency,
            DomainTag::Frequency => DomainTag::Spatial,
        }
    }
}

impl Operator {
    pub fn kernel(net: &Arc<TestObjectNet>) -> Operator {
        Operator::Kernel(net.clone())
    }

    /// `f^{-1} o self o f`, cancelling inverse pairs and merging shifts.
    pub fn conjugate(&self, f: Transform) -> Operator {
        match self {
            Operator::Zero => Operator::Zero,
            Operator::Combination(parts) => {
                Operator::Combination(parts.iter().map(|(c, op)| (*c, op.conjugate(f))).collect())
            }
            Operator::Conjugate(g, inner) => {
                // f^{-1} g^{-1} A g f
                match (*g, f) {
                    (Transform::Fourier, Transform::InvFourier)
                    | (Transform::InvFourier, Transform::Fourier) => (**inner).clone(),
                    (Transform::Translate(a), Transform::Translate(b)) => {
                        collapse(Transform::Translate(a + b), inner)
                    }
                    (Transform::Modulate(a), Transform::Modulate(b)) => {
                        collapse(Transform::Modulate(a + b), inner)
                    }
                    _ => Operator::Conjugate(f, Box::new(self.clone())),
                }
            }
            _ => Operator::Conjugate(f, Box::new(self.clone())),
        }
    }

    pub fn commutator(&self, t: CommutatorKind) -> Operator {
        match self {
            Operator::Zero => Operator::Zero,
            _ => Operator::Commutator(t, Box::new(self.clone())),
        }
    }

    /// `F o self o F^{-1}`: the frequency-side counterpart.
    pub fn frequency(&self) -> Operator {
        self.conjugate(Transform::InvFourier)
    }

    /// Domain of the functions the operator acts on; `None` for `Zero`.
    pub fn domain(&self) -> Result<Option<DomainTag>> {
        match self {
            Operator::Kernel(_) => Ok(Some(DomainTag::Spatial)),
            Operator::Zero => Ok(None),
            Operator::Commutator(_, a) => a.domain(),
            Operator::Conjugate(f, a) => {
                let inner = a.domain()?;
                Ok(match (f, inner) {
                    (_, None) => None,
                    (Transform::Fourier, Some(DomainTag::Frequency)) => Some(DomainTag::Spatial),
                    (Transform::InvFourier, Some(DomainTag::Spatial)) => Some(DomainTag::Frequency),
                    (Transform::Fourier, Some(DomainTag::Spatial))
                    | (Transform::InvFourier, Some(DomainTag::Frequency)) => {
                        return Err(Error::DomainMismatch(format!(
                            "conjugation by {f:?} of a {inner:?} operator"
                        )))
                    }
                    (_, t) => t,
                })
            }
            Operator::Combination(parts) => {
                let mut tag = None;
                for (_, op) in parts {
                    tag = unify(tag, op.domain()?)?;
                }
                Ok(tag)
            }
        }
    }

    pub fn scaled(&self, c: Complex64) -> Operator {
        Operator::Combination(vec![(c, self.clone())])
    }

    pub fn plus(&self, c: Complex64, other: &Operator) -> Operator {
        Operator::Combination(vec![
            (Complex64::new(1.0, 0.0), self.clone()),
            (c, other.clone()),
        ])
    }

    pub fn label(&self) -> String {
        match self {
            Operator::Kernel(n) => n.id().to_string(),
            Operator::Zero => "0".into(),
            Operator::Commutator(CommutatorKind::Derivative(k), a) => {
                format!("[D^{k},{}]", a.label())
            }
            Operator::Commutator(CommutatorKind::MulCoordinate, a) => format!("[M,{}]", a.label()),
            Operator::Conjugate(f, a) => {
                let name = match f {
                    Transform::Fourier => "F".to_string(),
                    Transform::InvFourier => "Finv".to_string(),
                    Transform::Translate(a) => format!("tau({a})"),
                    Transform::Modulate(a) => format!("chi({a})"),
                };
                format!("{name}^-1.{}.{name}", a.label())
            }
            Operator::Combination(parts) => {
                let terms: Vec<String> = parts
                    .iter()
                    .map(|(c, op)| {
                        if *c == Complex64::new(1.0, 0.0) {
                            op.label()
                        } else if c.im == 0.0 {
                            format!("{}*{}", c.re, op.label())
                        } else {
                            format!("({c})*{}", op.label())
                        }
                    })
                    .collect();
                format!("({})", terms.join("+"))
            }
        }
    }

    /// Test-object nets reachable from this operator.
    pub fn nets(&self, out: &mut Vec<Arc<TestObjectNet>>) {
        match self {
            Operator::Kernel(n) => out.push(n.clone()),
            Operator::Zero => {}
            Operator::Commutator(_, a) | Operator::Conjugate(_, a) => a.nets(out),
            Operator::Combination(parts) => parts.iter().for_each(|(_, op)| op.nets(out)),
        }
    }

    /// Whether `(A u)(x)` only depends on `u` near `x`: every kernel is
    /// compactly supported and no Fourier conjugation is involved.
    pub fn is_local(&self) -> bool {
        match self {
            Operator::Kernel(n) => n.config().inner_truncation,
            Operator::Zero => true,
            Operator::Commutator(_, a) => a.is_local(),
            Operator::Conjugate(f, a) => !f.flips_domain() && a.is_local(),
            Operator::Combination(parts) => parts.iter().all(|(_, a)| a.is_local()),
        }
    }

    pub fn check_eps(&self, eps: f64) -> Result<()> {
        let mut nets = Vec::new();
        self.nets(&mut nets);
        nets.iter().try_for_each(|n| n.check_eps(eps))
    }
}

fn collapse(f: Transform, inner: &Operator) -> Operator {
    match f {
        Transform::Translate(a) | Transform::Modulate(a) if a == 0.0 => inner.clone(),
        _ => Operator::Conjugate(f, Box::new(inner.clone())),
    }
}

pub(crate) fn unify(a: Option<DomainTag>, b: Option<DomainTag>) -> Result<Option<DomainTag>> {
    match (a, b) {
        (Some(x), Some(y)) if x != y => {
            Err(Error::DomainMismatch(format!("{x:?} combined with {y:?}")))
        }
        (Some(x), _) | (_, Some(x)) => Ok(Some(x)),
        _ => Ok(None),
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// An operator frozen at one `eps`.
#[derive(Debug, Clone)]
pub struct OperatorHandle {
    pub operator: Operator,
    pub epsilon: f64,
}

impl OperatorHandle {
    pub fn new(operator: Operator, epsilon: f64) -> Result<Self> {
        operator.check_eps(epsilon)?;
        Ok(Self { operator, epsilon })
    }

    pub fn conjugate(&self, f: Transform) -> OperatorHandle {
        OperatorHandle {
            operator: self.operator.conjugate(f),
            epsilon: self.epsilon,
        }
    }

    /// Applies the handle to `u` on a grid chosen by the planner.
    pub fn apply(&self, u: &Distribution, base: &GridSpec) -> Result<GridFunction> {
        let mut needs = GridNeeds::default();
        collect_needs(
            &self.operator,
            self.epsilon,
            u,
            false,
            RESOLUTION,
            &mut needs,
        );
        let spec = needs.plan(base)?;
        apply(&self.operator, self.epsilon, u, spec)
    }
}

/// `conjugate_handle`.
pub fn conjugate_handle(h: &OperatorHandle, f: Transform) -> OperatorHandle {
    h.conjugate(f)
}

/// Applies `op` at `eps` to `u`, producing samples on `spec`.
pub fn apply(op: &Operator, eps: f64, u: &Distribution, spec: GridSpec) -> Result<GridFunction> {
    match op {
        Operator::Zero => Ok(GridFunction::zeros(spec)),
        Operator::Kernel(net) => net.kernel_action(u, eps, spec),
        Operator::Combination(parts) => {
            let mut acc = GridFunction::zeros(spec);
            for (c, a) in parts {
                if *c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                acc = acc.combine(Complex64::new(1.0, 0.0), &apply(a, eps, u, spec)?, *c)?;
            }
            Ok(acc)
        }
        Operator::Commutator(t, a) => {
            let outer = t.on_grid(&apply(a, eps, u, spec)?)?;
            let inner = apply(a, eps, &t.on_distribution(u)?, spec)?;
            outer.sub(&inner)
        }
        Operator::Conjugate(f, a) => {
            let fu = f.apply_to(u)?;
            match f {
                Transform::Fourier => Ok(grid::dft_inverse(&apply(a, eps, &fu, spec.dual())?)),
                Transform::InvFourier => Ok(grid::dft_forward(&apply(a, eps, &fu, spec.dual())?)),
                Transform::Translate(s) => Ok(grid::translate(&apply(a, eps, &fu, spec)?, -s)),
                Transform::Modulate(s) => Ok(grid::modulate(&apply(a, eps, &fu, spec)?, -s)),
            }
        }
    }
}

/// Resolution requirements on the evaluation grid `G` (index 0) and on its
/// dual (index 1).
#[derive(Debug, Clone, Copy)]
pub struct GridNeeds {
    pub min_half_width: [f64; 2],
    pub max_spacing: [f64; 2],
}

impl Default for GridNeeds {
    fn default() -> Self {
        Self {
            min_half_width: [0.0; 2],
            max_spacing: [f64::INFINITY; 2],
        }
    }
}

impl GridNeeds {
    pub fn require(&mut self, dual: bool, min_half_width: f64, max_spacing: f64) {
        let i = dual as usize;
        self.min_half_width[i] = self.min_half_width[i].max(min_half_width);
        self.max_spacing[i] = self.max_spacing[i].min(max_spacing);
    }

    /// Smallest grid `(L 2^a, h 2^{-b})` refining `base` that meets the needs.
    pub fn plan(&self, base: &GridSpec) -> Result<GridSpec> {
        // dual(L, N) has spacing 1 / (2L) and half-width 1 / (2h)
        let need_l = self.min_half_width[0].max(0.5 / self.max_spacing[1]);
        let need_h = self.max_spacing[0].min(0.5 / self.min_half_width[1].max(1e-300));
        let mut l = base.half_width();
        let mut h = base.spacing();
        while l < need_l * (1.0 - 1e-12) {
            l *= 2.0;
        }
        while h > need_h * (1.0 + 1e-12) {
            h /= 2.0;
        }
        let points = (2.0 * l / h).round() as usize;
        if points > MAX_PLANNED_POINTS {
            return Err(Error::UnderResolved(format!(
                "grid with half-width {l} and spacing {h} needs {points} points"
            )));
        }
        GridSpec::new(l, points)
    }
}

/// Mirrors [`apply`] and records what each kernel application needs.
/// `resolution` is the number of samples per kernel width for singular inputs.
pub fn collect_needs(
    op: &Operator,
    eps: f64,
    u: &Distribution,
    dual: bool,
    resolution: f64,
    needs: &mut GridNeeds,
) {
    match op {
        Operator::Zero => {}
        Operator::Kernel(net) => {
            let w = net.width(eps);
            if u.is_singular() {
                needs.require(dual, 0.0, w / resolution);
            }
            if !u.is_decaying() {
                needs.require(dual, 2.0 / eps, f64::INFINITY);
            }
        }
        Operator::Combination(parts) => parts
            .iter()
            .for_each(|(_, a)| collect_needs(a, eps, u, dual, resolution, needs)),
        Operator::Commutator(t, a) => {
            collect_needs(a, eps, u, dual, resolution, needs);
            if let Ok(tu) = t.on_distribution(u) {
                collect_needs(a, eps, &tu, dual, resolution, needs);
            }
        }
        Operator::Conjugate(f, a) => {
            if let Ok(fu) = f.apply_to(u) {
                collect_needs(a, eps, &fu, dual ^ f.flips_domain(), resolution, needs);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;
    use crate::grid::{make_grid, seminorm, SeminormQuery};
    use crate::mollifier::cutoff::{build_cutoff, build_cutoff_with, TransitionProfile};
    use crate::mollifier::net::NetConfig;
    use proptest::prelude::*;

    fn eps_grid() -> Vec<f64> {
        vec![0.25, 0.125, 0.0625, 0.03125]
    }

    fn phi() -> Operator {
        Operator::kernel(
            &TestObjectNet::new("psi1", NetConfig::standard(build_cutoff()), eps_grid()).unwrap(),
        )
    }

    fn base() -> GridSpec {
        make_grid(32.0, 4096).unwrap()
    }

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn zero_input_gives_zero() {
        let h = OperatorHandle::new(phi(), 0.25).unwrap();
        assert!(h.apply(&Distribution::zero(), &base()).unwrap().is_zero());
    }

    #[test]
    fn planner_resolves_singular_inputs() {
        let op = phi();
        for &eps in &eps_grid() {
            let mut needs = GridNeeds::default();
            collect_needs(
                &op,
                eps,
                &lookup("delta").unwrap(),
                false,
                RESOLUTION,
                &mut needs,
            );
            let spec = needs.plan(&base()).unwrap();
            assert!(spec.spacing() <= eps * eps / 8.0);
            assert_eq!(spec.half_width(), 32.0);
        }
        let mut needs = GridNeeds::default();
        collect_needs(
            &op.frequency(),
            0.0625,
            &lookup("delta").unwrap(),
            false,
            RESOLUTION,
            &mut needs,
        );
        let spec = needs.plan(&base()).unwrap();
        // F^{-1} delta = 1 is handled on the dual, which must hold psi(eps x)
        assert!(spec.dual().half_width() >= 32.0);
    }

    #[test]
    fn conjugation_cancels_inverse_pairs() {
        let op = phi();
        let back = op
            .conjugate(Transform::Fourier)
            .conjugate(Transform::InvFourier);
        assert!(matches!(back, Operator::Kernel(_)));
        let t = op
            .conjugate(Transform::Translate(0.5))
            .conjugate(Transform::Translate(-0.5));
        assert!(matches!(t, Operator::Kernel(_)));
        assert_eq!(op.frequency().domain().unwrap(), Some(DomainTag::Frequency));
        assert!(op.conjugate(Transform::Fourier).domain().is_err());
    }

    #[test]
    fn double_conjugation_matches_plain_handle() {
        let op = phi();
        let eps = 0.125;
        let u = lookup("gauss").unwrap();
        let spec = base();
        let plain = apply(&op, eps, &u, spec).unwrap();
        let twice = Operator::Conjugate(
            Transform::InvFourier,
            Box::new(Operator::Conjugate(
                Transform::Fourier,
                Box::new(op.clone()),
            )),
        );
        let v = apply(&twice, eps, &u, spec).unwrap();
        assert!(v.sup_distance(&plain).unwrap() < 1e-12);
    }

    #[test]
    fn frequency_handle_on_delta() {
        // F Phi F^{-1} delta = F(Phi 1)
        let op = phi().frequency();
        let eps = 0.25;
        let h = OperatorHandle::new(op, eps).unwrap();
        let v = h.apply(&lookup("delta").unwrap(), &base()).unwrap();
        let spec = *v.spec();
        let direct =
            grid::dft_forward(&apply(&phi(), eps, &lookup("one").unwrap(), spec.dual()).unwrap());
        assert!(v.sup_distance(&direct).unwrap() < 1e-12);
        // F(psi(eps x)) has mass psi(0) = 1 at the origin
        let o = spec.origin_index();
        assert!((v.samples()[o].re - 3.0 / eps).abs() < 1e-3 / eps);
    }

    #[test]
    fn translate_conjugation_commutes_for_convolution() {
        // away from the outer cutoff tau_{-a} Phi tau_a u ~ Phi u
        let eps = 0.125;
        let op = phi();
        let u = lookup("gauss").unwrap();
        let spec = base();
        let a = apply(&op, eps, &u, spec).unwrap();
        let b = apply(&op.conjugate(Transform::Translate(0.5)), eps, &u, spec).unwrap();
        let d = seminorm(&a.sub(&b).unwrap(), &SeminormQuery::compact(4.0, 0)).unwrap();
        assert!(d < 1e-10, "{d}");
    }

    #[test]
    fn commutator_with_derivative_on_delta_is_finite() {
        let eps = 0.125;
        let op = phi().commutator(CommutatorKind::Derivative(1));
        let h = OperatorHandle::new(op, eps).unwrap();
        let v = h.apply(&lookup("delta").unwrap(), &base()).unwrap();
        // kernel is translation invariant near the origin: [D, Phi] delta vanishes there
        assert!(v.sup() < 1e-6 * eps.powi(-4), "{}", v.sup());
    }

    #[test]
    fn commutator_decays_on_schwartz_input() {
        let op = phi().commutator(CommutatorKind::Derivative(1));
        let u = lookup("gauss").unwrap();
        let q = SeminormQuery::schwartz(2, 1);
        let vals: Vec<f64> = [0.25, 0.125]
            .iter()
            .map(|&e| seminorm(&apply(&op, e, &u, base()).unwrap(), &q).unwrap())
            .collect();
        assert!(vals[0] < 1e-5 && vals[1] < 1e-20, "{vals:?}");
    }

    #[test]
    fn difference_of_nets_is_small_on_schwartz() {
        let steep = Operator::kernel(
            &TestObjectNet::new(
                "psi2",
                NetConfig::standard(build_cutoff_with(TransitionProfile::Steep)),
                eps_grid(),
            )
            .unwrap(),
        );
        let diff = phi().plus(c(-1.0), &steep);
        let u = lookup("gauss").unwrap();
        let v = apply(&diff, 0.0625, &u, base()).unwrap();
        assert!(v.sup() < 1e-10);
        assert!(apply(&phi().plus(c(-1.0), &phi()), 0.0625, &u, base())
            .unwrap()
            .is_zero());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn apply_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, shift in -1.0f64..1.0) {
            let op = phi();
            let eps = 0.125;
            let u = lookup("gauss").unwrap();
            let v = Distribution::gaussian(1.0, shift, 2.0);
            let spec = base();
            let lhs = apply(&op, eps, &Distribution::sum(vec![(c(a), u.clone()), (c(b), v.clone())]).unwrap(), spec).unwrap();
            let rhs = apply(&op, eps, &u, spec).unwrap().combine(c(a), &apply(&op, eps, &v, spec).unwrap(), c(b)).unwrap();
            prop_assert!(lhs.sup_distance(&rhs).unwrap() < 1e-12);
        }

        #[test]
        fn dirac_support(a in -1.0f64..1.0, k in 0u32..3) {
            let eps = 0.25;
            let h = OperatorHandle::new(phi(), eps).unwrap();
            let v = h.apply(&Distribution::Dirac { at: a, order: k }, &base()).unwrap();
            for (x, z) in v.spec().xs().zip(v.samples()) {
                if (x - a).abs() >= 2.0 * eps {
                    prop_assert_eq!(z.norm(), 0.0);
                }
            }
        }
    }
}
