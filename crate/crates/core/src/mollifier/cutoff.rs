//! Plateau cutoff `psi`: 1 on `|x| <= 1`, 0 on `|x| >= 2`, smooth in between.

use crate::jet::Jet;

/// Transition exponent: `Standard` blends `exp(-1/t)` with `exp(-1/(1-t))`,
/// `Steep` uses `exp(-1/t^2)`; both give a valid cutoff and distinct nets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransitionProfile {
    Standard,
    Steep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CutoffFunction {
    profile: TransitionProfile,
}

pub const PLATEAU_RADIUS: f64 = 1.0;
pub const SUPPORT_RADIUS: f64 = 2.0;

/// Past this logistic argument the step is exactly 0 or 1 in double precision,
/// together with all jet coefficients.
const SATURATION: f64 = 700.0;

pub fn build_cutoff() -> CutoffFunction {
    CutoffFunction {
        profile: TransitionProfile::Standard,
    }
}

pub fn build_cutoff_with(profile: TransitionProfile) -> CutoffFunction {
    CutoffFunction { profile }
}

impl CutoffFunction {
    pub fn profile(&self) -> TransitionProfile {
        self.profile
    }

    pub fn plateau_radius(&self) -> f64 {
        PLATEAU_RADIUS
    }

    pub fn support_radius(&self) -> f64 {
        SUPPORT_RADIUS
    }

    fn logit(&self, t: f64) -> f64 {
        match self.profile {
            TransitionProfile::Standard => 1.0 / (1.0 - t) - 1.0 / t,
            TransitionProfile::Steep => 1.0 / ((1.0 - t) * (1.0 - t)) - 1.0 / (t * t),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let t = SUPPORT_RADIUS - x.abs();
        if t >= 1.0 {
            return 1.0;
        }
        if t <= 0.0 {
            return 0.0;
        }
        let v = self.logit(t);
        if v >= 0.0 {
            1.0 / (1.0 + (-v).exp())
        } else {
            let e = v.exp();
            e / (1.0 + e)
        }
    }

    /// Taylor jet of `psi` at `x`.
    pub fn jet(&self, x: f64) -> Jet {
        let t0 = SUPPORT_RADIUS - x.abs();
        if t0 >= 1.0 {
            return Jet::constant(1.0);
        }
        if t0 <= 0.0 {
            return Jet::constant(0.0);
        }
        let v0 = self.logit(t0);
        if v0 > SATURATION {
            return Jet::constant(1.0);
        }
        if v0 < -SATURATION {
            return Jet::constant(0.0);
        }
        let sign = if x > 0.0 { -1.0 } else { 1.0 };
        let mut t = Jet::constant(t0);
        t.c[1] = sign;
        let one = Jet::constant(1.0);
        let v = match self.profile {
            TransitionProfile::Standard => (one - t).recip() - t.recip(),
            TransitionProfile::Steep => (one - t).powi(2).recip() - t.powi(2).recip(),
        };
        v.logistic()
    }

    pub fn derivative(&self, x: f64, k: usize) -> f64 {
        if k == 0 {
            self.eval(x)
        } else {
            self.jet(x).derivative(k)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_examples() {
        for c in [build_cutoff(), build_cutoff_with(TransitionProfile::Steep)] {
            assert_eq!(c.eval(0.5), 1.0);
            assert_eq!(c.eval(3.0), 0.0);
            let v = c.eval(1.5);
            assert!(v > 0.0 && v < 1.0);
            assert_eq!(v, c.eval(-1.5));
            assert_eq!(c.eval(1.0), 1.0);
            assert_eq!(c.eval(2.0), 0.0);
        }
        assert!((build_cutoff().eval(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn jet_matches_finite_differences() {
        let c = build_cutoff();
        for &x in &[1.2, 1.5, -1.7, 1.93] {
            let j = c.jet(x);
            assert!((j.value() - c.eval(x)).abs() < 1e-14);
            let h = 1e-5;
            let fd1 = (c.eval(x + h) - c.eval(x - h)) / (2.0 * h);
            assert!(
                (j.derivative(1) - fd1).abs() < 1e-6 * fd1.abs().max(1.0),
                "{x}"
            );
            let fd2 = (c.eval(x + h) - 2.0 * c.eval(x) + c.eval(x - h)) / (h * h);
            assert!(
                (j.derivative(2) - fd2).abs() < 1e-3 * fd2.abs().max(1.0),
                "{x}"
            );
        }
    }

    #[test]
    fn derivatives_vanish_near_edges() {
        let c = build_cutoff_with(TransitionProfile::Steep);
        for k in 0..8 {
            assert_eq!(c.derivative(1.0001, k), if k == 0 { 1.0 } else { 0.0 });
            assert_eq!(c.derivative(1.9999, k), 0.0);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn bounded_even_monotone(x in 0.0..3.0f64, d in 0.0..0.5f64) {
                let c = build_cutoff();
                let v = c.eval(x);
                prop_assert!((0.0..=1.0).contains(&v));
                prop_assert_eq!(v, c.eval(-x));
                prop_assert!(c.eval(x + d) <= v);
            }
        }
    }
}
