//! Truncated Taylor series for exact derivatives of closed-form profiles.

use std::ops::{Add, Mul, Neg, Sub};

/// Number of stored Taylor coefficients; derivatives up to order `JET_LEN - 1`.
pub const JET_LEN: usize = 12;

/// `c[k] = f^{(k)}(x0) / k!`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub c: [f64; JET_LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = v;
        Self { c }
    }

    /// The identity map expanded at `x0`.
    pub fn variable(x0: f64) -> Self {
        let mut c = [0.0; JET_LEN];
        c[0] = x0;
        c[1] = 1.0;
        Self { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// `k`-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        if k >= JET_LEN {
            return f64::NAN;
        }
        self.c[k] * factorial(k)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut c = self.c;
        c.iter_mut().for_each(|v| *v *= s);
        Self { c }
    }

    pub fn recip(&self) -> Self {
        let a0 = self.c[0];
        let mut r = [0.0; JET_LEN];
        r[0] = 1.0 / a0;
        for k in 1..JET_LEN {
            let s: f64 = (1..=k).map(|j| self.c[j] * r[k - j]).sum();
            r[k] = -s / a0;
        }
        Self { c: r }
    }

    pub fn exp(&self) -> Self {
        // e' = a' e, k e_k = sum_{j=1..k} j a_j e_{k-j}
        let mut e = [0.0; JET_LEN];
        e[0] = self.c[0].exp();
        for k in 1..JET_LEN {
            let s: f64 = (1..=k).map(|j| j as f64 * self.c[j] * e[k - j]).sum();
            e[k] = s / k as f64;
        }
        Self { c: e }
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut out = Jet::constant(1.0);
        for _ in 0..n {
            out = out * *self;
        }
        out
    }

    /// Logistic `1 / (1 + e^{-v})`, evaluated without overflow for large `|v|`.
    pub fn logistic(&self) -> Self {
        let v0 = self.c[0];
        let one = Jet::constant(1.0);
        if v0 >= 0.0 {
            (one + (-*self).exp()).recip()
        } else {
            let e = self.exp();
            e * (one + e).recip()
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut c = self.c;
        c.iter_mut().zip(o.c).for_each(|(a, b)| *a += b);
        Jet { c }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut c = [0.0; JET_LEN];
        for (i, a) in self.c.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in o.c.iter().enumerate().take(JET_LEN - i) {
                c[i + j] += a * b;
            }
        }
        Jet { c }
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exp_of_variable() {
        let j = Jet::variable(0.3).exp();
        for k in 0..JET_LEN {
            assert_relative_eq!(j.derivative(k), 0.3f64.exp(), max_relative = 1e-13);
        }
    }

    #[test]
    fn recip_matches_closed_form() {
        // 1/x at 2: k-th derivative (-1)^k k! / 2^{k+1}
        let j = Jet::variable(2.0).recip();
        for k in 0..JET_LEN {
            let exact = (-1f64).powi(k as i32) * factorial(k) / 2f64.powi(k as i32 + 1);
            assert_relative_eq!(j.derivative(k), exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn logistic_branches_agree() {
        let a = Jet::variable(1e-9).logistic();
        let b = Jet::variable(-1e-9).logistic();
        for k in 0..6 {
            assert!((a.derivative(k) - b.derivative(k)).abs() < 1e-7);
        }
        let far = Jet::variable(-800.0).logistic();
        assert!(far.c.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn gaussian_hermite_derivatives() {
        // d^2/dx^2 e^{-x^2} = (4x^2 - 2) e^{-x^2}
        let x = 0.7;
        let v = Jet::variable(x);
        let g = (-(v * v)).exp();
        assert_relative_eq!(
            g.derivative(2),
            (4.0 * x * x - 2.0) * (-x * x).exp(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(7, 0), 1.0);
        assert_eq!(binomial(3, 5), 0.0);
    }
}
