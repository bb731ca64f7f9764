//! The mollifier `phi = F^{-1} psi` and its Gaussian stand-in.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::cutoff::CutoffFunction;
use crate::error::{Error, Result};
use crate::grid::{self, GridFunction, GridSpec};
use crate::jet::Jet;

pub const MASS_TOLERANCE: f64 = 1e-8;
pub const MOMENT_TOLERANCE: f64 = 1e-6;

/// Tabulation grid for `phi`: spacing 1/32 on a window wide enough that the
/// slowly decaying tail of `phi` is below rounding at the edges.
pub fn mollifier_grid() -> GridSpec {
    GridSpec::new(128.0, 8192).expect("static grid")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MollifierProfile {
    /// `phi = F^{-1} psi`, band-limited to `[-2, 2]`.
    BandLimited(CutoffFunction),
    /// `phi(s) = exp(-pi s^2)`: unit mass, nonzero second moment.
    Gaussian,
}

#[derive(Debug, Clone)]
pub struct MollifierPhi {
    profile: MollifierProfile,
    samples: GridFunction,
    unit_mass_defect: f64,
    moment_defects: [f64; 4],
    /// `(xi_k, psi(xi_k) dxi)` for the nonzero band of `psi`.
    weights: Vec<(f64, f64)>,
}

impl MollifierPhi {
    pub fn profile(&self) -> MollifierProfile {
        self.profile
    }

    pub fn samples(&self) -> &GridFunction {
        &self.samples
    }

    pub fn unit_mass_defect(&self) -> f64 {
        self.unit_mass_defect
    }

    /// `|int y^k phi|` for `k = 1..4`.
    pub fn moment_defects(&self) -> [f64; 4] {
        self.moment_defects
    }

    /// `max |Im phi|` and `max |phi(x) - phi(-x)|` over the samples.
    pub fn parity_defect(&self) -> (f64, f64) {
        let s = self.samples.samples();
        let n = s.len();
        let imag = s.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let odd = (1..n).map(|j| (s[j] - s[n - j]).norm()).fold(0.0, f64::max);
        (imag, odd)
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.derivative(s, 0)
    }

    /// `phi^{(k)}(s)` off the grid: trigonometric sum for the band-limited
    /// profile, which coincides with band-limited interpolation of the table.
    pub fn derivative(&self, s: f64, k: u32) -> f64 {
        match self.profile {
            MollifierProfile::Gaussian => {
                let v = Jet::variable(s);
                (-(v * v).scale(PI)).exp().derivative(k as usize)
            }
            MollifierProfile::BandLimited(_) => {
                let phase = k as f64 * PI / 2.0;
                self.weights
                    .iter()
                    .map(|&(xi, w)| {
                        w * (2.0 * PI * xi).powi(k as i32) * (2.0 * PI * xi * s + phase).cos()
                    })
                    .sum()
            }
        }
    }
}

fn moments(samples: &GridFunction) -> (f64, [f64; 4]) {
    let mass = grid::quadrature(samples).re;
    let mut m = [0.0; 4];
    for (k, slot) in m.iter_mut().enumerate() {
        let p = (k + 1) as i32;
        *slot = grid::quadrature(&samples.mul_fn(|y| Complex64::new(y.powi(p), 0.0))).norm();
    }
    ((mass - 1.0).abs(), m)
}

fn band_limited(psi: &CutoffFunction, spec: GridSpec) -> Result<MollifierPhi> {
    if spec.spacing() > 1.0 / 32.0 + 1e-15 {
        return Err(Error::UnderResolved(format!(
            "mollifier grid spacing {} above 1/32",
            spec.spacing()
        )));
    }
    let dual = spec.dual();
    let psi_hat = grid::sample_real(|xi| psi.eval(xi), dual)?;
    let samples = grid::dft_inverse(&psi_hat);
    let dxi = dual.spacing();
    let weights = dual
        .xs()
        .filter_map(|xi| {
            let v = psi.eval(xi);
            (v != 0.0).then_some((xi, v * dxi))
        })
        .collect();
    let (unit_mass_defect, moment_defects) = moments(&samples);
    Ok(MollifierPhi {
        profile: MollifierProfile::BandLimited(*psi),
        samples,
        unit_mass_defect,
        moment_defects,
        weights,
    })
}

/// `phi = F^{-1} psi` on `spec`, checked against the unit-mass and
/// vanishing-moment invariants.
pub fn build_phi(psi: &CutoffFunction, spec: GridSpec) -> Result<MollifierPhi> {
    let phi = band_limited(psi, spec)?;
    if phi.unit_mass_defect > MASS_TOLERANCE {
        return Err(Error::UnderResolved(format!(
            "unit mass defect {:e}",
            phi.unit_mass_defect
        )));
    }
    if let Some((k, m)) = phi
        .moment_defects
        .iter()
        .enumerate()
        .find(|(_, m)| **m > MOMENT_TOLERANCE)
    {
        return Err(Error::UnderResolved(format!(
            "moment {} defect {:e}",
            k + 1,
            m
        )));
    }
    Ok(phi)
}

/// Tabulates a profile on [`mollifier_grid`]; the Gaussian is accepted even
/// though its second moment does not vanish.
pub fn tabulate(profile: MollifierProfile) -> Result<MollifierPhi> {
    match profile {
        MollifierProfile::BandLimited(psi) => build_phi(&psi, mollifier_grid()),
        MollifierProfile::Gaussian => {
            let samples = grid::sample_real(|s| (-PI * s * s).exp(), mollifier_grid())?;
            let (unit_mass_defect, moment_defects) = moments(&samples);
            Ok(MollifierPhi {
                profile,
                samples,
                unit_mass_defect,
                moment_defects,
                weights: Vec::new(),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::mollifier::cutoff::{build_cutoff, build_cutoff_with, TransitionProfile};

    #[test]
    fn phi_invariants_on_mollifier_grid() {
        for psi in [build_cutoff(), build_cutoff_with(TransitionProfile::Steep)] {
            let phi = build_phi(&psi, mollifier_grid()).unwrap();
            assert!(phi.unit_mass_defect() <= 1e-8);
            assert!(
                phi.moment_defects().iter().all(|m| *m <= 1e-6),
                "{:?}",
                phi.moment_defects()
            );
            let (imag, odd) = phi.parity_defect();
            assert!(imag < 1e-10 && odd < 1e-10);
        }
    }

    #[test]
    fn default_grid_phi_mass_and_first_moment() {
        let phi = band_limited(&build_cutoff(), make_grid(32.0, 4096).unwrap()).unwrap();
        assert!(phi.unit_mass_defect() <= 1e-8);
        assert!(phi.moment_defects()[0] <= 1e-6);
    }

    #[test]
    fn coarse_grid_is_under_resolved() {
        let spec = make_grid(16.0, 256).unwrap();
        assert!(matches!(
            build_phi(&build_cutoff(), spec),
            Err(Error::UnderResolved(_))
        ));
        let spec = make_grid(16.0, 1024).unwrap();
        assert!(matches!(
            build_phi(&build_cutoff(), spec),
            Err(Error::UnderResolved(_))
        ));
    }

    #[test]
    fn phi_at_origin_is_area_of_psi() {
        // phi(0) = int psi = 3 for a transition symmetric about |x| = 3/2
        let phi = build_phi(&build_cutoff(), mollifier_grid()).unwrap();
        assert!((phi.eval(0.0) - 3.0).abs() < 1e-12);
        let origin = mollifier_grid().origin_index();
        assert!((phi.samples().samples()[origin].re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn off_grid_evaluation_matches_table() {
        let phi = build_phi(&build_cutoff(), mollifier_grid()).unwrap();
        let spec = mollifier_grid();
        for j in [4096usize, 4100, 4200, 4500] {
            let s = spec.x(j);
            assert!((phi.eval(s) - phi.samples().samples()[j].re).abs() < 1e-13);
        }
        let h = 1e-5;
        let s = 0.37;
        let fd = (phi.eval(s + h) - phi.eval(s - h)) / (2.0 * h);
        assert!((phi.derivative(s, 1) - fd).abs() < 1e-7);
    }

    #[test]
    fn gaussian_profile_has_second_moment() {
        let g = tabulate(MollifierProfile::Gaussian).unwrap();
        assert!(g.unit_mass_defect() < 1e-12);
        assert!((g.moment_defects()[1] - 1.0 / (2.0 * PI)).abs() < 1e-12);
    }
}
