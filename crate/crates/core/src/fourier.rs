//! Fourier properties of the calculus, checked through the DFT bridge.
//!
//! Every identity is evaluated on both sides at the same handle and grid, per
//! `eps`, and reported as a sup error against a per-property threshold.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::catalog::{self, Distribution, SmoothTerm};
use crate::error::{Error, Result};
use crate::expr::{
    iota_labeled, iota_named, sigma_labeled, sigma_named, Evaluator, Representative,
};
use crate::grid::{self, GridSpec};
use crate::mollifier::operator::{DomainTag, Operator, OperatorHandle};

/// Shift used by the exchange identities.
pub const SHIFT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FtProperty {
    /// `F^{-1}(F R) = R`.
    Inversion,
    /// `F(iota u) = iota(F u)`, `F(sigma f) = sigma(F f)`.
    Embedding,
    /// `F(tau_a R) = chi_{-a} F(R)` and companions.
    Shift,
    /// `D(F R) = F(-2 pi i M R)` and companions.
    Derivative,
    /// `F(R * S) = F(R) F(S)`.
    Convolution,
}

impl FtProperty {
    pub const ALL: [FtProperty; 5] = [
        FtProperty::Inversion,
        FtProperty::Embedding,
        FtProperty::Shift,
        FtProperty::Derivative,
        FtProperty::Convolution,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            FtProperty::Inversion => "i",
            FtProperty::Embedding => "ii",
            FtProperty::Shift => "iii",
            FtProperty::Derivative => "iv",
            FtProperty::Convolution => "v",
        }
    }

    pub fn threshold(&self) -> f64 {
        match self {
            FtProperty::Inversion => 1e-9,
            FtProperty::Embedding => 1e-7,
            FtProperty::Shift => 1e-8,
            FtProperty::Derivative => 1e-7,
            FtProperty::Convolution => 1e-8,
        }
    }
}

/// One identity `lhs = rhs`.
#[derive(Debug, Clone)]
pub struct FtCase {
    pub property: FtProperty,
    pub lhs: Representative,
    pub rhs: Representative,
    pub threshold: f64,
}

impl FtCase {
    fn new(property: FtProperty, lhs: Representative, rhs: Representative) -> Self {
        Self {
            property,
            lhs,
            rhs,
            threshold: property.threshold(),
        }
    }

    fn with_threshold(mut self, t: f64) -> Self {
        self.threshold = t;
        self
    }

    pub fn label(&self) -> String {
        format!("{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone)]
pub struct FtRow {
    pub property: FtProperty,
    pub representative: String,
    pub eps: f64,
    pub sup_error: f64,
    /// `sup |rhs|`, for reading `sup_error` against the size of the values.
    pub reference_sup: f64,
    pub threshold: f64,
    pub passed: bool,
    pub note: String,
}

/// Errors of the bridge itself, measured once on Gaussians.
#[derive(Debug, Clone, Copy)]
pub struct BridgeCalibration {
    /// `sup |DFT(e^{-pi x^2}) - e^{-pi xi^2}|`.
    pub gaussian: f64,
    /// `sup |DFT^{-1} DFT g - g|`.
    pub round_trip: f64,
    /// `|<g, k> - <F g, F k>|`.
    pub parseval: f64,
}

pub const PARSEVAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct FtReport {
    pub calibration: BridgeCalibration,
    pub rows: Vec<FtRow>,
}

pub const FT_CSV_HEADER: &str = "property,representative,eps,sup_error,threshold,passed";

impl FtReport {
    pub fn passed(&self) -> bool {
        self.calibration.parseval <= PARSEVAL_TOLERANCE && self.rows.iter().all(|r| r.passed)
    }

    pub fn property_passed(&self, p: FtProperty) -> bool {
        self.rows
            .iter()
            .filter(|r| r.property == p)
            .all(|r| r.passed)
    }

    pub fn csv_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{},\"{}\",{:e},{:e},{:e},{}",
                    r.property.id(),
                    r.representative.replace('"', "'"),
                    r.eps,
                    r.sup_error,
                    r.threshold,
                    r.passed
                )
            })
            .collect()
    }
}

/// `{sigma(gauss), iota(delta), iota(delta) sigma(gauss), iota(delta') + sigma(gauss)}`.
pub fn smoke_set() -> Vec<Representative> {
    let d = || iota_named("delta").expect("catalog");
    let g = || sigma_named("gauss").expect("catalog");
    vec![
        g(),
        d(),
        d().mul(g()),
        iota_named("delta_prime").expect("catalog").add(g()),
    ]
}

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// Identities (i) through (v) over the smoke set.
pub fn property_cases(smoke: &[Representative]) -> Result<Vec<FtCase>> {
    let mut cases = Vec::new();
    for r in smoke {
        cases.push(FtCase::new(
            FtProperty::Inversion,
            r.clone().fourier().inv_fourier(),
            r.clone(),
        ));
    }

    for name in ["delta", "delta_prime", "gauss"] {
        let u = catalog::lookup(name)?;
        let leaf = || iota_labeled(u.clone(), name);
        cases.push(FtCase::new(
            FtProperty::Embedding,
            leaf().fourier(),
            iota_labeled(catalog::fourier_of(&u)?, format!("F[{name}]")),
        ));
        cases.push(FtCase::new(
            FtProperty::Embedding,
            leaf().inv_fourier(),
            iota_labeled(catalog::inverse_fourier_of(&u)?, format!("Finv[{name}]")),
        ));
    }
    let x_gauss = Distribution::smooth(vec![SmoothTerm::new(
        Complex64::new(1.0, 0.0),
        0.0,
        1,
        1.0,
        Complex64::new(0.0, 0.0),
    )]);
    for (name, f) in [
        ("gauss", catalog::lookup("gauss")?),
        ("gauss_pi", catalog::lookup("gauss_pi")?),
        ("x*gauss", x_gauss),
    ] {
        let lhs = sigma_labeled(f.clone(), name)?.fourier();
        let rhs = sigma_labeled(catalog::fourier_of(&f)?, format!("F[{name}]"))?;
        cases.push(FtCase::new(FtProperty::Embedding, lhs, rhs).with_threshold(1e-9));
    }

    let a = SHIFT;
    let exchange = [sigma_named("gauss")?, iota_named("delta")?];
    for r in &exchange {
        let f = || r.clone();
        let p = FtProperty::Shift;
        cases.push(FtCase::new(
            p,
            f().translate(a).fourier(),
            f().fourier().modulate(-a),
        ));
        cases.push(FtCase::new(
            p,
            f().modulate(a).fourier(),
            f().fourier().translate(a),
        ));
        cases.push(FtCase::new(
            p,
            f().hat_translate(a).fourier(),
            f().fourier().hat_modulate(-a),
        ));
        cases.push(FtCase::new(
            p,
            f().hat_modulate(a).fourier(),
            f().fourier().hat_translate(a),
        ));

        let p = FtProperty::Derivative;
        let m = -2.0 * PI * i();
        cases.push(FtCase::new(
            p,
            f().fourier().deriv(1),
            f().mul_coordinate().scale(m).fourier(),
        ));
        cases.push(FtCase::new(
            p,
            f().deriv(1).fourier(),
            f().fourier().mul_coordinate().scale(-m),
        ));
        cases.push(FtCase::new(
            p,
            f().fourier().hat_deriv(1),
            f().hat_mul_coordinate().scale(m).fourier(),
        ));
        cases.push(FtCase::new(
            p,
            f().hat_deriv(1).fourier(),
            f().fourier().hat_mul_coordinate().scale(-m),
        ));
    }

    let g = || sigma_named("gauss").expect("catalog");
    let gp = || sigma_named("gauss_pi").expect("catalog");
    let d = || iota_named("delta").expect("catalog");
    for (x, y) in [(g(), g()), (g(), gp()), (d(), g())] {
        cases.push(FtCase::new(
            FtProperty::Convolution,
            x.clone().conv(y.clone()).fourier(),
            x.fourier().mul(y.fourier()),
        ));
    }
    Ok(cases)
}

/// Handle of the spatial net `op` in the domain `r` lives in.
pub fn handle_for(op: &Operator, r: &Representative, eps: f64) -> Result<OperatorHandle> {
    let op = match r.validate()? {
        Some(DomainTag::Frequency) => op.frequency(),
        _ => op.clone(),
    };
    OperatorHandle::new(op, eps)
}

/// `sup |lhs(Phi_eps) - rhs(Phi_eps)|` and `sup |rhs(Phi_eps)|` on a grid
/// that suits both sides.
pub fn case_error(evaluator: &Evaluator, case: &FtCase, op: &Operator, eps: f64) -> Result<(f64, f64)> {
    let h = handle_for(op, &case.lhs, eps)?;
    let spec = evaluator.plan(&[&case.lhs, &case.rhs], &h, &[])?;
    let l = evaluator.eval_on(&case.lhs, &h, &[], spec)?;
    let r = evaluator.eval_on(&case.rhs, &h, &[], spec)?;
    Ok((l.sup_distance(&r)?, r.sup()))
}

pub fn calibrate(base: GridSpec) -> Result<BridgeCalibration> {
    let g = grid::sample_real(|x| (-PI * x * x).exp(), base)?;
    let fg = grid::dft_forward(&g);
    let exact = grid::sample_real(|xi| (-PI * xi * xi).exp(), *fg.spec())?;
    let gaussian = fg.sup_distance(&exact)?;
    let round_trip = grid::dft_inverse(&fg).sup_distance(&g)?;
    let k = grid::sample_real(|x| x * (-(x - 0.5) * (x - 0.5)).exp(), base)?;
    let fk = grid::dft_forward(&k);
    let parseval = (grid::inner(&g, &k)? - grid::inner(&fg, &fk)?).norm();
    Ok(BridgeCalibration {
        gaussian,
        round_trip,
        parseval,
    })
}

/// Runs every case at every `eps` of `eps_grid` for the net `op`.
pub fn check_ft_properties(
    evaluator: &Evaluator,
    op: &Operator,
    cases: &[FtCase],
    eps_grid: &[f64],
) -> Result<FtReport> {
    let calibration = calibrate(evaluator.base)?;
    let jobs: Vec<(&FtCase, f64)> = cases
        .iter()
        .flat_map(|c| eps_grid.iter().map(move |&e| (c, e)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(case, eps)| {
            let (sup_error, reference_sup, note) = match case_error(evaluator, case, op, eps) {
                Ok((err, sup)) => (err, sup, String::new()),
                Err(e) => (f64::NAN, f64::NAN, not_evaluable(e)),
            };
            FtRow {
                property: case.property,
                representative: case.label(),
                eps,
                sup_error,
                reference_sup,
                threshold: case.threshold,
                passed: sup_error <= case.threshold,
                note,
            }
        })
        .collect();
    Ok(FtReport { calibration, rows })
}

fn not_evaluable(e: Error) -> String {
    format!("not evaluable: {e}")
}
