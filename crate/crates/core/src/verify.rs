//! Numeric checks of the test-object and 0-test-object conditions.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::catalog::{self, Distribution, SmoothTerm};
use crate::error::{Error, Result};
use crate::expr::{iota, sigma, Evaluator};
use crate::grid::{self, GridSpec, SeminormKind, SeminormQuery};
use crate::mollifier::cutoff::build_cutoff;
use crate::mollifier::operator::{Operator, OperatorHandle};
use crate::mollifier::zero::{ZeroSource, ZeroTestObject};
use crate::quotient::{
    fit_order, pairing_passes, sweep, EpsilonGrid, NamedOperator, SeminormBank,
    ASSOCIATION_TOLERANCE,
};

/// Smallest growth slope accepted for the operator bounds.
pub const GROWTH_FLOOR: f64 = -8.0;
/// Same for Fourier-conjugated nets: conjugation trades the polynomial weight
/// of a seminorm for derivatives, so `x^2` is seen like `delta''`.
pub const CONJUGATED_GROWTH_FLOOR: f64 = -12.0;
const PAIRING_FLOOR_REL: f64 = 1e-10;
/// Rounding level of a pairing relative to `scale(Phi_eps u) * |chi|_1`.
const PAIRING_ROUNDING: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct VerificationBanks {
    /// Inputs `u` for the weak convergence condition.
    pub weak: Vec<(String, Distribution)>,
    pub pairing: Vec<(String, Distribution)>,
    /// Smooth inputs `f` for the convergence-rate condition.
    pub schwartz: Vec<(String, Distribution)>,
    pub rate_seminorms: SeminormBank,
    /// Tempered inputs for the operator bounds.
    pub growth: Vec<(String, Distribution)>,
    pub growth_seminorms: SeminormBank,
    pub growth_floor: f64,
    /// Inputs only admissible for compactly supported kernels, checked with
    /// compact-sup seminorms.
    pub local: Vec<(String, Distribution)>,
    pub local_seminorms: SeminormBank,
    pub m_cap: u32,
}

fn named(name: &str) -> (String, Distribution) {
    (
        name.to_string(),
        catalog::lookup(name).expect("catalog entry"),
    )
}

/// `e^{-x^2}`, `x e^{-x^2}`, `e^{-(x-1/2)^2}`.
pub fn pairing_bank() -> Vec<(String, Distribution)> {
    let re = |v: f64| Complex64::new(v, 0.0);
    vec![
        ("gauss".into(), Distribution::gaussian(1.0, 0.0, 1.0)),
        (
            "x*gauss".into(),
            Distribution::smooth(vec![SmoothTerm::new(re(1.0), 0.0, 1, 1.0, re(0.0))]),
        ),
        ("gauss(0.5)".into(), Distribution::gaussian(1.0, 0.5, 1.0)),
    ]
}

impl VerificationBanks {
    pub fn standard() -> Self {
        let re = |v: f64| Complex64::new(v, 0.0);
        Self {
            weak: vec![
                named("delta"),
                named("delta_prime(a=0.5)"),
                named("heaviside"),
                named("one"),
                named("gauss"),
            ],
            pairing: pairing_bank(),
            schwartz: vec![
                named("gauss"),
                named("gauss_pi"),
                (
                    "x*gauss".into(),
                    Distribution::smooth(vec![SmoothTerm::new(re(1.0), 0.0, 1, 1.0, re(0.0))]),
                ),
                (
                    "gauss(b=2,c=0.5)".into(),
                    Distribution::gaussian(1.0, 0.5, 2.0),
                ),
            ],
            rate_seminorms: SeminormBank::schwartz(3, 4),
            growth: vec![
                named("delta"),
                named("heaviside"),
                named("one"),
                named("gauss"),
                named("x_poly(2)"),
            ],
            growth_seminorms: SeminormBank::moderate_default(),
            growth_floor: GROWTH_FLOOR,
            local: vec![named("exp")],
            local_seminorms: SeminormBank::compact(&[1.0, 2.0, 4.0], 2),
            m_cap: 4,
        }
    }

    /// Conditions ii to iv restricted to inputs with a catalog transform, for
    /// Fourier-conjugated nets. The local inputs stay so that the report shows
    /// what conjugation loses.
    pub fn tempered() -> Self {
        let mut b = Self::standard();
        b.weak.retain(|(_, u)| catalog::fourier_of(u).is_ok());
        b.growth.retain(|(_, u)| catalog::fourier_of(u).is_ok());
        b.growth_floor = CONJUGATED_GROWTH_FLOOR;
        b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionRow {
    pub input: String,
    pub probe: String,
    pub values: Vec<(f64, f64)>,
    pub slope: f64,
    pub passed: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    pub condition: String,
    pub passed: bool,
    pub rows: Vec<ConditionRow>,
}

impl ConditionReport {
    fn from_rows(condition: &str, rows: Vec<ConditionRow>) -> Self {
        let passed = !rows.is_empty() && rows.iter().all(|r| r.passed);
        Self {
            condition: condition.into(),
            passed,
            rows,
        }
    }

    /// Rows that failed, as witnesses.
    pub fn failures(&self) -> impl Iterator<Item = &ConditionRow> {
        self.rows.iter().filter(|r| !r.passed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub object: String,
    pub conditions: Vec<ConditionReport>,
}

pub const VERIFY_CSV_HEADER: &str = "object,condition,input,probe,slope,final,passed,note";

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|c| c.condition == name)
    }

    pub fn csv_rows(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.conditions {
            for r in &c.rows {
                let last = r.values.last().map(|v| v.1).unwrap_or(f64::NAN);
                out.push(format!(
                    "{},{},{},{},{},{:.6e},{},{}",
                    quote(&self.object),
                    c.condition,
                    quote(&r.input),
                    quote(&r.probe),
                    fmt_slope(r.slope),
                    last,
                    r.passed,
                    quote(&r.note)
                ));
            }
        }
        out
    }
}

fn quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn fmt_slope(s: f64) -> String {
    if s.is_infinite() {
        "inf".into()
    } else if s.is_nan() {
        "nan".into()
    } else {
        format!("{s:.4}")
    }
}

/// Whether the object should converge to the identity or to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Identity,
    Zero,
}

#[derive(Debug, Clone)]
pub struct Verifier {
    pub evaluator: Evaluator,
    pub eps: EpsilonGrid,
    pub banks: VerificationBanks,
}

impl Verifier {
    pub fn verify_test_object(&self, object: &NamedOperator) -> VerificationReport {
        self.verify(object, Target::Identity)
    }

    pub fn verify_zero_test_object(&self, object: &NamedOperator) -> VerificationReport {
        self.verify(object, Target::Zero)
    }

    pub fn verify(&self, object: &NamedOperator, target: Target) -> VerificationReport {
        let conditions = vec![
            ConditionReport::from_rows("ii", self.weak_rows(&object.operator, target)),
            ConditionReport::from_rows("iii", self.rate_rows(&object.operator, target)),
            ConditionReport::from_rows(
                "iv",
                self.growth_rows(
                    &object.operator,
                    &self.banks.growth,
                    &self.banks.growth_seminorms,
                ),
            ),
        ];
        let mut conditions = conditions;
        if !self.banks.local.is_empty() {
            conditions.push(ConditionReport::from_rows(
                "iv-local",
                self.local_rows(&object.operator),
            ));
        }
        VerificationReport {
            object: object.id.clone(),
            conditions,
        }
    }

    /// `<Phi_eps u - u, chi> -> 0` (or `<Psi_eps u, chi> -> 0`).
    fn weak_rows(&self, op: &Operator, target: Target) -> Vec<ConditionRow> {
        let mut jobs = Vec::new();
        for (un, u) in &self.banks.weak {
            for (cn, chi) in &self.banks.pairing {
                jobs.push((un, u, cn, chi));
            }
        }
        jobs.par_iter()
            .map(|(un, u, cn, chi)| {
                let res: Result<(Vec<(f64, Complex64)>, f64)> = (|| {
                    let exact = match target {
                        Target::Identity => catalog::pair(u, &chi.sample(self.evaluator.base)?)?,
                        Target::Zero => Complex64::new(0.0, 0.0),
                    };
                    let mut values = Vec::new();
                    let mut floor: f64 = 0.0;
                    for &e in self.eps.kernel_valid() {
                        let h = OperatorHandle::new(op.clone(), e)?;
                        let g = h.apply(u, &self.evaluator.base)?;
                        let c = chi.sample(*g.spec())?;
                        let p = grid::quadrature(&g.mul(&c)?);
                        let chi_l1 =
                            c.samples().iter().map(|z| z.norm()).sum::<f64>() * c.spec().spacing();
                        floor = floor
                            .max(PAIRING_FLOOR_REL * (p.norm() + exact.norm()))
                            .max(PAIRING_ROUNDING * g.scale() * chi_l1);
                        values.push((e, p - exact));
                    }
                    Ok((values, floor))
                })();
                match res {
                    Ok((values, floor)) => {
                        let passed = pairing_passes(&values, floor, ASSOCIATION_TOLERANCE);
                        let mags: Vec<(f64, f64)> =
                            values.iter().map(|(e, z)| (*e, z.norm())).collect();
                        let slope = fit_order(&mags).map(|f| f.slope).unwrap_or(f64::NAN);
                        ConditionRow {
                            input: un.to_string(),
                            probe: cn.to_string(),
                            values: mags,
                            slope,
                            passed,
                            note: String::new(),
                        }
                    }
                    Err(e) => not_evaluable(un, cn, e),
                }
            })
            .collect()
    }

    /// Seminorms of `Phi_eps f - f` (or `Psi_eps f`) decay like `eps^m`, `m <= m_cap`.
    fn rate_rows(&self, op: &Operator, target: Target) -> Vec<ConditionRow> {
        let queries = &self.banks.rate_seminorms.queries;
        let m_cap = self.banks.m_cap as f64;
        self.banks
            .schwartz
            .par_iter()
            .flat_map_iter(|(fname, f)| {
                let r = match (target, sigma(f.clone())) {
                    (Target::Identity, Ok(s)) => iota(f.clone()).sub(s),
                    (Target::Zero, _) => iota(f.clone()),
                    (_, Err(e)) => return vec![not_evaluable(fname, "", e)],
                };
                match sweep(&self.evaluator, &self.eps, &r, op, &[], queries) {
                    Ok((series, note)) => queries
                        .iter()
                        .zip(series)
                        .map(|(q, values)| rate_row(fname, q, values, m_cap, &note))
                        .collect(),
                    Err(e) => vec![not_evaluable(fname, "", e)],
                }
            })
            .collect()
    }

    /// Compact seminorms of `Phi_eps u` for `u` outside the tempered class.
    /// A local operator sees only `u` near the compact set, so `u` is replaced
    /// by `chi u` with a window `chi = 1` around the largest radius.
    fn local_rows(&self, op: &Operator) -> Vec<ConditionRow> {
        let bank = &self.banks.local_seminorms;
        if !op.is_local() {
            return self
                .banks
                .local
                .iter()
                .map(|(un, _)| {
                    not_evaluable(un, "", Error::Unsupported("operator is not local".into()))
                })
                .collect();
        }
        let mut rows = Vec::new();
        let mut inputs = Vec::new();
        for (un, u) in &self.banks.local {
            match localize(u, bank, self.evaluator.base) {
                Ok(v) => inputs.push((un.clone(), v)),
                Err(e) => rows.push(not_evaluable(un, "", e)),
            }
        }
        rows.extend(self.growth_rows(op, &inputs, bank));
        rows
    }

    /// `p(Phi_eps u)` grows at most like `eps^{growth_floor}`.
    fn growth_rows(
        &self,
        op: &Operator,
        inputs: &[(String, Distribution)],
        bank: &SeminormBank,
    ) -> Vec<ConditionRow> {
        inputs
            .par_iter()
            .flat_map_iter(|(un, u)| {
                let r = iota(u.clone());
                match sweep(&self.evaluator, &self.eps, &r, op, &[], &bank.queries) {
                    Ok((series, note)) => bank
                        .queries
                        .iter()
                        .zip(series)
                        .map(|(q, values)| {
                            let (slope, passed, note) = match fit_order(&values) {
                                Ok(f) => (f.slope, f.slope >= self.banks.growth_floor, note.clone()),
                                Err(e) => (f64::NAN, false, e.to_string()),
                            };
                            ConditionRow {
                                input: un.clone(),
                                probe: q.label(),
                                values,
                                slope,
                                passed,
                                note,
                            }
                        })
                        .collect(),
                    Err(e) => vec![not_evaluable(un, "", e)],
                }
            })
            .collect()
    }
}

/// `chi u` sampled on `base`, `chi = 1` on `|x| <= r_max + 1`.
fn localize(u: &Distribution, bank: &SeminormBank, base: GridSpec) -> Result<Distribution> {
    let r_max = bank
        .queries
        .iter()
        .filter_map(|q| match q.kind {
            SeminormKind::CompactSup { radius } => Some(radius),
            _ => None,
        })
        .fold(0.0, f64::max);
    let window = build_cutoff();
    let stretch = (r_max + 1.0) / window.plateau_radius();
    if stretch * window.support_radius() > base.half_width() / 2.0 {
        return Err(Error::InvalidQuery(format!(
            "window for radius {r_max} does not fit the grid"
        )));
    }
    let g = u
        .sample(base)?
        .mul_fn(|x| Complex64::new(window.eval(x / stretch), 0.0));
    Ok(Distribution::Sample(g))
}

fn rate_row(
    input: &str,
    q: &SeminormQuery,
    values: Vec<(f64, f64)>,
    m_cap: f64,
    note: &str,
) -> ConditionRow {
    match fit_order(&values) {
        Ok(f) => {
            let s = f.guaranteed_slope();
            let passed = s >= m_cap - 0.25;
            let m_reached = ((s + 0.25).floor()).clamp(0.0, m_cap);
            ConditionRow {
                input: input.into(),
                probe: q.label(),
                values,
                slope: f.slope,
                passed,
                note: if note.is_empty() {
                    format!("m={m_reached}")
                } else {
                    format!("m={m_reached}; {note}")
                },
            }
        }
        Err(e) => ConditionRow {
            input: input.into(),
            probe: q.label(),
            values,
            slope: f64::NAN,
            passed: false,
            note: e.to_string(),
        },
    }
}

fn not_evaluable(input: &str, probe: &str, e: Error) -> ConditionRow {
    ConditionRow {
        input: input.into(),
        probe: probe.into(),
        values: Vec::new(),
        slope: f64::NAN,
        passed: false,
        note: format!("not evaluable: {e}"),
    }
}

/// Builds a 0-test object and accepts it only if it passes the numeric checks.
pub fn make_zero_test_object(
    source: &ZeroSource,
    verifier: &Verifier,
) -> Result<(ZeroTestObject, VerificationReport)> {
    let z = ZeroTestObject::from_source(source);
    let report =
        verifier.verify_zero_test_object(&NamedOperator::new(z.id.clone(), z.operator.clone()));
    if report.passed() {
        Ok((z, report))
    } else {
        let witness = report
            .conditions
            .iter()
            .flat_map(|c| {
                c.failures()
                    .map(move |r| format!("{} {} {} {}", c.condition, r.input, r.probe, r.note))
            })
            .next()
            .unwrap_or_default();
        Err(Error::ZeroNetRejected(format!("{}: {witness}", z.id)))
    }
}
