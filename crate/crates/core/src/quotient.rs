//! Epsilon sweeps and the moderate / negligible / associated classification
//! of representatives.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::catalog::Distribution;
use crate::error::{Error, Result};
use crate::expr::{Evaluator, Representative};
use crate::grid::{self, seminorm_of_derivative, GridFunction, SeminormKind, SeminormQuery, SeminormValue};
use crate::mollifier::operator::{Operator, OperatorHandle};

/// Smallest number of usable points for a fit.
pub const MIN_POINTS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonGrid {
    values: Vec<f64>,
    kernel_valid_prefix: usize,
}

impl EpsilonGrid {
    pub fn new(values: Vec<f64>, kernel_valid_prefix: usize) -> Result<Self> {
        crate::mollifier::net::validate_epsilon_grid(&values)?;
        if kernel_valid_prefix > values.len() {
            return Err(Error::Invalid(format!(
                "kernel-valid prefix {kernel_valid_prefix} longer than the grid ({})",
                values.len()
            )));
        }
        Ok(Self {
            values,
            kernel_valid_prefix,
        })
    }

    /// `2^{-j}` for `j = first..=last`.
    pub fn dyadic(first: i32, last: i32, kernel_valid_prefix: usize) -> Result<Self> {
        Self::new(
            (first..=last).map(|j| 2f64.powi(-j)).collect(),
            kernel_valid_prefix,
        )
    }

    /// `{2^-2, ..., 2^-9}` with the first four kernel-valid.
    pub fn standard() -> Self {
        Self::dyadic(2, 9, 4).expect("static grid")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kernel_valid_prefix(&self) -> usize {
        self.kernel_valid_prefix
    }

    pub fn kernel_valid(&self) -> &[f64] {
        &self.values[..self.kernel_valid_prefix]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub points_used: usize,
    /// Smallest slope between consecutive points.
    pub min_local_slope: f64,
}

impl OrderFit {
    fn sentinel(points: usize) -> Self {
        Self {
            slope: f64::INFINITY,
            intercept: 0.0,
            max_residual: 0.0,
            points_used: points,
            min_local_slope: f64::INFINITY,
        }
    }

    pub fn is_sentinel(&self) -> bool {
        self.slope == f64::INFINITY
    }

    /// Slope used for "decays at least like" decisions.
    pub fn guaranteed_slope(&self) -> f64 {
        self.slope.min(self.min_local_slope)
    }
}

/// Least-squares line through `(ln eps, ln value)`.
///
/// A series that is identically zero, or whose last value is zero, decays
/// faster than any power on the tested range and yields the `+inf` sentinel.
pub fn fit_order(pairs: &[(f64, f64)]) -> Result<OrderFit> {
    if pairs
        .iter()
        .any(|(e, v)| !(*e > 0.0) || !(*v >= 0.0) || !v.is_finite())
    {
        return Err(Error::Invalid(
            "fit needs eps > 0 and finite values >= 0".into(),
        ));
    }
    if pairs.len() < MIN_POINTS {
        return Err(Error::TooFewPoints(pairs.len()));
    }
    if pairs.last().map(|p| p.1 == 0.0).unwrap_or(true) {
        return Ok(OrderFit::sentinel(pairs.len()));
    }
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|(e, v)| (e.ln(), v.ln()))
        .collect();
    if pts.len() < MIN_POINTS {
        return Err(Error::TooFewPoints(pts.len()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Invalid("fit needs distinct eps values".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).abs())
        .fold(0.0, f64::max);
    let min_local_slope = pts
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .fold(f64::INFINITY, f64::min);
    Ok(OrderFit {
        slope,
        intercept,
        max_residual,
        points_used: pts.len(),
        min_local_slope,
    })
}

/// Finite surrogates for the quantifiers over `m`, `N` and `l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Caps {
    pub m_cap: u32,
    pub n_cap: u32,
    pub l_cap: usize,
    pub max_residual: f64,
    pub net_agreement: f64,
    pub slack: f64,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            m_cap: 4,
            n_cap: 8,
            l_cap: 2,
            max_residual: 0.5,
            net_agreement: 0.5,
            slack: 0.25,
        }
    }
}

/// A named operator standing in for a member of `S` or `S^0`.
#[derive(Debug, Clone)]
pub struct NamedOperator {
    pub id: String,
    pub operator: Operator,
}

impl NamedOperator {
    pub fn new(id: impl Into<String>, operator: Operator) -> Self {
        Self {
            id: id.into(),
            operator,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceRow {
    pub representative: String,
    pub seminorm: String,
    pub net: String,
    pub perturbations: Vec<String>,
    pub values: Vec<(f64, f64)>,
    pub fit: Option<OrderFit>,
    pub note: String,
}

impl EvidenceRow {
    pub fn l(&self) -> usize {
        self.perturbations.len()
    }

    pub fn slope(&self) -> f64 {
        self.fit.map(|f| f.slope).unwrap_or(f64::NAN)
    }

    pub fn residual(&self) -> f64 {
        self.fit.map(|f| f.max_residual).unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VerdictKind {
    Moderate(u32),
    Negligible(u32),
    NotNegligible(Box<EvidenceRow>),
    Inconclusive(String),
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictKind::Moderate(n) => write!(f, "Moderate(N={n})"),
            VerdictKind::Negligible(m) => write!(f, "Negligible(m={m})"),
            VerdictKind::NotNegligible(w) => {
                write!(
                    f,
                    "NotNegligible({} {} l={} slope={:.3})",
                    w.seminorm,
                    w.net,
                    w.l(),
                    w.slope()
                )
            }
            VerdictKind::Inconclusive(r) => write!(f, "Inconclusive({r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub caps: Caps,
    pub evidence: Vec<EvidenceRow>,
}

pub const VERDICT_CSV_HEADER: &str =
    "representative,seminorm,net,perturbations,l,slope,residual,points,verdict";

fn fmt_f(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.6}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Verdict {
    /// One CSV line per evidence row, columns as in [`VERDICT_CSV_HEADER`].
    pub fn csv_rows(&self) -> Vec<String> {
        let kind = self.kind.to_string();
        self.evidence
            .iter()
            .map(|r| {
                [
                    csv_field(&r.representative),
                    csv_field(&r.seminorm),
                    csv_field(&r.net),
                    csv_field(&r.perturbations.join(";")),
                    r.l().to_string(),
                    fmt_f(r.slope()),
                    fmt_f(r.residual()),
                    r.fit.map(|f| f.points_used).unwrap_or(0).to_string(),
                    csv_field(&kind),
                ]
                .join(",")
            })
            .collect()
    }

    /// Worst (smallest) slope over rows matching `pred`.
    pub fn worst_slope(&self, pred: impl Fn(&EvidenceRow) -> bool) -> f64 {
        self.evidence
            .iter()
            .filter(|r| pred(r))
            .map(|r| r.slope())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_moderate(&self) -> bool {
        matches!(self.kind, VerdictKind::Moderate(_))
    }

    pub fn is_negligible(&self) -> bool {
        matches!(self.kind, VerdictKind::Negligible(_))
    }
}

/// Seminorm families used in the sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct SeminormBank {
    pub queries: Vec<SeminormQuery>,
}

impl SeminormBank {
    pub fn schwartz(alpha_max: u32, beta_max: u32) -> Self {
        let mut queries = Vec::new();
        for beta in 0..=beta_max {
            for alpha in 0..=alpha_max {
                queries.push(SeminormQuery::schwartz(alpha, beta));
            }
        }
        Self { queries }
    }

    pub fn compact(radii: &[f64], beta_max: u32) -> Self {
        let mut queries = Vec::new();
        for beta in 0..=beta_max {
            for &r in radii {
                queries.push(SeminormQuery::compact(r, beta));
            }
        }
        Self { queries }
    }

    /// Schwartz `alpha <= 3, beta <= 2` plus compact radii `{1, 2, 4}`.
    pub fn moderate_default() -> Self {
        let mut b = Self::schwartz(3, 2);
        b.queries.extend(Self::compact(&[1.0, 2.0, 4.0], 2).queries);
        b
    }

    pub fn schwartz_only(&self) -> Self {
        Self {
            queries: self
                .queries
                .iter()
                .copied()
                .filter(|q| matches!(q.kind, SeminormKind::Schwartz { .. }))
                .collect(),
        }
    }

    pub fn compact_only(&self) -> Self {
        Self {
            queries: self
                .queries
                .iter()
                .copied()
                .filter(|q| matches!(q.kind, SeminormKind::CompactSup { .. }))
                .collect(),
        }
    }
}

/// Seminorm values of `D^beta g` for every query, reusing one derivative per `beta`.
pub fn seminorm_values(g: &GridFunction, queries: &[SeminormQuery]) -> Result<Vec<f64>> {
    Ok(seminorm_values_with_floor(g, queries)?.iter().map(SeminormValue::resolved).collect())
}

pub fn seminorm_values_with_floor(g: &GridFunction, queries: &[SeminormQuery]) -> Result<Vec<SeminormValue>> {
    let mut out = vec![SeminormValue { value: 0.0, floor: 0.0 }; queries.len()];
    let mut betas: Vec<u32> = queries.iter().map(|q| q.deriv_order).collect();
    betas.sort_unstable();
    betas.dedup();
    for beta in betas {
        let d = grid::spectral_derivative(g, beta)?;
        for (i, q) in queries.iter().enumerate() {
            if q.deriv_order == beta {
                out[i] = seminorm_of_derivative(&d, q)?;
            }
        }
    }
    Ok(out)
}

/// Per-query series `(eps, value)` of `d^l R(Phi_eps)(Psi...)`.
///
/// Epsilons whose grid cannot be planned are dropped and listed in the note.
pub fn sweep(
    evaluator: &Evaluator,
    eps: &EpsilonGrid,
    r: &Representative,
    op: &Operator,
    slots: &[Operator],
    queries: &[SeminormQuery],
) -> Result<(Vec<Vec<(f64, f64)>>, String)> {
    let per_eps: Vec<Result<Option<Vec<SeminormValue>>>> = eps
        .values()
        .par_iter()
        .map(|&e| {
            let h = OperatorHandle::new(op.clone(), e)?;
            match evaluator.differential(r, &h, slots) {
                Ok(g) => Ok(Some(seminorm_values_with_floor(&g, queries)?)),
                Err(Error::UnderResolved(_)) => Ok(None),
                Err(err) => Err(err),
            }
        })
        .collect();
    let mut raw = vec![Vec::new(); queries.len()];
    let mut dropped = Vec::new();
    for (&e, res) in eps.values().iter().zip(per_eps) {
        match res? {
            Some(vals) => {
                for (s, v) in raw.iter_mut().zip(vals) {
                    s.push((e, v));
                }
            }
            None => dropped.push(format!("{e}")),
        }
    }
    let mut notes = Vec::new();
    if !dropped.is_empty() {
        notes.push(format!("unresolved eps {}", dropped.join(" ")));
    }
    let series = raw.iter().map(|r| r.iter().map(|(e, v)| (*e, v.resolved())).collect()).collect();
    Ok((series, notes.join("; ")))
}

/// Multisets of size `l` drawn from `n` perturbations.
fn combinations_with_repetition(n: usize, l: usize) -> Vec<Vec<usize>> {
    if l == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for prefix in combinations_with_repetition(n, l - 1) {
        let start = prefix.last().copied().unwrap_or(0);
        for i in start..n {
            let mut p = prefix.clone();
            p.push(i);
            out.push(p);
        }
    }
    out
}

/// Collects one evidence row per `(seminorm, net, perturbations)`.
pub fn collect_evidence(
    evaluator: &Evaluator,
    eps: &EpsilonGrid,
    r: &Representative,
    nets: &[NamedOperator],
    zero: &[NamedOperator],
    bank: &SeminormBank,
    l_cap: usize,
) -> Result<Vec<EvidenceRow>> {
    let mut jobs = Vec::new();
    for net in nets {
        for l in 0..=l_cap {
            for combo in combinations_with_repetition(zero.len(), l) {
                jobs.push((net, combo));
            }
        }
    }
    let label = r.to_string();
    let results: Vec<Result<Vec<EvidenceRow>>> = jobs
        .par_iter()
        .map(|(net, combo)| {
            let slots: Vec<Operator> = combo.iter().map(|&i| zero[i].operator.clone()).collect();
            let ids: Vec<String> = combo.iter().map(|&i| zero[i].id.clone()).collect();
            let (series, note) = sweep(evaluator, eps, r, &net.operator, &slots, &bank.queries)?;
            Ok(bank
                .queries
                .iter()
                .zip(series)
                .map(|(q, values)| {
                    let (fit, note) = match fit_order(&values) {
                        Ok(f) => (Some(f), note.clone()),
                        Err(e) => (
                            None,
                            if note.is_empty() {
                                e.to_string()
                            } else {
                                format!("{note}; {e}")
                            },
                        ),
                    };
                    EvidenceRow {
                        representative: label.clone(),
                        seminorm: q.label(),
                        net: net.id.clone(),
                        perturbations: ids.clone(),
                        values,
                        fit,
                        note,
                    }
                })
                .collect())
        })
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

fn clamp_slope(s: f64, caps: &Caps) -> f64 {
    s.clamp(-(caps.n_cap as f64) - 1.0, caps.m_cap as f64 + 1.0)
}

/// Rows with the same seminorm and perturbations but different nets must agree.
fn net_disagreement(rows: &[EvidenceRow], caps: &Caps) -> Option<String> {
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if a.seminorm == b.seminorm && a.perturbations == b.perturbations && a.net != b.net {
                let (sa, sb) = (clamp_slope(a.slope(), caps), clamp_slope(b.slope(), caps));
                if (sa - sb).abs() > caps.net_agreement {
                    return Some(format!(
                        "nets {} and {} disagree on {} (l={}): {:.3} vs {:.3}",
                        a.net,
                        b.net,
                        a.seminorm,
                        a.l(),
                        a.slope(),
                        b.slope()
                    ));
                }
            }
        }
    }
    None
}

fn missing_fit(rows: &[EvidenceRow]) -> Option<&EvidenceRow> {
    rows.iter().find(|r| r.fit.is_none())
}

/// Classifies already collected evidence as moderate.
pub fn classify_moderate(rows: Vec<EvidenceRow>, caps: Caps) -> Verdict {
    let kind = (|| {
        if rows.is_empty() {
            return VerdictKind::Inconclusive("no evidence".into());
        }
        if let Some(r) = missing_fit(&rows) {
            return VerdictKind::Inconclusive(format!("{} {}: {}", r.seminorm, r.net, r.note));
        }
        let mut worst = f64::INFINITY;
        for r in &rows {
            let f = r.fit.expect("checked");
            let flat_or_decaying = f.min_local_slope >= -caps.slack;
            if f.max_residual > caps.max_residual && !flat_or_decaying {
                return VerdictKind::Inconclusive(format!(
                    "residual {:.3} on {} {} l={}",
                    f.max_residual,
                    r.seminorm,
                    r.net,
                    r.l()
                ));
            }
            worst = worst.min(
                f.slope
                    .min(f.min_local_slope.max(f.slope - caps.max_residual)),
            );
        }
        if let Some(msg) = net_disagreement(&rows, &caps) {
            return VerdictKind::Inconclusive(msg);
        }
        let n = (-worst - caps.slack).ceil().max(0.0);
        if n > caps.n_cap as f64 {
            return VerdictKind::Inconclusive(format!("growth order {n} above cap {}", caps.n_cap));
        }
        VerdictKind::Moderate(n as u32)
    })();
    Verdict {
        kind,
        caps,
        evidence: rows,
    }
}

/// Classifies already collected evidence as negligible.
pub fn classify_negligible(rows: Vec<EvidenceRow>, caps: Caps) -> Verdict {
    let kind = (|| {
        if rows.is_empty() {
            return VerdictKind::Inconclusive("no evidence".into());
        }
        if let Some(r) = rows
            .iter()
            .find(|r| r.fit.map(|f| f.slope < 1.0).unwrap_or(false))
        {
            return VerdictKind::NotNegligible(Box::new(r.clone()));
        }
        if let Some(r) = missing_fit(&rows) {
            return VerdictKind::Inconclusive(format!("{} {}: {}", r.seminorm, r.net, r.note));
        }
        let target = caps.m_cap as f64 - caps.slack;
        if let Some(r) = rows
            .iter()
            .find(|r| r.fit.expect("checked").guaranteed_slope() < target)
        {
            return VerdictKind::Inconclusive(format!(
                "slope {:.3} on {} {} l={} below {}",
                r.fit.expect("checked").guaranteed_slope(),
                r.seminorm,
                r.net,
                r.l(),
                target
            ));
        }
        VerdictKind::Negligible(caps.m_cap)
    })();
    Verdict {
        kind,
        caps,
        evidence: rows,
    }
}

/// Test-object families and banks shared by the checks.
#[derive(Debug, Clone)]
pub struct QuotientContext {
    pub evaluator: Evaluator,
    pub eps: EpsilonGrid,
    pub nets: Vec<NamedOperator>,
    pub zero: Vec<NamedOperator>,
    pub bank: SeminormBank,
    pub pairing_bank: Vec<(String, Distribution)>,
    pub caps: Caps,
}

impl QuotientContext {
    fn evidence(
        &self,
        r: &Representative,
        bank: &SeminormBank,
        l_cap: usize,
    ) -> Result<Vec<EvidenceRow>> {
        if l_cap > crate::expr::MAX_DIFFERENTIAL {
            return Err(Error::OrderTooHigh {
                order: l_cap as u32,
                cap: crate::expr::MAX_DIFFERENTIAL as u32,
            });
        }
        collect_evidence(
            &self.evaluator,
            &self.eps,
            r,
            &self.nets,
            &self.zero,
            bank,
            l_cap,
        )
    }

    pub fn check_moderate(&self, r: &Representative) -> Verdict {
        self.check_moderate_with(r, &self.bank, self.caps.l_cap)
    }

    pub fn check_moderate_with(
        &self,
        r: &Representative,
        bank: &SeminormBank,
        l_cap: usize,
    ) -> Verdict {
        match self.evidence(r, bank, l_cap) {
            Ok(rows) => classify_moderate(rows, Caps { l_cap, ..self.caps }),
            Err(e) => self.failed(r, e),
        }
    }

    pub fn check_negligible(&self, r: &Representative) -> Verdict {
        self.check_negligible_with(r, &self.bank, self.caps.l_cap)
    }

    pub fn check_negligible_with(
        &self,
        r: &Representative,
        bank: &SeminormBank,
        l_cap: usize,
    ) -> Verdict {
        match self.evidence(r, bank, l_cap) {
            Ok(rows) => classify_negligible(rows, Caps { l_cap, ..self.caps }),
            Err(e) => self.failed(r, e),
        }
    }

    fn failed(&self, r: &Representative, e: Error) -> Verdict {
        Verdict {
            kind: VerdictKind::Inconclusive(e.to_string()),
            caps: self.caps,
            evidence: vec![EvidenceRow {
                representative: r.to_string(),
                seminorm: String::new(),
                net: String::new(),
                perturbations: Vec::new(),
                values: Vec::new(),
                fit: None,
                note: e.to_string(),
            }],
        }
    }

    /// Pairing sweeps of `R1 - R2` against the pairing bank on every net.
    pub fn check_associated(&self, r1: &Representative, r2: &Representative) -> AssociationReport {
        let diff = r1.clone().sub(r2.clone());
        let mut rows = Vec::new();
        for net in &self.nets {
            for (name, chi) in &self.pairing_bank {
                rows.push(pairing_row(
                    &self.evaluator,
                    self.eps.kernel_valid(),
                    r1,
                    r2,
                    net,
                    name,
                    chi,
                ));
            }
        }
        AssociationReport {
            representative: diff.to_string(),
            rows,
        }
    }

    /// Schwartz-bank verdicts must carry over to the compact-sup bank.
    pub fn check_inclusion(&self, r: &Representative) -> InclusionReport {
        let s_bank = self.bank.schwartz_only();
        let k_bank = self.bank.compact_only();
        let s_mod = self.check_moderate_with(r, &s_bank, self.caps.l_cap);
        let k_mod = self.check_moderate_with(r, &k_bank, self.caps.l_cap);
        let s_neg = classify_negligible(s_mod.evidence.clone(), self.caps);
        let k_neg = classify_negligible(k_mod.evidence.clone(), self.caps);
        let mut problems = Vec::new();
        if let (VerdictKind::Moderate(ns), k) = (&s_mod.kind, &k_mod.kind) {
            match k {
                VerdictKind::Moderate(nk) if nk <= ns => {}
                other => problems.push(format!("Schwartz Moderate({ns}) but compact {other}")),
            }
        }
        if s_neg.is_negligible() && !k_neg.is_negligible() {
            problems.push(format!("Schwartz negligible but compact {}", k_neg.kind));
        }
        // sup over |x| <= r is dominated by the alpha = 0 Schwartz seminorm
        for k in &k_mod.evidence {
            let Some(kq) = k.seminorm.strip_prefix("K(") else {
                continue;
            };
            let beta = kq.rsplit("b=").next().unwrap_or("").trim_end_matches(')');
            let s_label = format!("S(a=0,b={beta})");
            if let Some(s) = s_mod.evidence.iter().find(|s| {
                s.seminorm == s_label && s.net == k.net && s.perturbations == k.perturbations
            }) {
                if clamp_slope(k.slope(), &self.caps)
                    < clamp_slope(s.slope(), &self.caps) - self.caps.slack
                {
                    problems.push(format!(
                        "{} slope {:.3} below {} slope {:.3} on {} l={}",
                        k.seminorm,
                        k.slope(),
                        s.seminorm,
                        s.slope(),
                        k.net,
                        k.l()
                    ));
                }
            }
        }
        InclusionReport {
            representative: r.to_string(),
            schwartz_moderate: s_mod,
            compact_moderate: k_mod,
            schwartz_negligible: s_neg.kind,
            compact_negligible: k_neg.kind,
            problems,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairingRow {
    pub net: String,
    pub test_function: String,
    pub values: Vec<(f64, Complex64)>,
    pub floor: f64,
    pub passed: bool,
    pub note: String,
}

/// Pass rule for a pairing sequence that should tend to zero: small final
/// value and a non-increasing tail, with values at the rounding floor
/// counted as zero.
pub fn pairing_passes(values: &[(f64, Complex64)], floor: f64, tolerance: f64) -> bool {
    let mags: Vec<f64> = values
        .iter()
        .map(|(_, z)| if z.norm() <= floor { 0.0 } else { z.norm() })
        .collect();
    if mags.len() < 3 {
        return false;
    }
    let last = mags[mags.len() - 1];
    let tail = &mags[mags.len() - 3..];
    last <= tolerance && tail.windows(2).all(|w| w[1] <= w[0])
}

pub const ASSOCIATION_TOLERANCE: f64 = 1e-2;
const PAIRING_FLOOR_REL: f64 = 1e-10;

fn pairing_row(
    evaluator: &Evaluator,
    eps: &[f64],
    r1: &Representative,
    r2: &Representative,
    net: &NamedOperator,
    name: &str,
    chi: &Distribution,
) -> PairingRow {
    let per_eps: Vec<Result<(f64, Complex64, f64)>> = eps
        .par_iter()
        .map(|&e| {
            let h = OperatorHandle::new(net.operator.clone(), e)?;
            let spec = evaluator.plan(&[r1, r2], &h, &[])?;
            let a = evaluator.eval_on(r1, &h, &[], spec)?;
            let b = evaluator.eval_on(r2, &h, &[], spec)?;
            let c = chi.sample(spec)?;
            let pa = grid::quadrature(&a.mul(&c)?);
            let pb = grid::quadrature(&b.mul(&c)?);
            let d = grid::quadrature(&a.sub(&b)?.mul(&c)?);
            Ok((e, d, PAIRING_FLOOR_REL * (pa.norm() + pb.norm())))
        })
        .collect();
    let mut values = Vec::new();
    let mut floor: f64 = 0.0;
    let mut note = String::new();
    for r in per_eps {
        match r {
            Ok((e, d, f)) => {
                values.push((e, d));
                floor = floor.max(f);
            }
            Err(err) => {
                note = err.to_string();
                break;
            }
        }
    }
    let passed = note.is_empty() && pairing_passes(&values, floor, ASSOCIATION_TOLERANCE);
    PairingRow {
        net: net.id.clone(),
        test_function: name.to_string(),
        values,
        floor,
        passed,
        note,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationReport {
    pub representative: String,
    pub rows: Vec<PairingRow>,
}

pub const PAIRING_CSV_HEADER: &str = "representative,net,test_function,eps,re,im,abs,passed";

impl AssociationReport {
    pub fn passed(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|r| r.passed)
    }

    pub fn csv_rows(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            for (e, z) in &r.values {
                out.push(format!(
                    "{},{},{},{},{:.6e},{:.6e},{:.6e},{}",
                    csv_field(&self.representative),
                    csv_field(&r.net),
                    csv_field(&r.test_function),
                    e,
                    z.re,
                    z.im,
                    z.norm(),
                    r.passed
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InclusionReport {
    pub representative: String,
    pub schwartz_moderate: Verdict,
    pub compact_moderate: Verdict,
    pub schwartz_negligible: VerdictKind,
    pub compact_negligible: VerdictKind,
    pub problems: Vec<String>,
}

impl InclusionReport {
    pub fn consistent(&self) -> bool {
        self.problems.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eps() -> Vec<f64> {
        (2..=9).map(|j| 2f64.powi(-j)).collect()
    }

    #[test]
    fn exact_power_law() {
        let pairs: Vec<_> = eps().iter().map(|&e| (e, e * e)).collect();
        let f = fit_order(&pairs).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        let flat: Vec<_> = eps().iter().map(|&e| (e, 3.0)).collect();
        assert!(fit_order(&flat).unwrap().slope.abs() < 1e-12);
    }

    #[test]
    fn noisy_power_law() {
        let pairs: Vec<_> = eps()
            .iter()
            .map(|&e| (e, e.powi(-2) * (1.0 + 0.1 * (1.0 / e).sin())))
            .collect();
        let f = fit_order(&pairs).unwrap();
        assert!((f.slope + 2.0).abs() < 0.15);
    }

    #[test]
    fn zeros_and_short_series() {
        let z: Vec<_> = eps().iter().map(|&e| (e, 0.0)).collect();
        assert!(fit_order(&z).unwrap().is_sentinel());
        let mut tail = vec![(0.25, 1e-3), (0.125, 1e-9), (0.0625, 0.0), (0.03125, 0.0)];
        assert!(fit_order(&tail).unwrap().is_sentinel());
        tail.truncate(3);
        assert!(matches!(fit_order(&tail), Err(Error::TooFewPoints(3))));
        let gaps = vec![(0.25, 0.0), (0.125, 1.0), (0.0625, 0.0), (0.03125, 1.0)];
        assert!(matches!(fit_order(&gaps), Err(Error::TooFewPoints(2))));
    }

    fn row(net: &str, slope: f64) -> EvidenceRow {
        let values: Vec<_> = [0.25f64, 0.125, 0.0625, 0.03125]
            .iter()
            .map(|&e| (e, e.powf(slope)))
            .collect();
        EvidenceRow {
            representative: "r".into(),
            seminorm: "S(a=0,b=0)".into(),
            net: net.into(),
            perturbations: vec![],
            fit: Some(fit_order(&values).unwrap()),
            values,
            note: String::new(),
        }
    }

    #[test]
    fn verdict_rules() {
        let caps = Caps::default();
        assert_eq!(
            classify_moderate(vec![row("a", -2.0), row("b", -2.1)], caps).kind,
            VerdictKind::Moderate(2)
        );
        assert_eq!(
            classify_moderate(vec![row("a", 0.5)], caps).kind,
            VerdictKind::Moderate(0)
        );
        assert!(matches!(
            classify_moderate(vec![row("a", -9.5)], caps).kind,
            VerdictKind::Inconclusive(_)
        ));
        assert!(matches!(
            classify_moderate(vec![row("a", -2.0), row("b", -3.0)], caps).kind,
            VerdictKind::Inconclusive(_)
        ));
        assert_eq!(
            classify_negligible(vec![row("a", 4.0)], caps).kind,
            VerdictKind::Negligible(4)
        );
        assert!(matches!(
            classify_negligible(vec![row("a", -2.0)], caps).kind,
            VerdictKind::NotNegligible(_)
        ));
        assert!(matches!(
            classify_negligible(vec![row("a", 2.0)], caps).kind,
            VerdictKind::Inconclusive(_)
        ));
        assert!(matches!(
            classify_negligible(vec![], caps).kind,
            VerdictKind::Inconclusive(_)
        ));
    }

    #[test]
    fn negligible_implies_moderate() {
        let caps = Caps::default();
        let rows = vec![row("a", 4.5), row("b", 4.3)];
        assert!(classify_negligible(rows.clone(), caps).is_negligible());
        assert_eq!(classify_moderate(rows, caps).kind, VerdictKind::Moderate(0));
    }

    #[test]
    fn pairing_rule() {
        let z = |v: f64| Complex64::new(v, 0.0);
        let ok = vec![
            (0.25, z(0.1)),
            (0.125, z(0.02)),
            (0.0625, z(0.005)),
            (0.03125, z(0.001)),
        ];
        assert!(pairing_passes(&ok, 0.0, 1e-2));
        let up = vec![
            (0.25, z(0.1)),
            (0.125, z(0.001)),
            (0.0625, z(0.002)),
            (0.03125, z(0.003)),
        ];
        assert!(!pairing_passes(&up, 0.0, 1e-2));
        let noise = vec![
            (0.25, z(1e-3)),
            (0.125, z(1e-14)),
            (0.0625, z(3e-14)),
            (0.03125, z(2e-14)),
        ];
        assert!(pairing_passes(&noise, 1e-12, 1e-2));
    }

    #[test]
    fn repetition_combinations() {
        assert_eq!(combinations_with_repetition(3, 0).len(), 1);
        assert_eq!(combinations_with_repetition(3, 1).len(), 3);
        assert_eq!(combinations_with_repetition(3, 2).len(), 6);
    }

    proptest! {
        #[test]
        fn fit_is_scale_equivariant(c in 1e-6f64..1e6, p in -6.0f64..6.0) {
            let pairs: Vec<_> = eps().iter().map(|&e| (e, e.powf(p) * (1.0 + 0.05 * (7.0 * e).sin()))).collect();
            let scaled: Vec<_> = pairs.iter().map(|&(e, v)| (e, c * v)).collect();
            let a = fit_order(&pairs).unwrap();
            let b = fit_order(&scaled).unwrap();
            prop_assert!((a.slope - b.slope).abs() < 1e-9);
            prop_assert!((b.intercept - a.intercept - c.ln()).abs() < 1e-9);
        }
    }
}
