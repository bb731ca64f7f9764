//! Suite execution and report assembly.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use colombeau::expr::Representative;
use colombeau::fourier::{self, BridgeCalibration, FT_CSV_HEADER, PARSEVAL_TOLERANCE};
use colombeau::mollifier::operator::Operator;
use colombeau::quotient::{
    AssociationReport, QuotientContext, Verdict, VerdictKind, PAIRING_CSV_HEADER,
    VERDICT_CSV_HEADER,
};
use colombeau::verify::{VerificationReport, VERIFY_CSV_HEADER};
use colombeau::Workbench;

use crate::config::{ConfigError, ScenarioConfig, Suite};
use crate::parse::parse_expression;

/// One asserted outcome. `witness` names the seminorm, net and `eps` (or
/// the property row) behind a failure.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: Suite,
    pub subject: String,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvFile {
    pub name: String,
    pub header: String,
    pub rows: Vec<String>,
}

impl CsvFile {
    fn new(name: &str, header: &str) -> Self {
        Self {
            name: name.into(),
            header: header.into(),
            rows: Vec::new(),
        }
    }

    pub fn contents(&self) -> String {
        let mut s = String::with_capacity(64 * (self.rows.len() + 1));
        s.push_str(&self.header);
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Calibration {
    pub bridge: BridgeCalibration,
    /// `|int phi - 1|` of the first net's mollifier.
    pub mass_defect: f64,
    /// `|int y^k phi|`, `k = 1..4`.
    pub moment_defects: [f64; 4],
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub checks: Vec<Check>,
    pub files: Vec<CsvFile>,
    pub calibration: Option<Calibration>,
    /// Wall-clock per suite; printed, never written to data files.
    pub timings: Vec<(Suite, Duration)>,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn file(&self, name: &str) -> Option<&CsvFile> {
        self.files.iter().find(|f| f.name == name)
    }

    pub fn summary_csv(&self) -> CsvFile {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        for c in &self.checks {
            w.write_record([
                c.suite.name(),
                &c.subject,
                &c.expected,
                &c.observed,
                if c.passed { "true" } else { "false" },
                &c.witness,
            ])
            .expect("in-memory csv");
        }
        let bytes = w.into_inner().expect("in-memory csv");
        CsvFile {
            name: "summary.csv".into(),
            header: "suite,subject,expected,observed,passed,witness".into(),
            rows: String::from_utf8(bytes)
                .expect("utf8")
                .lines()
                .map(str::to_string)
                .collect(),
        }
    }

    pub fn calibration_csv(&self) -> Option<CsvFile> {
        let c = self.calibration?;
        let mut f = CsvFile::new("calibration.csv", "quantity,value");
        let mut push = |k: &str, v: f64| f.rows.push(format!("{k},{v:e}"));
        push("dft_gaussian", c.bridge.gaussian);
        push("dft_round_trip", c.bridge.round_trip);
        push("parseval", c.bridge.parseval);
        push("phi_mass_defect", c.mass_defect);
        for (k, m) in c.moment_defects.iter().enumerate() {
            push(&format!("phi_moment_{}", k + 1), *m);
        }
        Some(f)
    }

    /// Every data file of the run, in a fixed order.
    pub fn all_files(&self) -> Vec<CsvFile> {
        let mut v = self.files.clone();
        v.extend(self.calibration_csv());
        v.push(self.summary_csv());
        v
    }

    pub fn write_csv(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for f in self.all_files() {
            std::fs::write(dir.join(&f.name), f.contents())?;
        }
        Ok(())
    }

    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(
                s,
                "{tag} [{}] {}: expected {}, observed {}",
                c.suite.name(),
                c.subject,
                c.expected,
                c.observed
            );
            if !c.passed && !c.witness.is_empty() {
                let _ = writeln!(s, "     witness: {}", c.witness);
            }
        }
        if let Some(c) = self.calibration {
            let _ = writeln!(
                s,
                "calibration: dft gaussian {:.2e}, round trip {:.2e}, parseval {:.2e}, phi mass {:.2e}, moments {:.2e}",
                c.bridge.gaussian,
                c.bridge.round_trip,
                c.bridge.parseval,
                c.mass_defect,
                c.moment_defects.iter().fold(0.0f64, |a, &b| a.max(b))
            );
        }
        for (suite, t) in &self.timings {
            let _ = writeln!(s, "time {}: {:.1}s", suite.name(), t.as_secs_f64());
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(
            s,
            "{} checks, {} failed: {}",
            self.checks.len(),
            failed,
            if failed == 0 { "PASS" } else { "FAIL" }
        );
        s
    }
}

fn parsed(text: &str) -> Representative {
    parse_expression(text).expect("validated with the config")
}

/// Runs the configured suites in a fixed order.
pub fn run(config: &ScenarioConfig) -> Result<RunReport, ConfigError> {
    config.validate()?;
    let mut report = RunReport {
        checks: Vec::new(),
        files: Vec::new(),
        calibration: None,
        timings: Vec::new(),
    };
    if config.suites.is_empty() {
        return Ok(report);
    }
    let wb = config.workbench()?;
    let qc = QuotientContext {
        bank: config.seminorm_bank(),
        ..wb.quotient()
    };
    let phi = wb.psi1.phi();
    report.calibration = Some(Calibration {
        bridge: fourier::calibrate(wb.base).map_err(|e| ConfigError(e.to_string()))?,
        mass_defect: phi.unit_mass_defect(),
        moment_defects: phi.moment_defects(),
    });
    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();
    for suite in suites {
        let t0 = Instant::now();
        match suite {
            Suite::VerifyTestobject => verify_suite(&wb, &mut report),
            Suite::Moderate => moderate_suite(config, &qc, &mut report),
            Suite::Negligible => negligible_suite(config, &qc, &mut report),
            Suite::Associated => associated_suite(config, &qc, &mut report),
            Suite::FtProperties => ft_suite(config, &wb, &mut report)?,
            Suite::Inclusion => inclusion_suite(config, &qc, &mut report),
        }
        report.timings.push((suite, t0.elapsed()));
    }
    Ok(report)
}

fn smoke(config: &ScenarioConfig) -> Vec<Representative> {
    if config.expressions.smoke.is_empty() {
        fourier::smoke_set()
    } else {
        config.expressions.smoke.iter().map(|t| parsed(t)).collect()
    }
}

fn verification_check(
    r: &VerificationReport,
    expected: &str,
    passed: bool,
    observed: String,
) -> Check {
    let witness = r
        .conditions
        .iter()
        .flat_map(|c| c.failures().map(move |row| (c, row)))
        .next()
        .map(|(c, row)| {
            let (e, v) = row.values.last().copied().unwrap_or((f64::NAN, f64::NAN));
            format!(
                "condition {} input {} probe {} slope {:.3} eps {e} value {v:.3e} {}",
                c.condition, row.input, row.probe, row.slope, row.note
            )
            .trim_end()
            .to_string()
        })
        .unwrap_or_default();
    Check {
        suite: Suite::VerifyTestobject,
        subject: r.object.clone(),
        expected: expected.into(),
        observed,
        passed,
        witness,
    }
}

fn conditions_summary(r: &VerificationReport) -> String {
    r.conditions
        .iter()
        .map(|c| format!("{}:{}", c.condition, if c.passed { "ok" } else { "fail" }))
        .collect::<Vec<_>>()
        .join(" ")
}

fn verify_suite(wb: &Workbench, report: &mut RunReport) {
    let verifier = wb.verifier();
    let mut csv = CsvFile::new("verify.csv", VERIFY_CSV_HEADER);
    for net in &wb.nets {
        let r = verifier.verify_test_object(net);
        csv.rows.extend(r.csv_rows());
        report.checks.push(verification_check(
            &r,
            "test object",
            r.passed(),
            conditions_summary(&r),
        ));
    }
    for z in &wb.zero {
        let r = verifier.verify_zero_test_object(z);
        csv.rows.extend(r.csv_rows());
        report.checks.push(verification_check(
            &r,
            "0-test object",
            r.passed(),
            conditions_summary(&r),
        ));
    }
    // the eps-scaled Gaussian mollifier must be caught at third order
    if let Ok(g) = wb.gaussian_net() {
        let named = colombeau::quotient::NamedOperator::new(g.id(), Operator::kernel(&g));
        let r = verifier.verify_test_object(&named);
        csv.rows.extend(r.csv_rows());
        let worst = r
            .condition("iii")
            .map(|c| c.rows.iter().map(|row| row.slope).fold(f64::INFINITY, f64::min))
            .unwrap_or(f64::NAN);
        let rejected = r.condition("iii").is_some_and(|c| !c.passed) && worst <= 2.3;
        let mut c = verification_check(
            &r,
            "rejected at condition iii (slope <= 2.3)",
            rejected,
            format!("{} worst iii slope {worst:.3}", conditions_summary(&r)),
        );
        if rejected {
            c.witness.clear();
        }
        report.checks.push(c);
    }
    report.files.push(csv);
}

/// Row with the smallest slope, as the witness of a verdict.
fn verdict_witness(v: &Verdict) -> String {
    if let VerdictKind::NotNegligible(w) = &v.kind {
        return format!("seminorm {} net {} l={} slope {:.3}", w.seminorm, w.net, w.l(), w.slope());
    }
    v.evidence
        .iter()
        .filter(|r| r.fit.is_some())
        .min_by(|a, b| a.slope().total_cmp(&b.slope()))
        .map(|r| {
            let eps = r.values.last().map(|p| p.0).unwrap_or(f64::NAN);
            format!(
                "seminorm {} net {} l={} slope {:.3} last eps {eps}",
                r.seminorm,
                r.net,
                r.l(),
                r.slope()
            )
        })
        .or_else(|| v.evidence.first().map(|r| r.note.clone()))
        .unwrap_or_default()
}

fn verdict_check(suite: Suite, subject: &str, expected: &str, v: &Verdict, passed: bool) -> Check {
    Check {
        suite,
        subject: subject.into(),
        expected: expected.into(),
        observed: v.kind.to_string(),
        passed,
        witness: if passed { String::new() } else { verdict_witness(v) },
    }
}

fn moderate_suite(config: &ScenarioConfig, qc: &QuotientContext, report: &mut RunReport) {
    let mut csv = CsvFile::new("moderate.csv", VERDICT_CSV_HEADER);
    for text in &config.expressions.moderate {
        let v = qc.check_moderate(&parsed(text));
        csv.rows.extend(v.csv_rows());
        report
            .checks
            .push(verdict_check(Suite::Moderate, text, "Moderate", &v, v.is_moderate()));
    }
    report.files.push(csv);
}

fn negligible_suite(config: &ScenarioConfig, qc: &QuotientContext, report: &mut RunReport) {
    let mut csv = CsvFile::new("negligible.csv", VERDICT_CSV_HEADER);
    for text in &config.expressions.negligible {
        let v = qc.check_negligible(&parsed(text));
        csv.rows.extend(v.csv_rows());
        report.checks.push(verdict_check(
            Suite::Negligible,
            text,
            "Negligible",
            &v,
            v.is_negligible(),
        ));
    }
    for text in &config.expressions.not_negligible {
        let v = qc.check_negligible(&parsed(text));
        csv.rows.extend(v.csv_rows());
        let ok = matches!(v.kind, VerdictKind::NotNegligible(_));
        let mut c = verdict_check(Suite::Negligible, text, "NotNegligible", &v, ok);
        if ok {
            c.witness = verdict_witness(&v);
        }
        report.checks.push(c);
    }
    report.files.push(csv);
}

fn association_witness(a: &AssociationReport) -> String {
    a.rows
        .iter()
        .find(|r| !r.passed)
        .or_else(|| a.rows.first())
        .map(|r| {
            let (e, z) = r.values.last().copied().unwrap_or_default();
            format!(
                "net {} test function {} eps {e} pairing {:.3e} {}",
                r.net,
                r.test_function,
                z.norm(),
                r.note
            )
            .trim_end()
            .to_string()
        })
        .unwrap_or_default()
}

fn associated_suite(config: &ScenarioConfig, qc: &QuotientContext, report: &mut RunReport) {
    let mut csv = CsvFile::new("association.csv", PAIRING_CSV_HEADER);
    let cases = config
        .expressions
        .associated
        .iter()
        .map(|p| (p, true))
        .chain(config.expressions.not_associated.iter().map(|p| (p, false)));
    for ([a, b], expect) in cases {
        let r = qc.check_associated(&parsed(a), &parsed(b));
        csv.rows.extend(r.csv_rows());
        let assoc = r.passed();
        report.checks.push(Check {
            suite: Suite::Associated,
            subject: format!("{a} ~ {b}"),
            expected: if expect { "associated" } else { "not associated" }.into(),
            observed: if assoc { "associated" } else { "not associated" }.into(),
            passed: assoc == expect,
            witness: association_witness(&r),
        });
    }
    report.files.push(csv);
}

fn ft_suite(config: &ScenarioConfig, wb: &Workbench, report: &mut RunReport) -> Result<(), ConfigError> {
    let mut cases =
        fourier::property_cases(&smoke(config)).map_err(|e| ConfigError(e.to_string()))?;
    let wanted = &config.fourier.properties;
    if !wanted.is_empty() {
        cases.retain(|c| wanted.iter().any(|w| w == c.property.id()));
    }
    let ft = fourier::check_ft_properties(
        &wb.evaluator(),
        &Operator::kernel(&wb.psi1),
        &cases,
        wb.eps.kernel_valid(),
    )
    .map_err(|e| ConfigError(e.to_string()))?;
    let mut csv = CsvFile::new("ft_properties.csv", FT_CSV_HEADER);
    csv.rows.extend(ft.csv_rows());
    report.checks.push(Check {
        suite: Suite::FtProperties,
        subject: "Parseval bridge".into(),
        expected: format!("<= {PARSEVAL_TOLERANCE:e}"),
        observed: format!("{:e}", ft.calibration.parseval),
        passed: ft.calibration.parseval <= PARSEVAL_TOLERANCE,
        witness: String::new(),
    });
    for case in &cases {
        let label = case.label();
        let rows: Vec<_> = ft
            .rows
            .iter()
            .filter(|r| r.property == case.property && r.representative == label)
            .collect();
        let worst = rows
            .iter()
            .max_by(|a, b| a.sup_error.total_cmp(&b.sup_error).then(std::cmp::Ordering::Greater))
            .copied();
        let passed = rows.iter().all(|r| r.passed);
        let witness = rows
            .iter()
            .find(|r| !r.passed)
            .map(|r| {
                format!(
                    "property {} eps {} sup error {:e} (sup of values {:e}) {}",
                    r.property.id(),
                    r.eps,
                    r.sup_error,
                    r.reference_sup,
                    r.note
                )
                .trim_end()
                .to_string()
            })
            .unwrap_or_default();
        report.checks.push(Check {
            suite: Suite::FtProperties,
            subject: format!("({}) {label}", case.property.id()),
            expected: format!("sup error <= {:e}", case.threshold),
            observed: worst
                .map(|r| format!("max sup error {:e}", r.sup_error))
                .unwrap_or_else(|| "no rows".into()),
            passed,
            witness,
        });
    }
    report.files.push(csv);
    Ok(())
}

fn inclusion_suite(config: &ScenarioConfig, qc: &QuotientContext, report: &mut RunReport) {
    let mut csv = CsvFile::new("inclusion.csv", VERDICT_CSV_HEADER);
    for r in smoke(config) {
        let inc = qc.check_inclusion(&r);
        csv.rows.extend(inc.schwartz_moderate.csv_rows());
        csv.rows.extend(inc.compact_moderate.csv_rows());
        report.checks.push(Check {
            suite: Suite::Inclusion,
            subject: inc.representative.clone(),
            expected: "compact verdict implied by Schwartz verdict".into(),
            observed: format!(
                "S {} / K {}; S {} / K {}",
                inc.schwartz_moderate.kind,
                inc.compact_moderate.kind,
                inc.schwartz_negligible,
                inc.compact_negligible
            ),
            passed: inc.consistent(),
            witness: inc.problems.join("; "),
        });
    }
    report.files.push(csv);
}
