use colombeau::expr::{iota_named, sigma_named};
use colombeau::quotient::{EvidenceRow, VerdictKind};
use colombeau::Workbench;

fn sup_row(rows: &[EvidenceRow]) -> &EvidenceRow {
    rows.iter()
        .find(|r| r.seminorm == "S(a=0,b=0)" && r.net == "psi1" && r.l() == 0)
        .expect("sup seminorm row")
}

/// Trapezoid rule for `int psi`, the peak `phi(0)` of the mollifier.
fn cutoff_mass(wb: &Workbench) -> f64 {
    let c = wb.psi1.cutoff();
    let n = 200_000;
    let r = c.support_radius();
    let h = 2.0 * r / n as f64;
    (0..=n)
        .map(|j| {
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            w * c.eval(-r + j as f64 * h)
        })
        .sum::<f64>()
        * h
}

#[test]
fn delta_is_moderate_with_kernel_peak_growth() {
    let wb = Workbench::standard().unwrap();
    let v = wb.quotient().check_moderate(&iota_named("delta").unwrap());
    assert!(v.is_moderate(), "{}", v.kind);
    let row = sup_row(&v.evidence);
    assert!((row.slope() + 2.0).abs() <= 0.25, "{}", row.slope());
    let peak = cutoff_mass(&wb);
    for &(e, val) in &row.values {
        let oracle = peak / (e * e);
        assert!((val - oracle).abs() <= 1e-6 * oracle, "eps {e}: {val} vs {oracle}");
    }
}

#[test]
fn delta_squared_is_moderate_with_doubled_growth() {
    let wb = Workbench::standard().unwrap();
    let d = iota_named("delta").unwrap();
    let v = wb.quotient().check_moderate(&d.clone().mul(d));
    assert!(v.is_moderate(), "{}", v.kind);
    let row = sup_row(&v.evidence);
    assert!((row.slope() + 4.0).abs() <= 0.4, "{}", row.slope());
    let peak = cutoff_mass(&wb);
    for &(e, val) in &row.values {
        let oracle = (peak / (e * e)).powi(2);
        assert!((val - oracle).abs() <= 1e-6 * oracle, "eps {e}: {val} vs {oracle}");
    }
}

#[test]
fn embeddings_agree_on_smooth_functions() {
    let wb = Workbench::standard().unwrap();
    let r = iota_named("gauss").unwrap().sub(sigma_named("gauss").unwrap());
    let v = wb.quotient().check_negligible(&r);
    assert_eq!(v.kind, VerdictKind::Negligible(4), "{}", v.kind);
    assert!(v.evidence.iter().any(|r| r.l() == 2));
}

#[test]
fn embeddings_differ_on_constants_in_the_schwartz_bank() {
    let wb = Workbench::standard().unwrap();
    let r = iota_named("one").unwrap().sub(sigma_named("one").unwrap());
    let v = wb.quotient().check_negligible(&r);
    match &v.kind {
        VerdictKind::NotNegligible(w) => assert!(w.slope() < 1.0 && w.seminorm.starts_with('S'), "{w:?}"),
        other => panic!("{other}"),
    }
}

#[test]
fn delta_is_not_negligible() {
    let wb = Workbench::standard().unwrap();
    let v = wb.quotient().check_negligible(&iota_named("delta").unwrap());
    assert!(matches!(v.kind, VerdictKind::NotNegligible(_)), "{}", v.kind);
}

#[test]
fn verdict_csv_is_stable() {
    let wb = Workbench::standard().unwrap();
    let r = iota_named("gauss").unwrap().sub(sigma_named("gauss").unwrap());
    let a = wb.quotient().check_negligible(&r).csv_rows();
    let b = wb.quotient().check_negligible(&r).csv_rows();
    assert_eq!(a, b);
    assert!(!a.is_empty());
}
