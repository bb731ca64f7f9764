use colombeau::catalog::Distribution;
use colombeau::expr::{iota_named, sigma_labeled, sigma_named};
use colombeau::fourier::smoke_set;
use colombeau::Workbench;
use num_complex::Complex64;

#[test]
fn smooth_times_delta_is_associated_to_the_value_at_zero() {
    let wb = Workbench::standard().unwrap();
    let f = sigma_labeled(Distribution::gaussian(1.0, 0.5, 1.0), "gauss(c=0.5)").unwrap();
    let d = iota_named("delta").unwrap();
    let f0 = Complex64::new((-0.25f64).exp(), 0.0);
    let report = wb.quotient().check_associated(&f.mul(d.clone()), &d.scale(f0));
    assert!(report.passed(), "{:?}", report.rows.iter().find(|r| !r.passed));
}

#[test]
fn heaviside_squared_is_associated_to_heaviside() {
    let wb = Workbench::standard().unwrap();
    let h = iota_named("heaviside").unwrap();
    let report = wb.quotient().check_associated(&h.clone().mul(h.clone()), &h);
    assert!(report.passed(), "{:?}", report.rows.iter().find(|r| !r.passed));
}

#[test]
fn constant_embeddings_are_associated() {
    let wb = Workbench::standard().unwrap();
    let report = wb.quotient().check_associated(&iota_named("one").unwrap(), &sigma_named("one").unwrap());
    assert!(report.passed());
}

#[test]
fn delta_squared_is_not_associated_to_delta() {
    let wb = Workbench::standard().unwrap();
    let d = iota_named("delta").unwrap();
    let report = wb.quotient().check_associated(&d.clone().mul(d.clone()), &d);
    assert!(!report.passed());
}

#[test]
fn schwartz_verdicts_carry_over_to_compact_sets() {
    let wb = Workbench::standard().unwrap();
    let q = wb.quotient();
    for r in smoke_set() {
        let inc = q.check_inclusion(&r);
        assert!(inc.consistent(), "{}: {:?}", inc.representative, inc.problems);
    }
}
