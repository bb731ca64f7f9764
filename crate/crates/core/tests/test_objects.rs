use colombeau::expr::iota_named;
use colombeau::mollifier::{Operator, ZeroSource};
use colombeau::quotient::NamedOperator;
use colombeau::verify::make_zero_test_object;
use colombeau::{Error, Workbench};

#[test]
fn default_nets_are_test_objects() {
    let wb = Workbench::standard().unwrap();
    let v = wb.verifier();
    for net in &wb.nets {
        let report = v.verify_test_object(net);
        for c in &report.conditions {
            assert!(c.passed, "{} fails {}: {:?}", net.id, c.condition, c.failures().next());
        }
    }
}

#[test]
fn gaussian_mollifier_stops_at_second_order() {
    let wb = Workbench::standard().unwrap();
    let g = wb.gaussian_net().unwrap();
    let report = wb.verifier().verify_test_object(&NamedOperator::new("gaussian", Operator::kernel(&g)));
    let rate = report.condition("iii").unwrap();
    assert!(!rate.passed);
    let worst = rate.rows.iter().map(|r| r.slope).fold(f64::INFINITY, f64::min);
    assert!(worst <= 2.3 && worst > 1.7, "{worst}");
    assert!(report.condition("ii").unwrap().passed);
}

#[test]
fn zero_operator_is_no_test_object() {
    let wb = Workbench::standard().unwrap();
    let report = wb.verifier().verify_test_object(&NamedOperator::new("0", Operator::Zero));
    assert!(!report.condition("ii").unwrap().passed);
}

#[test]
fn zero_test_objects_are_accepted() {
    let wb = Workbench::standard().unwrap();
    let v = wb.verifier();
    for z in &wb.zero {
        let report = v.verify_zero_test_object(z);
        assert!(report.passed(), "{}: {:?}", z.id, report.conditions.iter().flat_map(|c| c.failures()).next());
    }
}

#[test]
fn identity_minus_itself_is_the_zero_operator() {
    let wb = Workbench::standard().unwrap();
    let (z, _) = make_zero_test_object(&ZeroSource::Difference(wb.psi1.clone(), wb.psi1.clone()), &wb.verifier()).unwrap();
    assert!(matches!(z.operator, Operator::Zero));
}

#[test]
fn test_object_is_rejected_as_zero_test_object() {
    let wb = Workbench::standard().unwrap();
    let phi = NamedOperator::new("psi1", Operator::kernel(&wb.psi1));
    let report = wb.verifier().verify_zero_test_object(&phi);
    assert!(!report.condition("ii").unwrap().passed);
    assert!(!report.condition("iii").unwrap().passed);
}

#[test]
fn conjugated_net_keeps_tempered_conditions_only() {
    let wb = Workbench::standard().unwrap();
    let op = Operator::kernel(&wb.psi1).frequency();
    let report = wb.frequency_verifier().verify_test_object(&NamedOperator::new("Fpsi1Finv", op));
    for c in ["ii", "iii", "iv"] {
        let c = report.condition(c).unwrap();
        assert!(c.passed, "{}: {:?}", c.condition, c.failures().next());
    }
    let local = report.condition("iv-local").unwrap();
    assert!(!local.passed);
    assert!(local.rows.iter().all(|r| r.note.contains("not evaluable")));
}

#[test]
fn epsilon_off_the_grid_is_rejected() {
    let wb = Workbench::standard().unwrap();
    let d = iota_named("delta").unwrap();
    let res = wb.handle(0.3).and_then(|h| wb.evaluator().eval(&d, &h));
    assert!(matches!(res, Err(Error::InvalidEpsilon(_))), "{res:?}");
}
