//! 0-test objects: differences of test objects and commutator images.

use std::sync::Arc;

use num_complex::Complex64;

use super::net::TestObjectNet;
use super::operator::{CommutatorKind, Operator};

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroOrigin {
    DifferenceOfTestObjects { first: String, second: String },
    Commutator(CommutatorKind),
}

#[derive(Debug, Clone)]
pub struct ZeroTestObject {
    pub id: String,
    pub origin: ZeroOrigin,
    pub operator: Operator,
}

#[derive(Debug, Clone)]
pub enum ZeroSource {
    Difference(Arc<TestObjectNet>, Arc<TestObjectNet>),
    Commutator(Arc<TestObjectNet>, CommutatorKind),
}

impl ZeroTestObject {
    /// Builds the operator without numeric verification.
    pub fn from_source(source: &ZeroSource) -> Self {
        match source {
            ZeroSource::Difference(a, b) => {
                let operator = if Arc::ptr_eq(a, b) || a.id() == b.id() && a.config() == b.config()
                {
                    Operator::Zero
                } else {
                    Operator::kernel(a).plus(Complex64::new(-1.0, 0.0), &Operator::kernel(b))
                };
                ZeroTestObject {
                    id: format!("{}-{}", a.id(), b.id()),
                    origin: ZeroOrigin::DifferenceOfTestObjects {
                        first: a.id().into(),
                        second: b.id().into(),
                    },
                    operator,
                }
            }
            ZeroSource::Commutator(n, t) => {
                let name = match t {
                    CommutatorKind::Derivative(1) => "D".to_string(),
                    CommutatorKind::Derivative(k) => format!("D^{k}"),
                    CommutatorKind::MulCoordinate => "M".to_string(),
                };
                ZeroTestObject {
                    id: format!("[{name},{}]", n.id()),
                    origin: ZeroOrigin::Commutator(*t),
                    operator: Operator::kernel(n).commutator(*t),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mollifier::cutoff::build_cutoff;
    use crate::mollifier::net::NetConfig;

    #[test]
    fn same_net_difference_is_zero() {
        let n = TestObjectNet::new(
            "psi1",
            NetConfig::standard(build_cutoff()),
            vec![0.25, 0.125],
        )
        .unwrap();
        let z = ZeroTestObject::from_source(&ZeroSource::Difference(n.clone(), n.clone()));
        assert!(matches!(z.operator, Operator::Zero));
        let c =
            ZeroTestObject::from_source(&ZeroSource::Commutator(n, CommutatorKind::Derivative(1)));
        assert_eq!(c.id, "[D,psi1]");
    }
}
