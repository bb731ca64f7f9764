//! Default nets, perturbations and banks wired together.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::Evaluator;
use crate::grid::{make_grid, GridSpec};
use crate::mollifier::cutoff::{build_cutoff_with, TransitionProfile};
use crate::mollifier::net::{NetConfig, TestObjectNet};
use crate::mollifier::operator::{CommutatorKind, Operator, OperatorHandle};
use crate::mollifier::zero::{ZeroSource, ZeroTestObject};
use crate::quotient::{Caps, EpsilonGrid, NamedOperator, QuotientContext, SeminormBank};
use crate::verify::{pairing_bank, VerificationBanks, Verifier};

#[derive(Debug, Clone)]
pub struct Workbench {
    pub base: GridSpec,
    pub eps: EpsilonGrid,
    pub caps: Caps,
    pub psi1: Arc<TestObjectNet>,
    pub psi2: Arc<TestObjectNet>,
    /// `S`: one net per cutoff profile.
    pub nets: Vec<NamedOperator>,
    /// `S^0`: difference net and the two commutator images.
    pub zero: Vec<NamedOperator>,
}

impl Workbench {
    /// `L = 32`, `N = 4096`, `eps in {2^-2, ..., 2^-9}`.
    pub fn standard() -> Result<Self> {
        Self::new(
            make_grid(32.0, 4096)?,
            EpsilonGrid::standard(),
            Caps::default(),
        )
    }

    pub fn new(base: GridSpec, eps: EpsilonGrid, caps: Caps) -> Result<Self> {
        Self::with_profiles(
            base,
            eps,
            caps,
            [TransitionProfile::Standard, TransitionProfile::Steep],
        )
    }

    /// Nets `psi1`, `psi2` built from the two cutoff transition profiles.
    pub fn with_profiles(
        base: GridSpec,
        eps: EpsilonGrid,
        caps: Caps,
        profiles: [TransitionProfile; 2],
    ) -> Result<Self> {
        if profiles[0] == profiles[1] {
            return Err(Error::Invalid(
                "the two nets need distinct cutoff profiles".into(),
            ));
        }
        let psi1 = TestObjectNet::new(
            "psi1",
            NetConfig::standard(build_cutoff_with(profiles[0])),
            eps.values().to_vec(),
        )?;
        let psi2 = TestObjectNet::new(
            "psi2",
            NetConfig::standard(build_cutoff_with(profiles[1])),
            eps.values().to_vec(),
        )?;
        let nets = vec![
            NamedOperator::new("psi1", Operator::kernel(&psi1)),
            NamedOperator::new("psi2", Operator::kernel(&psi2)),
        ];
        let zero = [
            ZeroSource::Difference(psi1.clone(), psi2.clone()),
            ZeroSource::Commutator(psi1.clone(), CommutatorKind::Derivative(1)),
            ZeroSource::Commutator(psi1.clone(), CommutatorKind::MulCoordinate),
        ]
        .iter()
        .map(|s| {
            let z = ZeroTestObject::from_source(s);
            NamedOperator::new(z.id, z.operator)
        })
        .collect();
        Ok(Self {
            base,
            eps,
            caps,
            psi1,
            psi2,
            nets,
            zero,
        })
    }

    pub fn evaluator(&self) -> Evaluator {
        Evaluator::new(self.base)
    }

    pub fn handle(&self, eps: f64) -> Result<OperatorHandle> {
        OperatorHandle::new(Operator::kernel(&self.psi1), eps)
    }

    pub fn frequency_handle(&self, eps: f64) -> Result<OperatorHandle> {
        OperatorHandle::new(Operator::kernel(&self.psi1).frequency(), eps)
    }

    pub fn quotient(&self) -> QuotientContext {
        QuotientContext {
            evaluator: self.evaluator(),
            eps: self.eps.clone(),
            nets: self.nets.clone(),
            zero: self.zero.clone(),
            bank: SeminormBank::moderate_default(),
            pairing_bank: pairing_bank(),
            caps: self.caps,
        }
    }

    /// Same families conjugated to the frequency side, `F o Phi o F^{-1}`.
    pub fn frequency_quotient(&self) -> QuotientContext {
        let conj = |v: &[NamedOperator]| -> Vec<NamedOperator> {
            v.iter()
                .map(|n| NamedOperator::new(format!("F{}Finv", n.id), n.operator.frequency()))
                .collect()
        };
        QuotientContext {
            nets: conj(&self.nets),
            zero: conj(&self.zero),
            ..self.quotient()
        }
    }

    pub fn verifier(&self) -> Verifier {
        Verifier {
            evaluator: self.evaluator(),
            eps: self.eps.clone(),
            banks: VerificationBanks::standard(),
        }
    }

    /// Verifier for `F o Phi o F^{-1}` nets.
    pub fn frequency_verifier(&self) -> Verifier {
        Verifier { banks: VerificationBanks::tempered(), ..self.verifier() }
    }

    /// The `eps`-scaled Gaussian mollifier without inner truncation.
    pub fn gaussian_net(&self) -> Result<Arc<TestObjectNet>> {
        TestObjectNet::new(
            "gaussian",
            NetConfig::gaussian(),
            self.eps.values().to_vec(),
        )
    }
}
