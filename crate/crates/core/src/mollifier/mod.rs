//! Cutoff, mollifier and the test-object nets built from them.

pub mod cutoff;
pub mod net;
pub mod operator;
pub mod phi;
pub mod zero;

pub use cutoff::{build_cutoff, build_cutoff_with, CutoffFunction, TransitionProfile};
pub use net::{KernelWidth, NetConfig, TestObjectNet};
pub use operator::{
    apply, conjugate_handle, CommutatorKind, DomainTag, GridNeeds, Operator, OperatorHandle,
    Transform,
};
pub use phi::{build_phi, mollifier_grid, MollifierPhi, MollifierProfile};
pub use zero::{ZeroOrigin, ZeroSource, ZeroTestObject};
