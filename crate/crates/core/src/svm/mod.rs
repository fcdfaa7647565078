//! Polynomial-kernel SVM: SMO-trained binary machines combined one-vs-one
//! by hard voting.

mod kernel;
mod multiclass;
mod normalize;
mod smo;

pub use kernel::{gram_matrix, poly_kernel, KernelParams};
pub use multiclass::{
    class_pairs, predict, train_multiclass, train_multiclass_rows, PairModel, Prediction,
    SvmConfig, SvmModel,
};
pub use normalize::NormalizationParams;
pub use smo::{
    dual_objective, solve_dual, train_binary_smo, verify_kkt, BinaryModel, DualSolution, KktReport,
    SmoSettings, DEFAULT_MAX_PASSES, SUPPORT_THRESHOLD,
};
