//! Reduction of automorphisms over `S` to coordinate systems over `R`.

mod certificate;
mod ia_ops;
mod n2;
mod pipeline;

pub use certificate::{
    evaluate_checks, y_images, Certificate, CertificateJson, Checks, ReductionStep, StepKind,
    VerifyReport,
};
pub use ia_ops::{
    alpha_push, box_check, check_ga_tau, crucial_reduce, ia_evidence, ia_reduce, ia_rho_conjugate,
    same_map, strong_ia_reduce, strong_ia_reduce_to, taylor_gap, CrucialReduction, StrongReduction,
    BOX_EXHAUSTIVE_LIMIT, BOX_SAMPLES,
};
pub use n2::{n2_reduce, N2Reduction};
pub use pipeline::{at2_pipeline, at2_stages, check_mt1_hypotheses, mt1_pipeline, Mt1Stage};
