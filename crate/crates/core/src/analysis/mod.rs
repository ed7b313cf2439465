//! Trace model, rate estimation, certificate checks and multi-seed statistics.

mod certificates;
mod identities;
mod rates;
mod sequences;
mod stats;
mod summary;
mod trace;

pub use certificates::{
    check_divergence_bound, check_regret_certificate, check_residual_bound,
    check_residual_identity, check_step_monotone, CertificateReport, CERTIFICATE_SLACK,
    IDENTITY_TOL, RESIDUAL_SLACK,
};
pub use identities::{
    check_gradient_fd, check_prox_mirror_consistency, check_three_point_identity,
    prox_mirror_defect, random_step, three_point_defect, IdentityReport,
};
pub use rates::{
    default_window, fit_rate, fit_series, gap_series, GapField, RateFit, CONVERGED_GAP,
};
pub use sequences::{
    check_sequence_lemmas, check_sequence_lemmas_scaled, evaluate_all, offset_log_bound,
    offset_sqrt_bounds, one_plus_log_bound, random_sequence, ratio_log_bound, sqrt_sum_bounds,
    LemmaEval, SequenceLemmaReport, LEMMA_REL_SLACK, MAX_SEQUENCE_LEN,
};
pub use stats::{summarize_multiseed, MeanCi, MultiSeedStats, SeedStatsRow, Z_95};
pub use summary::{summarize_run, FieldFit, FinalValues, RunMeta, RunSummary};
pub use trace::{write_records_csv, Trace, TraceRecord, CSV_HEADER};
