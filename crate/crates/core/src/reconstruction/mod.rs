//! Reconstruction from random measurements on the line.

pub mod correction;
pub mod embedding;
pub mod est;

pub use crate::determination::triangle_equality;
pub use correction::{
    correct_distances, disagreement_profile, explains, make_adversarial_corruption, make_random_corruption,
    shifted_configuration, vote_pairs, CorrectionOutcome, CorruptionKind, CorruptionSpec,
};
pub use embedding::{
    algorithm1, algorithm1_with_rounds, default_rounds, int_set, isometry_match, EmbeddingResult, EmbeddingStatus,
    RoundDiagnostics,
};
pub use est::{est_from, EstTable, MeasurementGraph};
