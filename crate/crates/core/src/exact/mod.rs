//! Exact arithmetic in `ℚ(√D)`, the rational embedding `x ↦ A(x)`, the rank
//! statements about block matrices built from it, and the numerical recovery
//! of endomorphism and isogeny matrices from periods.

mod endo;
mod lemmas;
mod matrix;
mod quad;

pub use endo::{solve_endomorphism, solve_isogeny, Endomorphism, Isogeny};
pub use lemmas::{
    check_lemma1, check_lemma2, direct_sum_rank, fuzz_lemmas, hat_matrix_lemma1, hat_matrix_lemma2,
    random_field, random_full_rank, random_lemma1_instance, random_negative_det, random_quad,
    FuzzSummary, RankCheck, RankInstance, FUZZ_DISCRIMINANTS, FUZZ_HEIGHT, FUZZ_MAX_DIM,
};
pub use matrix::RatMatrix;
pub use quad::{rank_over_field, QuadElem, QuadField};
