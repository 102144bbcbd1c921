//! Elimination of chosen zeta values by combining forms over the divisors of `D`.

pub mod combined;
pub mod plan;
pub mod vandermonde;
pub mod weights;

pub use combined::{combined_form, eliminated_form, CombinedForm, EliminatedForm};
pub use plan::{plan_parameters, PlanReport};
pub use vandermonde::{bareiss_det, gen_vandermonde_det, schur_positivity_check};
pub use weights::{default_indices, solve_weights, EliminationPlan};
