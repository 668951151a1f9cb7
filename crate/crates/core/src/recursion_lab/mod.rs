//! Recursions, class-𝒫 data, the double correlator and the transformations
//! that preserve class 𝒫.
mod classp;
mod phi;
mod recursion;
mod transform;

pub use classp::*;
pub use phi::{first_non_polynomial, lift, phi_double_correlator, phi_polynomiality_report, phi_weight, q_exp_shift};
pub use recursion::{
    blob_coefficient, cy_coefficient, cy_coefficient_via_localization, equal_m_modified, forward_solve,
    recursion_coeffs, recursion_residuals, two_coefficient_check, verify_recursion, Regime, RecursionCoefficients,
};
pub use transform::{
    inverse_composite, is_one_mod_hbar2, mod_hbar2_expansion, phi_law_check, phi_transformed_by_law, random_transforms,
    transform_family, zstar_mod_hbar2_prediction, Transform,
};
