//! Centralized numerical tolerances.
//!
//! Values are floors calibrated for `f64`; for wider-epsilon scalars the
//! tolerance scales up with the type's machine epsilon so the same checks
//! stay meaningful under `f32`.

use crate::scalar::{real, Scalar};

fn floored<T: Scalar>(floor: f64) -> T {
    let eps_scaled = T::epsilon() * real::<T>(100.0);
    real::<T>(floor).max(eps_scaled)
}

/// State-vector norm drift allowed after gate applications.
pub fn norm<T: Scalar>() -> T {
    floored(1e-10)
}

/// Max-entry deviation allowed in the unitarity check `U†U = I`.
pub fn unitarity<T: Scalar>() -> T {
    floored(1e-10)
}

/// Post-selection outcomes below this probability are treated as failures.
pub fn postselect_min<T: Scalar>() -> T {
    floored(1e-12)
}

/// Threshold under which a determinant or pivot counts as singular.
pub fn singular<T: Scalar>() -> T {
    floored(1e-12)
}

/// Threshold under which a right-hand side counts as identically zero.
pub fn zero_rhs<T: Scalar>() -> T {
    floored(1e-12)
}

/// Allowed asymmetry when deciding whether a matrix is hermitian.
pub fn symmetry<T: Scalar>() -> T {
    floored(1e-12)
}

#[cfg(test)]
mod tests {
    #[test]
    fn f64_floors_match_contract() {
        assert_eq!(super::norm::<f64>(), 1e-10);
        assert_eq!(super::postselect_min::<f64>(), 1e-12);
    }

    #[test]
    fn f32_tolerances_scale_with_epsilon() {
        assert!(super::norm::<f32>() > 1e-6);
        assert!(super::norm::<f32>() < 1e-4);
    }
}
