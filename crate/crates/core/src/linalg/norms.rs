use super::matrix::ComplexMatrix;
use super::svd::svd;

/// Spectral norm: the largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> f64 {
    svd(a).singular_values.first().copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_unit_norm() {
        assert!((operator_norm(&ComplexMatrix::identity(3)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_norm_is_max_modulus() {
        assert_eq!(operator_norm(&ComplexMatrix::from_real_diag(&[2.0, -5.0])), 5.0);
    }

    #[test]
    fn two_by_two_hand_oracle() {
        // A^†A = [[0,0],[0,2]] so ‖A‖ = √2
        let a = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!((operator_norm(&a) - 2f64.sqrt()).abs() < 1e-15);
    }
}
