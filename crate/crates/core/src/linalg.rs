//! Small dense row-major matrix routines; sizes here are a handful of rows.

use crate::scalar::Scalar;

/// Inverse by Gauss-Jordan elimination with partial pivoting. Returns `None`
/// when a pivot falls below `tol` in magnitude.
pub fn invert<T: Scalar>(m: &[T], k: usize, tol: T) -> Option<Vec<T>> {
    debug_assert_eq!(m.len(), k * k);
    let mut a = m.to_vec();
    let mut inv = vec![T::zero(); k * k];
    for i in 0..k {
        inv[i * k + i] = T::one();
    }
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| {
            a[x * k + col]
                .abs()
                .partial_cmp(&a[y * k + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if !(a[piv * k + col].abs() >= tol) {
            return None;
        }
        if piv != col {
            for j in 0..k {
                a.swap(piv * k + j, col * k + j);
                inv.swap(piv * k + j, col * k + j);
            }
        }
        let d = a[col * k + col];
        for j in 0..k {
            a[col * k + j] = a[col * k + j] / d;
            inv[col * k + j] = inv[col * k + j] / d;
        }
        for r in 0..k {
            if r == col {
                continue;
            }
            let f = a[r * k + col];
            if f == T::zero() {
                continue;
            }
            for j in 0..k {
                a[r * k + j] = a[r * k + j] - f * a[col * k + j];
                inv[r * k + j] = inv[r * k + j] - f * inv[col * k + j];
            }
        }
    }
    Some(inv)
}

/// Lower Cholesky factor `L` with `m = L Lᵀ`, or `None` if `m` is not
/// positive definite.
pub fn cholesky<T: Scalar>(m: &[T], k: usize) -> Option<Vec<T>> {
    let mut l = vec![T::zero(); k * k];
    for i in 0..k {
        for j in 0..=i {
            let mut sum = m[i * k + j];
            for t in 0..j {
                sum = sum - l[i * k + t] * l[j * k + t];
            }
            if i == j {
                if !(sum > T::zero()) {
                    return None;
                }
                l[i * k + i] = sum.sqrt();
            } else {
                l[i * k + j] = sum / l[j * k + j];
            }
        }
    }
    Some(l)
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn solve_lower<T: Scalar>(l: &[T], k: usize, b: &[T]) -> Vec<T> {
    let mut x = b.to_vec();
    for i in 0..k {
        let mut s = x[i];
        for t in 0..i {
            s = s - l[i * k + t] * x[t];
        }
        x[i] = s / l[i * k + i];
    }
    x
}

/// Solves `Lᵀ x = b` for lower-triangular `L`.
pub fn solve_lower_transposed<T: Scalar>(l: &[T], k: usize, b: &[T]) -> Vec<T> {
    let mut x = b.to_vec();
    for i in (0..k).rev() {
        let mut s = x[i];
        for t in (i + 1)..k {
            s = s - l[t * k + i] * x[t];
        }
        x[i] = s / l[i * k + i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_times_matrix_is_identity() {
        let m = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let inv = invert(&m, 3, 1e-12).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|t| m[i * 3 + t] * inv[t * 3 + j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        assert!(invert(&[1.0, 1.0, 1.0, 1.0], 2, 1e-10).is_none());
    }

    #[test]
    fn cholesky_solves() {
        let m = [4.0f32, 2.0, 2.0, 3.0];
        let l = cholesky(&m, 2).unwrap();
        let b = [1.0f32, 2.0];
        let y = solve_lower(&l, 2, &b);
        let x = solve_lower_transposed(&l, 2, &y);
        assert!((4.0 * x[0] + 2.0 * x[1] - 1.0).abs() < 1e-5);
        assert!((2.0 * x[0] + 3.0 * x[1] - 2.0).abs() < 1e-5);
        assert!(cholesky(&[1.0, 2.0, 2.0, 1.0], 2).is_none());
    }
}
