//! Small dense eigenvalue helper for the occupation-bound checks.
//!
//! The occupation blocks are Hermitian and tiny (a few dozen modes at most),
//! so a cyclic Jacobi sweep on the real symmetric embedding
//! `[[X, -Y], [Y, X]]` of `H = X + iY` is entirely adequate. Each eigenvalue
//! of `H` appears twice in the embedding's spectrum.

use num_complex::Complex;

use crate::scalar::Scalar;

/// Eigenvalues of a Hermitian matrix, each repeated twice, ascending.
///
/// The doubling is harmless for range checks and keeps the solver purely
/// real. Panics if the input is not square.
pub(crate) fn hermitian_eigenvalues_doubled<S: Scalar>(matrix: &[Vec<Complex<S>>]) -> Vec<S> {
    let m = matrix.len();
    for row in matrix {
        assert_eq!(row.len(), m, "hermitian input must be square");
    }
    if m == 0 {
        return Vec::new();
    }
    let n = 2 * m;
    let mut a = vec![vec![S::zero(); n]; n];
    for i in 0..m {
        for j in 0..m {
            a[i][j] = matrix[i][j].re;
            a[i + m][j + m] = matrix[i][j].re;
            a[i][j + m] = -matrix[i][j].im;
            a[i + m][j] = matrix[i][j].im;
        }
    }
    symmetric_jacobi_eigenvalues(a)
}

/// Cyclic Jacobi iteration for a real symmetric matrix. Returns eigenvalues
/// ascending.
#[allow(clippy::needless_range_loop)]
pub(crate) fn symmetric_jacobi_eigenvalues<S: Scalar>(mut a: Vec<Vec<S>>) -> Vec<S> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![a[0][0]];
    }
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(S::zero(), |m, &v| m.max(v.abs()))
        .max(S::one());
    let tol = S::epsilon() * scale * S::cast(n);

    for _sweep in 0..100 {
        let mut off = S::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq.abs() <= tol * S::cast(1e-3) {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (S::cast(2.0) * apq);
                let t = {
                    let abs_t = S::one() / (theta.abs() + (theta * theta + S::one()).sqrt());
                    if theta >= S::zero() {
                        abs_t
                    } else {
                        -abs_t
                    }
                };
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                // Rotate rows and columns p, q.
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }

    let mut eig: Vec<S> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    eig
}
