use nalgebra::{DMatrix, DVector};

/// Minimum-norm least-squares solution of `a·x ≈ b`.
///
/// The design is reduced with a Householder QR and the triangular factor is
/// decomposed with one-sided Jacobi rotations. Singular values below
/// `σ_max · max(m, n) · ε` are treated as zero.
pub(crate) fn min_norm_lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let (m, n) = a.shape();
    let (mut u, rhs) = if m > n {
        let qr = a.clone().qr();
        let mut qtb = b.clone();
        qr.q_tr_mul(&mut qtb);
        (qr.r(), qtb.rows(0, n).clone_owned())
    } else {
        (a.clone(), b.clone())
    };

    let cols = u.ncols();
    let mut v = DMatrix::<f64>::identity(cols, cols);
    for _sweep in 0..100 {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let alpha = u.column(i).norm_squared();
                let beta = u.column(j).norm_squared();
                let gamma = u.column(i).dot(&u.column(j));
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut u, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = (0..cols).map(|k| u.column(k).norm()).collect();
    let max = sigma.iter().copied().fold(0.0, f64::max);
    let tol = max * m.max(n) as f64 * f64::EPSILON;
    let mut x = DVector::zeros(cols);
    for (k, &s) in sigma.iter().enumerate() {
        if s > tol {
            let coef = u.column(k).dot(&rhs) / (s * s);
            x += v.column(k) * coef;
        }
    }
    x
}

fn rotate(m: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..m.nrows() {
        let (x, y) = (m[(r, i)], m[(r, j)]);
        m[(r, i)] = c * x - s * y;
        m[(r, j)] = s * x + c * y;
    }
}
