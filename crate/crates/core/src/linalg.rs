//! Small dense complex linear algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Entrywise conjugate.
pub fn conjugate(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

/// Largest entry magnitude of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// (m + m†)/2; removes the antihermitian round-off of a nominally Hermitian matrix.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as the columns of
/// the returned matrix, ordered to match the eigenvalues.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let se = nalgebra::SymmetricEigen::new(hermitize(m));
    let n = se.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].partial_cmp(&se.eigenvalues[a]).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Principal square root of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues below `1e-13` of the largest (including round-off negatives)
/// are treated as exact zeros; otherwise their square roots would inject
/// O(√ε) noise into the null space.
pub fn hermitian_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let floor = values.first().copied().unwrap_or(0.0).max(0.0) * 1e-13;
    let roots = DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| {
            let v = if v <= floor { 0.0 } else { v };
            Complex64::new(v.sqrt(), 0.0)
        }),
    );
    &vectors * CMatrix::from_diagonal(&roots) * vectors.adjoint()
}

/// Haar-distributed random unitary: QR of a complex Gaussian matrix with the
/// phases of the diagonal of R folded back into Q.
pub fn haar_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(
            rng.sample::<f64, _>(StandardNormal) * scale,
            rng.sample::<f64, _>(StandardNormal) * scale,
        )
    });
    let qr = g.qr();
    let r = qr.r();
    let phases = DVector::from_iterator(
        dim,
        (0..dim).map(|k| {
            let d = r[(k, k)];
            if d.norm() < 1e-300 {
                Complex64::new(1.0, 0.0)
            } else {
                d / d.norm()
            }
        }),
    );
    qr.q() * CMatrix::from_diagonal(&phases)
}

/// Takagi factorization of a complex symmetric matrix: `a = z * diag(s) * zᵀ`
/// with `z` unitary and `s` real, nonnegative, descending.
///
/// Computed through the real symmetric eigenproblem of the doubled matrix
/// `[[Re a, Im a], [Im a, -Re a]]`, whose spectrum comes in `±s` pairs. The
/// eigenvectors for the nonnegative half give the columns of `z`; inside the
/// null space the complex structure (`v` vs `i·v`) is disentangled by
/// projecting against both images of the already-selected vectors.
pub fn takagi(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    let sym_dev = max_abs_diff(a, &a.transpose());
    if sym_dev > 1e-8 {
        return Err(Error::NumericalFailure(format!(
            "takagi input not symmetric (deviation {sym_dev:.3e})"
        )));
    }
    let a = (a + a.transpose()).map(|z| z * 0.5);

    let mut doubled = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for r in 0..n {
        for c in 0..n {
            doubled[(r, c)] = a[(r, c)].re;
            doubled[(r, n + c)] = a[(r, c)].im;
            doubled[(n + r, c)] = a[(r, c)].im;
            doubled[(n + r, n + c)] = -a[(r, c)].re;
        }
    }
    let se = nalgebra::SymmetricEigen::new(doubled);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&p, &q| se.eigenvalues[q].partial_cmp(&se.eigenvalues[p]).unwrap());

    let scale = order
        .first()
        .map(|&k| se.eigenvalues[k].abs())
        .unwrap_or(0.0)
        .max(1.0);
    let zero_tol = 1e-12 * scale;

    // multiplying a con-eigenvector by i maps [x; y] to [-y; x]
    let j_image = |w: &DVector<f64>| -> DVector<f64> {
        DVector::from_fn(2 * n, |k, _| if k < n { -w[k + n] } else { w[k - n] })
    };

    let mut selected: Vec<(f64, DVector<f64>)> = Vec::with_capacity(n);
    for &k in &order {
        if selected.len() == n {
            break;
        }
        let value = se.eigenvalues[k];
        let mut w = se.eigenvectors.column(k).into_owned();
        if value <= zero_tol {
            // null-space candidate: remove the i-images of previous null picks
            for (prev_val, prev) in &selected {
                if *prev_val <= zero_tol {
                    let jp = j_image(prev);
                    let c1 = prev.dot(&w);
                    let c2 = jp.dot(&w);
                    w -= prev * c1;
                    w -= jp * c2;
                }
            }
            let norm = w.norm();
            if norm < 0.5 {
                continue; // dependent on an earlier pick
            }
            w /= norm;
        }
        selected.push((value.max(0.0), w));
    }
    if selected.len() != n {
        return Err(Error::NumericalFailure(
            "takagi: could not select a full con-eigenbasis".into(),
        ));
    }

    let sigma: Vec<f64> = selected.iter().map(|(v, _)| *v).collect();
    let z = CMatrix::from_fn(n, n, |r, c| {
        let w = &selected[c].1;
        Complex64::new(w[r], w[r + n])
    });
    Ok((sigma, z))
}

/// Orthogonal matrix `o` with `diag(o * k * oᵀ) = 0` for a real symmetric
/// traceless matrix `k`.
///
/// Givens rotations zero the diagonal entries one at a time; each rotation
/// pairs a positive diagonal entry with a negative one, which always exists
/// in the trailing block because its trace stays zero.
pub fn zero_diagonal_rotation(k: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = k.nrows();
    if k.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: k.ncols(),
        });
    }
    let scale = k.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    let trace: f64 = (0..n).map(|i| k[(i, i)]).sum();
    if trace.abs() > 1e-9 * scale {
        return Err(Error::NumericalFailure(format!(
            "zero_diagonal_rotation: trace {trace:.3e} not zero"
        )));
    }

    let mut k = k.clone();
    let mut o = DMatrix::<f64>::identity(n, n);
    for i in 0..n.saturating_sub(1) {
        if k[(i, i)].abs() <= 1e-13 * scale {
            continue;
        }
        // opposite-signed partner in the trailing block
        let j = (i + 1..n)
            .min_by(|&p, &q| {
                let vp = k[(i, i)] * k[(p, p)];
                let vq = k[(i, i)] * k[(q, q)];
                vp.partial_cmp(&vq).unwrap()
            })
            .expect("trailing block is nonempty");

        let half_sum = 0.5 * (k[(i, i)] + k[(j, j)]);
        let half_diff = 0.5 * (k[(i, i)] - k[(j, j)]);
        let b = k[(i, j)];
        let r = half_diff.hypot(b);
        if r < 1e-300 {
            continue;
        }
        let phi = b.atan2(half_diff);
        let ratio = (-half_sum / r).clamp(-1.0, 1.0);
        let t = 0.5 * (phi + ratio.acos());

        let (c, s) = (t.cos(), t.sin());
        let mut g = DMatrix::<f64>::identity(n, n);
        g[(i, i)] = c;
        g[(i, j)] = s;
        g[(j, i)] = -s;
        g[(j, j)] = c;
        k = &g * &k * g.transpose();
        o = &g * &o;
    }

    let max_diag = (0..n).map(|i| k[(i, i)].abs()).fold(0.0, f64::max);
    if max_diag > 1e-9 * scale {
        return Err(Error::NumericalFailure(format!(
            "zero_diagonal_rotation: residual diagonal {max_diag:.3e}"
        )));
    }
    Ok(o)
}
