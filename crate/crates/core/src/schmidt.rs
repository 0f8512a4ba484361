//! Schmidt decomposition of bipartite cuts of multipartite pure states.
//!
//! The amplitude vector is reshaped into a matrix along the cut and factored
//! by SVD. Coefficients stored here are the *squared* Schmidt weights
//! `λ_k = σ_k²` (so they sum to 1); the state amplitudes are `√λ_k`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::state::PureState;
use crate::tolerance;

/// Schmidt form of a bipartite cut: descending squared weights plus the two
/// orthonormal local bases.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    coefficients: Vec<f64>,
    basis_a: Vec<CVector>,
    basis_b: Vec<CVector>,
    side_a: Vec<usize>,
    side_b: Vec<usize>,
    dims: Vec<usize>,
}

impl SchmidtForm {
    /// Squared Schmidt weights, descending, summing to 1.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Schmidt rank after the singular-value cutoff.
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn basis_a(&self) -> &[CVector] {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &[CVector] {
        &self.basis_b
    }

    /// Subsystem indices of the two sides.
    pub fn sides(&self) -> (&[usize], &[usize]) {
        (&self.side_a, &self.side_b)
    }

    /// Rebuild `Σ_k √λ_k |a_k⟩|b_k⟩` in the original subsystem order.
    pub fn reconstruct(&self) -> PureState {
        let total: usize = self.dims.iter().product();
        let a_off = axis_offsets(&self.dims, &self.side_a);
        let b_off = axis_offsets(&self.dims, &self.side_b);
        let mut amplitudes = CVector::zeros(total);
        for (k, &lambda) in self.coefficients.iter().enumerate() {
            let s = Complex64::new(lambda.sqrt(), 0.0);
            for (r, &ra) in a_off.iter().enumerate() {
                let left = s * self.basis_a[k][r];
                if left.norm_sqr() == 0.0 {
                    continue;
                }
                for (c, &cb) in b_off.iter().enumerate() {
                    amplitudes[ra + cb] += left * self.basis_b[k][c];
                }
            }
        }
        PureState::from_raw(amplitudes, self.dims.clone())
    }
}

// Row-major offsets of the listed axes within the full flat index.
fn axis_offsets(dims: &[usize], axes: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let sizes: Vec<usize> = axes.iter().map(|&a| dims[a]).collect();
    let total: usize = sizes.iter().product();
    let mut out = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rest = flat;
        let mut off = 0;
        for i in (0..axes.len()).rev() {
            let idx = rest % sizes[i];
            rest /= sizes[i];
            off += idx * strides[axes[i]];
        }
        out.push(off);
    }
    out
}

fn validate_cut(dims_len: usize, side_a: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if side_a.is_empty() {
        return Err(Error::InvalidPartition("side A is empty".into()));
    }
    let mut seen = vec![false; dims_len];
    for &s in side_a {
        if s >= dims_len {
            return Err(Error::InvalidSubsystem {
                index: s,
                count: dims_len,
            });
        }
        if seen[s] {
            return Err(Error::InvalidPartition(format!("subsystem {s} listed twice")));
        }
        seen[s] = true;
    }
    let a: Vec<usize> = (0..dims_len).filter(|i| seen[*i]).collect();
    let b: Vec<usize> = (0..dims_len).filter(|i| !seen[*i]).collect();
    if b.is_empty() {
        return Err(Error::InvalidPartition("side B is empty".into()));
    }
    Ok((a, b))
}

/// Schmidt decomposition across the cut `side_a` / complement.
pub fn schmidt_decomposition(psi: &PureState, side_a: &[usize]) -> Result<SchmidtForm> {
    psi.validate()?;
    let dims = psi.dims().to_vec();
    let (a_axes, b_axes) = validate_cut(dims.len(), side_a)?;
    let a_off = axis_offsets(&dims, &a_axes);
    let b_off = axis_offsets(&dims, &b_axes);
    let (da, db) = (a_off.len(), b_off.len());
    let m = CMatrix::from_fn(da, db, |r, c| psi.amplitudes()[a_off[r] + b_off[c]]);
    let svd = m.svd(true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");

    let mut coefficients = Vec::new();
    let mut basis_a = Vec::new();
    let mut basis_b = Vec::new();
    for k in 0..svd.singular_values.len() {
        let s = svd.singular_values[k];
        if s <= tolerance::SCHMIDT_RANK_CUTOFF {
            continue;
        }
        coefficients.push(s * s);
        basis_a.push(u.column(k).into_owned());
        basis_b.push(v_t.row(k).transpose());
    }
    Ok(SchmidtForm {
        coefficients,
        basis_a,
        basis_b,
        side_a: a_axes,
        side_b: b_axes,
        dims,
    })
}

/// Squared Schmidt weights only (descending, summing to 1).
pub fn schmidt_coefficients(psi: &PureState, side_a: &[usize]) -> Result<Vec<f64>> {
    Ok(schmidt_decomposition(psi, side_a)?.coefficients.to_vec())
}
