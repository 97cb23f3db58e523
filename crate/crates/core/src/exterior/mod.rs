//! Exact exterior algebra over a left-invariant coframe.

mod form;
mod frame;
mod matrix_form;

pub use form::{Form, MultiIndex, MAX_DIM};
pub use frame::{is_positive_definite, FrameAlgebra, MAX_FRAME_DIM};
pub use matrix_form::{zero_matrix, MatrixForm};

use crate::error::{Error, Result};
use crate::scalar::{Field, Q};

/// A form with one extra (co)vector index: `M = M_b ⊗ e^b`, each `M_b` a q-form.
pub type VectorForm<F = Q> = Vec<Form<F>>;

/// Reads a 3-form as a vector-valued 2-form, `M_c = ι_c H`.
pub fn three_form_as_vector<F: Field>(h: &Form<F>) -> VectorForm<F> {
    (0..h.dim()).map(|c| h.interior(c)).collect()
}

/// `i_M(a) = κ Σ_b M_b ∧ ι_b a` on an orthonormal coframe.
pub fn contract<F: Field>(m: &[Form<F>], a: &Form<F>, kappa: &F) -> Result<Form<F>> {
    if m.len() != a.dim() {
        return Err(Error::FrameMismatch(m.len(), a.dim()));
    }
    let q = m.first().map_or(0, Form::degree);
    if m.iter().any(|mb| mb.dim() != a.dim() || mb.degree() != q) {
        return Err(Error::FrameMismatch(m[0].dim(), a.dim()));
    }
    let deg = (a.degree() + q).saturating_sub(1).min(a.dim());
    let mut out = Form::zero(a.dim(), deg);
    if a.degree() == 0 {
        return Ok(out);
    }
    for (b, mb) in m.iter().enumerate() {
        if mb.is_zero() {
            continue;
        }
        out.add_assign(&mb.wedge(&a.interior(b)));
    }
    Ok(out.scale(kappa))
}

/// Matrix `M` (rows = covector index) read as a T*-valued 1-form `M_a = Σ_b M_ab e^b`.
pub fn matrix_as_vector_form(m: &crate::linalg::Matrix<Q>) -> VectorForm<Q> {
    let n = m.rows();
    (0..n)
        .map(|a| {
            let mut f = Form::zero(n, 1);
            for b in 0..n {
                f.add_term(MultiIndex::from_mask(1 << b), m[(a, b)].clone());
            }
            f
        })
        .collect()
}
