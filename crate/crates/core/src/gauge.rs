//! Left-invariant connections: curvature, instanton and Bianchi residuals,
//! Chern–Simons forms, Levi-Civita and H-twisted tangent connections.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exterior::{Form, FrameAlgebra, MatrixForm, MultiIndex};
use crate::linalg::Matrix;
use crate::scalar::{q, qi, Q};

/// A connection `A = Σ_a A_a e^a` with constant matrices `A_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleData {
    rank: usize,
    coeffs: Vec<Matrix<Q>>,
    group: String,
}

impl BundleData {
    pub fn new(rank: usize, coeffs: Vec<Matrix<Q>>) -> Result<Self> {
        if coeffs.iter().any(|m| m.rows() != rank || m.cols() != rank) {
            return Err(Error::InvalidAlgebra(format!(
                "connection matrices must be {rank}x{rank}"
            )));
        }
        Ok(Self {
            rank,
            coeffs,
            group: format!("GL({rank})"),
        })
    }

    pub fn trivial(rank: usize, dim: usize) -> Self {
        Self {
            rank,
            coeffs: vec![Matrix::zeros(rank, rank); dim],
            group: format!("GL({rank})"),
        }
    }

    pub fn with_group(mut self, group: impl Into<String>) -> Self {
        self.group = group.into();
        self
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn group(&self) -> &str {
        &self.group
    }

    /// `A_a`, the coefficient along `e^a`.
    pub fn coeff(&self, a: usize) -> &Matrix<Q> {
        &self.coeffs[a]
    }

    pub fn coeffs(&self) -> &[Matrix<Q>] {
        &self.coeffs
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Matrix::is_zero)
    }

    pub fn connection_form(&self) -> MatrixForm {
        MatrixForm::one_form(self.rank, self.dim(), &self.coeffs)
    }

    /// Same connection on a larger frame, directions shifted by `offset`.
    pub fn shifted(&self, new_dim: usize, offset: usize) -> Self {
        let mut coeffs = vec![Matrix::zeros(self.rank, self.rank); new_dim];
        for (a, m) in self.coeffs.iter().enumerate() {
            coeffs[a + offset] = m.clone();
        }
        Self {
            rank: self.rank,
            coeffs,
            group: self.group.clone(),
        }
    }

    pub fn scaled(&self, s: &Q) -> Self {
        Self {
            rank: self.rank,
            coeffs: self.coeffs.iter().map(|m| m.scale(s)).collect(),
            group: self.group.clone(),
        }
    }
}

/// `F = dA + A ∧ A`
pub fn curvature(bundle: &BundleData, frame: &FrameAlgebra) -> MatrixForm {
    let a = bundle.connection_form();
    a.d(frame).add(&a.wedge(&a))
}

/// `F ∧ ψ` entrywise.
pub fn instanton_check(f: &MatrixForm, psi: &Form) -> MatrixForm {
    f.wedge_form(psi)
}

/// `tr(A ∧ dA + ⅔ A ∧ A ∧ A)`
pub fn chern_simons(bundle: &BundleData, frame: &FrameAlgebra) -> Form {
    let a = bundle.connection_form();
    let da = a.d(frame);
    let aaa = a.wedge(&a).wedge(&a);
    a.wedge(&da).trace().add(&aaa.trace().scale(&q(2, 3)))
}

/// `tr(F ∧ F)`
pub fn trace_square(f: &MatrixForm) -> Form {
    f.wedge(f).trace()
}

/// `dH − α'/4 (tr F∧F − tr R∧R)`
pub fn bianchi_residual(frame: &FrameAlgebra, h: &Form, f: &MatrixForm, r: &MatrixForm, alpha_prime: &Q) -> Form {
    let anomaly = trace_square(f).sub(&trace_square(r));
    frame.d(h).sub(&anomaly.scale(&(alpha_prime.clone() / qi(4))))
}

/// The unique `α'` with `dH = α'/4 (tr F∧F − tr R∧R)`, if one exists.
///
/// `None` when the anomaly vanishes (any `α'` works iff `dH = 0`) or is not
/// proportional to `dH`.
pub fn solve_alpha_prime(frame: &FrameAlgebra, h: &Form, f: &MatrixForm, r: &MatrixForm) -> Option<Q> {
    let anomaly = trace_square(f).sub(&trace_square(r));
    let (mi, c) = anomaly.terms().next()?;
    let alpha = frame.d(h).coeff(*mi) * qi(4) / c;
    bianchi_residual(frame, h, f, r, &alpha).is_zero().then_some(alpha)
}

/// `d_A α = dα + A∧α − (−1)^p α∧A` on End-valued p-forms.
pub fn covariant_d_end(frame: &FrameAlgebra, conn: &MatrixForm, alpha: &MatrixForm) -> MatrixForm {
    let left = conn.wedge(alpha);
    let right = alpha.wedge(conn);
    let base = alpha.d(frame).add(&left);
    if alpha.degree() % 2 == 0 {
        base.sub(&right)
    } else {
        base.add(&right)
    }
}

/// `d_A w = dw + A∧w` on vector-valued forms `w = (w_i)`.
pub fn covariant_d_vec(frame: &FrameAlgebra, conn: &MatrixForm, w: &[Form]) -> Vec<Form> {
    (0..conn.rank())
        .map(|i| {
            let mut out = frame.d(&w[i]);
            for (j, wj) in w.iter().enumerate() {
                let c = conn.get(i, j);
                if !c.is_zero() && !wj.is_zero() {
                    out.add_assign(&c.wedge(wj));
                }
            }
            out
        })
        .collect()
}

/// Tangent connection symbols `Γ_ab^c` with `∇_{e_a} e_b = Γ_ab^c e_c`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentConnection {
    dim: usize,
    gamma: Vec<Q>,
}

impl TangentConnection {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            gamma: vec![Q::zero(); dim * dim * dim],
        }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize, usize) -> Q) -> Self {
        let mut out = Self::zero(dim);
        for a in 0..dim {
            for b in 0..dim {
                for c in 0..dim {
                    out.gamma[(a * dim + b) * dim + c] = f(a, b, c);
                }
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &Q {
        &self.gamma[(a * self.dim + b) * self.dim + c]
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.iter().all(Zero::is_zero)
    }

    /// `T_ab^c = Γ_ab^c − Γ_ba^c − f^c_ab`
    pub fn torsion(&self, frame: &FrameAlgebra) -> Self {
        Self::from_fn(self.dim, |a, b, c| {
            self.get(a, b, c).clone() - self.get(b, a, c) - frame.f(c, a, b)
        })
    }

    /// `Γ_ab^c + Γ_ac^b`, zero for a metric connection on an orthonormal frame.
    pub fn metricity(&self) -> Self {
        Self::from_fn(self.dim, |a, b, c| self.get(a, b, c).clone() + self.get(a, c, b))
    }

    /// The opposite connection `∇̃_X Y = ∇_Y X + [X, Y]`:
    /// `Γ̃_ab^c = Γ_ba^c + f^c_ab`, with torsion `−T`.
    pub fn opposite(&self, frame: &FrameAlgebra) -> Self {
        Self::from_fn(self.dim, |a, b, c| self.get(b, a, c).clone() + frame.f(c, a, b))
    }

    /// The tensor as a 3-form when it is totally antisymmetric.
    pub fn as_three_form(&self) -> Option<Form> {
        let n = self.dim;
        let mut out = Form::zero(n, 3);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let v = self.get(a, b, c);
                    let antisym = v == &-self.get(b, a, c).clone() && v == &-self.get(a, c, b).clone();
                    if !antisym {
                        return None;
                    }
                    if a < b && b < c {
                        out.add_term(MultiIndex::sorted(&[a, b, c]).unwrap().1, v.clone());
                    }
                }
            }
        }
        Some(out)
    }

    /// `Z_ab = −Σ_c Γ_ca^b e^c`, so that `(d_ζ M)_a = dM_a + Σ_b Z_ab ∧ M_b`
    /// on covector-valued forms.
    pub fn covector_form(&self) -> MatrixForm {
        let n = self.dim;
        let coeffs: Vec<Matrix<Q>> = (0..n)
            .map(|c| {
                let mut m = Matrix::zeros(n, n);
                for a in 0..n {
                    for b in 0..n {
                        m[(a, b)] = -self.get(c, a, b).clone();
                    }
                }
                m
            })
            .collect();
        MatrixForm::one_form(n, n, &coeffs)
    }

    /// `∇_a φ = −Σ_{b,c} Γ_ab^c e^b ∧ ι_c φ` for each direction `a`.
    pub fn nabla(&self, phi: &Form) -> Vec<Form> {
        let n = self.dim;
        (0..n)
            .map(|a| {
                let mut out = Form::zero(n, phi.degree());
                for b in 0..n {
                    for c in 0..n {
                        let g = self.get(a, b, c);
                        if g.is_zero() {
                            continue;
                        }
                        out = out.sub(&Form::basis(n, &[b]).wedge(&phi.interior(c)).scale(g));
                    }
                }
                out
            })
            .collect()
    }
}

/// Frame Koszul formula `Γ_ab^c = ½(f^c_ab − f^a_bc + f^b_ca)`, with the
/// torsion-free and metric properties verified exactly.
pub fn levi_civita(frame: &FrameAlgebra) -> Result<TangentConnection> {
    if !frame.is_adapted() {
        return Err(Error::NotAdapted("Levi-Civita needs an orthonormal coframe".into()));
    }
    let half = q(1, 2);
    let lc = TangentConnection::from_fn(frame.dim(), |a, b, c| {
        (frame.f(c, a, b).clone() - frame.f(a, b, c) + frame.f(b, c, a)) * &half
    });
    if !lc.torsion(frame).is_zero() {
        return Err(Error::Internal("Levi-Civita connection has torsion".into()));
    }
    if !lc.metricity().is_zero() {
        return Err(Error::Internal("Levi-Civita connection is not metric".into()));
    }
    Ok(lc)
}

/// `Γ_ab^c + ½ H_abc`
pub fn zeta_connection(lc: &TangentConnection, h: &Form) -> TangentConnection {
    let half = q(1, 2);
    TangentConnection::from_fn(lc.dim(), |a, b, c| {
        lc.get(a, b, c).clone() + h.component(&[a, b, c]) * &half
    })
}

/// Per-direction `∇_a φ`; all zero iff `φ` is parallel.
pub fn nabla_phi_check(zeta: &TangentConnection, phi: &Form) -> Vec<Form> {
    zeta.nabla(phi)
}

pub fn max_residual(forms: &[Form]) -> f64 {
    forms.iter().map(Form::max_magnitude).fold(0.0, f64::max)
}
