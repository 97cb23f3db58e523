use super::form::Form;
use super::frame::FrameAlgebra;
use crate::linalg::Matrix;
use crate::scalar::{Field, Q};

/// Square matrix of p-forms, all of the same degree.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixForm<F = Q> {
    rank: usize,
    entries: Vec<Form<F>>,
}

impl<F: Field> MatrixForm<F> {
    pub fn zero(rank: usize, dim: usize, degree: usize) -> Self {
        Self {
            rank,
            entries: vec![Form::zero(dim, degree); rank * rank],
        }
    }

    pub fn from_entries(rank: usize, entries: Vec<Form<F>>) -> Self {
        assert_eq!(entries.len(), rank * rank);
        if let Some(first) = entries.first() {
            assert!(
                entries
                    .iter()
                    .all(|e| e.degree() == first.degree() && e.dim() == first.dim()),
                "matrix form entries must share degree and frame"
            );
        }
        Self { rank, entries }
    }

    /// `X ⊗ β` for a constant matrix `X` and a form `β`.
    pub fn from_matrix_form(x: &Matrix<F>, beta: &Form<F>) -> Self {
        let r = x.rows();
        let entries = (0..r * r).map(|k| beta.scale(&x[(k / r, k % r)])).collect();
        Self::from_entries(r, entries)
    }

    /// `Σ_a X_a e^a` for constant matrices indexed by frame direction.
    pub fn one_form(rank: usize, dim: usize, coeffs: &[Matrix<F>]) -> Self {
        assert_eq!(coeffs.len(), dim);
        let mut out = Self::zero(rank, dim, 1);
        for (a, x) in coeffs.iter().enumerate() {
            out = out.add(&Self::from_matrix_form(x, &Form::basis(dim, &[a])));
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.entries.first().map_or(0, Form::degree)
    }

    pub fn dim(&self) -> usize {
        self.entries.first().map_or(0, Form::dim)
    }

    pub fn get(&self, i: usize, j: usize) -> &Form<F> {
        &self.entries[i * self.rank + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: Form<F>) {
        self.entries[i * self.rank + j] = f;
    }

    pub fn entries(&self) -> &[Form<F>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Form::is_zero)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.entries.iter().map(Form::max_magnitude).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(&Form<F>) -> Form<F>) -> Self {
        self.map_to(f)
    }

    pub fn map_to<G: Field>(&self, f: impl Fn(&Form<F>) -> Form<G>) -> MatrixForm<G> {
        MatrixForm {
            rank: self.rank,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.rank, other.rank);
        Self {
            rank: self.rank,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.rank, other.rank);
        Self {
            rank: self.rank,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|e| e.scale(s))
    }

    /// Matrix product with wedge on entries.
    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.rank, other.rank);
        let r = self.rank;
        let deg = (self.degree() + other.degree()).min(self.dim());
        let mut out = Self::zero(r, self.dim(), deg);
        for i in 0..r {
            for j in 0..r {
                let mut acc = Form::zero(self.dim(), deg);
                for k in 0..r {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_assign(&a.wedge(b));
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Entrywise wedge with a scalar form on the right.
    pub fn wedge_form(&self, beta: &Form<F>) -> Self {
        self.map(|e| e.wedge(beta))
    }

    /// Entrywise wedge with a scalar form on the left.
    pub fn form_wedge(&self, beta: &Form<F>) -> Self {
        self.map(|e| beta.wedge(e))
    }

    /// Graded commutator `[a, b] = a∧b - (-1)^{pq} b∧a`.
    pub fn graded_commutator(&self, other: &Self) -> Self {
        let ab = self.wedge(other);
        let ba = other.wedge(self);
        if (self.degree() * other.degree()).is_multiple_of(2) {
            ab.sub(&ba)
        } else {
            ab.add(&ba)
        }
    }

    pub fn trace(&self) -> Form<F> {
        let mut acc = Form::zero(self.dim(), self.degree());
        for i in 0..self.rank {
            acc.add_assign(self.get(i, i));
        }
        acc
    }

    pub fn interior(&self, a: usize) -> Self {
        self.map(|e| e.interior(a))
    }

    /// Constant matrix of coefficients of `e^mi` in each entry.
    pub fn coefficient_matrix(&self, indices: &[usize]) -> Matrix<F> {
        let r = self.rank;
        let mut m = Matrix::zeros(r, r);
        for i in 0..r {
            for j in 0..r {
                m[(i, j)] = self.get(i, j).component(indices);
            }
        }
        m
    }

    /// Entrywise exterior derivative.
    pub fn d(&self, frame: &FrameAlgebra) -> Self {
        self.map(|e| frame.d(e))
    }
}

impl MatrixForm<Q> {
    pub fn complexify(&self) -> MatrixForm<crate::scalar::GaussQ> {
        MatrixForm {
            rank: self.rank,
            entries: self.entries.iter().map(Form::complexify).collect(),
        }
    }

    /// Embeds into a larger rank by placing this block at `offset`.
    pub fn embed(&self, rank: usize, offset: usize) -> Self {
        let mut out = Self::zero(rank, self.dim(), self.degree());
        for i in 0..self.rank {
            for j in 0..self.rank {
                out.set(i + offset, j + offset, self.get(i, j).clone());
            }
        }
        out
    }

    /// Re-expresses every entry on a larger frame with shifted indices.
    pub fn shifted(&self, new_dim: usize, offset: usize) -> Self {
        Self {
            rank: self.rank,
            entries: self.entries.iter().map(|e| e.shifted(new_dim, offset)).collect(),
        }
    }
}

pub fn zero_matrix<F: Field>(r: usize) -> Matrix<F> {
    Matrix::zeros(r, r)
}

impl<F: Field> MatrixForm<F> {
    pub fn count_nonzero(&self) -> usize {
        self.entries.iter().filter(|e| !e.is_zero()).count()
    }
}
