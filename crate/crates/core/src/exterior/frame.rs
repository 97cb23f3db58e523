use num_traits::{One, Signed, Zero};

use super::form::{Form, MultiIndex};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{Field, Q};

/// Left-invariant coframe on a Lie group: structure constants, orientation
/// and metric.
///
/// Convention: `[e_b, e_c] = f^a_{bc} e_a`, hence
/// `de^a = -1/2 f^a_{bc} e^b ∧ e^c = -Σ_{b<c} f^a_{bc} e^{bc}`.
#[derive(Clone, Debug)]
pub struct FrameAlgebra {
    dim: usize,
    /// `structure[a][b][c] = f^a_{bc}`
    structure: Vec<Vec<Vec<Q>>>,
    orientation: i32,
    metric: Matrix<Q>,
    /// `d e^I` for every multi-index mask.
    d_table: Vec<Form<Q>>,
}

pub const MAX_FRAME_DIM: usize = 10;

impl FrameAlgebra {
    /// Builds the algebra from `(a, b, c, f^a_{bc})` entries (0-based); the
    /// `c,b` entry is filled in by antisymmetry.
    pub fn new(dim: usize, constants: &[(usize, usize, usize, Q)]) -> Result<Self> {
        if dim == 0 || dim > MAX_FRAME_DIM {
            return Err(Error::InvalidAlgebra(format!("unsupported dimension {dim}")));
        }
        let mut f = vec![vec![vec![Q::zero(); dim]; dim]; dim];
        for (a, b, c, v) in constants {
            let (a, b, c) = (*a, *b, *c);
            if a >= dim || b >= dim || c >= dim {
                return Err(Error::InvalidAlgebra(format!("index out of range in f^{a}_{b}{c}")));
            }
            if b == c {
                if !v.is_zero() {
                    return Err(Error::InvalidAlgebra(format!("f^{a}_{{{b}{b}}} must vanish")));
                }
                continue;
            }
            let existing = &f[a][b][c];
            if !existing.is_zero() && existing != v {
                return Err(Error::InvalidAlgebra(format!("conflicting entries for f^{a}_{b}{c}")));
            }
            f[a][b][c] = v.clone();
            f[a][c][b] = -v.clone();
        }
        Self::from_structure(dim, f)
    }

    /// Builds the algebra from the differentials `de^a`.
    pub fn from_differentials(dim: usize, de: &[Form<Q>]) -> Result<Self> {
        if de.len() != dim {
            return Err(Error::InvalidAlgebra(
                "need one differential per coframe element".into(),
            ));
        }
        let mut f = vec![vec![vec![Q::zero(); dim]; dim]; dim];
        for (a, form) in de.iter().enumerate() {
            if form.degree() != 2 || form.dim() != dim {
                return Err(Error::InvalidAlgebra(format!("de^{} must be a 2-form", a + 1)));
            }
            for (mi, c) in form.terms() {
                let idx: Vec<usize> = mi.indices().collect();
                f[a][idx[0]][idx[1]] = -c.clone();
                f[a][idx[1]][idx[0]] = c.clone();
            }
        }
        Self::from_structure(dim, f)
    }

    pub fn abelian(dim: usize) -> Self {
        Self::new(dim, &[]).expect("abelian algebra is valid")
    }

    fn from_structure(dim: usize, structure: Vec<Vec<Vec<Q>>>) -> Result<Self> {
        let mut alg = Self {
            dim,
            structure,
            orientation: 1,
            metric: Matrix::identity(dim),
            d_table: Vec::new(),
        };
        alg.build_d_table();
        let bad = alg.jacobi_violations();
        if !bad.is_empty() {
            return Err(Error::InvalidAlgebra(format!(
                "Jacobi identity fails: d^2 e^a != 0 for a in {:?}",
                bad.iter().map(|a| a + 1).collect::<Vec<_>>()
            )));
        }
        Ok(alg)
    }

    pub fn with_orientation(mut self, orientation: i32) -> Result<Self> {
        if orientation != 1 && orientation != -1 {
            return Err(Error::InvalidAlgebra("orientation must be +1 or -1".into()));
        }
        self.orientation = orientation;
        Ok(self)
    }

    pub fn with_metric(mut self, metric: Matrix<Q>) -> Result<Self> {
        if metric.rows() != self.dim || metric != metric.transpose() {
            return Err(Error::Metric);
        }
        if !is_positive_definite(&metric) {
            return Err(Error::Metric);
        }
        self.metric = metric;
        Ok(self)
    }

    fn build_d_table(&mut self) {
        let n = self.dim;
        let de: Vec<Form<Q>> = (0..n)
            .map(|a| {
                let mut form = Form::zero(n, 2);
                for b in 0..n {
                    for c in b + 1..n {
                        let v = &self.structure[a][b][c];
                        if !v.is_zero() {
                            form.add_term(MultiIndex::sorted(&[b, c]).unwrap().1, -v.clone());
                        }
                    }
                }
                form
            })
            .collect();
        let mut table = Vec::with_capacity(1 << n);
        for mask in 0u32..(1 << n) {
            let mi = MultiIndex::from_mask(mask);
            let idx: Vec<usize> = mi.indices().collect();
            let p = idx.len();
            let mut out = Form::zero(n, (p + 1).min(n));
            if p < n {
                for (k, &ik) in idx.iter().enumerate() {
                    let front = Form::<Q>::basis(n, &idx[..k]);
                    let back = Form::<Q>::basis(n, &idx[k + 1..]);
                    let term = front.wedge(&de[ik]).wedge(&back);
                    if k % 2 == 0 {
                        out.add_assign(&term);
                    } else {
                        out = out.sub(&term);
                    }
                }
            }
            table.push(out);
        }
        self.d_table = table;
    }

    fn jacobi_violations(&self) -> Vec<usize> {
        (0..self.dim)
            .filter(|&a| {
                let de = self.d(&Form::<Q>::basis(self.dim, &[a]));
                !self.d(&de).is_zero()
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn orientation(&self) -> i32 {
        self.orientation
    }

    pub fn metric(&self) -> &Matrix<Q> {
        &self.metric
    }

    pub fn is_adapted(&self) -> bool {
        self.metric == Matrix::identity(self.dim)
    }

    /// `f^a_{bc}`
    pub fn f(&self, a: usize, b: usize, c: usize) -> &Q {
        &self.structure[a][b][c]
    }

    pub fn is_abelian(&self) -> bool {
        self.structure.iter().flatten().flatten().all(Zero::is_zero)
    }

    /// Nonzero `(a, b, c, f^a_{bc})` with `b < c`.
    pub fn nonzero_constants(&self) -> Vec<(usize, usize, usize, Q)> {
        let mut out = Vec::new();
        for a in 0..self.dim {
            for b in 0..self.dim {
                for c in b + 1..self.dim {
                    let v = &self.structure[a][b][c];
                    if !v.is_zero() {
                        out.push((a, b, c, v.clone()));
                    }
                }
            }
        }
        out
    }

    /// Chevalley–Eilenberg exterior derivative.
    pub fn d<F: Field>(&self, form: &Form<F>) -> Form<F> {
        assert_eq!(form.dim(), self.dim, "frame dimension mismatch");
        let deg = form.degree();
        let mut out = Form::<F>::zero(self.dim, (deg + 1).min(self.dim));
        if deg >= self.dim {
            return out;
        }
        for (mi, c) in form.terms() {
            for (m, v) in self.d_table[mi.mask() as usize].terms() {
                out.add_term(*m, c.clone() * &F::from(v.clone()));
            }
        }
        out
    }

    /// Hodge star; exact only on an adapted (orthonormal) coframe.
    pub fn hodge<F: Field>(&self, form: &Form<F>) -> Result<Form<F>> {
        if !self.is_adapted() {
            return Err(Error::NotAdapted("Hodge star needs an orthonormal coframe".into()));
        }
        Ok(form.hodge(self.orientation))
    }

    /// Metric inner product of two p-forms: `⟨e^I, e^J⟩ = det(g^{-1}[I, J])`.
    pub fn inner(&self, a: &Form<Q>, b: &Form<Q>) -> Result<Q> {
        if a.dim() != self.dim || b.dim() != self.dim {
            return Err(Error::FrameMismatch(a.dim(), self.dim));
        }
        if a.degree() != b.degree() {
            return Err(Error::Degree(format!(
                "inner product of degrees {} and {}",
                a.degree(),
                b.degree()
            )));
        }
        if self.is_adapted() {
            return Ok(a.dot(b));
        }
        let ginv = self.metric.inverse().ok_or(Error::Metric)?;
        let mut acc = Q::zero();
        for (i, ca) in a.terms() {
            for (j, cb) in b.terms() {
                let ri: Vec<usize> = i.indices().collect();
                let rj: Vec<usize> = j.indices().collect();
                let minor = Matrix::from_rows(
                    ri.iter()
                        .map(|&x| rj.iter().map(|&y| ginv[(x, y)].clone()).collect())
                        .collect(),
                );
                let det = if ri.is_empty() { Q::one() } else { minor.determinant() };
                acc += &(ca.clone() * cb * &det);
            }
        }
        Ok(acc)
    }

    /// Volume form `e^{1..n}` with the frame orientation.
    pub fn volume(&self) -> Form<Q> {
        let idx: Vec<usize> = (0..self.dim).collect();
        let v = Form::<Q>::basis(self.dim, &idx);
        if self.orientation > 0 {
            v
        } else {
            v.neg()
        }
    }

    /// Product frame `R ⊕ self` with the new closed direction at index 0.
    pub fn cylinder(&self) -> FrameAlgebra {
        let constants: Vec<_> = self
            .nonzero_constants()
            .into_iter()
            .map(|(a, b, c, v)| (a + 1, b + 1, c + 1, v))
            .collect();
        FrameAlgebra::new(self.dim + 1, &constants)
            .expect("product with a line preserves Jacobi")
            .with_orientation(self.orientation)
            .expect("valid orientation")
    }
}

/// Sylvester criterion over the rationals.
pub fn is_positive_definite(m: &Matrix<Q>) -> bool {
    (1..=m.rows()).all(|k| {
        let minor = Matrix::from_rows((0..k).map(|i| (0..k).map(|j| m[(i, j)].clone()).collect()).collect());
        minor.determinant().is_positive()
    })
}
