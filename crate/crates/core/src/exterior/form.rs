use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{fmt_q, Field, GaussQ, Q};

/// Strictly increasing set of frame indices, stored as a bitmask.
///
/// Index `i` (0-based) corresponds to the coframe element `e^{i+1}` in
/// the usual 1-based notation.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MultiIndex(u32);

pub const MAX_DIM: usize = 16;

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    pub fn from_mask(mask: u32) -> Self {
        Self(mask)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    /// Sorts `indices` into a multi-index, returning the permutation sign,
    /// or `None` if an index repeats.
    pub fn sorted(indices: &[usize]) -> Option<(i32, Self)> {
        let mut mask = 0u32;
        let mut sign = 1;
        for &i in indices {
            let bit = 1u32 << i;
            if mask & bit != 0 {
                return None;
            }
            // every already-placed index above i has to hop over it
            if (mask >> i).count_ones() % 2 == 1 {
                sign = -sign;
            }
            mask |= bit;
        }
        Some((sign, Self(mask)))
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let m = self.0;
        (0..32).filter(move |i| m & (1 << i) != 0)
    }

    /// Sign and result of `e^self ∧ e^other`; `None` when they overlap.
    pub fn wedge(self, other: Self) -> Option<(i32, Self)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut swaps = 0u32;
        for j in other.indices() {
            swaps += (self.0 >> j).count_ones();
        }
        let sign = if swaps.is_multiple_of(2) { 1 } else { -1 };
        Some((sign, Self(self.0 | other.0)))
    }

    /// Sign of removing index `i` from the front: `ι_i e^self = sign e^{self∖i}`.
    pub fn remove(self, i: usize) -> Option<(i32, Self)> {
        if !self.contains(i) {
            return None;
        }
        let below = (self.0 & ((1u32 << i) - 1)).count_ones();
        let sign = if below.is_multiple_of(2) { 1 } else { -1 };
        Some((sign, Self(self.0 & !(1 << i))))
    }

    pub fn complement(self, dim: usize) -> Self {
        Self(!self.0 & ((1u32 << dim) - 1))
    }

    /// All multi-indices of a given length in `0..dim`, in lexicographic order.
    pub fn all(dim: usize, len: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(len);
        fn rec(start: usize, dim: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if left == 0 {
                out.push(MultiIndex::sorted(cur).expect("increasing").1);
                return;
            }
            for i in start..=dim - left {
                cur.push(i);
                rec(i + 1, dim, left - 1, cur, out);
                cur.pop();
            }
        }
        if len <= dim {
            rec(0, dim, len, &mut current, &mut out);
        }
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e")?;
        for i in self.indices() {
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

/// A constant-coefficient p-form on an n-dimensional coframe.
#[derive(Clone, PartialEq, Debug)]
pub struct Form<F = Q> {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<MultiIndex, F>,
}

impl<F: Field> Form<F> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(dim <= MAX_DIM && degree <= dim, "form shape {degree} in {dim}");
        Self {
            dim,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: F) -> Self {
        let mut f = Self::zero(dim, 0);
        f.add_term(MultiIndex::EMPTY, c);
        f
    }

    /// `e^{i1} ∧ ... ∧ e^{ip}` for 0-based indices in any order.
    pub fn basis(dim: usize, indices: &[usize]) -> Self {
        let mut f = Self::zero(dim, indices.len());
        if let Some((s, mi)) = MultiIndex::sorted(indices) {
            assert!(indices.iter().all(|&i| i < dim), "index out of range");
            f.add_term(mi, if s > 0 { F::one() } else { -F::one() });
        }
        f
    }

    pub fn from_terms(dim: usize, degree: usize, terms: impl IntoIterator<Item = (MultiIndex, F)>) -> Self {
        let mut f = Self::zero(dim, degree);
        for (mi, c) in terms {
            assert_eq!(mi.len(), degree, "term degree");
            f.add_term(mi, c);
        }
        f
    }

    /// Builds a form from 0-based index lists with coefficients.
    pub fn from_index_terms(dim: usize, degree: usize, terms: &[(&[usize], F)]) -> Self {
        let mut f = Self::zero(dim, degree);
        for (idx, c) in terms {
            assert_eq!(idx.len(), degree);
            let b = Self::basis(dim, idx);
            f = f.add(&b.scale(c));
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of nonzero terms; `is_zero` is the emptiness test.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &F)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, mi: MultiIndex) -> F {
        self.coeffs.get(&mi).cloned().unwrap_or_else(F::zero)
    }

    /// Coefficient of `e^{indices}` with the permutation sign applied.
    pub fn component(&self, indices: &[usize]) -> F {
        match MultiIndex::sorted(indices) {
            Some((s, mi)) if mi.len() == self.degree => {
                let c = self.coeff(mi);
                if s > 0 {
                    c
                } else {
                    -c
                }
            }
            _ => F::zero(),
        }
    }

    pub fn add_term(&mut self, mi: MultiIndex, c: F) {
        debug_assert_eq!(mi.len(), self.degree);
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&mi) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.coeffs.remove(&mi);
                }
            }
            None => {
                self.coeffs.insert(mi, c);
            }
        }
    }

    fn same_shape(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "frame dimension mismatch");
        assert_eq!(self.degree, other.degree, "degree mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_shape(other);
        let mut out = self.clone();
        for (mi, c) in &other.coeffs {
            out.add_term(*mi, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.same_shape(other);
        let mut out = self.clone();
        for (mi, c) in &other.coeffs {
            out.add_term(*mi, -c.clone());
        }
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.same_shape(other);
        for (mi, c) in &other.coeffs {
            self.add_term(*mi, c.clone());
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-F::one())
    }

    pub fn scale(&self, s: &F) -> Self {
        if s.is_zero() {
            return Self::zero(self.dim, self.degree);
        }
        Self {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v.clone() * s)).collect(),
        }
    }

    pub fn try_wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::FrameMismatch(self.dim, other.dim));
        }
        let deg = self.degree + other.degree;
        let mut out = Self::zero(self.dim, deg.min(self.dim));
        if deg > self.dim {
            return Ok(out);
        }
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                if let Some((s, m)) = a.wedge(*b) {
                    let c = ca.clone() * cb;
                    out.add_term(m, if s > 0 { c } else { -c });
                }
            }
        }
        Ok(out)
    }

    /// Exterior product. Panics on frame mismatch; see [`Form::try_wedge`].
    ///
    /// Products above top degree return the zero form of degree `n`.
    pub fn wedge(&self, other: &Self) -> Self {
        self.try_wedge(other).expect("wedge of forms on different frames")
    }

    /// Interior product with the frame vector `e_i`.
    pub fn try_interior(&self, i: usize) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::Degree("interior product of a 0-form".into()));
        }
        let mut out = Self::zero(self.dim, self.degree - 1);
        for (mi, c) in &self.coeffs {
            if let Some((s, rest)) = mi.remove(i) {
                out.add_term(rest, if s > 0 { c.clone() } else { -c.clone() });
            }
        }
        Ok(out)
    }

    /// Interior product with `e_i`; a 0-form contracts to zero.
    pub fn interior(&self, i: usize) -> Self {
        if self.degree == 0 {
            return Self::zero(self.dim, 0);
        }
        self.try_interior(i).expect("degree checked")
    }

    /// Interior product with the vector `Σ v^i e_i`.
    pub fn interior_vec(&self, v: &[F]) -> Self {
        assert_eq!(v.len(), self.dim);
        let mut out = Self::zero(self.dim, self.degree.saturating_sub(1));
        for (i, vi) in v.iter().enumerate() {
            if !vi.is_zero() {
                out.add_assign(&self.interior(i).scale(vi));
            }
        }
        out
    }

    /// Hodge star for the orthonormal coframe with the given orientation sign.
    pub fn hodge(&self, orientation: i32) -> Self {
        let full = MultiIndex::from_mask((1u32 << self.dim) - 1);
        let mut out = Self::zero(self.dim, self.dim - self.degree);
        for (mi, c) in &self.coeffs {
            let comp = mi.complement(self.dim);
            let (s, top) = mi.wedge(comp).expect("complementary");
            debug_assert_eq!(top, full);
            let v = if s * orientation > 0 { c.clone() } else { -c.clone() };
            out.add_term(comp, v);
        }
        out
    }

    /// Orthonormal-frame inner product (bilinear, no conjugation).
    pub fn dot(&self, other: &Self) -> F {
        self.same_shape(other);
        let mut acc = F::zero();
        for (mi, c) in &self.coeffs {
            if let Some(d) = other.coeffs.get(mi) {
                acc += &(c.clone() * d);
            }
        }
        acc
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(k, v)| (*k, v.conj())).collect(),
        }
    }

    /// Dense coefficient vector in the lexicographic basis of `MultiIndex::all`.
    pub fn to_vec(&self) -> Vec<F> {
        MultiIndex::all(self.dim, self.degree)
            .into_iter()
            .map(|mi| self.coeff(mi))
            .collect()
    }

    pub fn from_vec(dim: usize, degree: usize, v: &[F]) -> Self {
        let basis = MultiIndex::all(dim, degree);
        assert_eq!(basis.len(), v.len());
        Self::from_terms(dim, degree, basis.into_iter().zip(v.iter().cloned()))
    }

    /// Evaluates the form on `degree` vectors given by frame components.
    pub fn evaluate(&self, vectors: &[Vec<F>]) -> F {
        assert_eq!(vectors.len(), self.degree);
        let mut acc = F::zero();
        for (mi, c) in &self.coeffs {
            let idx: Vec<usize> = mi.indices().collect();
            let m = crate::linalg::Matrix::from_rows(
                idx.iter()
                    .map(|&i| vectors.iter().map(|v| v[i].clone()).collect())
                    .collect(),
            );
            let det = if idx.is_empty() { F::one() } else { m.determinant() };
            acc += &(c.clone() * &det);
        }
        acc
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coeffs.values().map(Field::magnitude).fold(0.0, f64::max)
    }

    pub fn map_coeffs<G: Field>(&self, f: impl Fn(&F) -> G) -> Form<G> {
        let mut out = Form::<G>::zero(self.dim, self.degree);
        for (mi, c) in &self.coeffs {
            out.add_term(*mi, f(c));
        }
        out
    }
}

impl Form<Q> {
    pub fn complexify(&self) -> Form<GaussQ> {
        self.map_coeffs(|c| GaussQ::real(c.clone()))
    }

    /// Extends the form to a larger frame by shifting every index by `offset`.
    pub fn shifted(&self, new_dim: usize, offset: usize) -> Self {
        let mut out = Self::zero(new_dim, self.degree);
        for (mi, c) in &self.coeffs {
            let idx: Vec<usize> = mi.indices().map(|i| i + offset).collect();
            let (_, m) = MultiIndex::sorted(&idx).expect("distinct");
            out.add_term(m, c.clone());
        }
        out
    }
}

impl Form<GaussQ> {
    pub fn re(&self) -> Form<Q> {
        let mut out = Form::<Q>::zero(self.dim, self.degree);
        for (mi, c) in &self.coeffs {
            out.add_term(*mi, c.re.clone());
        }
        out
    }

    pub fn im(&self) -> Form<Q> {
        let mut out = Form::<Q>::zero(self.dim, self.degree);
        for (mi, c) in &self.coeffs {
            out.add_term(*mi, c.im.clone());
        }
        out
    }
}

impl fmt::Display for Form<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (mi, c)) in self.coeffs.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}){}", fmt_q(c), mi)?;
        }
        Ok(())
    }
}
