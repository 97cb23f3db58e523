//! SU(3) structures on 6-dimensional frames: reduction of G2 data along a
//! closed direction, type decomposition, the Strominger–Hull conditions,
//! the operator `D̄` on `Q` and the restricted operator `𝒟|_X`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{Form, FrameAlgebra, MatrixForm, MultiIndex};
use crate::g2::{self, G2Data};
use crate::gauge::{self, BundleData};
use crate::heterotic::{BlockOperator, HeteroticSystem, QForm, QLayout};
use crate::linalg::Matrix;
use crate::scalar::{q, qi, Field, GaussQ, Q};

type CForm = Form<GaussQ>;

/// `ω = e¹² + e³⁴ + e⁵⁶` (0-based `e01 + e23 + e45`).
pub fn standard_omega() -> Form {
    Form::from_index_terms(6, 2, &[(&[0, 1], qi(1)), (&[2, 3], qi(1)), (&[4, 5], qi(1))])
}

/// `Re Ψ` for `Ψ = (e¹ + ie²)(e³ + ie⁴)(e⁵ + ie⁶)`.
pub fn standard_psi_re() -> Form {
    Form::from_index_terms(
        6,
        3,
        &[
            (&[0, 2, 4], qi(1)),
            (&[0, 3, 5], qi(-1)),
            (&[1, 2, 5], qi(-1)),
            (&[1, 3, 4], qi(-1)),
        ],
    )
}

pub fn standard_psi_im() -> Form {
    Form::from_index_terms(
        6,
        3,
        &[
            (&[0, 2, 5], qi(1)),
            (&[0, 3, 4], qi(1)),
            (&[1, 2, 4], qi(1)),
            (&[1, 3, 5], qi(-1)),
        ],
    )
}

/// Complex-frame data derived from an almost complex structure `J`.
#[derive(Clone, Debug)]
struct ComplexFrame {
    j: Matrix<Q>,
    /// `J*e^a = Σ_c J[a][c] e^c`
    j_star: Vec<CForm>,
    /// (1,0) coframe `θ^μ`
    theta: Vec<CForm>,
    /// Dual vectors: `θ^ν(Z_μ) = δ`, `θ̄^ν(Z_μ) = 0`.
    z: Vec<Vec<GaussQ>>,
    zbar: Vec<Vec<GaussQ>>,
}

impl ComplexFrame {
    fn new(j: Matrix<Q>) -> Self {
        let n = j.rows();
        let j_star: Vec<CForm> = (0..n)
            .map(|a| {
                let mut f = CForm::zero(n, 1);
                for c in 0..n {
                    f.add_term(MultiIndex::from_mask(1 << c), GaussQ::real(j[(a, c)].clone()));
                }
                f
            })
            .collect();
        let mut theta: Vec<CForm> = Vec::new();
        for a in 0..n {
            if theta.len() == n / 2 {
                break;
            }
            let cand = CForm::basis(n, &[a]).sub(&j_star[a].scale(&GaussQ::i()));
            let mut rows: Vec<Vec<GaussQ>> = theta.iter().map(Form::to_vec).collect();
            rows.push(cand.to_vec());
            if Matrix::from_rows(rows).rank() == theta.len() + 1 {
                theta.push(cand);
            }
        }
        let mut rows: Vec<Vec<GaussQ>> = theta.iter().map(Form::to_vec).collect();
        rows.extend(theta.iter().map(|t| t.conj().to_vec()));
        let inv = Matrix::from_rows(rows)
            .inverse()
            .expect("(1,0) and (0,1) coframes span");
        let h = n / 2;
        Self {
            z: (0..h).map(|m| inv.col(m)).collect(),
            zbar: (0..h).map(|m| inv.col(h + m)).collect(),
            j,
            j_star,
            theta,
        }
    }

    /// The derivation extending `J*`; acts as `i(p − q)` on `(p,q)`-forms.
    fn derivation(&self, a: &CForm) -> CForm {
        let mut out = CForm::zero(a.dim(), a.degree());
        if a.degree() == 0 {
            return out;
        }
        for (b, jb) in self.j_star.iter().enumerate() {
            let ib = a.interior(b);
            if !ib.is_zero() {
                out.add_assign(&jb.wedge(&ib));
            }
        }
        out
    }

    fn type_part(&self, a: &CForm, p: usize, q: usize) -> CForm {
        let k = a.degree();
        let half = a.dim() / 2;
        if p + q != k || p > half || q > half {
            return CForm::zero(a.dim(), k);
        }
        let target = p as i64 - q as i64;
        let mut out = a.clone();
        for p2 in k.saturating_sub(half)..=k.min(half) {
            let m = 2 * p2 as i64 - k as i64;
            if m == target {
                continue;
            }
            // (L − i m) / (i target − i m)
            let shifted = self.derivation(&out).sub(&out.scale(&GaussQ::new(qi(0), qi(m))));
            let denom = GaussQ::new(qi(0), qi(target - m));
            out = shifted.scale(&denom.inv());
        }
        out
    }
}

/// Forms of fixed degree split by `(p,q)` type.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeDecomposition {
    parts: BTreeMap<(usize, usize), CForm>,
    dim: usize,
    degree: usize,
}

impl TypeDecomposition {
    pub fn part(&self, p: usize, q: usize) -> CForm {
        self.parts
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| CForm::zero(self.dim, self.degree))
    }

    /// Nonzero components only.
    pub fn parts(&self) -> impl Iterator<Item = (&(usize, usize), &CForm)> {
        self.parts.iter()
    }

    pub fn types(&self) -> Vec<(usize, usize)> {
        self.parts.keys().copied().collect()
    }

    pub fn sum(&self) -> CForm {
        let mut out = CForm::zero(self.dim, self.degree);
        for f in self.parts.values() {
            out.add_assign(f);
        }
        out
    }
}

/// An SU(3) structure `(ω, Ψ)` on an orthonormal 6-dimensional coframe.
#[derive(Clone, Debug)]
pub struct SU3Data {
    frame: FrameAlgebra,
    omega: Form,
    psi_re: Form,
    psi_im: Form,
    complex: Option<ComplexFrame>,
}

impl SU3Data {
    /// Checks shapes and adaptedness. `J` is derived when `(ω, Ψ)` admit one;
    /// otherwise operations needing it return [`Error::NotCompatible`].
    pub fn new(frame: FrameAlgebra, omega: Form, psi_re: Form, psi_im: Form) -> Result<Self> {
        if frame.dim() != 6 {
            return Err(Error::FrameMismatch(frame.dim(), 6));
        }
        for (f, deg, name) in [(&omega, 2, "ω"), (&psi_re, 3, "Re Ψ"), (&psi_im, 3, "Im Ψ")] {
            if f.dim() != 6 {
                return Err(Error::FrameMismatch(f.dim(), 6));
            }
            if f.degree() != deg {
                return Err(Error::Degree(format!(
                    "{name} must have degree {deg}, got {}",
                    f.degree()
                )));
            }
        }
        if !frame.is_adapted() {
            return Err(Error::NotAdapted("SU(3) data needs an orthonormal coframe".into()));
        }
        let complex = almost_complex(&omega, &psi_re, &psi_im).ok().map(ComplexFrame::new);
        Ok(Self {
            frame,
            omega,
            psi_re,
            psi_im,
            complex,
        })
    }

    pub fn standard(frame: FrameAlgebra) -> Result<Self> {
        Self::new(frame, standard_omega(), standard_psi_re(), standard_psi_im())
    }

    pub fn frame(&self) -> &FrameAlgebra {
        &self.frame
    }

    pub fn omega(&self) -> &Form {
        &self.omega
    }

    pub fn psi_re(&self) -> &Form {
        &self.psi_re
    }

    pub fn psi_im(&self) -> &Form {
        &self.psi_im
    }

    pub fn psi(&self) -> CForm {
        self.psi_re
            .complexify()
            .add(&self.psi_im.complexify().scale(&GaussQ::i()))
    }

    pub fn with_frame(&self, frame: FrameAlgebra) -> Result<Self> {
        Self::new(frame, self.omega.clone(), self.psi_re.clone(), self.psi_im.clone())
    }

    /// Pulls `(ω, Ψ)` back along `e^a ↦ Σ_b O[a][b] e^b`; orthogonal `O` keeps the frame adapted.
    pub fn transformed(&self, o: &Matrix<Q>) -> Result<Self> {
        Self::new(
            self.frame.clone(),
            pull_back(&self.omega, o),
            pull_back(&self.psi_re, o),
            pull_back(&self.psi_im, o),
        )
    }

    fn cx(&self) -> Result<&ComplexFrame> {
        match &self.complex {
            Some(c) => Ok(c),
            None => Err(almost_complex(&self.omega, &self.psi_re, &self.psi_im).unwrap_err()),
        }
    }

    /// The almost complex structure, `J e_a = Σ_b J[b][a] e_b`.
    pub fn j(&self) -> Result<&Matrix<Q>> {
        Ok(&self.cx()?.j)
    }

    /// The `(1,0)` coframe `θ^μ = e^a − iJ*e^a` for three independent `a`.
    pub fn holomorphic_coframe(&self) -> Result<&[CForm]> {
        Ok(&self.cx()?.theta)
    }

    /// Components of the `(1,0)` vectors `Z_μ` dual to the holomorphic coframe.
    pub fn holomorphic_frame(&self) -> Result<&[Vec<GaussQ>]> {
        Ok(&self.cx()?.z)
    }

    pub fn type_part(&self, a: &CForm, p: usize, q: usize) -> Result<CForm> {
        Ok(self.cx()?.type_part(a, p, q))
    }

    pub fn type_decompose(&self, a: &CForm) -> Result<TypeDecomposition> {
        let cx = self.cx()?;
        let k = a.degree();
        let mut parts = BTreeMap::new();
        for p in k.saturating_sub(3)..=k.min(3) {
            let part = cx.type_part(a, p, k - p);
            if !part.is_zero() {
                parts.insert((p, k - p), part);
            }
        }
        Ok(TypeDecomposition {
            parts,
            dim: a.dim(),
            degree: k,
        })
    }

    /// `∂̄a = Σ π^{(p,q+1)} d π^{(p,q)} a`.
    pub fn dbar(&self, a: &CForm) -> Result<CForm> {
        self.shifted_d(a, false)
    }

    /// `∂a = Σ π^{(p+1,q)} d π^{(p,q)} a`.
    pub fn del(&self, a: &CForm) -> Result<CForm> {
        self.shifted_d(a, true)
    }

    fn shifted_d(&self, a: &CForm, holomorphic: bool) -> Result<CForm> {
        let cx = self.cx()?;
        let k = a.degree();
        let mut out = CForm::zero(a.dim(), (k + 1).min(a.dim()));
        if k == a.dim() {
            return Ok(out);
        }
        for p in k.saturating_sub(3)..=k.min(3) {
            let part = cx.type_part(a, p, k - p);
            if part.is_zero() {
                continue;
            }
            let (p2, q2) = if holomorphic { (p + 1, k - p) } else { (p, k - p + 1) };
            out.add_assign(&cx.type_part(&self.frame.d(&part), p2, q2));
        }
        Ok(out)
    }
}

/// Pulls a form back along the linear map `e^a ↦ Σ_b O[a][b] e^b`.
pub fn pull_back<F: Field>(form: &Form<F>, o: &Matrix<F>) -> Form<F> {
    let n = form.dim();
    let images: Vec<Form<F>> = (0..n)
        .map(|a| {
            let mut f = Form::zero(n, 1);
            for b in 0..n {
                f.add_term(MultiIndex::from_mask(1 << b), o[(a, b)].clone());
            }
            f
        })
        .collect();
    let mut out = Form::zero(n, form.degree());
    for (mi, c) in form.terms() {
        let mut t = Form::constant(n, c.clone());
        for i in mi.indices() {
            t = t.wedge(&images[i]);
        }
        out.add_assign(&t);
    }
    out
}

/// Rational orthogonal matrix `(I − K)(I + K)⁻¹` for skew `K`.
pub fn cayley(k: &Matrix<Q>) -> Matrix<Q> {
    let n = k.rows();
    let id = Matrix::identity(n);
    let inv = id.add(k).inverse().expect("I + K is invertible for skew K");
    id.sub(k).mul(&inv)
}

/// `J` with `J[b][a] = ω(e_a, e_b)`, sign fixed so that `Ψ` is `(3,0)`.
pub fn almost_complex(omega: &Form, psi_re: &Form, psi_im: &Form) -> Result<Matrix<Q>> {
    let n = omega.dim();
    let mut j = Matrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            if a != b {
                j[(b, a)] = omega.component(&[a, b]);
            }
        }
    }
    if j.mul(&j) != Matrix::identity(n).scale(&qi(-1)) {
        return Err(Error::NotCompatible("ω does not define J with J² = −1".into()));
    }
    let psi = psi_re.complexify().add(&psi_im.complexify().scale(&GaussQ::i()));
    if psi.is_zero() {
        return Err(Error::NotCompatible("Ψ = 0".into()));
    }
    for sign in [1, -1] {
        let cand = j.scale(&qi(sign));
        let cx = ComplexFrame::new(cand.clone());
        if cx.derivation(&psi) == psi.scale(&GaussQ::new(qi(0), qi(3))) {
            return Ok(cand);
        }
    }
    Err(Error::NotCompatible(
        "Ψ is not of type (3,0) for either sign of J".into(),
    ))
}

/// The defining relations `ω∧Ψ = 0` and `(i/‖Ψ‖²) Ψ∧Ψ̄ = ω³/6`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Su3Compatibility {
    pub omega_wedge_psi: bool,
    pub volume: bool,
}

impl Su3Compatibility {
    pub fn holds(&self) -> bool {
        self.omega_wedge_psi && self.volume
    }
}

pub fn su3_compatibility(s: &SU3Data) -> Su3Compatibility {
    let psi = s.psi();
    let om = s.omega.complexify();
    let norm = s.psi_re.dot(&s.psi_re) + &s.psi_im.dot(&s.psi_im);
    let volume = !norm.is_zero() && {
        let lhs = psi.wedge(&psi.conj()).scale(&GaussQ::new(qi(0), qi(1) / norm));
        let rhs = om.wedge(&om).wedge(&om).scale(&GaussQ::real(q(1, 6)));
        lhs == rhs
    };
    Su3Compatibility {
        omega_wedge_psi: om.wedge(&psi).is_zero(),
        volume,
    }
}

/// Splits `φ = e^r∧ω + Re Ψ`, `ψ = −e^r∧Im Ψ + ½ω∧ω` and relabels the
/// remaining indices in order. Returns `(ω, Re Ψ, Im Ψ)` on 6 indices.
pub fn reduce_g2(phi: &Form, psi: &Form, r_index: usize) -> Result<(Form, Form, Form)> {
    let n = phi.dim();
    if n != 7 || psi.dim() != 7 || r_index >= 7 {
        return Err(Error::NotACylinderStructure(
            "need 7-dimensional forms and r < 7".into(),
        ));
    }
    let er = Form::basis(7, &[r_index]);
    let omega = phi.interior(r_index);
    if omega.terms().any(|(mi, _)| mi.contains(r_index)) {
        return Err(Error::NotACylinderStructure("ω has an r component".into()));
    }
    let re = phi.sub(&er.wedge(&omega));
    let im = psi.interior(r_index).neg();
    let check = psi.add(&er.wedge(&im));
    if omega.wedge(&omega).scale(&q(1, 2)) != check {
        return Err(Error::NotACylinderStructure("ψ ≠ −e^r∧Im Ψ + ½ω∧ω".into()));
    }
    Ok((
        drop_index(&omega, r_index)?,
        drop_index(&re, r_index)?,
        drop_index(&im, r_index)?,
    ))
}

/// Re-expresses a form without index `r` on one fewer index.
pub fn drop_index(form: &Form, r: usize) -> Result<Form> {
    let mut out = Form::zero(form.dim() - 1, form.degree());
    for (mi, c) in form.terms() {
        if mi.contains(r) {
            return Err(Error::NotACylinderStructure(format!(
                "form has a component along index {r}"
            )));
        }
        let idx: Vec<usize> = mi.indices().map(|i| if i > r { i - 1 } else { i }).collect();
        let (_, m) = MultiIndex::sorted(&idx).expect("distinct");
        out.add_term(m, c.clone());
    }
    Ok(out)
}

/// The 6-dimensional algebra transverse to a closed, central direction `r`.
pub fn reduce_frame(frame: &FrameAlgebra, r: usize) -> Result<FrameAlgebra> {
    let mut constants = Vec::new();
    for (a, b, c, v) in frame.nonzero_constants() {
        if a == r || b == r || c == r {
            return Err(Error::NotACylinderStructure(format!(
                "structure constant f^{}_{}{} involves the r direction",
                a + 1,
                b + 1,
                c + 1
            )));
        }
        let s = |i: usize| if i > r { i - 1 } else { i };
        constants.push((s(a), s(b), s(c), v));
    }
    FrameAlgebra::new(frame.dim() - 1, &constants)?.with_orientation(frame.orientation())
}

/// `φ = e^0∧ω + Re Ψ` on the cylinder frame with `r` at index 0.
pub fn lift_structure(s: &SU3Data) -> Result<G2Data> {
    let er = Form::basis(7, &[0]);
    let phi = er.wedge(&s.omega.shifted(7, 1)).add(&s.psi_re.shifted(7, 1));
    G2Data::new(s.frame.cylinder(), phi)
}

/// Exact solution of `dΨ = W̄∧Ψ` with `W̄` of type (0,1); returns `W₁^Ψ = conj(W̄)`.
pub fn complex_check(s: &SU3Data) -> Result<CForm> {
    let cx = s.cx()?;
    let psi = s.psi();
    let dpsi = s.frame.d(&psi);
    let cols: Vec<Vec<GaussQ>> = cx.theta.iter().map(|t| t.conj().wedge(&psi).to_vec()).collect();
    let m = Matrix::from_cols(dpsi.to_vec().len(), &cols);
    match m.solve(&dpsi.to_vec()) {
        Some(c) => {
            let mut wbar = CForm::zero(6, 1);
            for (ci, t) in c.iter().zip(&cx.theta) {
                wbar.add_assign(&t.conj().scale(ci));
            }
            Ok(wbar.conj())
        }
        None => {
            let residual = cx.type_part(&dpsi, 2, 2).max_magnitude();
            Err(Error::NotComplex(residual))
        }
    }
}

/// Exact solution of `d(ω∧ω) = 2 W₁^ω∧ω∧ω`.
///
/// `β ↦ β∧ω²` is injective on 1-forms in six dimensions, so the solve only
/// fails for degenerate `ω`.
pub fn balanced_check(s: &SU3Data) -> Result<Form> {
    let om2 = s.omega.wedge(&s.omega);
    let target = s.frame.d(&om2);
    let cols: Vec<Vec<Q>> = (0..6)
        .map(|a| Form::basis(6, &[a]).wedge(&om2).scale(&qi(2)).to_vec())
        .collect();
    let m = Matrix::from_cols(target.to_vec().len(), &cols);
    match m.solve(&target.to_vec()) {
        Some(c) => Ok(Form::from_vec(6, 1, &c)),
        None => Err(Error::NotConformallyBalanced(target.max_magnitude())),
    }
}

/// Torsion data of a complex SU(3) structure.
#[derive(Clone, Debug, PartialEq)]
pub struct SU3Torsion {
    pub w1_omega: Form,
    pub w1_psi_re: Form,
    pub w1_psi_im: Form,
    pub h6: Form,
}

pub fn su3_torsion(s: &SU3Data) -> Result<SU3Torsion> {
    let w1_psi = complex_check(s)?;
    Ok(SU3Torsion {
        w1_omega: balanced_check(s)?,
        w1_psi_re: w1_psi.re(),
        w1_psi_im: w1_psi.im(),
        h6: dc_omega(s)?,
    })
}

/// `Re(W₁^Ψ) = W₁^ω`.
pub fn lee_compatibility(t: &SU3Torsion) -> bool {
    t.w1_psi_re == t.w1_omega
}

/// `H = −dᶜω = i(∂ − ∂̄)ω`; fails if `dω` has a `(3,0) + (0,3)` part.
pub fn dc_omega(s: &SU3Data) -> Result<Form> {
    let cx = s.cx()?;
    let dom = s.frame.d(&s.omega.complexify());
    let outer = cx.type_part(&dom, 3, 0).add(&cx.type_part(&dom, 0, 3));
    if !outer.is_zero() {
        return Err(Error::NotComplex(outer.max_magnitude()));
    }
    dc_omega_formula(s)
}

/// `i(∂ − ∂̄)ω` from the `(2,1)` and `(1,2)` parts of `dω`, without the integrability gate.
pub fn dc_omega_formula(s: &SU3Data) -> Result<Form> {
    let cx = s.cx()?;
    let dom = s.frame.d(&s.omega.complexify());
    let h = cx
        .type_part(&dom, 2, 1)
        .sub(&cx.type_part(&dom, 1, 2))
        .scale(&GaussQ::i());
    if !h.im().is_zero() {
        return Err(Error::Internal("i(∂ − ∂̄)ω is not real".into()));
    }
    Ok(h.re())
}

/// Holomorphic Yang–Mills residuals of a curvature, with the type classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HymReport {
    pub wedge_psi: bool,
    pub wedge_psi_bar: bool,
    pub wedge_omega2: bool,
    /// No `(2,0)` or `(0,2)` part in any entry.
    pub type_11: bool,
    /// `⟨F, ω⟩ = 0` entrywise.
    pub primitive: bool,
}

impl HymReport {
    pub fn holds(&self) -> bool {
        self.wedge_psi && self.wedge_psi_bar && self.wedge_omega2
    }
}

pub fn hol_ym_check(f: &MatrixForm, s: &SU3Data) -> Result<HymReport> {
    let cx = s.cx()?;
    let psi = s.psi();
    let psi_bar = psi.conj();
    let om2 = s.omega.wedge(&s.omega);
    let mut r = HymReport {
        wedge_psi: true,
        wedge_psi_bar: true,
        wedge_omega2: true,
        type_11: true,
        primitive: true,
    };
    for e in f.entries() {
        if e.is_zero() {
            continue;
        }
        let ec = e.complexify();
        r.wedge_psi &= ec.wedge(&psi).is_zero();
        r.wedge_psi_bar &= ec.wedge(&psi_bar).is_zero();
        r.wedge_omega2 &= e.wedge(&om2).is_zero();
        r.type_11 &= cx.type_part(&ec, 2, 0).is_zero() && cx.type_part(&ec, 0, 2).is_zero();
        r.primitive &= e.dot(&s.omega).is_zero();
    }
    Ok(r)
}

/// `dH − α'/4 (tr F∧F − tr R∧R)` in six dimensions.
pub fn sh_bianchi(frame: &FrameAlgebra, h6: &Form, f: &MatrixForm, r: &MatrixForm, alpha_prime: &Q) -> Form {
    gauge::bianchi_residual(frame, h6, f, r, alpha_prime)
}

/// Verdicts of the Strominger–Hull conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShVerdicts {
    pub su3_compatible: bool,
    pub complex: bool,
    /// `W₁^ω` exists and is closed.
    pub conformally_balanced: bool,
    /// `None` when `X` is not complex.
    pub lee_compatible: Option<bool>,
    pub hym_a: bool,
    pub hym_theta: bool,
    /// `None` when `X` is not complex: `−dᶜω` presupposes integrability.
    pub bianchi: Option<bool>,
}

impl ShVerdicts {
    pub fn strominger_hull(&self) -> bool {
        self.su3_compatible
            && self.complex
            && self.conformally_balanced
            && self.lee_compatible == Some(true)
            && self.hym_a
            && self.hym_theta
            && self.bianchi == Some(true)
    }
}

/// A 6-dimensional heterotic system with the restricted operator `𝒟|_X`.
#[derive(Clone, Debug)]
pub struct ShSystem {
    su3: SU3Data,
    gauge: BundleData,
    tangent: BundleData,
    alpha_prime: Q,
    h: Form,
    op: BlockOperator,
}

impl ShSystem {
    /// Uses `H = i(∂ − ∂̄)ω` and `ζ` opposite to `∇^LC + ½H`, as in seven dimensions.
    pub fn new(su3: SU3Data, gauge: BundleData, tangent: BundleData, alpha_prime: Q) -> Result<Self> {
        let h = dc_omega_formula(&su3)?;
        let nabla = gauge::zeta_connection(&gauge::levi_civita(su3.frame())?, &h);
        let zeta = nabla.opposite(su3.frame());
        let op = BlockOperator::new(su3.frame().clone(), &gauge, &tangent, zeta, &alpha_prime)?;
        Ok(Self {
            su3,
            gauge,
            tangent,
            alpha_prime,
            h,
            op,
        })
    }

    pub fn trivial_t6(rank_v: usize) -> Self {
        let su3 = SU3Data::standard(FrameAlgebra::abelian(6)).expect("standard structure");
        Self::new(
            su3,
            BundleData::trivial(rank_v, 6),
            BundleData::trivial(6, 6),
            Q::zero(),
        )
        .expect("flat data")
    }

    pub fn su3(&self) -> &SU3Data {
        &self.su3
    }

    pub fn gauge(&self) -> &BundleData {
        &self.gauge
    }

    pub fn tangent(&self) -> &BundleData {
        &self.tangent
    }

    pub fn alpha_prime(&self) -> &Q {
        &self.alpha_prime
    }

    pub fn flux(&self) -> &Form {
        &self.h
    }

    pub fn operator(&self) -> &BlockOperator {
        &self.op
    }

    pub fn layout(&self) -> QLayout {
        self.op.layout()
    }

    pub fn verdicts(&self) -> ShVerdicts {
        let s = &self.su3;
        let complex = complex_check(s).ok();
        let w1_omega = balanced_check(s).ok();
        let hym = |f: &MatrixForm| hol_ym_check(f, s).map(|r| r.holds()).unwrap_or(false);
        let is_complex = complex.is_some() && dc_omega(s).is_ok();
        let bianchi = is_complex.then(|| {
            sh_bianchi(
                s.frame(),
                &self.h,
                self.op.gauge_curvature(),
                self.op.tangent_curvature(),
                &self.alpha_prime,
            )
            .is_zero()
        });
        ShVerdicts {
            su3_compatible: su3_compatibility(s).holds(),
            complex: is_complex,
            conformally_balanced: w1_omega.as_ref().is_some_and(|w| s.frame().d(w).is_zero()),
            lee_compatible: match (&complex, &w1_omega) {
                (Some(wp), Some(wo)) if is_complex => Some(&wp.re() == wo),
                _ => None,
            },
            hym_a: hym(self.op.gauge_curvature()),
            hym_theta: hym(self.op.tangent_curvature()),
            bianchi,
        }
    }

    /// The cylinder system on `R ⊕ X` with `r` at index 0 and no `r` components.
    pub fn lift_to_cylinder(&self) -> Result<HeteroticSystem> {
        let g2 = lift_structure(&self.su3)?;
        let tangent = BundleData::new(
            7,
            (0..7)
                .map(|a| {
                    if a == 0 {
                        Matrix::zeros(7, 7)
                    } else {
                        embed_matrix(self.tangent.coeff(a - 1), 7, 1)
                    }
                })
                .collect(),
        )?
        .with_group(self.tangent.group());
        HeteroticSystem::new(g2, self.gauge.shifted(7, 1), tangent, self.alpha_prime.clone())
    }

    /// Inverse of [`ShSystem::lift_to_cylinder`] for `r` at index 0.
    pub fn reduce(sys: &HeteroticSystem) -> Result<Self> {
        let frame = reduce_frame(sys.g2().frame(), 0)?;
        let (omega, re, im) = reduce_g2(sys.g2().phi(), sys.g2().psi(), 0)?;
        let su3 = SU3Data::new(frame, omega, re, im)?;
        let gauge = reduce_bundle(sys.gauge(), false)?;
        let tangent = reduce_bundle(sys.tangent(), true)?;
        Self::new(su3, gauge, tangent, sys.alpha_prime().clone())
    }

    /// `D̄`: the `(0,1)` part of the complexified `𝒟|_X`, read on `Q`.
    pub fn dbar(&self, z: &QSixForm) -> Result<QSixForm> {
        let cx = self.su3.cx()?;
        for (f, name) in [(self.op.gauge_curvature(), "F"), (self.op.tangent_curvature(), "R")] {
            for e in f.entries() {
                let ec = e.complexify();
                if !cx.type_part(&ec, 2, 0).is_zero() || !cx.type_part(&ec, 0, 2).is_zero() {
                    return Err(Error::Type(format!("{name} has a (2,0) or (0,2) part")));
                }
            }
        }
        let zq = z.to_qform(&self.su3)?;
        let out = self.dbar_qform(&zq)?;
        QSixForm::from_qform(&out, &self.su3)
    }

    /// `Σ_{p,q} π^{(p,q+1)} 𝒟 π^{(p,q)}` on complex `𝒬|_X`-valued forms.
    pub fn dbar_qform(&self, z: &QForm<GaussQ>) -> Result<QForm<GaussQ>> {
        let cx = self.su3.cx()?;
        let k = z.degree();
        let mut out = QForm::<GaussQ>::zero(self.layout(), (k + 1).min(6));
        for p in k.saturating_sub(3)..=k.min(3) {
            let part = z.map(|f| cx.type_part(f, p, k - p));
            if part.is_zero() {
                continue;
            }
            let image = self.apply_complex(&part);
            out = out.add(&image.map(|f| cx.type_part(f, p, k - p + 1)));
        }
        Ok(out)
    }

    /// `𝒟|_X` extended complex-linearly.
    pub fn apply_complex(&self, z: &QForm<GaussQ>) -> QForm<GaussQ> {
        let re = self.op.apply(&z.map_to(Form::re));
        let im = self.op.apply(&z.map_to(Form::im));
        re.map_to(Form::complexify)
            .add(&im.map_to(Form::complexify).scale(&GaussQ::i()))
    }
}

fn embed_matrix(m: &Matrix<Q>, n: usize, offset: usize) -> Matrix<Q> {
    let mut out = Matrix::zeros(n, n);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out[(i + offset, j + offset)] = m[(i, j)].clone();
        }
    }
    out
}

fn reduce_bundle(b: &BundleData, tangent: bool) -> Result<BundleData> {
    if !b.coeff(0).is_zero() {
        return Err(Error::NotACylinderStructure("connection has an r component".into()));
    }
    let r = b.rank();
    let coeffs = (1..b.dim())
        .map(|a| {
            let m = b.coeff(a);
            if !tangent {
                return Ok(m.clone());
            }
            if (0..r).any(|i| !m[(0, i)].is_zero() || !m[(i, 0)].is_zero()) {
                return Err(Error::NotACylinderStructure(
                    "tangent connection mixes in the r direction".into(),
                ));
            }
            Ok(Matrix::from_rows(
                (1..r).map(|i| (1..r).map(|j| m[(i, j)].clone()).collect()).collect(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BundleData::new(if tangent { r - 1 } else { r }, coeffs)?.with_group(b.group()))
}

/// A `Q`-valued form `(W, κ, α, M)`: `W_μ` on `T*^{(1,0)}`, endomorphism
/// blocks, and `M^ν` on `T^{(1,0)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct QSixForm {
    pub w: Vec<CForm>,
    pub kappa: MatrixForm<GaussQ>,
    pub alpha: MatrixForm<GaussQ>,
    pub mvec: Vec<CForm>,
}

pub const QSIX_BLOCK_NAMES: [&str; 4] = ["T*(1,0)", "End(TX)", "End(V)", "T(1,0)"];

impl QSixForm {
    pub fn zero(rank_v: usize, p: usize) -> Self {
        Self {
            w: vec![CForm::zero(6, p); 3],
            kappa: MatrixForm::zero(6, 6, p),
            alpha: MatrixForm::zero(rank_v, 6, p),
            mvec: vec![CForm::zero(6, p); 3],
        }
    }

    pub fn degree(&self) -> usize {
        self.w.first().map_or(0, Form::degree)
    }

    pub fn rank_v(&self) -> usize {
        self.alpha.rank()
    }

    /// Number of complex basis elements of invariant `p`-forms.
    pub fn space_dim(rank_v: usize, p: usize) -> usize {
        (42 + rank_v * rank_v) * MultiIndex::all(6, p).len()
    }

    /// `k`-th basis element, ordered by fiber component then multi-index.
    pub fn basis(rank_v: usize, p: usize, k: usize) -> Self {
        let per = MultiIndex::all(6, p).len();
        let (c, i) = (k / per, k % per);
        let mut v = vec![GaussQ::zero(); (42 + rank_v * rank_v) * per];
        v[c * per + i] = GaussQ::one();
        Self::from_vec(rank_v, p, &v)
    }

    /// Block index (0..4) of the `k`-th basis element.
    pub fn basis_block(rank_v: usize, p: usize, k: usize) -> usize {
        let c = k / MultiIndex::all(6, p).len();
        match c {
            c if c < 3 => 0,
            c if c < 39 => 1,
            c if c < 39 + rank_v * rank_v => 2,
            _ => 3,
        }
    }

    pub fn components(&self) -> impl Iterator<Item = &CForm> {
        self.w
            .iter()
            .chain(self.kappa.entries())
            .chain(self.alpha.entries())
            .chain(&self.mvec)
    }

    pub fn to_vec(&self) -> Vec<GaussQ> {
        self.components().flat_map(Form::to_vec).collect()
    }

    pub fn from_vec(rank_v: usize, p: usize, v: &[GaussQ]) -> Self {
        let per = MultiIndex::all(6, p).len();
        let mut forms = v.chunks(per).map(|c| CForm::from_vec(6, p, c));
        let w = forms.by_ref().take(3).collect();
        let kappa = MatrixForm::from_entries(6, forms.by_ref().take(36).collect());
        let alpha = MatrixForm::from_entries(rank_v, forms.by_ref().take(rank_v * rank_v).collect());
        let mvec = forms.take(3).collect();
        Self { w, kappa, alpha, mvec }
    }

    pub fn is_zero(&self) -> bool {
        self.components().all(Form::is_zero)
    }

    pub fn block_is_zero(&self, block: usize) -> bool {
        match block {
            0 => self.w.iter().all(Form::is_zero),
            1 => self.kappa.is_zero(),
            2 => self.alpha.is_zero(),
            _ => self.mvec.iter().all(Form::is_zero),
        }
    }

    /// `M = W_μ θ^μ + g_{μ̄ν} M^ν θ̄^μ` with the endomorphism blocks unchanged.
    pub fn to_qform(&self, s: &SU3Data) -> Result<QForm<GaussQ>> {
        let cx = s.cx()?;
        let p = self.degree();
        let mut m = vec![CForm::zero(6, p); 6];
        for mu in 0..3 {
            let th = cx.theta[mu].to_vec();
            let thb = cx.theta[mu].conj().to_vec();
            // g(Z̄_μ, Z_ν) = Σ_a Z̄_μ^a Z_ν^a
            let lowered = (0..3).fold(CForm::zero(6, p), |acc, nu| {
                let g: GaussQ = (0..6).fold(GaussQ::zero(), |s, a| s + &(cx.zbar[mu][a].clone() * &cx.z[nu][a]));
                acc.add(&self.mvec[nu].scale(&g))
            });
            for a in 0..6 {
                m[a] = m[a].add(&self.w[mu].scale(&th[a])).add(&lowered.scale(&thb[a]));
            }
        }
        Ok(QForm {
            m,
            kappa: self.kappa.clone(),
            alpha: self.alpha.clone(),
        })
    }

    /// `W_μ = M(Z_μ)`, `M^ν = θ^ν(M^♯)`.
    pub fn from_qform(z: &QForm<GaussQ>, s: &SU3Data) -> Result<Self> {
        let cx = s.cx()?;
        let p = z.degree();
        let contract = |v: &[GaussQ]| {
            z.m.iter()
                .zip(v)
                .fold(CForm::zero(6, p), |acc, (ma, va)| acc.add(&ma.scale(va)))
        };
        Ok(Self {
            w: cx.z.iter().map(|v| contract(v)).collect(),
            kappa: z.kappa.clone(),
            alpha: z.alpha.clone(),
            mvec: cx.theta.iter().map(|t| contract(&t.to_vec())).collect(),
        })
    }
}

/// `D̄²` on the invariant bases of `p`-forms for `p ∈ degrees`; counts nonzero images.
pub fn dbar_squared_defect(sys: &ShSystem, degrees: &[usize]) -> Result<usize> {
    let rank_v = sys.gauge().rank();
    let mut bad = 0;
    for &p in degrees {
        let n = QSixForm::space_dim(rank_v, p);
        let results: Vec<Result<bool>> = (0..n)
            .into_par_iter()
            .map(|k| {
                let z = QSixForm::basis(rank_v, p, k);
                Ok(!sys.dbar(&sys.dbar(&z)?)?.is_zero())
            })
            .collect();
        for r in results {
            bad += usize::from(r?);
        }
    }
    Ok(bad)
}

/// The holomorphic Yang–Mills test on `F_{𝒟|X} = (𝒟|_X)²` against the SH verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictedHymReport {
    /// Basis sections whose curvature image fails each condition.
    pub psi_failures: usize,
    pub psi_bar_failures: usize,
    pub omega2_failures: usize,
    /// Failing sections per `(output, input)` block of `𝒬|_X`.
    pub failing_blocks: Vec<(usize, usize)>,
    pub holomorphic_yang_mills: bool,
    pub sh: ShVerdicts,
    pub agree: bool,
}

pub fn restricted_instanton_check(sys: &ShSystem) -> Result<RestrictedHymReport> {
    let s = sys.su3();
    let psi = s.psi();
    let psi_bar = psi.conj();
    let om2 = s.omega().wedge(s.omega());
    let layout = sys.layout();
    let n = layout.space_dim(0);
    let rows: Vec<(usize, [bool; 3], Vec<usize>)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let z = QForm::<Q>::basis(layout, 0, k);
            let img = sys.operator().apply(&sys.operator().apply(&z));
            let mut fails = [false; 3];
            let mut blocks = Vec::new();
            for (c, f) in img.components().enumerate() {
                if f.is_zero() {
                    continue;
                }
                let fc = f.complexify();
                let here = [
                    !fc.wedge(&psi).is_zero(),
                    !fc.wedge(&psi_bar).is_zero(),
                    !f.wedge(&om2).is_zero(),
                ];
                if here.iter().any(|&b| b) {
                    blocks.push(layout.block_of_component(c));
                }
                for i in 0..3 {
                    fails[i] |= here[i];
                }
            }
            (layout.basis_block(0, k), fails, blocks)
        })
        .collect();
    let count = |i: usize| rows.iter().filter(|r| r.1[i]).count();
    let mut failing_blocks: Vec<(usize, usize)> = rows
        .iter()
        .flat_map(|(j, _, bs)| bs.iter().map(move |&i| (i + 1, j + 1)))
        .collect();
    failing_blocks.sort_unstable();
    failing_blocks.dedup();
    let (a, b, c) = (count(0), count(1), count(2));
    let hym = a == 0 && b == 0 && c == 0;
    let sh = sys.verdicts();
    Ok(RestrictedHymReport {
        psi_failures: a,
        psi_bar_failures: b,
        omega2_failures: c,
        failing_blocks,
        holomorphic_yang_mills: hym,
        agree: hym == sh.strominger_hull(),
        sh,
    })
}

/// Reduces a lifted system's flux to six dimensions (requires no `r` component).
pub fn reduced_flux(sys: &HeteroticSystem) -> Result<Form> {
    drop_index(sys.flux(), 0)
}

/// Whether the G2 structure of a lifted system is integrable.
pub fn lifted_integrable(sys: &HeteroticSystem) -> bool {
    g2::is_integrable(sys.torsion())
}

#[cfg(test)]
mod tests;
