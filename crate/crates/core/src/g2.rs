//! G2 structures on 7-dimensional frames: the standard 3-form, the induced
//! metric, representation projectors, torsion classes and the flux `H`.

use std::sync::OnceLock;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::conventions;
use crate::error::{Error, Result};
use crate::exterior::{
    contract, is_positive_definite, matrix_as_vector_form, three_form_as_vector, Form, FrameAlgebra, MultiIndex,
};
use crate::linalg::Matrix;
use crate::scalar::{q_to_f64, qi, Q};

/// `e123 + e145 + e167 + e246 - e257 - e347 - e356`
pub fn standard_phi() -> Form {
    let terms: [(&[usize], i64); 7] = [
        (&[0, 1, 2], 1),
        (&[0, 3, 4], 1),
        (&[0, 5, 6], 1),
        (&[1, 3, 5], 1),
        (&[1, 4, 6], -1),
        (&[2, 3, 6], -1),
        (&[2, 4, 5], -1),
    ];
    let mut phi = Form::zero(7, 3);
    for (idx, c) in terms {
        phi = phi.add(&Form::basis(7, idx).scale(&qi(c)));
    }
    phi
}

pub fn standard_psi() -> Form {
    standard_phi().hodge(1)
}

/// The symmetric form `B_ab` with `ι_aφ ∧ ι_bφ ∧ φ = 6 B_ab vol`.
///
/// The metric is `g = det(B)^{-1/9} B`; for an adapted coframe `B` is the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct PhiMetric {
    b: Matrix<Q>,
}

impl PhiMetric {
    pub fn bilinear(&self) -> &Matrix<Q> {
        &self.b
    }

    pub fn is_identity(&self) -> bool {
        self.b == Matrix::identity(7)
    }

    /// Floating-point metric `det(B)^{-1/9} B` (diagnostic only).
    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        let det = q_to_f64(&self.b.determinant());
        let s = det.powf(-1.0 / 9.0);
        (0..7)
            .map(|i| (0..7).map(|j| s * q_to_f64(&self.b[(i, j)])).collect())
            .collect()
    }
}

pub fn metric_from_phi(phi: &Form, orientation: i32) -> Result<PhiMetric> {
    if phi.dim() != 7 || phi.degree() != 3 {
        return Err(Error::NotAG2Structure(format!(
            "expected a 3-form in dimension 7, got degree {} in {}",
            phi.degree(),
            phi.dim()
        )));
    }
    let top = MultiIndex::from_mask((1 << 7) - 1);
    let contractions: Vec<Form> = (0..7).map(|a| phi.interior(a)).collect();
    let mut b = Matrix::zeros(7, 7);
    for i in 0..7 {
        for j in i..7 {
            let v = contractions[i].wedge(&contractions[j]).wedge(phi).coeff(top) * qi(orientation as i64) / qi(6);
            b[(i, j)] = v.clone();
            b[(j, i)] = v;
        }
    }
    if !is_positive_definite(&b) {
        return Err(Error::NotAG2Structure(
            "φ does not induce a positive-definite metric".into(),
        ));
    }
    Ok(PhiMetric { b })
}

/// Irreducible G2 summands appearing in Λ^p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum G2Rep {
    One,
    Seven,
    Fourteen,
    TwentySeven,
}

impl G2Rep {
    pub fn dim(self) -> usize {
        match self {
            G2Rep::One => 1,
            G2Rep::Seven => 7,
            G2Rep::Fourteen => 14,
            G2Rep::TwentySeven => 27,
        }
    }
}

/// Orthogonal projectors onto the G2 summands of Λ² … Λ⁵, in the
/// lexicographic coordinates of [`Form::to_vec`].
#[derive(Clone, Debug)]
pub struct ProjectorTable {
    p2_7: Matrix<Q>,
    p2_14: Matrix<Q>,
    p3_1: Matrix<Q>,
    p3_7: Matrix<Q>,
    p3_27: Matrix<Q>,
    p4_1: Matrix<Q>,
    p4_7: Matrix<Q>,
    p4_27: Matrix<Q>,
    p5_7: Matrix<Q>,
    p5_14: Matrix<Q>,
}

fn hodge_matrix(p: usize, orientation: i32) -> Matrix<Q> {
    let cols: Vec<Vec<Q>> = MultiIndex::all(7, p)
        .into_iter()
        .map(|mi| Form::<Q>::from_terms(7, p, [(mi, qi(1))]).hodge(orientation).to_vec())
        .collect();
    Matrix::from_cols(MultiIndex::all(7, 7 - p).len(), &cols)
}

impl ProjectorTable {
    pub fn build(phi: &Form, psi: &Form, orientation: i32) -> Result<Self> {
        let rank_err = |what: &str| Error::Internal(format!("rank deficiency building {what}"));
        let p2_basis: Vec<Vec<Q>> = (0..7).map(|v| phi.interior(v).to_vec()).collect();
        let p2_7 = Matrix::projector_onto(&Matrix::from_cols(21, &p2_basis)).ok_or_else(|| rank_err("Λ²₇"))?;
        let p2_14 = Matrix::identity(21).sub(&p2_7);
        let p3_1 = Matrix::projector_onto(&Matrix::from_cols(35, &[phi.to_vec()])).ok_or_else(|| rank_err("Λ³₁"))?;
        let p3_basis: Vec<Vec<Q>> = (0..7).map(|v| psi.interior(v).to_vec()).collect();
        let p3_7 = Matrix::projector_onto(&Matrix::from_cols(35, &p3_basis)).ok_or_else(|| rank_err("Λ³₇"))?;
        let p3_27 = Matrix::identity(35).sub(&p3_1).sub(&p3_7);
        // ⋆ is a signed permutation, so its inverse is its transpose
        let s3 = hodge_matrix(3, orientation);
        let s2 = hodge_matrix(2, orientation);
        let conj = |s: &Matrix<Q>, p: &Matrix<Q>| s.mul(p).mul(&s.transpose());
        Ok(Self {
            p4_1: conj(&s3, &p3_1),
            p4_7: conj(&s3, &p3_7),
            p4_27: conj(&s3, &p3_27),
            p5_7: conj(&s2, &p2_7),
            p5_14: conj(&s2, &p2_14),
            p2_7,
            p2_14,
            p3_1,
            p3_7,
            p3_27,
        })
    }

    /// Projector matrix for `rep` on Λ^degree, when that summand is a proper
    /// subspace of a reducible Λ^degree.
    pub fn matrix(&self, degree: usize, rep: G2Rep) -> Option<&Matrix<Q>> {
        use G2Rep::*;
        match (degree, rep) {
            (2, Seven) => Some(&self.p2_7),
            (2, Fourteen) => Some(&self.p2_14),
            (3, One) => Some(&self.p3_1),
            (3, Seven) => Some(&self.p3_7),
            (3, TwentySeven) => Some(&self.p3_27),
            (4, One) => Some(&self.p4_1),
            (4, Seven) => Some(&self.p4_7),
            (4, TwentySeven) => Some(&self.p4_27),
            (5, Seven) => Some(&self.p5_7),
            (5, Fourteen) => Some(&self.p5_14),
            _ => None,
        }
    }

    /// Summands of Λ^degree.
    pub fn summands(degree: usize) -> &'static [G2Rep] {
        use G2Rep::*;
        match degree {
            0 | 7 => &[One],
            1 | 6 => &[Seven],
            2 | 5 => &[Seven, Fourteen],
            3 | 4 => &[One, Seven, TwentySeven],
            _ => &[],
        }
    }

    pub fn project(&self, form: &Form, rep: G2Rep) -> Form {
        let p = form.degree();
        if let Some(m) = self.matrix(p, rep) {
            return Form::from_vec(7, p, &m.apply(&form.to_vec()));
        }
        if Self::summands(p).contains(&rep) {
            form.clone()
        } else {
            Form::zero(7, p)
        }
    }
}

/// A G2 structure on an orthonormal 7-dimensional coframe.
#[derive(Clone, Debug)]
pub struct G2Data {
    frame: FrameAlgebra,
    phi: Form,
    psi: Form,
    projectors: OnceLock<ProjectorTable>,
}

impl G2Data {
    /// Validates that `phi` is a G2 structure adapted to the coframe.
    pub fn new(frame: FrameAlgebra, phi: Form) -> Result<Self> {
        if frame.dim() != 7 {
            return Err(Error::FrameMismatch(frame.dim(), 7));
        }
        let metric = metric_from_phi(&phi, frame.orientation())?;
        if !metric.is_identity() || !frame.is_adapted() {
            return Err(Error::NotAdapted(
                "φ must induce the identity metric on the given coframe".into(),
            ));
        }
        let psi = frame.hodge(&phi)?;
        Ok(Self {
            frame,
            phi,
            psi,
            projectors: OnceLock::new(),
        })
    }

    pub fn standard(frame: FrameAlgebra) -> Result<Self> {
        Self::new(frame, standard_phi())
    }

    pub fn frame(&self) -> &FrameAlgebra {
        &self.frame
    }

    pub fn phi(&self) -> &Form {
        &self.phi
    }

    pub fn psi(&self) -> &Form {
        &self.psi
    }

    pub fn volume(&self) -> Form {
        self.frame.volume()
    }

    pub fn projectors(&self) -> &ProjectorTable {
        self.projectors.get_or_init(|| {
            ProjectorTable::build(&self.phi, &self.psi, self.frame.orientation())
                .expect("valid G2 data has full-rank projector bases")
        })
    }

    pub fn project(&self, form: &Form, rep: G2Rep) -> Form {
        self.projectors().project(form, rep)
    }

    pub fn hodge(&self, form: &Form) -> Form {
        form.hodge(self.frame.orientation())
    }

    /// Same structure on a different Lie algebra with identical coframe.
    pub fn with_frame(&self, frame: FrameAlgebra) -> Result<Self> {
        let out = Self::new(frame, self.phi.clone())?;
        if let Some(p) = self.projectors.get() {
            let _ = out.projectors.set(p.clone());
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorsionClasses {
    pub tau0: Q,
    pub tau1: Form,
    pub tau2: Form,
    pub tau3: Form,
}

impl TorsionClasses {
    /// `(τ₀ψ + 3τ₁∧φ + ⋆τ₃, 4τ₁∧ψ + ⋆τ₂)`
    pub fn reassemble(&self, g2: &G2Data) -> (Form, Form) {
        let dphi = g2
            .psi()
            .scale(&self.tau0)
            .add(&self.tau1.wedge(g2.phi()).scale(&qi(3)))
            .add(&g2.hodge(&self.tau3));
        let dpsi = self.tau1.wedge(g2.psi()).scale(&qi(4)).add(&g2.hodge(&self.tau2));
        (dphi, dpsi)
    }

    pub fn is_zero(&self) -> bool {
        self.tau0.is_zero() && self.tau1.is_zero() && self.tau2.is_zero() && self.tau3.is_zero()
    }
}

pub fn torsion_classes(g2: &G2Data) -> Result<TorsionClasses> {
    let dphi = g2.frame().d(g2.phi());
    let dpsi = g2.frame().d(g2.psi());
    decompose_torsion(g2, &dphi, &dpsi)
}

fn solve_wedge(target: &Form, with: &Form, factor: i64) -> Option<Form> {
    let cols: Vec<Vec<Q>> = (0..7)
        .map(|v| Form::<Q>::basis(7, &[v]).wedge(with).scale(&qi(factor)).to_vec())
        .collect();
    let m = Matrix::from_cols(MultiIndex::all(7, with.degree() + 1).len(), &cols);
    m.solve(&target.to_vec()).map(|x| Form::from_vec(7, 1, &x))
}

/// Splits given `dφ`, `dψ` into torsion classes, verifying the result
/// reassembles them exactly.
pub fn decompose_torsion(g2: &G2Data, dphi: &Form, dpsi: &Form) -> Result<TorsionClasses> {
    if dphi.degree() != 4 || dpsi.degree() != 5 {
        return Err(Error::Degree("expected a 4-form and a 5-form".into()));
    }
    use G2Rep::*;
    let tau0 = dphi.dot(g2.psi()) / qi(7);
    let tau1 = solve_wedge(&g2.project(dphi, Seven), g2.phi(), 3)
        .ok_or_else(|| Error::Internal("Λ⁴₇ part of dφ is not of the form τ₁∧φ".into()))?;
    let tau1_psi = solve_wedge(&g2.project(dpsi, Seven), g2.psi(), 4)
        .ok_or_else(|| Error::Internal("Λ⁵₇ part of dψ is not of the form τ₁∧ψ".into()))?;
    if tau1 != tau1_psi {
        return Err(Error::Internal(format!(
            "τ₁ from dφ ({tau1}) and from dψ ({tau1_psi}) disagree"
        )));
    }
    let tau3 = g2.hodge(&g2.project(dphi, TwentySeven));
    let tau2 = g2.hodge(&g2.project(dpsi, Fourteen));
    let t = TorsionClasses { tau0, tau1, tau2, tau3 };
    let (rphi, rpsi) = t.reassemble(g2);
    if &rphi != dphi || &rpsi != dpsi {
        return Err(Error::Internal("torsion reassembly residual is nonzero".into()));
    }
    Ok(t)
}

pub fn is_integrable(t: &TorsionClasses) -> bool {
    t.tau2.is_zero()
}

/// `H = τ₀/6 φ − ι_{τ₁}ψ − τ₃`, without the integrability gate.
pub fn flux_formula(g2: &G2Data, t: &TorsionClasses) -> Form {
    let v: Vec<Q> = (0..7).map(|a| t.tau1.component(&[a])).collect();
    g2.phi()
        .scale(&(t.tau0.clone() / qi(6)))
        .sub(&g2.psi().interior_vec(&v))
        .sub(&t.tau3)
}

pub fn flux_h(g2: &G2Data, t: &TorsionClasses) -> Result<Form> {
    if !is_integrable(t) {
        return Err(Error::NotIntegrable);
    }
    Ok(flux_formula(g2, t))
}

/// `i_H(a)` with the frozen normalization.
pub fn i_h(h: &Form, a: &Form) -> Form {
    i_h_with(h, a, &conventions::kappa_h())
}

pub fn i_h_with(h: &Form, a: &Form, kappa: &Q) -> Form {
    contract(&three_form_as_vector(h), a, kappa).expect("forms share the frame")
}

/// The scalar `κ` with `dφ = κ Σ_c ι_cH ∧ ι_cφ`, if one exists.
pub fn calibrate_kappa(g2: &G2Data, h: &Form) -> Option<Q> {
    let raw = i_h_with(h, g2.phi(), &qi(1));
    let dphi = g2.frame().d(g2.phi());
    let (mi, c) = raw.terms().next()?;
    let kappa = dphi.coeff(*mi) / c;
    (raw.scale(&kappa) == dphi).then_some(kappa)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureIdentities {
    /// `dφ − i_H(φ)`
    pub dphi: Form,
    /// `dψ − i_H(ψ)`
    pub dpsi: Form,
    /// `dτ₁ ∧ ψ`
    pub dtau1_psi: Form,
}

impl StructureIdentities {
    pub fn holds(&self) -> bool {
        self.dphi.is_zero() && self.dpsi.is_zero() && self.dtau1_psi.is_zero()
    }
}

pub fn check_structure_identities(g2: &G2Data, h: &Form) -> Result<StructureIdentities> {
    check_structure_identities_with(g2, h, &conventions::kappa_h())
}

pub fn check_structure_identities_with(g2: &G2Data, h: &Form, kappa: &Q) -> Result<StructureIdentities> {
    let t = torsion_classes(g2)?;
    let frame = g2.frame();
    Ok(StructureIdentities {
        dphi: frame.d(g2.phi()).sub(&i_h_with(h, g2.phi(), kappa)),
        dpsi: frame.d(g2.psi()).sub(&i_h_with(h, g2.psi(), kappa)),
        dtau1_psi: frame.d(&t.tau1).wedge(g2.psi()),
    })
}

/// `(i_M φ, i_M ψ)` for a T*-valued 1-form given by its coefficient matrix.
pub fn deform_phi(g2: &G2Data, m: &Matrix<Q>) -> (Form, Form) {
    let mv = matrix_as_vector_form(m);
    let k = conventions::kappa_one();
    (
        contract(&mv, g2.phi(), &k).expect("7x7 matrix"),
        contract(&mv, g2.psi(), &k).expect("7x7 matrix"),
    )
}

/// Rank of `M ↦ (i_M φ, i_M ψ)` on all 49 matrices.
pub fn deform_rank(g2: &G2Data) -> usize {
    let cols: Vec<Vec<Q>> = (0..49)
        .map(|k| {
            let mut m = Matrix::zeros(7, 7);
            m[(k / 7, k % 7)] = qi(1);
            let (a, b) = deform_phi(g2, &m);
            let mut v = a.to_vec();
            v.extend(b.to_vec());
            v
        })
        .collect();
    Matrix::from_cols(70, &cols).rank()
}

/// Largest absolute coefficient, for diagnostics.
pub fn max_abs(form: &Form) -> Q {
    form.terms()
        .map(|(_, c)| c.abs())
        .fold(Q::zero(), |a, b| if b > a { b } else { a })
}
