//! The bundle `𝒬 = T*Y ⊕ End(TY) ⊕ End(V)`, the block operator `𝒟`, its
//! projection `Ď`, nilpotency reports and invariant-complex cohomology.

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{Form, FrameAlgebra, MatrixForm, MultiIndex};
use crate::g2::{self, G2Data, G2Rep, TorsionClasses};
use crate::gauge::{self, BundleData, TangentConnection};
use crate::linalg::Matrix;
use crate::scalar::{fmt_q, qi, Field, Q};

/// Block sizes of `𝒬`: `dim` covector components, `rank_t²` and `rank_v²` endomorphism entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QLayout {
    pub dim: usize,
    pub rank_t: usize,
    pub rank_v: usize,
}

impl QLayout {
    /// Fiber dimension of `𝒬`.
    pub fn fiber(&self) -> usize {
        self.dim + self.rank_t * self.rank_t + self.rank_v * self.rank_v
    }

    pub fn block_of_component(&self, c: usize) -> usize {
        if c < self.dim {
            0
        } else if c < self.dim + self.rank_t * self.rank_t {
            1
        } else {
            2
        }
    }

    pub fn block_sizes(&self) -> [usize; 3] {
        [self.dim, self.rank_t * self.rank_t, self.rank_v * self.rank_v]
    }

    /// Which block the `k`-th basis element of invariant `p`-forms lies in.
    pub fn basis_block(&self, p: usize, k: usize) -> usize {
        self.block_of_component(k / MultiIndex::all(self.dim, p).len())
    }

    /// Number of invariant `p`-forms with values in `𝒬`.
    pub fn space_dim(&self, p: usize) -> usize {
        self.fiber() * MultiIndex::all(self.dim, p).len()
    }
}

/// A `𝒬`-valued p-form `(M, κ, α)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QForm<F = Q> {
    pub m: Vec<Form<F>>,
    pub kappa: MatrixForm<F>,
    pub alpha: MatrixForm<F>,
}

impl<F: Field> QForm<F> {
    pub fn zero(layout: QLayout, p: usize) -> Self {
        Self {
            m: vec![Form::zero(layout.dim, p); layout.dim],
            kappa: MatrixForm::zero(layout.rank_t, layout.dim, p),
            alpha: MatrixForm::zero(layout.rank_v, layout.dim, p),
        }
    }

    pub fn layout(&self) -> QLayout {
        QLayout {
            dim: self.m.len(),
            rank_t: self.kappa.rank(),
            rank_v: self.alpha.rank(),
        }
    }

    pub fn degree(&self) -> usize {
        self.m.first().map_or(0, Form::degree)
    }

    /// All component forms in block order.
    pub fn components(&self) -> impl Iterator<Item = &Form<F>> {
        self.m.iter().chain(self.kappa.entries()).chain(self.alpha.entries())
    }

    pub fn is_zero(&self) -> bool {
        self.components().all(Form::is_zero)
    }

    pub fn block_is_zero(&self, block: usize) -> bool {
        match block {
            0 => self.m.iter().all(Form::is_zero),
            1 => self.kappa.is_zero(),
            _ => self.alpha.is_zero(),
        }
    }

    pub fn block_max_magnitude(&self, block: usize) -> f64 {
        match block {
            0 => self.m.iter().map(Form::max_magnitude).fold(0.0, f64::max),
            1 => self.kappa.max_magnitude(),
            _ => self.alpha.max_magnitude(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            m: self.m.iter().zip(&other.m).map(|(a, b)| a.add(b)).collect(),
            kappa: self.kappa.add(&other.kappa),
            alpha: self.alpha.add(&other.alpha),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            m: self.m.iter().zip(&other.m).map(|(a, b)| a.sub(b)).collect(),
            kappa: self.kappa.sub(&other.kappa),
            alpha: self.alpha.sub(&other.alpha),
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|f| f.scale(s))
    }

    /// Applies a form-level map to every component.
    pub fn map(&self, f: impl Fn(&Form<F>) -> Form<F>) -> Self {
        self.map_to(f)
    }

    /// Same as [`QForm::map`] with a change of scalar field.
    pub fn map_to<G: Field>(&self, f: impl Fn(&Form<F>) -> Form<G>) -> QForm<G> {
        QForm {
            m: self.m.iter().map(&f).collect(),
            kappa: self.kappa.map_to(&f),
            alpha: self.alpha.map_to(&f),
        }
    }

    /// Coordinates in block order, each component in lexicographic form order.
    pub fn to_vec(&self) -> Vec<F> {
        self.components().flat_map(Form::to_vec).collect()
    }

    pub fn from_vec(layout: QLayout, p: usize, v: &[F]) -> Self {
        let per = MultiIndex::all(layout.dim, p).len();
        assert_eq!(v.len(), per * layout.fiber());
        let mut forms = v.chunks(per).map(|c| Form::from_vec(layout.dim, p, c));
        let m = forms.by_ref().take(layout.dim).collect();
        let kappa = MatrixForm::from_entries(
            layout.rank_t,
            forms.by_ref().take(layout.rank_t * layout.rank_t).collect(),
        );
        let alpha = MatrixForm::from_entries(layout.rank_v, forms.collect());
        Self { m, kappa, alpha }
    }

    /// The `k`-th coordinate basis element of invariant `p`-forms.
    pub fn basis(layout: QLayout, p: usize, k: usize) -> Self {
        let mut v = vec![F::zero(); layout.space_dim(p)];
        v[k] = F::one();
        Self::from_vec(layout, p, &v)
    }
}

/// The operator `𝒟` for given connections, independent of any G2 data.
#[derive(Clone, Debug)]
pub struct BlockOperator {
    frame: FrameAlgebra,
    layout: QLayout,
    zeta: TangentConnection,
    zeta_form: MatrixForm,
    theta_form: MatrixForm,
    a_form: MatrixForm,
    f: MatrixForm,
    r: MatrixForm,
    /// `ι_a F`, `ι_a R`
    f_contracted: Vec<MatrixForm>,
    r_contracted: Vec<MatrixForm>,
    quarter_alpha: Q,
}

impl BlockOperator {
    pub fn new(
        frame: FrameAlgebra,
        gauge: &BundleData,
        tangent: &BundleData,
        zeta: TangentConnection,
        alpha_prime: &Q,
    ) -> Result<Self> {
        let n = frame.dim();
        if gauge.dim() != n || tangent.dim() != n || zeta.dim() != n {
            return Err(Error::FrameMismatch(gauge.dim().max(tangent.dim()), n));
        }
        if tangent.rank() != n {
            return Err(Error::InvalidAlgebra(format!(
                "tangent connection must have rank {n}, got {}",
                tangent.rank()
            )));
        }
        let f = gauge::curvature(gauge, &frame);
        let r = gauge::curvature(tangent, &frame);
        Ok(Self {
            layout: QLayout {
                dim: n,
                rank_t: n,
                rank_v: gauge.rank(),
            },
            zeta_form: zeta.covector_form(),
            theta_form: tangent.connection_form(),
            a_form: gauge.connection_form(),
            f_contracted: (0..n).map(|a| f.interior(a)).collect(),
            r_contracted: (0..n).map(|a| r.interior(a)).collect(),
            f,
            r,
            zeta,
            frame,
            quarter_alpha: alpha_prime.clone() / qi(4),
        })
    }

    pub fn layout(&self) -> QLayout {
        self.layout
    }

    pub fn frame(&self) -> &FrameAlgebra {
        &self.frame
    }

    pub fn zeta(&self) -> &TangentConnection {
        &self.zeta
    }

    pub fn gauge_curvature(&self) -> &MatrixForm {
        &self.f
    }

    pub fn tangent_curvature(&self) -> &MatrixForm {
        &self.r
    }

    /// `ℱ(M) = Σ_a ι_aF ∧ M_a` (equal to `(−1)^p i_M(F)`).
    pub fn map_f_vec(&self, m: &[Form]) -> MatrixForm {
        contract_vec(&self.f_contracted, m, self.layout.rank_v)
    }

    /// `ℱ(α)_a = α'/4 tr(ι_aF ∧ α)`.
    pub fn map_f_end(&self, alpha: &MatrixForm) -> Vec<Form> {
        contract_end(&self.f_contracted, alpha, &self.quarter_alpha)
    }

    pub fn map_r_vec(&self, m: &[Form]) -> MatrixForm {
        contract_vec(&self.r_contracted, m, self.layout.rank_t)
    }

    pub fn map_r_end(&self, kappa: &MatrixForm) -> Vec<Form> {
        contract_end(&self.r_contracted, kappa, &self.quarter_alpha)
    }

    /// `𝒟(M, κ, α) = (d_ζM + ℛ(κ) − ℱ(α), d_θκ − ℛ(M), d_Aα − ℱ(M))`.
    ///
    /// The lower-left signs make the `(1,1)` block of `Ď²` vanish exactly
    /// when `dH = α'/4 (tr F∧F − tr R∧R)`; with `+ℛ(M), +ℱ(M)` it vanishes
    /// for the opposite sign of `dH`. Both choices give the same cohomology.
    pub fn apply(&self, z: &QForm) -> QForm {
        let dm = gauge::covariant_d_vec(&self.frame, &self.zeta_form, &z.m);
        let rk = self.map_r_end(&z.kappa);
        let fa = self.map_f_end(&z.alpha);
        let m = dm
            .iter()
            .zip(rk.iter().zip(&fa))
            .map(|(d, (r, f))| d.add(r).sub(f))
            .collect();
        let kappa = gauge::covariant_d_end(&self.frame, &self.theta_form, &z.kappa).sub(&self.map_r_vec(&z.m));
        let alpha = gauge::covariant_d_end(&self.frame, &self.a_form, &z.alpha).sub(&self.map_f_vec(&z.m));
        QForm { m, kappa, alpha }
    }
}

fn contract_vec(contracted: &[MatrixForm], m: &[Form], rank: usize) -> MatrixForm {
    let dim = m.first().map_or(0, Form::dim);
    let p = m.first().map_or(0, Form::degree);
    let mut out = MatrixForm::zero(rank, dim, (p + 1).min(dim));
    for (c, ma) in contracted.iter().zip(m) {
        if ma.is_zero() || c.is_zero() {
            continue;
        }
        out = out.add(&c.wedge_form(ma));
    }
    out
}

fn contract_end(contracted: &[MatrixForm], x: &MatrixForm, factor: &Q) -> Vec<Form> {
    let dim = x.dim();
    let p = x.degree();
    contracted
        .iter()
        .map(|c| {
            if factor.is_zero() || c.is_zero() || x.is_zero() {
                Form::zero(dim, (p + 1).min(dim))
            } else {
                c.wedge(x).trace().scale(factor)
            }
        })
        .collect()
}

/// Verdicts of the independently checked defining conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionVerdicts {
    pub integrable: bool,
    pub instanton_a: bool,
    pub instanton_theta: bool,
    /// `None` when `τ₂ ≠ 0`: the flux formula presupposes integrability.
    pub bianchi: Option<bool>,
    /// The connection `∇` behind `ζ` has torsion `H` and parallel `φ`.
    pub zeta_compatible: bool,
}

impl ConditionVerdicts {
    pub fn heterotic(&self) -> bool {
        self.integrable
            && self.instanton_a
            && self.instanton_theta
            && self.bianchi == Some(true)
            && self.zeta_compatible
    }
}

/// A 7-dimensional heterotic system with the operator `𝒟` built from it.
#[derive(Clone, Debug)]
pub struct HeteroticSystem {
    g2: G2Data,
    gauge: BundleData,
    tangent: BundleData,
    torsion: TorsionClasses,
    h: Form,
    alpha_prime: Q,
    op: BlockOperator,
}

impl HeteroticSystem {
    /// Uses `H` from the torsion classes, `∇ = ∇^LC + ½H` and `ζ_a^b = Γ_ac^b e^c`,
    /// which on a non-holonomic frame is the opposite connection of `∇`.
    pub fn new(g2: G2Data, gauge: BundleData, tangent: BundleData, alpha_prime: Q) -> Result<Self> {
        let torsion = g2::torsion_classes(&g2)?;
        let h = g2::flux_formula(&g2, &torsion);
        let nabla = gauge::zeta_connection(&gauge::levi_civita(g2.frame())?, &h);
        let zeta = nabla.opposite(g2.frame());
        Self::from_parts(g2, gauge, tangent, torsion, h, zeta, alpha_prime)
    }

    pub fn from_parts(
        g2: G2Data,
        gauge: BundleData,
        tangent: BundleData,
        torsion: TorsionClasses,
        h: Form,
        zeta: TangentConnection,
        alpha_prime: Q,
    ) -> Result<Self> {
        let op = BlockOperator::new(g2.frame().clone(), &gauge, &tangent, zeta, &alpha_prime)?;
        Ok(Self {
            g2,
            gauge,
            tangent,
            torsion,
            h,
            alpha_prime,
            op,
        })
    }

    /// Flat torus with `φ_std`, trivial bundles of rank `rank_v` and 7.
    pub fn trivial_t7(rank_v: usize) -> Self {
        let g2 = G2Data::standard(FrameAlgebra::abelian(7)).expect("standard structure");
        Self::new(g2, BundleData::trivial(rank_v, 7), BundleData::trivial(7, 7), Q::zero()).expect("flat data")
    }

    pub fn g2(&self) -> &G2Data {
        &self.g2
    }

    pub fn gauge(&self) -> &BundleData {
        &self.gauge
    }

    pub fn tangent(&self) -> &BundleData {
        &self.tangent
    }

    pub fn torsion(&self) -> &TorsionClasses {
        &self.torsion
    }

    pub fn flux(&self) -> &Form {
        &self.h
    }

    pub fn alpha_prime(&self) -> &Q {
        &self.alpha_prime
    }

    pub fn operator(&self) -> &BlockOperator {
        &self.op
    }

    pub fn layout(&self) -> QLayout {
        self.op.layout()
    }

    pub fn big_d(&self, z: &QForm) -> QForm {
        self.op.apply(z)
    }

    /// `Ď`: `𝒟` on 0-forms, `π₇∘𝒟` on 1-forms, `π₁∘𝒟` on 2-forms.
    pub fn check_d(&self, z: &QForm) -> Result<QForm> {
        let rep = match z.degree() {
            0 => return Ok(self.big_d(z)),
            1 => G2Rep::Seven,
            2 => G2Rep::One,
            p => {
                return Err(Error::Degree(format!(
                    "Ď is defined on Ω⁰, Ω¹, Ω² only, got degree {p}"
                )))
            }
        };
        Ok(self.project(&self.big_d(z), rep))
    }

    pub fn project(&self, z: &QForm, rep: G2Rep) -> QForm {
        z.map(|f| self.g2.project(f, rep))
    }

    pub fn conditions(&self) -> ConditionVerdicts {
        let psi = self.g2.psi();
        let integrable = g2::is_integrable(&self.torsion);
        let bianchi = integrable.then(|| {
            gauge::bianchi_residual(
                self.g2.frame(),
                &self.h,
                self.op.gauge_curvature(),
                self.op.tangent_curvature(),
                &self.alpha_prime,
            )
            .is_zero()
        });
        let nabla = self.op.zeta().opposite(self.g2.frame());
        let zeta_compatible = nabla.torsion(self.g2.frame()).as_three_form().as_ref() == Some(&self.h)
            && nabla.metricity().is_zero()
            && nabla.nabla(self.g2.phi()).iter().all(Form::is_zero);
        ConditionVerdicts {
            integrable,
            instanton_a: gauge::instanton_check(self.op.gauge_curvature(), psi).is_zero(),
            instanton_theta: gauge::instanton_check(self.op.tangent_curvature(), psi).is_zero(),
            bianchi,
            zeta_compatible,
        }
    }
}

/// Residual summary for one `(output, input)` block of `Ď²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockResidual {
    /// Basis inputs whose image in this block is nonzero.
    pub nonzero_columns: usize,
    /// Largest absolute coefficient, exact.
    pub max_abs: String,
    /// One nonzero residual form, 1-based indices.
    pub sample: Option<String>,
}

impl BlockResidual {
    pub fn is_zero(&self) -> bool {
        self.nonzero_columns == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageReport {
    pub name: String,
    pub domain_dim: usize,
    /// `blocks[i][j]`: output block `i` from input block `j` (0-based; labels add 1).
    pub blocks: [[BlockResidual; 3]; 3],
}

impl StageReport {
    pub fn failing(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if !self.blocks[i][j].is_zero() {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NilpotencyReport {
    pub stages: Vec<StageReport>,
    /// Bundle-free part: `π₁ d π₇ d = 0` on invariant 1-forms, i.e. the
    /// projections close into a complex. Fails exactly when `τ₂ ≠ 0`.
    pub projection_complex: bool,
    pub nilpotent: bool,
    pub conditions: ConditionVerdicts,
    /// `nilpotent == conditions.heterotic()`
    pub consistent: bool,
}

impl NilpotencyReport {
    /// Failing 1-based blocks, merged over stages.
    pub fn failing_blocks(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self.stages.iter().flat_map(StageReport::failing).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn stage_failing(&self, stage: usize) -> Vec<(usize, usize)> {
        self.stages[stage].failing()
    }
}

const BLOCK_NAMES: [&str; 3] = ["T*Y", "End(TY)", "End(V)"];

pub fn block_name(i: usize) -> &'static str {
    BLOCK_NAMES[i]
}

fn stage_report<G>(name: &str, layout: QLayout, p: usize, apply_twice: G) -> StageReport
where
    G: Fn(&QForm) -> QForm + Sync,
{
    let n = layout.space_dim(p);
    let images: Vec<(usize, QForm)> = (0..n)
        .into_par_iter()
        .map(|k| (layout.basis_block(p, k), apply_twice(&QForm::<Q>::basis(layout, p, k))))
        .collect();
    let blocks = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut nonzero = 0;
            let mut max = Q::zero();
            let mut sample = None;
            for (b, img) in &images {
                if *b != j || img.block_is_zero(i) {
                    continue;
                }
                nonzero += 1;
                let comps: Vec<&Form> = match i {
                    0 => img.m.iter().collect(),
                    1 => img.kappa.entries().iter().collect(),
                    _ => img.alpha.entries().iter().collect(),
                };
                for f in comps {
                    let m = g2::max_abs(f);
                    if m > max {
                        max = m;
                    }
                    if sample.is_none() && !f.is_zero() {
                        sample = Some(f.to_string());
                    }
                }
            }
            BlockResidual {
                nonzero_columns: nonzero,
                max_abs: fmt_q(&max),
                sample,
            }
        })
    });
    StageReport {
        name: name.into(),
        domain_dim: n,
        blocks,
    }
}

/// Assembles `Ď²` on the invariant bases of `Ω⁰(𝒬)` and `Ω¹(𝒬)`.
pub fn nilpotency_report(sys: &HeteroticSystem) -> NilpotencyReport {
    let layout = sys.layout();
    let stage0 = stage_report("Omega0 -> Omega2_7", layout, 0, |z| {
        sys.project(&sys.big_d(&sys.big_d(z)), G2Rep::Seven)
    });
    let stage1 = stage_report("Omega1 -> Omega3_1", layout, 1, |z| {
        let once = sys.project(&sys.big_d(z), G2Rep::Seven);
        sys.project(&sys.big_d(&once), G2Rep::One)
    });
    let nilpotent = stage0.failing().is_empty() && stage1.failing().is_empty();
    let conditions = sys.conditions();
    let consistent = nilpotent == conditions.heterotic();
    NilpotencyReport {
        stages: vec![stage0, stage1],
        projection_complex: projection_defect(sys.g2()) == 0,
        nilpotent,
        conditions,
        consistent,
    }
}

/// Number of invariant 1-forms `β` with `π₁ d π₇ dβ ≠ 0`.
pub fn projection_defect(g2: &G2Data) -> usize {
    let n = g2.frame().dim();
    (0..n)
        .filter(|&k| {
            let once = g2.project(&g2.frame().d(&Form::basis(n, &[k])), G2Rep::Seven);
            !g2.project(&g2.frame().d(&once), G2Rep::One).is_zero()
        })
        .count()
}

/// Matrix of a linear map on invariant `p`-forms, columns = images of basis elements.
pub fn operator_matrix<G>(layout: QLayout, p: usize, out_degree: usize, map: G) -> Matrix<Q>
where
    G: Fn(&QForm) -> QForm + Sync,
{
    let cols: Vec<Vec<Q>> = (0..layout.space_dim(p))
        .into_par_iter()
        .map(|k| map(&QForm::basis(layout, p, k)).to_vec())
        .collect();
    Matrix::from_cols(layout.space_dim(out_degree), &cols)
}

/// Restricts an operator matrix to block `i` outputs from block `j` inputs.
pub fn block_submatrix(m: &Matrix<Q>, layout: QLayout, p_in: usize, p_out: usize, i: usize, j: usize) -> Matrix<Q> {
    let range = |p: usize, b: usize| {
        let per = MultiIndex::all(layout.dim, p).len();
        let sizes = layout.block_sizes();
        let start: usize = sizes[..b].iter().sum::<usize>() * per;
        start..start + sizes[b] * per
    };
    let rows: Vec<usize> = range(p_out, i).collect();
    let cols: Vec<usize> = range(p_in, j).collect();
    Matrix::from_rows(
        rows.iter()
            .map(|&r| cols.iter().map(|&c| m[(r, c)].clone()).collect())
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CohomologyDims {
    pub degree: usize,
    /// Invariant-complex dimension of the full complex.
    pub total: usize,
    /// Same computation for the diagonal operators `d_ζ`, `d_θ`, `d_A` alone.
    pub blocks: [usize; 3],
    pub kernel_dim: usize,
    pub image_dim: usize,
    pub domain_dim: usize,
}

/// `dim ker(Ď on Ω^k) − rank(Ď on Ω^{k−1})` for `k ∈ {0, 1}`.
pub fn invariant_cohomology(sys: &HeteroticSystem, degree: usize) -> Result<CohomologyDims> {
    if degree > 1 {
        return Err(Error::Degree(format!(
            "invariant cohomology supports degrees 0 and 1, got {degree}"
        )));
    }
    if !nilpotency_report(sys).nilpotent {
        return Err(Error::NotAComplex);
    }
    let layout = sys.layout();
    let d0 = operator_matrix(layout, 0, 1, |z| sys.big_d(z));
    let (kernel_dim, image_dim, domain_dim, blocks) = if degree == 0 {
        let blocks = std::array::from_fn(|b| {
            let sub = block_submatrix(&d0, layout, 0, 1, b, b);
            sub.cols() - sub.rank()
        });
        (d0.cols() - d0.rank(), 0, d0.cols(), blocks)
    } else {
        let d1 = operator_matrix(layout, 1, 2, |z| sys.project(&sys.big_d(z), G2Rep::Seven));
        let blocks = std::array::from_fn(|b| {
            let s1 = block_submatrix(&d1, layout, 1, 2, b, b);
            let s0 = block_submatrix(&d0, layout, 0, 1, b, b);
            s1.cols() - s1.rank() - s0.rank()
        });
        (d1.cols() - d1.rank(), d0.rank(), d1.cols(), blocks)
    };
    Ok(CohomologyDims {
        degree,
        total: kernel_dim - image_dim,
        blocks,
        kernel_dim,
        image_dim,
        domain_dim,
    })
}
