//! Seeded perturbations that break one defining condition at a time.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::spec::{GeometrySpec, Structure};
use super::{run_verify, Mode, Role, VerificationReport};
use crate::error::{Error, Result};
use crate::exterior::{Form, FrameAlgebra, MultiIndex};
use crate::g2::{self, standard_phi, G2Data};
use crate::gauge::{self, BundleData};
use crate::linalg::Matrix;
use crate::scalar::{q, qi, GaussQ, Q};
use crate::su3::{self, SU3Data};

pub const MAX_ATTEMPTS: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Target {
    #[serde(rename = "instanton_A")]
    InstantonA,
    #[serde(rename = "instanton_theta")]
    InstantonTheta,
    #[serde(rename = "torsion_tau2")]
    TorsionTau2,
    #[serde(rename = "bianchi")]
    Bianchi,
}

impl Target {
    pub const ALL: [Target; 4] = [
        Target::InstantonA,
        Target::InstantonTheta,
        Target::TorsionTau2,
        Target::Bianchi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::InstantonA => "instanton_A",
            Target::InstantonTheta => "instanton_theta",
            Target::TorsionTau2 => "torsion_tau2",
            Target::Bianchi => "bianchi",
        }
    }

    /// Diagonal block of `Ď²` expected to fail, or `None` for the projection defect.
    pub fn predicted_block(self) -> Option<(usize, usize)> {
        match self {
            Target::InstantonA => Some((3, 3)),
            Target::InstantonTheta => Some((2, 2)),
            Target::Bianchi => Some((1, 1)),
            Target::TorsionTau2 => None,
        }
    }
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Parse {
                line: 0,
                col: 0,
                msg: format!("unknown perturbation target `{s}`"),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbReport {
    pub target: Target,
    pub seed: u64,
    pub attempts: usize,
    pub perturbation: String,
    pub before: VerificationReport,
    pub after: VerificationReport,
    /// Defining conditions that pass before and fail (or become undefined) after.
    pub broken: Vec<String>,
    /// Failing `Ď²` blocks after the perturbation, 1-based.
    pub failing_blocks: Vec<(usize, usize)>,
    pub projection_complex: bool,
    /// The failure signature is the one predicted for the target.
    pub localized: bool,
    /// Canonical text of the perturbed geometry.
    pub perturbed: String,
}

impl PerturbReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "perturb {} seed {} ({} attempt{})\n  {}\n  broken: {}\n  failing blocks {:?}, projection complex {}\n  localized: {}\n\n",
            self.target.name(),
            self.seed,
            self.attempts,
            if self.attempts == 1 { "" } else { "s" },
            self.perturbation,
            self.broken.join(", "),
            self.failing_blocks,
            self.projection_complex,
            if self.localized { "yes" } else { "NO" },
        );
        out.push_str("before:\n");
        out.push_str(&self.before.to_text());
        out.push_str("after:\n");
        out.push_str(&self.after.to_text());
        out
    }

    /// Report-level verdict: the failure signature matches the prediction.
    pub fn pass(&self) -> bool {
        self.localized
    }
}

fn default_mode(spec: &GeometrySpec) -> Mode {
    if spec.dim() == 6 {
        Mode::Both
    } else {
        Mode::G2
    }
}

/// Applies a seeded rational perturbation meant to break only `target`,
/// retrying up to [`MAX_ATTEMPTS`] candidates.
pub fn run_perturb(spec: &GeometrySpec, target: Target, seed: u64) -> Result<PerturbReport> {
    let mode = default_mode(spec);
    let before = run_verify(spec, mode)?;
    if !before.pass {
        return Err(Error::Perturbation(format!(
            "base geometry `{}` does not pass",
            spec.name
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=MAX_ATTEMPTS {
        let Some((candidate, what)) = propose(spec, target, &mut rng)? else {
            continue;
        };
        if !admissible(&candidate, target)? {
            continue;
        }
        let after = run_verify(&candidate, mode)?;
        let broken: Vec<String> = before
            .conditions
            .iter()
            .filter(|(_, c)| c.role == Role::Defining && c.pass == Some(true))
            .filter(|(k, _)| after.conditions.get(*k).is_some_and(|a| a.pass != Some(true)))
            .map(|(k, _)| k.clone())
            .collect();
        let nil = after.nilpotency.as_ref().expect("g2 conditions always run");
        let failing_blocks = nil.failing_blocks();
        let diagonal: Vec<(usize, usize)> = failing_blocks.iter().copied().filter(|(i, j)| i == j).collect();
        let localized = !nil.nilpotent
            && nil.consistent
            && match target.predicted_block() {
                Some(b) => nil.projection_complex && diagonal == vec![b],
                None => !nil.projection_complex,
            };
        return Ok(PerturbReport {
            target,
            seed,
            attempts: attempt,
            perturbation: what,
            projection_complex: nil.projection_complex,
            before,
            broken,
            failing_blocks,
            localized,
            perturbed: candidate.emit(),
            after,
        });
    }
    Err(Error::Perturbation(format!(
        "no candidate for `{}` broke only that condition in {MAX_ATTEMPTS} attempts",
        target.name()
    )))
}

/// Cheap exact screen: the target condition fails and the others still hold.
fn admissible(spec: &GeometrySpec, target: Target) -> Result<bool> {
    if spec.dim() == 6 {
        let v = spec.sh_system()?.verdicts();
        return Ok(match target {
            Target::InstantonA => !v.hym_a && v.strominger_hull_without(target),
            Target::InstantonTheta => !v.hym_theta && v.strominger_hull_without(target),
            Target::Bianchi => v.bianchi == Some(false) && v.strominger_hull_without(target),
            Target::TorsionTau2 => {
                v.su3_compatible
                    && !v.complex
                    && v.hym_a
                    && v.hym_theta
                    && tau2_meets_exact(spec.heterotic_system()?.g2())?
            }
        });
    }
    let sys = spec.heterotic_system()?;
    let c = sys.conditions();
    Ok(match target {
        Target::InstantonA => {
            !c.instanton_a && c.instanton_theta && c.integrable && c.bianchi == Some(true) && c.zeta_compatible
        }
        Target::InstantonTheta => {
            c.instanton_a && !c.instanton_theta && c.integrable && c.bianchi == Some(true) && c.zeta_compatible
        }
        Target::Bianchi => {
            c.instanton_a && c.instanton_theta && c.integrable && c.bianchi == Some(false) && c.zeta_compatible
        }
        Target::TorsionTau2 => c.instanton_a && c.instanton_theta && !c.integrable && tau2_meets_exact(sys.g2())?,
    })
}

impl su3::ShVerdicts {
    fn strominger_hull_without(&self, t: Target) -> bool {
        self.su3_compatible
            && self.complex
            && self.conformally_balanced
            && self.lee_compatible == Some(true)
            && (t == Target::InstantonA || self.hym_a)
            && (t == Target::InstantonTheta || self.hym_theta)
            && (t == Target::Bianchi || self.bianchi == Some(true))
    }
}

/// `⟨τ₂, de^a⟩ ≠ 0` for some `a`: τ₂ is visible to exact invariant 2-forms.
pub(super) fn tau2_meets_exact(g2d: &G2Data) -> Result<bool> {
    let t = g2::torsion_classes(g2d)?;
    let n = g2d.frame().dim();
    Ok((0..n).any(|a| !t.tau2.dot(&g2d.frame().d(&Form::basis(n, &[a]))).is_zero()))
}

fn small(rng: &mut ChaCha8Rng) -> Q {
    qi(rng.random_range(-2..=2))
}

fn nonzero_rational(rng: &mut ChaCha8Rng) -> Q {
    let n: i64 = rng.random_range(1..=3) * if rng.random_bool(0.5) { 1 } else { -1 };
    q(n, rng.random_range(1..=3))
}

fn random_one_form(n: usize, rng: &mut ChaCha8Rng) -> Vec<Q> {
    (0..n).map(|_| small(rng)).collect()
}

/// A random closed invariant 1-form, as coefficients.
fn random_closed(frame: &FrameAlgebra, rng: &mut ChaCha8Rng) -> Vec<Q> {
    let n = frame.dim();
    let cols: Vec<Vec<Q>> = (0..n).map(|a| frame.d(&Form::basis(n, &[a])).to_vec()).collect();
    let d = Matrix::from_cols(MultiIndex::all(n, 2).len(), &cols);
    let mut out = vec![Q::zero(); n];
    for k in d.kernel() {
        let c = small(rng);
        for (o, x) in out.iter_mut().zip(k) {
            *o += c.clone() * x;
        }
    }
    out
}

fn unit(n: usize, i: usize, j: usize) -> Matrix<Q> {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = qi(1);
    m
}

/// `E_ij ⊗ α + (E_ii − E_jj) ⊗ β`: curvature `E_ij (dα − 2α∧β)` with `tr` of its square zero.
fn nilpotent_pair(n: usize, i: usize, j: usize, alpha: &[Q], beta: &[Q]) -> Vec<Matrix<Q>> {
    let e = unit(n, i, j);
    let h = unit(n, i, i).sub(&unit(n, j, j));
    alpha
        .iter()
        .zip(beta)
        .map(|(a, b)| e.scale(a).add(&h.scale(b)))
        .collect()
}

/// Index of the first complex coordinate when the structure is the standard
/// `SU(3)` one (6d) or its cylinder (7d, `r` first).
fn complex_offset(spec: &GeometrySpec) -> Option<usize> {
    match &spec.structure {
        Structure::G2(g) if g.phi() == &standard_phi() => Some(1),
        Structure::Su3(s)
            if s.omega() == &su3::standard_omega()
                && s.psi_re() == &su3::standard_psi_re()
                && s.psi_im() == &su3::standard_psi_im() =>
        {
            Some(0)
        }
        _ => None,
    }
}

/// [`nilpotent_pair`] for the complex units `E_kl`, `E_kk − E_ll` acting on
/// `(e^{2k}, e^{2k+1})` pairs; these commute with the standard `J`.
fn complex_pair(n: usize, offset: usize, k: usize, l: usize, alpha: &[Q], beta: &[Q]) -> Vec<Matrix<Q>> {
    let re = |i: usize, j: usize| {
        let (a, b) = (offset + 2 * i, offset + 2 * j);
        unit(n, a, b).add(&unit(n, a + 1, b + 1))
    };
    let e = re(k, l);
    let h = re(k, k).sub(&re(l, l));
    alpha
        .iter()
        .zip(beta)
        .map(|(a, b)| e.scale(a).add(&h.scale(b)))
        .collect()
}

fn block_diag(a: &Matrix<Q>, b: &Matrix<Q>) -> Matrix<Q> {
    let (n, m) = (a.rows(), b.rows());
    let mut out = Matrix::zeros(n + m, n + m);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = a[(i, j)].clone();
        }
    }
    for i in 0..m {
        for j in 0..m {
            out[(n + i, n + j)] = b[(i, j)].clone();
        }
    }
    out
}

fn with_frame(spec: &GeometrySpec, frame: FrameAlgebra) -> Result<GeometrySpec> {
    let mut out = spec.clone();
    out.structure = match &spec.structure {
        Structure::G2(g) => Structure::G2(g.with_frame(frame)?),
        Structure::Su3(s) => Structure::Su3(s.with_frame(frame)?),
    };
    Ok(out)
}

pub(super) fn propose(
    spec: &GeometrySpec,
    target: Target,
    rng: &mut ChaCha8Rng,
) -> Result<Option<(GeometrySpec, String)>> {
    let frame = spec.frame().clone();
    let n = frame.dim();
    let mut out = spec.clone();
    out.name = format!("{}+{}", spec.name, target.name());
    let what = match target {
        Target::InstantonA => {
            let alpha = random_one_form(n, rng);
            let beta = random_closed(&frame, rng);
            let block = nilpotent_pair(2, 0, 1, &alpha, &beta);
            let coeffs = (0..n).map(|a| block_diag(spec.gauge.coeff(a), &block[a])).collect();
            out.gauge =
                BundleData::new(spec.gauge.rank() + 2, coeffs)?.with_group(format!("{} + GL(2)", spec.gauge.group()));
            format!("gauge field extended by E12 (x) {alpha:?} + diag(1,-1) (x) {beta:?}")
        }
        Target::InstantonTheta => {
            let alpha = random_one_form(n, rng);
            let beta = random_closed(&frame, rng);
            let (x, label) = if spec.tangent.is_trivial() {
                let i = rng.random_range(0..n);
                let j = (i + rng.random_range(1..n)) % n;
                (nilpotent_pair(n, i, j, &alpha, &beta), format!("E{}{}", i + 1, j + 1))
            } else {
                // complex-linear pair: no trace against a U(3)-valued curvature
                let Some(offset) = complex_offset(spec) else {
                    return Err(Error::Perturbation(
                        "curved tangent bundle without a standard complex structure".into(),
                    ));
                };
                let k = rng.random_range(0..3);
                let l = (k + rng.random_range(1..3)) % 3;
                (
                    complex_pair(n, offset, k, l, &alpha, &beta),
                    format!("complex E{}{}", k + 1, l + 1),
                )
            };
            let coeffs = (0..n).map(|a| spec.tangent.coeff(a).add(&x[a])).collect();
            out.tangent = BundleData::new(n, coeffs)?.with_group(spec.tangent.group());
            format!("tangent field shifted by {label} (x) {alpha:?} + diagonal (x) {beta:?}")
        }
        Target::Bianchi => {
            let sys_anomaly = anomaly(spec)?;
            if !sys_anomaly.is_zero() {
                let shift = nonzero_rational(rng);
                out.alpha_prime = spec.alpha_prime.clone() + &shift;
                format!("alpha' shifted by {}", crate::scalar::fmt_q(&shift))
            } else {
                let (lambda, mu) = (gauss(rng), gauss(rng));
                if lambda.is_zero() && mu.is_zero() {
                    return Ok(None);
                }
                let Some(fr) = balanced_nilpotent_frame(spec, &lambda, &mu)? else {
                    return Err(Error::Perturbation(
                        "no Bianchi perturbation: the anomaly vanishes and the frame is not a flat standard torus"
                            .into(),
                    ));
                };
                out = with_frame(&out, fr)?;
                format!("frame deformed to dz3 = ({lambda}) dz1 dz2 + ({mu}) (dz1 dz1bar - dz2 dz2bar)")
            }
        }
        Target::TorsionTau2 => {
            // the last two directions the bundles do not use, so F and R keep their form
            let free: Vec<usize> = (0..n)
                .filter(|&a| spec.gauge.coeff(a).is_zero() && spec.tangent.coeff(a).is_zero())
                .collect();
            if free.len() < 2 {
                return Err(Error::Perturbation("bundles use every direction".into()));
            }
            let mut constants = frame.nonzero_constants();
            for &a in &free[free.len() - 2..] {
                for b in 0..a {
                    for c in b + 1..a {
                        if rng.random_ratio(1, 3) {
                            let v = small(rng);
                            if !v.is_zero() {
                                let pos = constants.iter().position(|(x, y, z, _)| (*x, *y, *z) == (a, b, c));
                                match pos {
                                    Some(p) => constants[p].3 += v,
                                    None => constants.push((a, b, c, v)),
                                }
                            }
                        }
                    }
                }
            }
            let Ok(fr) = FrameAlgebra::new(n, &constants) else {
                return Ok(None);
            };
            let fr = fr.with_orientation(frame.orientation())?;
            out = with_frame(&out, fr)?;
            let shown: Vec<String> = out
                .frame()
                .nonzero_constants()
                .iter()
                .map(|(a, b, c, v)| format!("f^{}_{}{}={}", a + 1, b + 1, c + 1, crate::scalar::fmt_q(v)))
                .collect();
            format!("frame deformed along two bundle-free directions: {}", shown.join(" "))
        }
    };
    Ok(Some((out, what)))
}

fn gauss(rng: &mut ChaCha8Rng) -> GaussQ {
    GaussQ::new(qi(rng.random_range(-1..=1)), qi(rng.random_range(-1..=1)))
}

fn anomaly(spec: &GeometrySpec) -> Result<Form> {
    let frame = spec.frame();
    let f = gauge::curvature(&spec.gauge, frame);
    let r = gauge::curvature(&spec.tangent, frame);
    Ok(gauge::trace_square(&f).sub(&gauge::trace_square(&r)))
}

/// `dz³ = λ dz¹∧dz² + μ (dz¹∧dz̄¹ − dz²∧dz̄²)` on the standard torus (6d or
/// its cylinder): complex, balanced, nilpotent.
fn balanced_nilpotent_frame(spec: &GeometrySpec, lambda: &GaussQ, mu: &GaussQ) -> Result<Option<FrameAlgebra>> {
    if !spec.frame().is_abelian() {
        return Ok(None);
    }
    match &spec.structure {
        Structure::G2(g) if g.phi() != &standard_phi() => return Ok(None),
        Structure::Su3(s) if s.omega() != &su3::standard_omega() || s.psi_re() != &su3::standard_psi_re() => {
            return Ok(None)
        }
        _ => {}
    }
    let six = SU3Data::standard(FrameAlgebra::abelian(6))?;
    let dz = six.holomorphic_coframe()?;
    let two = dz[0]
        .wedge(&dz[1])
        .scale(lambda)
        .add(&dz[0].wedge(&dz[0].conj()).sub(&dz[1].wedge(&dz[1].conj())).scale(mu));
    let mut de: Vec<Form> = (0..6).map(|_| Form::zero(6, 2)).collect();
    de[4] = two.re();
    de[5] = two.im();
    let fr = FrameAlgebra::from_differentials(6, &de)?;
    Ok(Some(if spec.dim() == 7 { fr.cylinder() } else { fr }))
}
