//! Verification pipelines and machine-readable reports.

mod catalog;
mod perturb;
mod spec;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use catalog::{catalog_names, catalog_text, load_catalog, CATALOG_ENV};
pub use perturb::{run_perturb, PerturbReport, Target};
pub use spec::{parse_geometry, GeometrySpec, Structure};

use crate::conventions;
use crate::error::{Error, Result};
use crate::exterior::{Form, MatrixForm};
use crate::g2::{self, max_abs};
use crate::gauge;
use crate::heterotic::{invariant_cohomology, nilpotency_report, CohomologyDims, HeteroticSystem, NilpotencyReport};
use crate::scalar::{fmt_q, q_to_f64, Q};
use crate::su3::{self, ShSystem};

pub const REPORT_FORMAT: &str = "hetforge-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    G2,
    Sh,
    Both,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g2" => Ok(Mode::G2),
            "sh" => Ok(Mode::Sh),
            "both" => Ok(Mode::Both),
            _ => Err(Error::Parse {
                line: 0,
                col: 0,
                msg: format!("unknown mode `{s}`"),
            }),
        }
    }
}

/// Whether a condition enters the requested verdict or is reported alongside it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Defining,
    Derived,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    /// `None` when the condition is undefined for this input.
    pub pass: Option<bool>,
    /// Exact summary: largest absolute coefficient, or a count; `"0"` iff `pass`.
    pub residual: Option<String>,
    pub role: Role,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_f64: Option<f64>,
}

impl Condition {
    fn exact(residual: Q, role: Role) -> Self {
        Self {
            pass: Some(residual.is_zero()),
            residual_f64: None,
            residual: Some(fmt_q(&residual)),
            role,
        }
    }

    fn count(n: usize, role: Role) -> Self {
        Self {
            pass: Some(n == 0),
            residual: Some(n.to_string()),
            role,
            residual_f64: None,
        }
    }

    fn flag(pass: bool, role: Role) -> Self {
        Self::count(usize::from(!pass), role)
    }

    fn undefined(role: Role) -> Self {
        Self {
            pass: None,
            residual: None,
            role,
            residual_f64: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    /// SHA-256 of the canonical geometry text.
    pub input_sha256: String,
    pub conventions: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorsionSummary {
    pub tau0: String,
    pub tau1: String,
    pub tau2: String,
    pub tau3: String,
    pub flux: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShSummary {
    pub flux: String,
    pub lee_form: Option<String>,
    pub restricted_hym_failing_blocks: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub format: &'static str,
    pub name: String,
    pub mode: Mode,
    pub provenance: Provenance,
    pub conditions: BTreeMap<String, Condition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion: Option<TorsionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nilpotency: Option<NilpotencyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sh: Option<ShSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohomology: Option<CohomologyDims>,
    /// Every defining condition passes.
    pub pass: bool,
}

impl VerificationReport {
    fn new(spec: &GeometrySpec, mode: Mode) -> Self {
        Self {
            format: REPORT_FORMAT,
            name: spec.name.clone(),
            mode,
            provenance: Provenance {
                input_sha256: hex::encode(Sha256::digest(spec.emit().as_bytes())),
                conventions: conventions::VERSION,
            },
            conditions: BTreeMap::new(),
            torsion: None,
            nilpotency: None,
            sh: None,
            cohomology: None,
            pass: false,
        }
    }

    fn finish(mut self) -> Self {
        self.pass = self
            .conditions
            .values()
            .filter(|c| c.role == Role::Defining)
            .all(|c| c.pass == Some(true));
        self
    }

    pub fn condition(&self, key: &str) -> Option<&Condition> {
        self.conditions.get(key)
    }

    /// Adds `residual_f64` to every exact residual.
    pub fn with_float_diagnostics(mut self) -> Self {
        for c in self.conditions.values_mut() {
            c.residual_f64 = c
                .residual
                .as_deref()
                .and_then(|r| crate::scalar::parse_q(r).ok())
                .map(|r| q_to_f64(&r));
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} ({:?}) [{}]", self.name, self.mode, self.provenance.conventions);
        let _ = writeln!(out, "input sha256 {}", self.provenance.input_sha256);
        for (k, c) in &self.conditions {
            let verdict = match c.pass {
                Some(true) => "pass",
                Some(false) => "FAIL",
                None => "n/a",
            };
            let role = if c.role == Role::Derived { " (derived)" } else { "" };
            let _ = write!(
                out,
                "  {k:<28} {verdict:<5} residual {}{role}",
                c.residual.as_deref().unwrap_or("-")
            );
            if let Some(f) = c.residual_f64 {
                let _ = write!(out, " ~{f:.3e}");
            }
            out.push('\n');
        }
        if let Some(t) = &self.torsion {
            let _ = writeln!(
                out,
                "  tau0 = {}, tau1 = {}, tau2 = {}, tau3 = {}",
                t.tau0, t.tau1, t.tau2, t.tau3
            );
            let _ = writeln!(out, "  H = {}", t.flux);
        }
        if let Some(n) = &self.nilpotency {
            for s in &n.stages {
                let _ = writeln!(
                    out,
                    "  stage {} (dim {}), failing blocks {:?}",
                    s.name,
                    s.domain_dim,
                    s.failing()
                );
            }
        }
        if let Some(s) = &self.sh {
            let _ = writeln!(out, "  H6 = {}", s.flux);
            if let Some(w) = &s.lee_form {
                let _ = writeln!(out, "  Lee form = {w}");
            }
        }
        if let Some(c) = &self.cohomology {
            let _ = writeln!(
                out,
                "  H^{} invariant: total {}, blocks (T*Y, End(TY), End(V)) = {:?}",
                c.degree, c.total, c.blocks
            );
        }
        let _ = writeln!(out, "verdict: {}", if self.pass { "pass" } else { "FAIL" });
        out
    }
}

fn max_abs_all<'a>(forms: impl IntoIterator<Item = &'a Form>) -> Q {
    forms
        .into_iter()
        .map(max_abs)
        .fold(Q::zero(), |a, b| if b > a { b } else { a })
}

fn max_abs_matrix(m: &MatrixForm) -> Q {
    max_abs_all(m.entries())
}

fn g2_conditions(sys: &HeteroticSystem, report: &mut VerificationReport) -> Result<()> {
    let g2d = sys.g2();
    let frame = g2d.frame();
    let t = sys.torsion();
    let integrable = g2::is_integrable(t);
    let op = sys.operator();
    let c = &mut report.conditions;
    c.insert("tau2_zero".into(), Condition::exact(max_abs(&t.tau2), Role::Defining));
    c.insert(
        "instanton_A".into(),
        Condition::exact(
            max_abs_matrix(&gauge::instanton_check(op.gauge_curvature(), g2d.psi())),
            Role::Defining,
        ),
    );
    c.insert(
        "instanton_theta".into(),
        Condition::exact(
            max_abs_matrix(&gauge::instanton_check(op.tangent_curvature(), g2d.psi())),
            Role::Defining,
        ),
    );
    let bianchi = gauge::bianchi_residual(
        frame,
        sys.flux(),
        op.gauge_curvature(),
        op.tangent_curvature(),
        sys.alpha_prime(),
    );
    c.insert(
        "bianchi".into(),
        if integrable {
            Condition::exact(max_abs(&bianchi), Role::Defining)
        } else {
            Condition::undefined(Role::Defining)
        },
    );
    let nabla = op.zeta().opposite(frame);
    let torsion_gap = nabla
        .torsion(frame)
        .as_three_form()
        .map(|tf| max_abs(&tf.sub(sys.flux())))
        .unwrap_or_else(|| Q::from_integer(1.into()));
    let nabla_phi = max_abs_all(&nabla.nabla(g2d.phi()));
    let zeta = std::cmp::max(torsion_gap, nabla_phi);
    c.insert("zeta_connection".into(), Condition::exact(zeta, Role::Defining));
    let ids = g2::check_structure_identities(g2d, sys.flux())?;
    c.insert(
        "flux_identities".into(),
        Condition::exact(max_abs_all([&ids.dphi, &ids.dpsi, &ids.dtau1_psi]), Role::Derived),
    );
    let nil = nilpotency_report(sys);
    let failing = nil.stages.iter().map(|s| s.failing().len()).sum::<usize>();
    report.conditions.insert(
        "check_operator_nilpotent".into(),
        Condition::count(failing, Role::Defining),
    );
    report.conditions.insert(
        "projection_complex".into(),
        Condition::flag(nil.projection_complex, Role::Derived),
    );
    report.conditions.insert(
        "theorem_consistent".into(),
        Condition::flag(nil.consistent, Role::Derived),
    );
    report.torsion = Some(TorsionSummary {
        tau0: fmt_q(&t.tau0),
        tau1: t.tau1.to_string(),
        tau2: t.tau2.to_string(),
        tau3: t.tau3.to_string(),
        flux: sys.flux().to_string(),
    });
    report.nilpotency = Some(nil);
    Ok(())
}

fn sh_conditions(sys: &ShSystem, report: &mut VerificationReport) -> Result<()> {
    let s = sys.su3();
    let v = sys.verdicts();
    let op = sys.operator();
    let c = &mut report.conditions;
    c.insert(
        "su3_structure".into(),
        Condition::flag(v.su3_compatible, Role::Defining),
    );
    let complex = match su3::complex_check(s) {
        Ok(_) => Condition::exact(Q::zero(), Role::Defining),
        Err(Error::NotComplex(_)) => Condition::flag(false, Role::Defining),
        Err(e) => return Err(e),
    };
    c.insert("complex".into(), complex);
    let lee = su3::balanced_check(s).ok();
    c.insert(
        "conformally_balanced".into(),
        match &lee {
            Some(w) => Condition::exact(max_abs(&s.frame().d(w)), Role::Defining),
            None => Condition::flag(false, Role::Defining),
        },
    );
    c.insert(
        "lee_form_compatible".into(),
        match v.lee_compatible {
            Some(b) => Condition::flag(b, Role::Defining),
            None => Condition::undefined(Role::Defining),
        },
    );
    let hym = |f: &MatrixForm| -> Result<Condition> {
        let r = su3::hol_ym_check(f, s);
        Ok(match r {
            Ok(r) => Condition::count(
                [r.wedge_psi, r.wedge_psi_bar, r.wedge_omega2]
                    .iter()
                    .filter(|&&b| !b)
                    .count(),
                Role::Defining,
            ),
            Err(Error::NotCompatible(_)) => Condition::undefined(Role::Defining),
            Err(e) => return Err(e),
        })
    };
    c.insert("hym_A".into(), hym(op.gauge_curvature())?);
    c.insert("hym_theta".into(), hym(op.tangent_curvature())?);
    let bianchi = su3::sh_bianchi(
        s.frame(),
        sys.flux(),
        op.gauge_curvature(),
        op.tangent_curvature(),
        sys.alpha_prime(),
    );
    c.insert(
        "bianchi_sh".into(),
        if v.complex {
            Condition::exact(max_abs(&bianchi), Role::Defining)
        } else {
            Condition::undefined(Role::Defining)
        },
    );
    let cor = su3::restricted_instanton_check(sys)?;
    c.insert(
        "curvature_hym".into(),
        Condition::count(
            cor.psi_failures + cor.psi_bar_failures + cor.omega2_failures,
            Role::Derived,
        ),
    );
    c.insert("restricted_hym_agrees".into(), Condition::flag(cor.agree, Role::Derived));
    c.insert(
        "dbar_squared_zero".into(),
        if v.complex
            && su3::hol_ym_check(op.gauge_curvature(), s)?.type_11
            && su3::hol_ym_check(op.tangent_curvature(), s)?.type_11
        {
            Condition::count(su3::dbar_squared_defect(sys, &[0, 1])?, Role::Derived)
        } else {
            Condition::undefined(Role::Derived)
        },
    );
    report.sh = Some(ShSummary {
        flux: sys.flux().to_string(),
        lee_form: lee.map(|w| w.to_string()),
        restricted_hym_failing_blocks: cor.failing_blocks,
    });
    Ok(())
}

/// Runs the requested verification. `Mode::Both` needs a 6-dimensional
/// spec and also verifies its cylinder lift.
pub fn run_verify(spec: &GeometrySpec, mode: Mode) -> Result<VerificationReport> {
    let mut report = VerificationReport::new(spec, mode);
    match (mode, spec.dim()) {
        (Mode::G2, _) => g2_conditions(&spec.heterotic_system()?, &mut report)?,
        (Mode::Sh, 6) => sh_conditions(&spec.sh_system()?, &mut report)?,
        (Mode::Both, 6) => {
            let sys = spec.sh_system()?;
            sh_conditions(&sys, &mut report)?;
            let lift = sys.lift_to_cylinder()?;
            g2_conditions(&lift, &mut report)?;
            let agree = report.condition("check_operator_nilpotent").and_then(|c| c.pass)
                == Some(sys.verdicts().strominger_hull());
            let flux_reduces = su3::reduced_flux(&lift).ok().as_ref() == Some(sys.flux());
            report
                .conditions
                .insert("lift_agrees".into(), Condition::flag(agree, Role::Defining));
            report.conditions.insert(
                "flux_reduces_to_dc_omega".into(),
                Condition::flag(flux_reduces, Role::Derived),
            );
        }
        (_, d) => return Err(Error::FrameMismatch(d, 6)),
    }
    Ok(report.finish())
}

/// Invariant `Ď` cohomology dimensions; 6-dimensional specs are lifted first.
pub fn run_cohomology(spec: &GeometrySpec, degree: usize) -> Result<VerificationReport> {
    let sys = spec.heterotic_system()?;
    let mut report = VerificationReport::new(spec, Mode::G2);
    let dims = invariant_cohomology(&sys, degree)?;
    report
        .conditions
        .insert("check_operator_nilpotent".into(), Condition::count(0, Role::Defining));
    report.cohomology = Some(dims);
    Ok(report.finish())
}
