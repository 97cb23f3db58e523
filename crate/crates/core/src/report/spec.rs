//! Geometry files: a TOML schema with 1-based indices and rationals as strings.
//!
//! ```toml
//! name = "heis_t4"
//! dim = 7
//! orientation = 1
//! alpha_prime = "0"
//! # [a, b, c, f^a_bc], de^a = -sum_(b<c) f^a_bc e^bc
//! structure_constants = [
//!   [7, 1, 2, "-1"],
//! ]
//!
//! [structure]
//! phi = [
//!   [[1, 2, 3], "1"],
//! ]
//!
//! [[bundles]]
//! role = "gauge"
//! rank = 1
//! # [direction, row, col, value]
//! connection = []
//! ```
//!
//! A 6-dimensional file gives `omega`, `psi_re`, `psi_im` instead of `phi`.
//! Missing bundles default to flat trivial ones (gauge rank 1, tangent rank `dim`).

use std::fmt::Write as _;
use std::ops::Range;

use num_traits::Zero;
use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::exterior::{Form, FrameAlgebra, MultiIndex};
use crate::g2::G2Data;
use crate::gauge::BundleData;
use crate::heterotic::HeteroticSystem;
use crate::linalg::Matrix;
use crate::scalar::{fmt_q, parse_q, Q};
use crate::su3::{su3_compatibility, SU3Data, ShSystem};

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Structure {
    G2(G2Data),
    Su3(SU3Data),
}

/// A validated geometry with bundle data.
#[derive(Clone, Debug)]
pub struct GeometrySpec {
    pub name: String,
    pub description: Option<String>,
    pub structure: Structure,
    pub gauge: BundleData,
    pub tangent: BundleData,
    pub alpha_prime: Q,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    name: String,
    description: Option<String>,
    dim: Spanned<usize>,
    #[serde(default = "positive")]
    orientation: Spanned<i32>,
    alpha_prime: Option<Spanned<String>>,
    #[serde(default)]
    structure_constants: Vec<Spanned<(usize, usize, usize, String)>>,
    structure: Spanned<RawStructure>,
    #[serde(default)]
    bundles: Vec<Spanned<RawBundle>>,
}

fn positive() -> Spanned<i32> {
    Spanned::new(0..0, 1)
}

type RawTerms = Vec<Spanned<(Vec<usize>, String)>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    phi: Option<RawTerms>,
    omega: Option<RawTerms>,
    psi_re: Option<RawTerms>,
    psi_im: Option<RawTerms>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBundle {
    role: String,
    rank: usize,
    group: Option<String>,
    #[serde(default)]
    connection: Vec<Spanned<(usize, usize, usize, String)>>,
}

/// 1-based line and column of a byte offset.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

struct Locator<'a>(&'a str);

impl Locator<'_> {
    fn err(&self, span: Range<usize>, msg: impl Into<String>) -> Error {
        let (line, col) = line_col(self.0, span.start);
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn rational(&self, s: &str, span: Range<usize>) -> Result<Q> {
        parse_q(s).map_err(|_| self.err(span, format!("invalid rational `{s}`")))
    }

    fn index(&self, i: usize, dim: usize, span: Range<usize>) -> Result<usize> {
        if i == 0 || i > dim {
            return Err(self.err(span, format!("index {i} outside 1..={dim}")));
        }
        Ok(i - 1)
    }

    fn form(&self, terms: &RawTerms, dim: usize, degree: usize, what: &str) -> Result<Form> {
        let mut out = Form::<Q>::zero(dim, degree);
        for t in terms {
            let span = t.span();
            let (idx, val) = t.get_ref();
            if idx.len() != degree {
                return Err(self.err(span, format!("{what} terms need {degree} indices, got {}", idx.len())));
            }
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(self.err(span, "multi-index must be strictly increasing"));
            }
            let zero_based = idx
                .iter()
                .map(|&i| self.index(i, dim, span.clone()))
                .collect::<Result<Vec<_>>>()?;
            let (_, mi) = MultiIndex::sorted(&zero_based).expect("strictly increasing");
            if !out.coeff(mi).is_zero() {
                return Err(self.err(span, "repeated multi-index"));
            }
            out.add_term(mi, self.rational(val, span.clone())?);
        }
        Ok(out)
    }
}

/// Parses and validates a geometry file.
pub fn parse_geometry(text: &str) -> Result<GeometrySpec> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| {
        let (line, col) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        Error::Parse {
            line,
            col,
            msg: e.message().trim().to_string(),
        }
    })?;
    let loc = Locator(text);
    let dim = *raw.dim.get_ref();
    if dim != 6 && dim != 7 {
        return Err(loc.err(raw.dim.span(), format!("dim must be 6 or 7, got {dim}")));
    }
    let mut constants = Vec::new();
    for c in &raw.structure_constants {
        let span = c.span();
        let (a, b, cc, v) = c.get_ref();
        constants.push((
            loc.index(*a, dim, span.clone())?,
            loc.index(*b, dim, span.clone())?,
            loc.index(*cc, dim, span.clone())?,
            loc.rational(v, span)?,
        ));
    }
    let frame = FrameAlgebra::new(dim, &constants)?
        .with_orientation(*raw.orientation.get_ref())
        .map_err(|_| loc.err(raw.orientation.span(), "orientation must be 1 or -1"))?;
    let s = raw.structure.get_ref();
    let sspan = raw.structure.span();
    let structure = if dim == 7 {
        if s.omega.is_some() || s.psi_re.is_some() || s.psi_im.is_some() {
            return Err(loc.err(sspan, "a 7-dimensional structure is given by `phi` alone"));
        }
        let phi = s.phi.as_ref().ok_or_else(|| loc.err(sspan.clone(), "missing `phi`"))?;
        Structure::G2(G2Data::new(frame, loc.form(phi, 7, 3, "phi")?)?)
    } else {
        if s.phi.is_some() {
            return Err(loc.err(
                sspan,
                "a 6-dimensional structure is given by `omega`, `psi_re`, `psi_im`",
            ));
        }
        let get = |t: &Option<RawTerms>, name: &str, deg: usize| {
            let terms = t
                .as_ref()
                .ok_or_else(|| loc.err(sspan.clone(), format!("missing `{name}`")))?;
            loc.form(terms, 6, deg, name)
        };
        let su3 = SU3Data::new(
            frame,
            get(&s.omega, "omega", 2)?,
            get(&s.psi_re, "psi_re", 3)?,
            get(&s.psi_im, "psi_im", 3)?,
        )?;
        let compat = su3_compatibility(&su3);
        if !compat.holds() {
            return Err(Error::NotAdapted(format!(
                "(ω, Ψ) do not induce the coframe metric (ω∧Ψ = 0: {}, volume normalization: {})",
                compat.omega_wedge_psi, compat.volume
            )));
        }
        Structure::Su3(su3)
    };
    let mut gauge = None;
    let mut tangent = None;
    for b in &raw.bundles {
        let span = b.span();
        let rb = b.get_ref();
        let slot = match rb.role.as_str() {
            "gauge" => &mut gauge,
            "tangent" => &mut tangent,
            other => return Err(loc.err(span, format!("unknown bundle role `{other}`"))),
        };
        if slot.is_some() {
            return Err(loc.err(span, format!("duplicate `{}` bundle", rb.role)));
        }
        if rb.role == "tangent" && rb.rank != dim {
            return Err(loc.err(span, format!("tangent bundle must have rank {dim}")));
        }
        if rb.rank == 0 {
            return Err(loc.err(span, "bundle rank must be positive"));
        }
        let mut coeffs = vec![Matrix::zeros(rb.rank, rb.rank); dim];
        for e in &rb.connection {
            let espan = e.span();
            let (a, i, j, v) = e.get_ref();
            let a = loc.index(*a, dim, espan.clone())?;
            let i = loc.index(*i, rb.rank, espan.clone())?;
            let j = loc.index(*j, rb.rank, espan.clone())?;
            coeffs[a][(i, j)] = loc.rational(v, espan)?;
        }
        let mut bundle = BundleData::new(rb.rank, coeffs)?;
        if let Some(g) = &rb.group {
            bundle = bundle.with_group(g.clone());
        }
        *slot = Some(bundle);
    }
    let alpha_prime = match &raw.alpha_prime {
        Some(a) => loc.rational(a.get_ref(), a.span())?,
        None => Q::zero(),
    };
    Ok(GeometrySpec {
        name: raw.name,
        description: raw.description,
        structure,
        gauge: gauge.unwrap_or_else(|| BundleData::trivial(1, dim)),
        tangent: tangent.unwrap_or_else(|| BundleData::trivial(dim, dim)),
        alpha_prime,
    })
}

impl GeometrySpec {
    pub fn dim(&self) -> usize {
        self.frame().dim()
    }

    pub fn frame(&self) -> &FrameAlgebra {
        match &self.structure {
            Structure::G2(g) => g.frame(),
            Structure::Su3(s) => s.frame(),
        }
    }

    pub fn heterotic_system(&self) -> Result<HeteroticSystem> {
        match &self.structure {
            Structure::G2(g) => HeteroticSystem::new(
                g.clone(),
                self.gauge.clone(),
                self.tangent.clone(),
                self.alpha_prime.clone(),
            ),
            Structure::Su3(_) => self.sh_system()?.lift_to_cylinder(),
        }
    }

    pub fn sh_system(&self) -> Result<ShSystem> {
        match &self.structure {
            Structure::Su3(s) => ShSystem::new(
                s.clone(),
                self.gauge.clone(),
                self.tangent.clone(),
                self.alpha_prime.clone(),
            ),
            Structure::G2(_) => Err(Error::FrameMismatch(7, 6)),
        }
    }

    pub fn from_heterotic(name: impl Into<String>, sys: &HeteroticSystem) -> Self {
        Self {
            name: name.into(),
            description: None,
            structure: Structure::G2(sys.g2().clone()),
            gauge: sys.gauge().clone(),
            tangent: sys.tangent().clone(),
            alpha_prime: sys.alpha_prime().clone(),
        }
    }

    pub fn from_sh(name: impl Into<String>, sys: &ShSystem) -> Self {
        Self {
            name: name.into(),
            description: None,
            structure: Structure::Su3(sys.su3().clone()),
            gauge: sys.gauge().clone(),
            tangent: sys.tangent().clone(),
            alpha_prime: sys.alpha_prime().clone(),
        }
    }

    /// Canonical text; `parse_geometry(&spec.emit())` reproduces the spec.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        let fr = self.frame();
        let _ = writeln!(out, "name = {}", toml_str(&self.name));
        if let Some(d) = &self.description {
            let _ = writeln!(out, "description = {}", toml_str(d));
        }
        let _ = writeln!(out, "dim = {}", fr.dim());
        let _ = writeln!(out, "orientation = {}", fr.orientation());
        let _ = writeln!(out, "alpha_prime = \"{}\"", fmt_q(&self.alpha_prime));
        out.push_str("# [a, b, c, f^a_bc], de^a = -sum_(b<c) f^a_bc e^bc\n");
        let constants: Vec<String> = fr
            .nonzero_constants()
            .iter()
            .map(|(a, b, c, v)| format!("[{}, {}, {}, \"{}\"]", a + 1, b + 1, c + 1, fmt_q(v)))
            .collect();
        emit_array(&mut out, "structure_constants", &constants);
        out.push_str("\n[structure]\n");
        match &self.structure {
            Structure::G2(g) => emit_array(&mut out, "phi", &form_terms(g.phi())),
            Structure::Su3(s) => {
                emit_array(&mut out, "omega", &form_terms(s.omega()));
                emit_array(&mut out, "psi_re", &form_terms(s.psi_re()));
                emit_array(&mut out, "psi_im", &form_terms(s.psi_im()));
            }
        }
        for (role, b) in [("gauge", &self.gauge), ("tangent", &self.tangent)] {
            let _ = write!(out, "\n[[bundles]]\nrole = \"{role}\"\nrank = {}\n", b.rank());
            let _ = writeln!(out, "group = {}", toml_str(b.group()));
            out.push_str("# [direction, row, col, value]\n");
            let mut entries = Vec::new();
            for a in 0..b.dim() {
                let m = b.coeff(a);
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        if !m[(i, j)].is_zero() {
                            entries.push(format!("[{}, {}, {}, \"{}\"]", a + 1, i + 1, j + 1, fmt_q(&m[(i, j)])));
                        }
                    }
                }
            }
            emit_array(&mut out, "connection", &entries);
        }
        out
    }
}

fn toml_str(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn emit_array(out: &mut String, key: &str, items: &[String]) {
    if items.is_empty() {
        let _ = writeln!(out, "{key} = []");
        return;
    }
    let _ = writeln!(out, "{key} = [");
    for it in items {
        let _ = writeln!(out, "  {it},");
    }
    out.push_str("]\n");
}

/// Terms in lexicographic multi-index order.
fn form_terms(f: &Form) -> Vec<String> {
    let mut terms: Vec<(Vec<usize>, String)> = f
        .terms()
        .map(|(mi, c)| (mi.indices().map(|i| i + 1).collect(), fmt_q(c)))
        .collect();
    terms.sort();
    terms
        .into_iter()
        .map(|(idx, c)| {
            let idx: Vec<String> = idx.iter().map(usize::to_string).collect();
            format!("[[{}], \"{}\"]", idx.join(", "), c)
        })
        .collect()
}
