//! Frozen sign and normalization conventions.
//!
//! Every report carries [`VERSION`]; changing any constant here must bump it.

use crate::scalar::{qi, Q};

pub const VERSION: &str = "hetforge-conventions/2";

/// Normalization of `i_M(a) = κ₁ Σ_b M_b ∧ ι_b a` for a covector-valued 1-form `M`.
pub fn kappa_one() -> Q {
    qi(1)
}

/// Normalization of `i_H(a) = κ_H Σ_c (ι_c H) ∧ ι_c a` for a 3-form `H`.
///
/// Fixed by calibration on the lifted Iwasawa geometry (see
/// `g2::calibrate_kappa`); the value is then checked on every other
/// integrable catalog geometry with no free parameter.
pub fn kappa_h() -> Q {
    qi(KAPPA_H)
}

const KAPPA_H: i64 = 1;

/// Human-readable convention sheet, embedded in text reports.
pub fn sheet() -> String {
    format!(
        "\
conventions {VERSION}
indices: 1-based in files and reports, 0-based in the library API
structure constants: [e_b, e_c] = f^a_bc e_a, de^a = -sum_(b<c) f^a_bc e^bc
phi_std = e123 + e145 + e167 + e246 - e257 - e347 - e356, psi = *phi, phi^psi = 7 vol
hodge: *e^I = sign(I, I^c) e^(I^c) on an orthonormal coframe
L2_7 = {{b : *(phi^b) = 2b}}, L2_14 = {{b : *(phi^b) = -b}}
L3_1 = span(phi), L3_7 = {{i_v psi}}, L3_27 = orthogonal complement; L4, L5 by *
torsion: dphi = t0 psi + 3 t1^phi + *t3, dpsi = 4 t1^psi + *t2
flux: H = t0/6 phi - i_(t1) psi - t3
contraction: i_M(a) = k1 sum_b M_b ^ i_b a, k1 = {k1}; i_H uses M_c = i_c H, kH = {kh}
connections: nabla_(e_a) e_b = Gamma_ab^c e_c (first index differentiates)
torsion tensor: T_ab^c = Gamma_ab^c - Gamma_ba^c - f^c_ab; zeta = LC + H/2
curvature: F = dA + A^A, CS(A) = tr(A^dA + 2/3 A^A^A), trace unnormalized
d_A a = da + A^a - (-1)^p a^A on End-valued p-forms
(d_zeta M)_a = dM_a - sum_bc Gamma_ca^b e^c ^ M_b on covector-valued forms
F-map: F(M) = sum_a (i_a F) ^ M_a, F(a)_a = alpha'/4 tr((i_a F) ^ a)
D(M, k, a) = (d_zeta M + R(k) - F(a), d_theta k - R(M), d_A a - F(M))
cylinder: r is frame index 0, phi = e^0^omega + RePsi, psi = -e^0^ImPsi + omega^2/2
J^b_a = omega_ab, sign fixed so that Psi has type (3,0); J* e^a = sum_b J^a_b e^b
su3_std: omega = e12 + e34 + e56, Psi = (e1 + i e2)^(e3 + i e4)^(e5 + i e6)
flux (6d): H = i(del - delbar) omega = -d^c omega
",
        k1 = crate::scalar::fmt_q(&kappa_one()),
        kh = crate::scalar::fmt_q(&kappa_h()),
    )
}
