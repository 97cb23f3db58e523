use proptest::prelude::*;

use super::*;
use crate::g2::standard_phi;
use crate::heterotic::nilpotency_report;

/// `de^a = Σ c e^{bc}` from 1-based `(a, b, c, coeff)` entries.
fn frame6(de: &[(usize, usize, usize, i64)]) -> FrameAlgebra {
    let c: Vec<_> = de.iter().map(|&(a, b, c, v)| (a - 1, b - 1, c - 1, qi(-v))).collect();
    FrameAlgebra::new(6, &c).unwrap()
}

fn iwasawa() -> FrameAlgebra {
    frame6(&[(5, 1, 3, 1), (5, 2, 4, -1), (6, 1, 4, 1), (6, 2, 3, 1)])
}

fn nil_bal() -> FrameAlgebra {
    frame6(&[(6, 1, 2, 1), (6, 3, 4, -1)])
}

fn hyperbolic() -> FrameAlgebra {
    frame6(&[(2, 1, 2, 1), (3, 1, 3, 1), (4, 1, 4, 1), (5, 1, 5, 1), (6, 1, 6, 1)])
}

fn skew(n: usize, i: usize, j: usize) -> Matrix<Q> {
    let mut m = Matrix::zeros(n, n);
    m[(i, j)] = qi(1);
    m[(j, i)] = qi(-1);
    m
}

fn omega6() -> Matrix<Q> {
    skew(6, 0, 1).add(&skew(6, 2, 3)).add(&skew(6, 4, 5))
}

fn sh_tuned6(alpha: Q) -> ShSystem {
    let su3 = SU3Data::standard(nil_bal()).unwrap();
    let mut ca = vec![Matrix::zeros(1, 1); 6];
    ca[5] = Matrix::from_rows(vec![vec![qi(1)]]);
    let mut ct = vec![Matrix::zeros(6, 6); 6];
    ct[5] = omega6().scale(&q(1, 2));
    ShSystem::new(
        su3,
        BundleData::new(1, ca).unwrap(),
        BundleData::new(6, ct).unwrap(),
        alpha,
    )
    .unwrap()
}

fn trivial(frame: FrameAlgebra, alpha: Q) -> ShSystem {
    let su3 = SU3Data::standard(frame).unwrap();
    ShSystem::new(su3, BundleData::trivial(1, 6), BundleData::trivial(6, 6), alpha).unwrap()
}

fn gq(re: i64, im: i64) -> GaussQ {
    GaussQ::new(qi(re), qi(im))
}

/// `dz_k = e^{2k−1} + i e^{2k}` (1-based `k`).
fn dz(k: usize) -> CForm {
    CForm::basis(6, &[2 * k - 2]).add(&CForm::basis(6, &[2 * k - 1]).scale(&GaussQ::i()))
}

fn rank2_gauge(dirs: &[(usize, Matrix<Q>)]) -> BundleData {
    let mut ca = vec![Matrix::zeros(2, 2); 6];
    for (a, m) in dirs {
        ca[*a] = m.clone();
    }
    BundleData::new(2, ca).unwrap()
}

fn diag2() -> Matrix<Q> {
    Matrix::from_rows(vec![vec![qi(1), qi(0)], vec![qi(0), qi(-1)]])
}

fn rotation() -> Matrix<Q> {
    let mut k = Matrix::zeros(6, 6);
    k[(0, 2)] = q(1, 2);
    k[(2, 0)] = q(-1, 2);
    k[(1, 5)] = q(1, 3);
    k[(5, 1)] = q(-1, 3);
    cayley(&k)
}

#[test]
fn reduce_standard_phi() {
    let psi = crate::g2::standard_psi();
    let (om, re, im) = reduce_g2(&standard_phi(), &psi, 0).unwrap();
    assert_eq!(om, standard_omega());
    assert_eq!(re, standard_psi_re());
    assert_eq!(im, standard_psi_im());
    // ReΨ before relabeling: e²⁴⁶ − e²⁵⁷ − e³⁴⁷ − e³⁵⁶ (1-based)
    let er = Form::basis(7, &[0]);
    let om7 = standard_phi().interior(0);
    let re7 = Form::from_index_terms(
        7,
        3,
        &[
            (&[1, 3, 5], qi(1)),
            (&[1, 4, 6], qi(-1)),
            (&[2, 3, 6], qi(-1)),
            (&[2, 4, 5], qi(-1)),
        ],
    );
    assert_eq!(er.wedge(&om7).add(&re7), standard_phi());
    let lifted = lift_structure(&SU3Data::standard(FrameAlgebra::abelian(6)).unwrap()).unwrap();
    assert_eq!(lifted.phi(), &standard_phi());
    assert_eq!(lifted.psi(), &psi);
    let mangled = psi.add(&Form::basis(7, &[1, 2, 3, 4]));
    assert!(matches!(
        reduce_g2(&standard_phi(), &mangled, 0),
        Err(Error::NotACylinderStructure(_))
    ));
}

#[test]
fn reduce_frame_needs_a_central_closed_direction() {
    let lifted = iwasawa().cylinder();
    let back = reduce_frame(&lifted, 0).unwrap();
    assert_eq!(back.nonzero_constants(), iwasawa().nonzero_constants());
    assert!(matches!(reduce_frame(&lifted, 5), Err(Error::NotACylinderStructure(_))));
}

#[test]
fn compatibility_relations() {
    for fr in [FrameAlgebra::abelian(6), iwasawa()] {
        assert!(su3_compatibility(&SU3Data::standard(fr).unwrap()).holds());
    }
    let s = SU3Data::standard(FrameAlgebra::abelian(6)).unwrap();
    let scaled = SU3Data::new(
        s.frame().clone(),
        s.omega().scale(&qi(2)),
        s.psi_re().clone(),
        s.psi_im().clone(),
    )
    .unwrap();
    let c = su3_compatibility(&scaled);
    assert!(c.omega_wedge_psi && !c.volume);
    assert!(matches!(scaled.j(), Err(Error::NotCompatible(_))));
    // ‖Ψ‖² = 8 and Ψ∧Ψ̄ = −8i vol
    let psi = s.psi();
    assert_eq!(s.psi_re().dot(s.psi_re()) + &s.psi_im().dot(s.psi_im()), qi(8));
    assert_eq!(
        psi.wedge(&psi.conj()),
        CForm::basis(6, &[0, 1, 2, 3, 4, 5]).scale(&gq(0, -8))
    );
    assert_eq!(psi, dz(1).wedge(&dz(2)).wedge(&dz(3)));
}

#[test]
fn almost_complex_structure() {
    let s = SU3Data::standard(FrameAlgebra::abelian(6)).unwrap();
    let j = s.j().unwrap().clone();
    let mut expect = Matrix::zeros(6, 6);
    for k in 0..3 {
        expect[(2 * k + 1, 2 * k)] = qi(1);
        expect[(2 * k, 2 * k + 1)] = qi(-1);
    }
    assert_eq!(j, expect);
    assert_eq!(j.mul(&j), Matrix::identity(6).scale(&qi(-1)));
    // ω(U, V) = g(JU, V)
    for a in 0..6 {
        for b in 0..6 {
            assert_eq!(s.omega().component(&[a, b]), j[(b, a)]);
        }
    }
    let conj = almost_complex(s.omega(), s.psi_re(), &s.psi_im().neg()).unwrap();
    assert_eq!(conj, j.scale(&qi(-1)));
    let coframe = s.holomorphic_coframe().unwrap();
    for (k, t) in coframe.iter().enumerate() {
        assert_eq!(t, &dz(k + 1));
    }
    assert!(matches!(
        almost_complex(s.omega(), &Form::basis(6, &[0, 1, 2]), &Form::zero(6, 3)),
        Err(Error::NotCompatible(_))
    ));
}

#[test]
fn type_decomposition_examples() {
    let s = SU3Data::standard(iwasawa()).unwrap();
    let om = s.type_decompose(&s.omega().complexify()).unwrap();
    assert_eq!(om.types(), vec![(1, 1)]);
    assert_eq!(s.type_decompose(&s.psi()).unwrap().types(), vec![(3, 0)]);
    let real = Form::from_index_terms(6, 3, &[(&[0, 1, 2], qi(1)), (&[0, 2, 4], qi(3)), (&[1, 3, 5], qi(-2))]);
    let d = s.type_decompose(&real.complexify()).unwrap();
    assert_eq!(d.sum(), real.complexify());
    for (p, qq) in d.types() {
        assert_eq!(d.part(p, qq).conj(), d.part(qq, p));
    }
    // dz¹∧dz̄² is (1,1)
    let mixed = dz(1).wedge(&dz(2).conj());
    assert_eq!(s.type_decompose(&mixed).unwrap().types(), vec![(1, 1)]);
}

fn arb_cform(p: usize) -> impl Strategy<Value = CForm> {
    let len = MultiIndex::all(6, p).len();
    (
        proptest::collection::vec(-2i64..=2, len),
        proptest::collection::vec(-2i64..=2, len),
    )
        .prop_map(move |(re, im)| {
            let v: Vec<GaussQ> = re.into_iter().zip(im).map(|(a, b)| gq(a, b)).collect();
            CForm::from_vec(6, p, &v)
        })
}

fn type_of(s: &SU3Data, a: &CForm) -> Vec<(usize, usize)> {
    s.type_decompose(a).unwrap().types()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wedge_adds_types(a in arb_cform(1), b in arb_cform(2), p1 in 0usize..=1, p2 in 0usize..=2) {
        let s = SU3Data::standard(iwasawa()).unwrap();
        let x = s.type_part(&a, p1, 1 - p1).unwrap();
        let y = s.type_part(&b, p2, 2 - p2).unwrap();
        let w = x.wedge(&y);
        prop_assume!(!w.is_zero());
        prop_assert_eq!(type_of(&s, &w), vec![(p1 + p2, 3 - p1 - p2)]);
    }

    #[test]
    fn conjugation_swaps_types(a in arb_cform(3)) {
        let s = SU3Data::standard(nil_bal()).unwrap();
        let d = s.type_decompose(&a).unwrap();
        prop_assert_eq!(d.sum(), a.clone());
        let dc = s.type_decompose(&a.conj()).unwrap();
        for (p, qq) in d.types() {
            prop_assert_eq!(d.part(p, qq).conj(), dc.part(qq, p));
        }
    }

    #[test]
    fn dolbeault_identities_on_complex_frames(a in arb_cform(1), b in arb_cform(2)) {
        for fr in [iwasawa(), nil_bal(), hyperbolic()] {
            let s = SU3Data::standard(fr).unwrap();
            for x in [&a, &b] {
                let db = s.dbar(x).unwrap();
                let d = s.del(x).unwrap();
                prop_assert!(s.dbar(&db).unwrap().is_zero());
                prop_assert!(s.del(&d).unwrap().is_zero());
                prop_assert!(s.del(&db).unwrap().add(&s.dbar(&d).unwrap()).is_zero());
                prop_assert_eq!(d.add(&db), s.frame().d(x));
            }
        }
    }
}

#[test]
fn dolbeault_splitting_fails_off_integrable_structures() {
    let s = SU3Data::standard(iwasawa()).unwrap().transformed(&rotation()).unwrap();
    let broken = (0..6).any(|a| {
        let e = CForm::basis(6, &[a]);
        s.del(&e).unwrap().add(&s.dbar(&e).unwrap()) != s.frame().d(&e)
    });
    assert!(broken);
    let dbar2 = (0..6).any(|a| {
        let e = CForm::basis(6, &[a]);
        !s.dbar(&s.dbar(&e).unwrap()).unwrap().is_zero()
    });
    assert!(dbar2);
}

#[test]
fn complex_check_examples() {
    for fr in [FrameAlgebra::abelian(6), iwasawa()] {
        let s = SU3Data::standard(fr).unwrap();
        assert!(s.frame().d(&s.psi()).is_zero());
        assert!(complex_check(&s).unwrap().is_zero());
    }
    let hyp = SU3Data::standard(hyperbolic()).unwrap();
    let w = complex_check(&hyp).unwrap();
    assert_eq!(w, dz(1).scale(&GaussQ::real(q(3, 2))));
    // W̄ is ∂̄-closed and reproduces dΨ
    assert!(hyp.dbar(&w.conj()).unwrap().is_zero());
    assert_eq!(w.conj().wedge(&hyp.psi()), hyp.frame().d(&hyp.psi()));
    let rotated = SU3Data::standard(iwasawa()).unwrap().transformed(&rotation()).unwrap();
    assert!(su3_compatibility(&rotated).holds());
    match complex_check(&rotated) {
        Err(Error::NotComplex(r)) => assert!(r > 0.0),
        other => panic!("expected NotComplex, got {other:?}"),
    }
}

#[test]
fn balanced_check_examples() {
    let t6 = SU3Data::standard(FrameAlgebra::abelian(6)).unwrap();
    assert!(balanced_check(&t6).unwrap().is_zero());
    let iw = SU3Data::standard(iwasawa()).unwrap();
    assert!(!iw.frame().d(iw.omega()).is_zero());
    assert!(balanced_check(&iw).unwrap().is_zero());
    // d(e^{1234} + e^{1256} + e^{3456}) = 4 e¹∧(e^{3456}) + ... on the hyperbolic toy
    let hyp = SU3Data::standard(hyperbolic()).unwrap();
    let w = balanced_check(&hyp).unwrap();
    assert_eq!(w, Form::basis(6, &[0]).scale(&qi(2)));
    let om2 = hyp.omega().wedge(hyp.omega());
    assert_eq!(hyp.frame().d(&om2), w.wedge(&om2).scale(&qi(2)));
}

#[test]
fn lee_compatibility_examples() {
    for (fr, expect) in [
        (FrameAlgebra::abelian(6), true),
        (iwasawa(), true),
        (hyperbolic(), false),
    ] {
        let t = su3_torsion(&SU3Data::standard(fr).unwrap()).unwrap();
        assert_eq!(lee_compatibility(&t), expect);
    }
    let t = SU3Torsion {
        w1_omega: Form::basis(6, &[0]),
        w1_psi_re: Form::zero(6, 1),
        w1_psi_im: Form::zero(6, 1),
        h6: Form::zero(6, 3),
    };
    assert!(!lee_compatibility(&t));
}

#[test]
fn dc_omega_examples() {
    assert!(dc_omega(&SU3Data::standard(FrameAlgebra::abelian(6)).unwrap())
        .unwrap()
        .is_zero());
    let s = SU3Data::standard(iwasawa()).unwrap();
    let h = dc_omega(&s).unwrap();
    assert!(!h.is_zero());
    let types = type_of(&s, &h.complexify());
    assert_eq!(types, vec![(1, 2), (2, 1)]);
    assert_eq!(h.complexify().conj(), h.complexify());
    // Bismut torsion oracle: H(X, Y, Z) = dω(JX, JY, JZ)
    for fr in [iwasawa(), nil_bal(), hyperbolic()] {
        let s = SU3Data::standard(fr).unwrap();
        let jdw = pull_back(&s.frame().d(s.omega()), s.j().unwrap());
        assert_eq!(dc_omega(&s).unwrap(), jdw);
    }
    let rotated = SU3Data::standard(iwasawa()).unwrap().transformed(&rotation()).unwrap();
    assert!(matches!(dc_omega(&rotated), Err(Error::NotComplex(_))));
}

#[test]
fn hol_ym_examples() {
    let s = SU3Data::standard(FrameAlgebra::abelian(6)).unwrap();
    assert!(hol_ym_check(&MatrixForm::zero(2, 6, 2), &s).unwrap().holds());
    let trace_part = MatrixForm::from_entries(1, vec![s.omega().clone()]);
    let r = hol_ym_check(&trace_part, &s).unwrap();
    assert!(r.wedge_psi && r.type_11 && !r.wedge_omega2 && !r.primitive && !r.holds());
    // Re(dz¹∧dz²) = e¹³ − e²⁴ has types (2,0) + (0,2)
    let twenty = MatrixForm::from_entries(1, vec![dz(1).wedge(&dz(2)).re()]);
    let r = hol_ym_check(&twenty, &s).unwrap();
    assert!(!r.wedge_psi_bar && !r.type_11 && !r.holds());
    let prim = MatrixForm::from_entries(1, vec![Form::basis(6, &[0, 1]).sub(&Form::basis(6, &[2, 3]))]);
    let r = hol_ym_check(&prim, &s).unwrap();
    assert!(r.holds() && r.type_11 && r.primitive);
}

#[test]
fn sh_bianchi_examples() {
    let t6 = ShSystem::trivial_t6(1);
    let op = t6.operator();
    assert!(sh_bianchi(
        t6.su3().frame(),
        t6.flux(),
        op.gauge_curvature(),
        op.tangent_curvature(),
        &qi(0)
    )
    .is_zero());
    let iw = trivial(iwasawa(), qi(0));
    let op = iw.operator();
    assert!(!sh_bianchi(
        iw.su3().frame(),
        iw.flux(),
        op.gauge_curvature(),
        op.tangent_curvature(),
        &qi(0)
    )
    .is_zero());
    assert_eq!(iw.verdicts().bianchi, Some(false));
    let tuned = sh_tuned6(q(8, 5));
    let op = tuned.operator();
    assert!(sh_bianchi(
        tuned.su3().frame(),
        tuned.flux(),
        op.gauge_curvature(),
        op.tangent_curvature(),
        &q(8, 5)
    )
    .is_zero());
}

#[test]
fn sh_verdicts_on_reference_systems() {
    assert!(ShSystem::trivial_t6(1).verdicts().strominger_hull());
    let v = trivial(iwasawa(), qi(0)).verdicts();
    assert!(v.complex && v.conformally_balanced && v.lee_compatible == Some(true));
    assert!(v.hym_a && v.hym_theta && v.bianchi == Some(false));
    assert!(sh_tuned6(q(8, 5)).verdicts().strominger_hull());
    assert!(!sh_tuned6(qi(1)).verdicts().strominger_hull());
}

#[test]
fn qsix_round_trip() {
    let s = SU3Data::standard(iwasawa()).unwrap();
    for k in (0..QSixForm::space_dim(1, 1)).step_by(7) {
        let z = QSixForm::basis(1, 1, k);
        assert_eq!(QSixForm::from_qform(&z.to_qform(&s).unwrap(), &s).unwrap(), z);
    }
    // e¹ has M^1 = 1 and W_1 = ½
    let mut m = QForm::<GaussQ>::zero(
        QLayout {
            dim: 6,
            rank_t: 6,
            rank_v: 1,
        },
        0,
    );
    m.m[0] = CForm::constant(6, GaussQ::one());
    let z = QSixForm::from_qform(&m, &s).unwrap();
    assert_eq!(z.mvec[0], CForm::constant(6, GaussQ::one()));
    assert_eq!(z.w[0], CForm::constant(6, GaussQ::real(q(1, 2))));
}

/// Displayed `D̄` actions on degree-0 sections over the flat torus, where
/// the invariant frame is a coordinate frame and `H = 0`:
/// `(D̄Z)_μ = α'/4 (tr(κR_μν̄) − tr(αF_μν̄)) dz̄^ν`, `(D̄Z)^ν = 0`,
/// `(D̄Z)_V = [𝒜, α] ∓ M^μ F_μν̄ dz̄^ν`, `(D̄Z)_T = [ϑ, κ] ∓ M^μ R_μν̄ dz̄^ν`.
fn dbar_formula(sys: &ShSystem, z: &QSixForm, sign: i64) -> QSixForm {
    let s = sys.su3();
    let zf = s.holomorphic_frame().unwrap();
    let zb: Vec<Vec<GaussQ>> = zf.iter().map(|v| v.iter().map(Field::conj).collect()).collect();
    let thb: Vec<CForm> = s.holomorphic_coframe().unwrap().iter().map(Form::conj).collect();
    let ap = GaussQ::real(sys.alpha_prime().clone() / qi(4));
    let f = sys.operator().gauge_curvature().map_to(Form::complexify);
    let r = sys.operator().tangent_curvature().map_to(Form::complexify);
    let eval2 = |x: &MatrixForm<GaussQ>, u: &[GaussQ], v: &[GaussQ]| {
        let n = x.rank();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = x.get(i, j).evaluate(&[u.to_vec(), v.to_vec()]);
            }
        }
        m
    };
    let scalar = |m: &MatrixForm<GaussQ>| {
        let n = m.rank();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = m.get(i, j).coeff(MultiIndex::EMPTY);
            }
        }
        out
    };
    let conn01 = |b: &BundleData| -> Vec<Matrix<GaussQ>> {
        (0..3)
            .map(|nu| {
                let mut m = Matrix::zeros(b.rank(), b.rank());
                for a in 0..6 {
                    let c = b.coeff(a);
                    let cc = Matrix::from_rows(
                        (0..c.rows())
                            .map(|i| c.row(i).iter().map(|x| GaussQ::real(x.clone())).collect())
                            .collect(),
                    );
                    m = m.add(&cc.scale(&zb[nu][a]));
                }
                m
            })
            .collect()
    };
    let kappa = scalar(&z.kappa);
    let alpha = scalar(&z.alpha);
    let mv: Vec<GaussQ> = z.mvec.iter().map(|f| f.coeff(MultiIndex::EMPTY)).collect();
    let trace = |m: &Matrix<GaussQ>| (0..m.rows()).fold(GaussQ::zero(), |acc, i| acc + &m[(i, i)]);
    let mut out = QSixForm::zero(z.rank_v(), 1);
    for mu in 0..3 {
        for nu in 0..3 {
            let c = (trace(&kappa.mul(&eval2(&r, &zf[mu], &zb[nu])))
                - &trace(&alpha.mul(&eval2(&f, &zf[mu], &zb[nu]))))
                * &ap;
            out.w[mu] = out.w[mu].add(&thb[nu].scale(&c));
        }
    }
    let end_block = |x: &Matrix<GaussQ>, curv: &MatrixForm<GaussQ>, conn: Vec<Matrix<GaussQ>>| {
        let n = x.rows();
        let mut entries = vec![CForm::zero(6, 1); n * n];
        for nu in 0..3 {
            let mut m = conn[nu].mul(x).sub(&x.mul(&conn[nu]));
            for mu in 0..3 {
                m = m.add(&eval2(curv, &zf[mu], &zb[nu]).scale(&(mv[mu].clone() * &gq(sign, 0))));
            }
            for i in 0..n {
                for j in 0..n {
                    entries[i * n + j] = entries[i * n + j].add(&thb[nu].scale(&m[(i, j)]));
                }
            }
        }
        MatrixForm::from_entries(n, entries)
    };
    out.alpha = end_block(&alpha, &f, conn01(sys.gauge()));
    out.kappa = end_block(&kappa, &r, conn01(sys.tangent()));
    out
}

/// Flat torus with (1,1) curvatures `F = [X, D] e¹²` and `R = [r₁, r₂] e¹²`,
/// both non-primitive, so only the Bianchi-free HYM conditions fail.
fn t6_curved_system() -> ShSystem {
    let gauge = rank2_gauge(&[(0, skew(2, 0, 1)), (1, diag2())]);
    let mut ct = vec![Matrix::zeros(6, 6); 6];
    ct[0] = skew(6, 0, 2).add(&skew(6, 1, 3));
    ct[1] = skew(6, 0, 4).add(&skew(6, 1, 5));
    let su3 = SU3Data::standard(FrameAlgebra::abelian(6)).unwrap();
    ShSystem::new(su3, gauge, BundleData::new(6, ct).unwrap(), q(2, 3)).unwrap()
}

#[test]
fn dbar_matches_displayed_formulas_on_flat_torus() {
    let sys = t6_curved_system();
    assert!(!sys.operator().gauge_curvature().is_zero() && !sys.operator().tangent_curvature().is_zero());
    let s = sys.su3();
    for f in [sys.operator().gauge_curvature(), sys.operator().tangent_curvature()] {
        assert!(hol_ym_check(f, s).unwrap().type_11);
    }
    for k in 0..QSixForm::space_dim(2, 0) {
        let z = QSixForm::basis(2, 0, k);
        let got = sys.dbar(&z).unwrap();
        assert_eq!(got, dbar_formula(&sys, &z, -1), "basis {k}");
    }
}

#[test]
fn dbar_column_extraction() {
    let sys = t6_curved_system();
    let mut z = QSixForm::zero(2, 0);
    z.mvec[0] = CForm::constant(6, GaussQ::one());
    let out = sys.dbar(&z).unwrap();
    assert!(!out.alpha.is_zero());
    assert!(out.block_is_zero(3));
    assert_eq!(out, dbar_formula(&sys, &z, -1));
    assert!(ShSystem::trivial_t6(1)
        .dbar(&QSixForm::basis(1, 0, 5))
        .unwrap()
        .is_zero());
}

#[test]
fn dbar_maps_p_q_to_p_q_plus_one() {
    let sys = sh_tuned6(q(8, 5));
    let s = sys.su3();
    let mut z = QSixForm::zero(1, 1);
    z.w[1] = dz(2).conj();
    z.mvec[2] = dz(1).conj();
    z.alpha = MatrixForm::from_entries(1, vec![dz(3).conj()]);
    z.kappa.set(0, 1, dz(2).conj());
    let out = sys.dbar(&z).unwrap();
    assert!(!out.is_zero());
    for c in out.components().filter(|c| !c.is_zero()) {
        assert_eq!(type_of(s, c), vec![(0, 2)]);
    }
}

#[test]
fn dbar_rejects_non_11_curvature() {
    let su3 = SU3Data::standard(FrameAlgebra::abelian(6)).unwrap();
    let gauge = rank2_gauge(&[(0, skew(2, 0, 1)), (2, diag2())]);
    let sys = ShSystem::new(su3, gauge, BundleData::trivial(6, 6), qi(0)).unwrap();
    assert!(matches!(sys.dbar(&QSixForm::basis(2, 0, 0)), Err(Error::Type(_))));
}

#[test]
fn dbar_squares_to_zero_on_sh_solution() {
    assert_eq!(dbar_squared_defect(&sh_tuned6(q(8, 5)), &[0, 1]).unwrap(), 0);
    assert_eq!(dbar_squared_defect(&t6_curved_system(), &[0, 1]).unwrap(), 0);
    assert!(dbar_squared_defect(&trivial(iwasawa(), qi(0)), &[0]).unwrap() > 0);
}

#[test]
fn restricted_hym_agrees_on_reference_systems() {
    for sys in [
        ShSystem::trivial_t6(2),
        trivial(iwasawa(), qi(0)),
        trivial(hyperbolic(), qi(0)),
        sh_tuned6(q(8, 5)),
        sh_tuned6(qi(0)),
        t6_curved_system(),
    ] {
        let rep = restricted_instanton_check(&sys).unwrap();
        assert!(rep.agree, "{rep:?}");
    }
    let rep = restricted_instanton_check(&trivial(iwasawa(), qi(0))).unwrap();
    assert!(!rep.holomorphic_yang_mills && rep.sh.bianchi == Some(false));
    assert_eq!(rep.failing_blocks, vec![(1, 1)]);
}

#[test]
fn restricted_hym_detects_instanton_breaking() {
    let su3 = SU3Data::standard(FrameAlgebra::abelian(6)).unwrap();
    let gauge = rank2_gauge(&[(0, skew(2, 0, 1)), (1, diag2())]);
    let sys = ShSystem::new(su3, gauge, BundleData::trivial(6, 6), qi(0)).unwrap();
    let rep = restricted_instanton_check(&sys).unwrap();
    assert!(!rep.sh.hym_a && !rep.holomorphic_yang_mills && rep.agree);
    assert!(rep.failing_blocks.contains(&(3, 3)));
}

#[test]
fn lift_and_reduce() {
    for sys in [
        ShSystem::trivial_t6(1),
        trivial(iwasawa(), qi(0)),
        sh_tuned6(q(8, 5)),
        t6_curved_system(),
    ] {
        let lift = sys.lift_to_cylinder().unwrap();
        assert!(lifted_integrable(&lift));
        assert_eq!(&reduced_flux(&lift).unwrap(), sys.flux());
        let back = ShSystem::reduce(&lift).unwrap();
        assert_eq!(back.su3().omega(), sys.su3().omega());
        assert_eq!(back.su3().psi_re(), sys.su3().psi_re());
        assert_eq!(back.su3().psi_im(), sys.su3().psi_im());
        assert_eq!(
            back.su3().frame().nonzero_constants(),
            sys.su3().frame().nonzero_constants()
        );
        assert_eq!(back.gauge(), sys.gauge());
        assert_eq!(back.tangent(), sys.tangent());
        assert_eq!(nilpotency_report(&lift).nilpotent, sys.verdicts().strominger_hull());
    }
}
