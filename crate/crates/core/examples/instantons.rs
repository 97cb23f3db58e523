//! Curvature, the G2 instanton condition and the Chern-Simons form.

use hetforge::gauge::{chern_simons, curvature, instanton_check, trace_square, BundleData};
use hetforge::linalg::Matrix;
use hetforge::report::load_catalog;
use hetforge::scalar::qi;

fn main() -> hetforge::Result<()> {
    // U(1) connections A = e^a along the non-closed directions
    for (name, direction) in [("nil_bal_r", 6), ("iwasawa_r", 5), ("iwasawa_r", 6)] {
        let sys = load_catalog(name)?.heterotic_system()?;
        let g2 = sys.g2();
        let label = format!("{name}, A = e{}", direction + 1);
        let mut coeffs = vec![Matrix::zeros(1, 1); 7];
        coeffs[direction] = Matrix::from_rows(vec![vec![qi(1)]]);
        let bundle = BundleData::new(1, coeffs)?.with_group("U(1)");
        let f = curvature(&bundle, g2.frame());
        println!("{label}: F = {}", f.get(0, 0));
        println!("  instanton (F ^ psi = 0): {}", instanton_check(&f, g2.psi()).is_zero());
        println!("  tr F^2 = {}", trace_square(&f));
        println!(
            "  CS(A) = {}, dCS = {}",
            chern_simons(&bundle, g2.frame()),
            g2.frame().d(&chern_simons(&bundle, g2.frame()))
        );
    }
    Ok(())
}
