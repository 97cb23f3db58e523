//! Torsion classes and flux of the catalog G2 structures.

use hetforge::g2::{self, torsion_classes};
use hetforge::report::load_catalog;

fn main() -> hetforge::Result<()> {
    for name in ["t7_flat", "heis_t4", "hyp7", "iwasawa_r", "nil_bal_r"] {
        let sys = load_catalog(name)?.heterotic_system()?;
        let t = torsion_classes(sys.g2())?;
        println!(
            "{name}: tau0 = {}, tau1 = {}, tau2 = {}, tau3 = {}",
            t.tau0, t.tau1, t.tau2, t.tau3
        );
        if g2::is_integrable(&t) {
            println!("  H = {}", sys.flux());
        } else {
            println!("  tau2 != 0, no compatible connection with totally skew torsion");
        }
    }
    Ok(())
}
