//! Strominger-Hull verdicts, the restricted operator and its lift.

use hetforge::report::load_catalog;
use hetforge::su3::{dbar_squared_defect, restricted_instanton_check};

fn main() -> hetforge::Result<()> {
    for name in ["t6_flat", "iwasawa", "nil_bal", "sh_tuned"] {
        let sys = load_catalog(name)?.sh_system()?;
        let v = sys.verdicts();
        println!("{name} (alpha' = {}): SH {}", sys.alpha_prime(), v.strominger_hull());
        println!("  {v:?}");
        println!("  H = -dc omega = {}", sys.flux());
        let cor = restricted_instanton_check(&sys)?;
        println!(
            "  curvature of D|X is holomorphic Yang-Mills: {}",
            cor.holomorphic_yang_mills
        );
        println!("  Dbar^2 nonzero images: {}", dbar_squared_defect(&sys, &[0, 1])?);
        let lift = sys.lift_to_cylinder()?;
        println!("  cylinder lift heterotic: {}", lift.conditions().heterotic());
    }
    Ok(())
}
