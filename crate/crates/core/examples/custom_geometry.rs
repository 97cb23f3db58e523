//! Parse a geometry file and print its JSON report.

use hetforge::report::{parse_geometry, run_verify, Mode};

const NILMANIFOLD: &str = r#"
name = "n6"
description = "de6 = e12 + e34 with the standard SU(3) structure"
dim = 6
alpha_prime = "0"
structure_constants = [
  [6, 1, 2, "-1"],
  [6, 3, 4, "-1"],
]

[structure]
omega = [[[1, 2], "1"], [[3, 4], "1"], [[5, 6], "1"]]
psi_re = [[[1, 3, 5], "1"], [[1, 4, 6], "-1"], [[2, 3, 6], "-1"], [[2, 4, 5], "-1"]]
psi_im = [[[1, 3, 6], "1"], [[1, 4, 5], "1"], [[2, 3, 5], "1"], [[2, 4, 6], "-1"]]
"#;

fn main() -> hetforge::Result<()> {
    let spec = parse_geometry(NILMANIFOLD)?;
    let report = run_verify(&spec, Mode::Sh)?.with_float_diagnostics();
    println!("{}", report.to_json());
    Ok(())
}
