//! Invariant cohomology of the check operator on the flat torus.

use hetforge::report::{load_catalog, run_cohomology};

fn main() -> hetforge::Result<()> {
    let spec = load_catalog("t7_flat")?;
    for degree in [0, 1] {
        print!("{}", run_cohomology(&spec, degree)?.to_text());
    }
    Ok(())
}
