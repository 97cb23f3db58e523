//! Break one condition at a time and see which block of the squared operator fails.

use hetforge::report::{load_catalog, run_perturb, Target};

fn main() -> hetforge::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    for base in ["t7_flat", "sh_tuned"] {
        let spec = load_catalog(base)?;
        for target in Target::ALL {
            let r = run_perturb(&spec, target, seed)?;
            println!(
                "{base} {:<16} broken {:?}, failing blocks {:?}, localized {}",
                target.name(),
                r.broken,
                r.failing_blocks,
                r.localized
            );
        }
    }
    Ok(())
}
