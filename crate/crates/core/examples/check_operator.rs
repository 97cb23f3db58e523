//! Block residuals of the squared check operator.

use hetforge::heterotic::{block_name, nilpotency_report, HeteroticSystem};
use hetforge::report::load_catalog;

fn main() -> hetforge::Result<()> {
    for sys in [
        HeteroticSystem::trivial_t7(1),
        load_catalog("sh_tuned")?.heterotic_system()?,
        load_catalog("heis_t4")?.heterotic_system()?,
    ] {
        let nil = nilpotency_report(&sys);
        println!("nilpotent {}, conditions {:?}", nil.nilpotent, nil.conditions);
        for stage in &nil.stages {
            println!("  {} ({} basis sections)", stage.name, stage.domain_dim);
            for (i, row) in stage.blocks.iter().enumerate() {
                for (j, b) in row.iter().enumerate() {
                    if !b.is_zero() {
                        println!(
                            "    {} <- {}: {} columns",
                            block_name(i),
                            block_name(j),
                            b.nonzero_columns
                        );
                    }
                }
            }
        }
    }
    Ok(())
}
