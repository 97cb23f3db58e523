use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hetforge::report::{
    catalog_names, catalog_text, load_catalog, parse_geometry, run_cohomology, run_perturb, run_verify, GeometrySpec,
    Mode, Target,
};
use hetforge::Error;

#[derive(Parser)]
#[command(
    name = "hetforge",
    version,
    about = "Exact verification of heterotic G2 and Strominger-Hull systems"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    report: Format,
    /// Attach floating-point approximations of the exact residuals.
    #[arg(long, global = true)]
    float_diagnostics: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check the defining conditions of a geometry file or catalog entry.
    Verify {
        file: String,
        #[arg(long, default_value = "g2")]
        mode: Mode,
    },
    /// Break one condition with a seeded rational perturbation.
    Perturb {
        file: String,
        #[arg(long)]
        target: Target,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Invariant cohomology of the check operator in degree 0 or 1.
    Cohomology {
        file: String,
        #[arg(long, default_value_t = 1)]
        degree: usize,
    },
    /// Inspect the reference catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show { name: String },
}

/// A path if one exists, otherwise a catalog name.
fn load(file: &str) -> hetforge::Result<GeometrySpec> {
    if Path::new(file).is_file() {
        parse_geometry(&std::fs::read_to_string(file)?)
    } else {
        load_catalog(file)
    }
}

fn run(cli: Cli) -> hetforge::Result<bool> {
    let render = |json: String, text: String| match cli.report {
        Format::Json => println!("{json}"),
        Format::Text => print!("{text}"),
    };
    match cli.command {
        Command::Verify { file, mode } => {
            let mut r = run_verify(&load(&file)?, mode)?;
            if cli.float_diagnostics {
                r = r.with_float_diagnostics();
            }
            render(r.to_json(), r.to_text());
            Ok(r.pass)
        }
        Command::Perturb { file, target, seed } => {
            let mut r = run_perturb(&load(&file)?, target, seed)?;
            if cli.float_diagnostics {
                r.before = r.before.with_float_diagnostics();
                r.after = r.after.with_float_diagnostics();
            }
            render(r.to_json(), r.to_text());
            Ok(r.pass())
        }
        Command::Cohomology { file, degree } => {
            let r = run_cohomology(&load(&file)?, degree)?;
            render(r.to_json(), r.to_text());
            Ok(r.pass)
        }
        Command::Catalog {
            action: CatalogAction::List,
        } => {
            for name in catalog_names()? {
                println!("{name}");
            }
            Ok(true)
        }
        Command::Catalog {
            action: CatalogAction::Show { name },
        } => {
            print!("{}", catalog_text(&name)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ Error::NotAComplex) => {
            eprintln!("hetforge: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("hetforge: {e}");
            ExitCode::from(2)
        }
    }
}
