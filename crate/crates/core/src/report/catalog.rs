//! Reference geometries shipped with the crate.

use std::path::PathBuf;

use super::spec::{parse_geometry, GeometrySpec};
use crate::error::{Error, Result};

/// Directory of `<name>.toml` files replacing the built-in catalog.
pub const CATALOG_ENV: &str = "HETFORGE_CATALOG_DIR";

const BUILTIN: &[(&str, &str)] = &[
    ("hyp7", include_str!("../../catalog/hyp7.toml")),
    ("heis_t4", include_str!("../../catalog/heis_t4.toml")),
    ("iwasawa", include_str!("../../catalog/iwasawa.toml")),
    ("iwasawa_r", include_str!("../../catalog/iwasawa_r.toml")),
    ("nil_bal", include_str!("../../catalog/nil_bal.toml")),
    ("nil_bal_r", include_str!("../../catalog/nil_bal_r.toml")),
    ("sh_tuned", include_str!("../../catalog/sh_tuned.toml")),
    ("t6_flat", include_str!("../../catalog/t6_flat.toml")),
    ("t7_flat", include_str!("../../catalog/t7_flat.toml")),
];

fn override_dir() -> Option<PathBuf> {
    std::env::var_os(CATALOG_ENV).map(PathBuf::from)
}

/// Sorted entry names.
pub fn catalog_names() -> Result<Vec<String>> {
    let mut names: Vec<String> = match override_dir() {
        Some(dir) => std::fs::read_dir(dir)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|x| x == "toml"))
            .filter_map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
            .collect(),
        None => BUILTIN.iter().map(|(n, _)| n.to_string()).collect(),
    };
    names.sort();
    Ok(names)
}

pub fn catalog_text(name: &str) -> Result<String> {
    match override_dir() {
        Some(dir) => {
            let path = dir.join(format!("{name}.toml"));
            if !path.is_file() {
                return Err(Error::UnknownCatalog(name.into()));
            }
            Ok(std::fs::read_to_string(path)?)
        }
        None => BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| t.to_string())
            .ok_or_else(|| Error::UnknownCatalog(name.into())),
    }
}

pub fn load_catalog(name: &str) -> Result<GeometrySpec> {
    parse_geometry(&catalog_text(name)?)
}
