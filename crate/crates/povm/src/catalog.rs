//! Name-based construction factory shared by the CLI and test harnesses.

use crate::construction::logical_basis;
use crate::{gell_mann_bases, mub, mub_prime, polynomial_bases, psi, sic, PovmConstruction, PovmError};

/// Build a construction from its catalog name, e.g. "mub16", "5gmb16",
/// "sic4", "psi4", "4pb16", "logical16", "mub7".
pub fn by_name(name: &str) -> Result<PovmConstruction, PovmError> {
    let lower = name.to_ascii_lowercase();
    let digits_start = lower
        .rfind(|c: char| !c.is_ascii_digit())
        .map(|i| i + 1)
        .unwrap_or(0);
    if digits_start >= lower.len() {
        return Err(PovmError::UnsupportedDimension(format!("no dimension in '{name}'")));
    }
    let (kind, dim_str) = lower.split_at(digits_start);
    let dim: usize = dim_str
        .parse()
        .map_err(|_| PovmError::UnsupportedDimension(format!("bad dimension in '{name}'")))?;
    match kind {
        "mub" => {
            if dim.is_power_of_two() {
                mub(dim)
            } else {
                mub_prime(dim)
            }
        }
        "gmb" => gell_mann_bases(dim, 2 * dim - 1),
        "5gmb" => gell_mann_bases(dim, 5),
        "4gmb" => gell_mann_bases(dim, 4),
        "5pb" => polynomial_bases(dim, 5),
        "4pb" => polynomial_bases(dim, 4),
        "sic" => sic(dim),
        "psi" => psi(dim),
        "5mub" => {
            let full = mub(dim)?;
            let mut t = full.truncated(5)?;
            t.name = format!("5MUB{dim}");
            t.ic_class = crate::IcClass::Rank1Strict;
            Ok(t)
        }
        "logical" => {
            let mut c = logical_basis(dim);
            c.name = format!("LOGICAL{dim}");
            Ok(c)
        }
        other => Err(PovmError::UnsupportedDimension(format!(
            "unknown construction kind '{other}' in '{name}'"
        ))),
    }
}
