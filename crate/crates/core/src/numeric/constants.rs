//! Named high-precision constants shipped as decimal strings.
//!
//! The built-in table lives in `data/constants.json`. Note that `gauss_agm`
//! stores agm(1, sqrt 2) itself; Gauss's constant is its reciprocal.

use std::collections::BTreeMap;
use std::path::Path;

use rug::Float;
use serde::{Deserialize, Serialize};

use super::float::{bits_for_digits, BigFloat};
use super::rational::{decimal_render, parse_decimal};
use crate::error::{Error, Result};

const BUILTIN: &str = include_str!("../../data/constants.json");

/// Names every constant table must provide.
pub const REQUIRED: &[&str] = &[
    "pi",
    "gauss_agm",
    "gamma_quarter",
    "gamma_third",
    "square_ice",
    "baxter",
    "c1",
    "c2",
    "c3",
    "c3_sqrt3",
    "c4",
];

/// Minimum stored length of every decimal string.
pub const MIN_STORED_DIGITS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedConstant {
    #[serde(skip)]
    pub name: String,
    pub decimal: String,
    pub description: String,
    pub provenance: String,
}

impl NamedConstant {
    /// Significant digits stored in the decimal string.
    pub fn stored_digits(&self) -> usize {
        parse_decimal(&self.decimal)
            .map(|d| d.sig_digits)
            .unwrap_or(0)
    }
}

/// Read-only table of named constants.
#[derive(Debug, Clone)]
pub struct ConstantTable {
    entries: BTreeMap<String, NamedConstant>,
}

impl ConstantTable {
    pub fn builtin() -> Self {
        Self::from_json_str(BUILTIN, "<builtin constants>").expect("built-in constant table is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text, &path.display().to_string())
    }

    /// Parses `{"name": {"decimal": ..., "description": ..., "provenance": ...}}`.
    pub fn from_json_str(text: &str, origin: &str) -> Result<Self> {
        let raw: BTreeMap<String, NamedConstant> =
            serde_json::from_str(text).map_err(|e| Error::json(origin, e))?;
        let mut entries = BTreeMap::new();
        for (name, mut c) in raw {
            let parsed = parse_decimal(&c.decimal).map_err(|_| Error::Schema {
                path: origin.to_string(),
                field: format!("{name}.decimal"),
                message: "not a fixed-point decimal".into(),
            })?;
            if parsed.sig_digits < MIN_STORED_DIGITS {
                return Err(Error::Schema {
                    path: origin.to_string(),
                    field: format!("{name}.decimal"),
                    message: format!(
                        "{} digits stored, at least {MIN_STORED_DIGITS} required",
                        parsed.sig_digits
                    ),
                });
            }
            c.name = name.clone();
            entries.insert(name, c);
        }
        for &req in REQUIRED {
            if !entries.contains_key(req) {
                return Err(Error::Schema {
                    path: origin.to_string(),
                    field: req.to_string(),
                    message: "required constant missing".into(),
                });
            }
        }
        Ok(ConstantTable { entries })
    }

    pub fn get(&self, name: &str) -> Result<&NamedConstant> {
        self.entries
            .get(name)
            .ok_or_else(|| Error::UnknownConstant(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// The constant rounded to `digits` significant figures.
    pub fn lookup(&self, name: &str, digits: usize) -> Result<BigFloat> {
        let c = self.checked(name, digits)?;
        let exact = parse_decimal(&c.decimal)?.value;
        let rounded = parse_decimal(&decimal_render(&exact, digits))?.value;
        Ok(Float::with_val(bits_for_digits(digits), &rounded))
    }

    /// The constant at full working precision for `digits` digits, for use
    /// in further arithmetic (no intermediate decimal rounding).
    pub fn value(&self, name: &str, digits: usize) -> Result<BigFloat> {
        let c = self.checked(name, digits)?;
        let exact = parse_decimal(&c.decimal)?.value;
        Ok(Float::with_val(bits_for_digits(digits), &exact))
    }

    fn checked(&self, name: &str, digits: usize) -> Result<&NamedConstant> {
        let c = self.get(name)?;
        let stored = c.stored_digits();
        if digits > stored {
            return Err(Error::ConstantPrecision {
                name: name.to_string(),
                stored,
                requested: digits,
            });
        }
        Ok(c)
    }
}

impl Default for ConstantTable {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Free-function form of [`ConstantTable::lookup`] on the built-in table.
pub fn constant_lookup(name: &str, digits: usize) -> Result<BigFloat> {
    ConstantTable::builtin().lookup(name, digits)
}
