//! Probability tables keyed by alpha, and the check of the twenty printed
//! reference rows.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{decimal_render, format_rational, parse_decimal, parse_rational, BigRational};

/// `(alpha, exact value, printed decimal)` for the ten half-integral and
/// ten integral reference rows.
pub const REFERENCE_ROWS: [(&str, &str, &str); 20] = [
    ("1/2", "29/64", "0.453125"),
    ("1", "8/33", "0.242424"),
    ("3/2", "36061/262144", "0.137562"),
    ("2", "26/323", "0.0804954"),
    ("5/2", "51548569/1073741824", "0.0480083"),
    ("3", "2999/103385", "0.0290081"),
    ("7/2", "38911229297/2199023255552", "0.0176948"),
    ("4", "44482/4091349", "0.0108722"),
    ("9/2", "60515043681347/9007199254740992", "0.00671852"),
    ("5", "89514/21460999", "0.00417101"),
    ("11/2", "71925602948804923/27670116110564327424", "0.0025994"),
    ("6", "179808469/110638410169", "0.00162519"),
    ("13/2", "3387374833367307236269/3324546003940230230441984", "0.0010189"),
    ("7", "191151001/298529164591", "0.000640309"),
    ("15/2", "124792688228667229196729/309485009821345068724781056", "0.000403227"),
    ("8", "1331199762/5232880523393", "0.000254391"),
    ("17/2", "407557367133399293946182513/2535301200456458802993406410752", "0.000160753"),
    ("9", "74195568677/729345064647247", "0.000101729"),
    ("19/2", "1338799759394288468677657208071/20769187434139310514121985316880384", "0.0000644609"),
    ("10", "730710456538/17868447453498669", "0.0000408939"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub alpha: BigRational,
    pub value: BigRational,
    /// False when the value was given as a decimal approximation.
    pub exact: bool,
    pub provenance: String,
}

/// Rows sorted by strictly increasing alpha.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityTable {
    pub rows: Vec<TableRow>,
}

#[derive(Serialize, Deserialize)]
struct RowFile {
    alpha: String,
    value: String,
    #[serde(default)]
    provenance: String,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    rows: Vec<RowFile>,
}

impl ProbabilityTable {
    /// Sorts the rows; duplicate alphas are rejected.
    pub fn new(mut rows: Vec<TableRow>) -> Result<Self> {
        rows.sort_by(|a, b| a.alpha.cmp(&b.alpha));
        for w in rows.windows(2) {
            if w[0].alpha == w[1].alpha {
                return Err(Error::Invalid(format!("duplicate alpha {}", format_rational(&w[0].alpha))));
            }
        }
        Ok(ProbabilityTable { rows })
    }

    /// The twenty reference rows with exact values.
    pub fn reference() -> Self {
        let rows = REFERENCE_ROWS
            .iter()
            .map(|(a, v, _)| TableRow {
                alpha: parse_rational(a).expect("reference alpha"),
                value: parse_rational(v).expect("reference value"),
                exact: true,
                provenance: "reference".into(),
            })
            .collect();
        ProbabilityTable::new(rows).expect("reference rows are distinct")
    }

    pub fn from_json_str(text: &str, origin: &str) -> Result<Self> {
        let file: TableFile = serde_json::from_str(text).map_err(|e| Error::json(origin, e))?;
        let schema = |field: String, e: Error| Error::Schema {
            path: origin.to_string(),
            field,
            message: e.to_string(),
        };
        let mut rows = Vec::with_capacity(file.rows.len());
        for (i, r) in file.rows.into_iter().enumerate() {
            let alpha = parse_rational(&r.alpha).map_err(|e| schema(format!("rows[{i}].alpha"), e))?;
            let (value, exact) = match parse_rational(&r.value) {
                Ok(v) => (v, true),
                Err(_) => {
                    let d = parse_decimal(&r.value).map_err(|e| schema(format!("rows[{i}].value"), e))?;
                    (d.value, false)
                }
            };
            rows.push(TableRow {
                alpha,
                value,
                exact,
                provenance: r.provenance,
            });
        }
        ProbabilityTable::new(rows).map_err(|e| schema("rows".into(), e))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        let file = TableFile {
            rows: self
                .rows
                .iter()
                .map(|r| RowFile {
                    alpha: format_rational(&r.alpha),
                    value: format_rational(&r.value),
                    provenance: r.provenance.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn get(&self, alpha: &BigRational) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.alpha == *alpha)
    }

    /// Rows with integral alpha and rows with half-odd alpha.
    pub fn split_integral(&self) -> (Vec<&TableRow>, Vec<&TableRow>) {
        self.rows.iter().partition(|r| *r.alpha.denom() == 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Match,
    Mismatch,
    Unchecked,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub alpha: String,
    pub value: String,
    /// The value at six significant figures.
    pub rendered: String,
    pub printed: Option<String>,
    pub status: CheckStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCheckReport {
    pub rows: Vec<CheckRow>,
    pub matched: usize,
    pub mismatched: usize,
    pub unchecked: usize,
}

impl TableCheckReport {
    pub fn all_match(&self) -> bool {
        self.mismatched == 0
    }
}

/// Renders every row to six significant figures and compares it with the
/// printed decimal for that alpha. A few printed decimals drop a trailing
/// zero, so the comparison is numeric rather than textual.
pub fn table_check(table: &ProbabilityTable) -> TableCheckReport {
    let mut rows = Vec::with_capacity(table.rows.len());
    for r in &table.rows {
        let rendered = decimal_render(&r.value, 6);
        let printed = REFERENCE_ROWS
            .iter()
            .find(|(a, _, _)| parse_rational(a).map_or(false, |a| a == r.alpha))
            .map(|(_, _, p)| p.to_string());
        let status = match &printed {
            None => CheckStatus::Unchecked,
            Some(p) => {
                let lhs = parse_decimal(&rendered).map(|d| d.value);
                let rhs = parse_decimal(p).map(|d| d.value);
                match (lhs, rhs) {
                    (Ok(l), Ok(r)) if l == r => CheckStatus::Match,
                    _ => CheckStatus::Mismatch,
                }
            }
        };
        rows.push(CheckRow {
            alpha: format_rational(&r.alpha),
            value: format_rational(&r.value),
            rendered,
            printed,
            status,
        });
    }
    let count = |s: CheckStatus| rows.iter().filter(|r| r.status == s).count();
    TableCheckReport {
        matched: count(CheckStatus::Match),
        mismatched: count(CheckStatus::Mismatch),
        unchecked: count(CheckStatus::Unchecked),
        rows,
    }
}

/// Exact value of a reference row, if alpha is one of the twenty.
pub fn reference_value(alpha: &BigRational) -> Option<BigRational> {
    REFERENCE_ROWS
        .iter()
        .find(|(a, _, _)| parse_rational(a).map_or(false, |a| a == *alpha))
        .map(|(_, v, _)| parse_rational(v).expect("reference value"))
}
