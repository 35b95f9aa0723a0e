//! Generalized hypergeometric series, the 7F6 family and formulas built
//! on it.

pub mod family;
pub mod fit;
pub mod formula;
pub mod pfq;

pub use family::{family_argument, family_member_eval, FamilyMember};
pub use fit::{fit_formula, FitProblem, FitReport};
pub use formula::{assemble_P, FormulaConfig, RationalFunction};
pub use pfq::{pfq_eval, pfq_sum, HypergeometricSpec, SeriesSum};
