//! Tables, trend fits and verdicts that tie the engines together.

pub mod fitline;
pub mod table;
pub mod verify;

pub use fitline::{fit_line, FitLine, FitLineRow};
pub use table::{reference_value, table_check, CheckStatus, ProbabilityTable, TableCheckReport, TableRow, REFERENCE_ROWS};
pub use verify::{classify, verify_ensembles, Verdict, VerdictRow, VerdictStatus};
