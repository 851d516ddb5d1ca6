//! STL fragment: formula AST, parser, interval algebra and the brute-force
//! semantic oracle.

mod formula;
mod interval;
pub mod oracle;
mod parser;
mod sequence;

pub use formula::{AtomicProp, Formula, SubTask, SubTaskDisplay, TemporalKind};
pub use interval::{format_seconds, TickInterval};
pub use oracle::{oracle_satisfies, oracle_satisfies_formula, CoverageError};
pub use parser::{parse_formula, FormulaError};
pub use sequence::{PointSequence, TimedPoint};
