//! LTL, CTL* and Flow-CTL* syntax trees, parsing and printing.

mod ctl;
mod flow;
mod ltl;
mod nnf;
mod parse;

pub use ctl::{PathF, StateF};
pub use flow::{collect_flow_subformulas, FlowCtlStar, FlowSub};
pub use ltl::Ltl;
pub use nnf::{Nnf, PNnf, SNnf};
pub use parse::{parse_ctlstar, parse_flow, parse_ltl, ParseError};
