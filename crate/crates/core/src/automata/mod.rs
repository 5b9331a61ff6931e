//! Automata used to turn flow subformulas into Büchi automata over the
//! transitions of a run.

pub mod ata;
pub mod awa;
pub mod game;
pub mod ltl2nba;
pub mod mh;
pub mod nba;
pub mod pbf;
pub mod pipeline;

use thiserror::Error;

pub use ata::{Ata, Mode};
pub use awa::{Acceptance, Awa};
pub use ltl2nba::{ltl_to_nba, nnf_to_nba, Tableau};
pub use nba::{Guard, Nba};
pub use pbf::Pbf;
pub use pipeline::{build_flow_automaton, FlowAutomaton, FlowStats};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomataError {
    #[error("atom `{0}` is not an atomic proposition of the structure")]
    UnknownAtom(String),
    #[error("transition function instantiated with zero directions")]
    EmptyDirections,
    #[error("{stage} exceeded the state limit of {cap}")]
    TooLarge { stage: &'static str, cap: usize },
    #[error(transparent)]
    Kripke(#[from] crate::kripke::KripkeError),
}
