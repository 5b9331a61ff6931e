//! Model checking safe Petri nets with transits against Flow-CTL*.
//!
//! Flow subformulas are turned into alternating tree automata over the
//! flow-chain structure of the net, the automata are made nondeterministic,
//! and each one is attached to the net as a subnet. The resulting inhibitor
//! net is checked against a rewritten LTL formula.

pub mod net;
pub mod logic;
pub mod kripke;
pub mod automata;
pub mod oracle;
pub mod fixtures;
pub mod reduction;
pub mod engine;
pub mod frontend;
