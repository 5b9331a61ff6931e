//! From a flow subformula to a complete Büchi automaton over run letters.

use super::ata::Ata;
use super::awa::{lift, product_awa, to_buchi};
use super::mh::eliminate_alternation;
use super::nba::Nba;
use super::AutomataError;
use crate::kripke::ChainKripke;
use crate::logic::FlowSub;
use crate::net::PetriNetWithTransits;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlowStats {
    pub kripke_states: usize,
    pub kripke_edges: usize,
    pub ata_states: usize,
    pub product_states: usize,
    pub buchi_states: usize,
    pub nba_states: usize,
}

/// Automaton accepting the run suffixes after which some flow tree started
/// at a chain root violates the subformula.
#[derive(Debug, Clone)]
pub struct FlowAutomaton {
    pub kripke: ChainKripke,
    /// Complete over `kripke.letters()`; the last letter is the stutter letter.
    pub nba: Nba<usize>,
    pub sink: usize,
    /// NBA state to enter for each entry of `kripke.initial`.
    pub starts: Vec<usize>,
    pub stats: FlowStats,
}

impl FlowAutomaton {
    /// NBA state entered when transition `t` starts a chain in place `p`.
    pub fn start_for(&self, net: &PetriNetWithTransits, t: usize, p: usize) -> usize {
        let tagged = self.kripke.ap.iter().any(|a| *a == net.transitions()[t]);
        let want = crate::kripke::KState {
            transition: tagged.then_some(t),
            place: p,
        };
        self.kripke
            .initial
            .iter()
            .position(|&s| self.kripke.states[s] == want)
            .map_or(self.sink, |i| self.starts[i])
    }
}

pub fn build_flow_automaton(
    net: &PetriNetWithTransits,
    sub: &FlowSub,
    cap: usize,
) -> Result<FlowAutomaton, AutomataError> {
    let kripke = ChainKripke::build(net, &sub.atoms)?;
    let ata = Ata::for_negation(&sub.formula, &kripke.ap)?;
    let product = product_awa(&ata, &kripke, cap)?;
    let abw = to_buchi(&product, cap)?;
    let lifted = lift(&abw, net);
    let (raw, raw_starts) = eliminate_alternation(&lifted, cap)?;
    let (mut nba, map) = raw.trim();
    let sink = nba.complete(kripke.letters());
    let starts: Vec<usize> = raw_starts.iter().map(|&s| map[s].unwrap_or(sink)).collect();
    nba.initial = starts.clone();
    nba.initial.sort_unstable();
    nba.initial.dedup();
    let stats = FlowStats {
        kripke_states: kripke.len(),
        kripke_edges: kripke.edge_count(),
        ata_states: ata.len(),
        product_states: product.len(),
        buchi_states: abw.len(),
        nba_states: nba.len(),
    };
    Ok(FlowAutomaton {
        kripke,
        nba,
        sink,
        starts,
        stats,
    })
}
