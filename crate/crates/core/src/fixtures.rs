//! Built-in example nets.

use crate::net::{parse_net_text, PetriNetWithTransits};

/// The hall/lab/kitchen building with its day and evening policy.
pub const FIG2_NET: &str = include_str!("../fixtures/fig2.net");

pub fn fig2_net() -> PetriNetWithTransits {
    parse_net_text(FIG2_NET)
        .and_then(|b| b.build_transits())
        .expect("built-in net is well formed")
}

/// The building layout that encodes to the net above, up to renaming.
pub const FIG1_LAYOUT: &str = include_str!("../fixtures/fig1.layout");
