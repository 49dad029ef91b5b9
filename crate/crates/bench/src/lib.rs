//! Fixtures shared by the benchmarks.

use surftrace_core::repdata::MixedLabel;
use surftrace_core::words::{parse_word, Word};

/// A genus-two word in compact notation.
pub fn word(s: &str) -> Word {
    parse_word(s, 2).expect("valid genus-two word")
}

pub fn label(mu: &[u32], nu: &[u32]) -> MixedLabel {
    MixedLabel::from_parts(mu, nu).expect("valid label")
}
