//! Fixtures shared by the benchmarks.

use cmdnls_core::soliton::residues_from_poles;
use cmdnls_core::{ChiralField, FrequencyGrid, C64};

/// Two-soliton with poles −i, −2i on a box of length 200 with `modes` modes.
pub fn two_soliton(modes: usize) -> ChiralField {
    let grid = FrequencyGrid::new(200.0, modes).expect("valid grid");
    let poles = [C64::new(0.0, -1.0), C64::new(0.0, -2.0)];
    residues_from_poles(&poles, 0b11, None)
        .and_then(|s| s.to_field(grid))
        .expect("the reference two-soliton is valid")
}
