// SPDX-License-Identifier: Apache-2.0

//! Shared inputs for the benchmarks.

use hyperstab_core::HyperState;

/// Three aligned blocks of eight qubits.
pub const N24: &str = "8:00000000,8:00000000,8:00000000";

/// `(label, spec)` pairs at twelve qubits.
pub const TWELVE_QUBIT_STATES: [(&str, &str); 3] = [
    ("three_blocks_masked", "4:0000,4:0101,4:0000"),
    ("two_blocks", "6:000000,6:000000"),
    ("one_block", "12:000000000000"),
];

pub fn state(spec: &str) -> HyperState {
    spec.parse().expect("benchmark state spec")
}
