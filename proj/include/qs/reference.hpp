#pragma once

// Brute-force reference circuits: network evolution plus post-selection
// only, no closed forms. These are the oracles the scissors and channel
// formulas are verified against (also behind the CLI selftest).

#include "qs/channels.hpp"
#include "qs/fock.hpp"

namespace qs::reference {

struct CircuitResult {
    FockVector state;  // unnormalized kept-mode state, cutoff n
    double probability;
};

/// Bunched-photon scissors: resource |n> and input through B2 and QFT,
/// heralded on vacuum at port m0+1 and singles elsewhere.
CircuitResult bp_circuit(int n, double g, const FockVector& input, int m0 = 0);

/// Single-photon scissors: QFT-dagger resource preparation followed by
/// the inverted splitter, heralded on (n, 0) and vacuum elsewhere.
CircuitResult sp_circuit(int n, double g, const FockVector& input);

/// The SP preparation stage alone (two kept modes).
MultimodeState resource_circuit(int n);

/// Loss-dilated scissors: each channel is a beam-splitter coupling to a
/// vacuum ancilla that is traced out.
DensityOperator lossy_bp_circuit(int n, double g, double eta_a, double eta_b,
                                 const FockVector& input);

/// Loss-dilated TMSV relay; returns the two kept modes (Alice, Bob).
DensityOperator relay_circuit(const RelayConfig& config, int tmsv_k);

}  // namespace qs::reference
