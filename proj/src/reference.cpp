#include "qs/reference.hpp"

#include <cmath>
#include <stdexcept>

#include "qs/interferometer.hpp"

namespace qs::reference {

namespace {

// Unitary completion of a transmissivity-eta loss coupling to vacuum.
ScatteringMatrix loss_splitter(double eta) {
    Eigen::MatrixXcd u(2, 2);
    double t = std::sqrt(eta), r = std::sqrt(1.0 - eta);
    u << t, r, r, -t;
    return ScatteringMatrix::from_matrix(std::move(u));
}

MultimodeState fock_basis_state(int modes, int cutoff,
                                    const std::vector<int>& occ) {
    MultimodeState s(modes, cutoff);
    s.add_term(occ, {1.0, 0.0});
    return s;
}

// Kept single-mode state as a FockVector with cutoff n (the scissors
// output never holds more than n photons).
FockVector kept_to_fock(const MultimodeState& kept, int n) {
    FockVector out(n);
    for (const auto& [occ, amp] : kept.terms()) {
        if (occ[0] > n) throw std::logic_error("kept mode above n photons");
        out[occ[0]] = amp;
    }
    return out;
}

}  // namespace

CircuitResult bp_circuit(int n, double g, const FockVector& input, int m0) {
    // Modes: 0 kept output, 1 splitter arm, 2 input, 3..n+1 QFT vacuum.
    const int modes = n + 2;
    const int cap = input.cutoff() + n;
    MultimodeState state(modes, cap);
    for (int k = 0; k <= input.cutoff(); ++k) {
        if (input[k] == cplx{0.0, 0.0}) continue;
        std::vector<int> occ(modes, 0);
        occ[0] = n;
        occ[2] = k;
        state.add_term(occ, input[k]);
    }
    state = apply_network_on_modes(
        beam_splitter_matrix(g * g / (1.0 + g * g)), state, {0, 1});
    std::vector<int> qft_modes(n + 1);
    for (int i = 0; i <= n; ++i) qft_modes[i] = i + 1;
    state = apply_network_on_modes(qft_matrix(n + 1), state, qft_modes);

    MeasurementPattern pattern;
    for (int m = 1; m <= n + 1; ++m) {
        pattern.modes.push_back(m);
        pattern.counts.push_back(m == m0 + 1 ? 0 : 1);
    }
    auto post = postselect(state, pattern);
    return {kept_to_fock(post.kept, n), post.probability};
}

CircuitResult sp_circuit(int n, double g, const FockVector& input) {
    // Modes: 0 input, 1..n+1 QFT ports (singles enter ports 2..n+1).
    const int modes = n + 2;
    const int cap = input.cutoff() + n;
    MultimodeState state(modes, cap);
    for (int k = 0; k <= input.cutoff(); ++k) {
        if (input[k] == cplx{0.0, 0.0}) continue;
        std::vector<int> occ(modes, 0);
        occ[0] = k;
        for (int m = 2; m <= n + 1; ++m) occ[m] = 1;
        state.add_term(occ, input[k]);
    }
    std::vector<int> qft_modes(n + 1);
    for (int i = 0; i <= n; ++i) qft_modes[i] = i + 1;
    auto fdag = ScatteringMatrix::from_matrix(
        qft_matrix(n + 1).matrix().adjoint());
    state = apply_network_on_modes(fdag, state, qft_modes);
    auto bdag = ScatteringMatrix::from_matrix(
        beam_splitter_matrix(g * g / (1.0 + g * g)).matrix().adjoint());
    state = apply_network_on_modes(bdag, state, {0, 1});

    MeasurementPattern pattern;
    pattern.modes.push_back(0);
    pattern.counts.push_back(n);
    pattern.modes.push_back(1);
    pattern.counts.push_back(0);
    for (int m = 3; m <= n + 1; ++m) {
        pattern.modes.push_back(m);
        pattern.counts.push_back(0);
    }
    auto post = postselect(state, pattern);
    return {kept_to_fock(post.kept, n), post.probability};
}

MultimodeState resource_circuit(int n) {
    const int modes = n + 1;
    std::vector<int> occ(modes, 1);
    occ[0] = 0;
    MultimodeState state = fock_basis_state(modes, n, occ);
    auto fdag = ScatteringMatrix::from_matrix(
        qft_matrix(n + 1).matrix().adjoint());
    state = apply_network(fdag, state);
    MeasurementPattern pattern;
    for (int m = 2; m <= n; ++m) {
        pattern.modes.push_back(m);
        pattern.counts.push_back(0);
    }
    return postselect(state, pattern).kept;
}

DensityOperator lossy_bp_circuit(int n, double g, double eta_a, double eta_b,
                                     const FockVector& input) {
    // Modes: 0 kept, 1 arm, 2 input, 3..n+1 QFT vacuum, n+2 env_B, n+3 env_A.
    const int modes = n + 4;
    const int cap = input.cutoff() + n;
    MultimodeState state(modes, cap);
    for (int k = 0; k <= input.cutoff(); ++k) {
        if (input[k] == cplx{0.0, 0.0}) continue;
        std::vector<int> occ(modes, 0);
        occ[0] = n;
        occ[2] = k;
        state.add_term(occ, input[k]);
    }
    state = apply_network_on_modes(
        beam_splitter_matrix(g * g / (1.0 + g * g)), state, {0, 1});
    state = apply_network_on_modes(loss_splitter(eta_b), state, {1, n + 2});
    state = apply_network_on_modes(loss_splitter(eta_a), state, {2, n + 3});
    std::vector<int> qft_modes(n + 1);
    for (int i = 0; i <= n; ++i) qft_modes[i] = i + 1;
    state = apply_network_on_modes(qft_matrix(n + 1), state, qft_modes);

    MeasurementPattern pattern;
    for (int m = 1; m <= n + 1; ++m) {
        pattern.modes.push_back(m);
        pattern.counts.push_back(m == 1 ? 0 : 1);
    }
    auto post = postselect(state, pattern);
    // Kept order after removal: 0 -> kept, 1 -> env_B, 2 -> env_A.
    auto rho = DensityOperator::from_pure(post.kept);
    return rho.partial_trace_keep({0});
}

DensityOperator relay_circuit(const RelayConfig& config, int tmsv_k) {
    const int n = config.n;
    // Modes: 0 Alice, 1 flying, 2 env_A, 3 resource, 4 arm, 5 env_B,
    // 6..6+n-2 QFT vacuum ports.
    const int modes = n + 5;
    const int cap = 2 * tmsv_k + n;
    MultimodeState state(modes, cap);
    double lambda = std::sqrt(1.0 - config.chi * config.chi);
    for (int k = 0; k <= tmsv_k; ++k) {
        std::vector<int> occ(modes, 0);
        occ[0] = k;
        occ[1] = k;
        occ[3] = n;
        state.add_term(occ, lambda * std::pow(config.chi, k));
    }
    state = apply_network_on_modes(
        beam_splitter_matrix(config.g * config.g / (1.0 + config.g * config.g)),
        state, {3, 4});
    state = apply_network_on_modes(loss_splitter(config.eta_b), state, {4, 5});
    state = apply_network_on_modes(loss_splitter(config.eta_a), state, {1, 2});
    std::vector<int> qft_modes;
    qft_modes.push_back(4);  // port 1: Bob's arm
    qft_modes.push_back(1);  // port 2: flying mode
    for (int m = 6; m < modes; ++m) qft_modes.push_back(m);
    state = apply_network_on_modes(qft_matrix(n + 1), state, qft_modes);

    MeasurementPattern pattern;
    pattern.modes.push_back(4);
    pattern.counts.push_back(0);
    pattern.modes.push_back(1);
    pattern.counts.push_back(1);
    for (int m = 6; m < modes; ++m) {
        pattern.modes.push_back(m);
        pattern.counts.push_back(1);
    }
    auto post = postselect(state, pattern);
    // Kept order after removal: 0 Alice, 1 env_A, 2 resource(out), 3 env_B.
    auto rho = DensityOperator::from_pure(post.kept);
    return rho.partial_trace_keep({0, 2});
}

}  // namespace qs::reference
