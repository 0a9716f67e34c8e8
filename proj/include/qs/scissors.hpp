#pragma once

#include "qs/fock.hpp"

namespace qs {

enum class ScissorVariant { BP, SP, SPPrepared };

/// Protocol parameters. The beam-splitter transmissivity is derived as
/// tau = g^2/(1+g^2); m0 selects which QFT port heralds vacuum (BP only).
struct ScissorConfig {
    int n = 1;
    double g = 1.0;
    ScissorVariant variant = ScissorVariant::BP;
    int m0 = 0;

    double tau() const { return g * g / (1.0 + g * g); }
    void validate() const;
};

/// Output of a scissors run. `state` is kept unnormalized so that its
/// squared norm is the default success probability P. The improved
/// probabilities for both configurations are always reported alongside.
struct ScissorOutput {
    FockVector state;             // unnormalized, cutoff n
    double success_probability;   // P = <g psi_n | g psi_n>
    double variant_probability;   // P_BP, P (plain SP) or P_SP per config
    double p_bp;                  // (n+1) P
    double p_sp;                  // P / P_n (prepared resource)
    double p_xp;                  // max(p_bp, p_sp)
};

/// Closed-form n-QS output: c'_j = sqrt(n!) g^j c_j /
/// ((n+1)^{n/2} (g^2+1)^{n/2}) for j <= n.
ScissorOutput nqs_output(const ScissorConfig& config, const FockVector& input);

/// Two-mode resource state |R_n> produced by the SP preparation stage,
/// unnormalized; its squared norm is the preparation probability P_n.
MultimodeState resource_state(int n);

/// P_n = (1/(n+1)^n) sum_j (n-j)! j!  (preparation success probability).
double resource_prep_probability(int n);

/// Phase correction C1(m0): multiplies c_j by exp(2 pi i j m0 / (n+1)).
FockVector phase_correction(int n, int m0, const FockVector& state);

/// Competing n-X10 output: coefficients n! g^j c_j /
/// ((g^2+1)^{n/2} (n-j)! n^j); probabilities filled with P_X10.
ScissorOutput x10_output(int n, double g, const FockVector& input);

/// Fidelity of the n-QS output against the ideal NLA g^{a^dag a}|psi>:
/// F = sum_{j<=n} g^{2j}|c_j|^2 / sum_j g^{2j}|c_j|^2. The input cutoff
/// must be high enough for the denominator series to have converged;
/// otherwise an explicit error is raised.
double truncation_fidelity(int n, double g, const FockVector& input);

/// Fidelity of the normalized n-X10 output against the ideal NLA output.
double x10_fidelity(int n, double g, const FockVector& input);

/// Teleportation (g = 1) of the even cat state |alpha> + |-alpha>.
/// Returns the output fidelity and the improved success probability P_XP.
struct TeleportResult {
    double fidelity;
    double probability;
};
TeleportResult teleport_fidelity_cat(double alpha, int n);

}  // namespace qs
