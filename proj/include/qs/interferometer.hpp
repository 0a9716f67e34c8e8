#pragma once

#include <utility>
#include <vector>

#include "qs/fock.hpp"

namespace qs {

/// m x m unitary scattering matrix of a linear-optical network, acting on
/// creation operators as a_i^dag -> sum_j U_ij a_j^dag.
class ScatteringMatrix {
  public:
    /// Validates unitarity: max |U^dag U - I| must be < 1e-10.
    static ScatteringMatrix from_matrix(Eigen::MatrixXcd u);

    int dim() const { return static_cast<int>(u_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return u_; }
    cplx operator()(int r, int c) const { return u_(r, c); }

    double unitarity_error() const;

  private:
    explicit ScatteringMatrix(Eigen::MatrixXcd u) : u_(std::move(u)) {}
    Eigen::MatrixXcd u_;
};

/// Gain beam-splitter with transmissivity tau in (0,1):
///   [[-sqrt(tau),   sqrt(1-tau)],
///    [ sqrt(1-tau), sqrt(tau) ]]
/// The minus sign on the transmitted port-0 term is a fixed convention;
/// the scissors closed forms depend on it.
ScatteringMatrix beam_splitter_matrix(double tau);

/// m-mode QFT: entry (j,k) = omega^{(j-1)(k-1)} / sqrt(m) with
/// omega = exp(-2 pi i / m).
ScatteringMatrix qft_matrix(int m);

/// Matrix permanent by Ryser inclusion-exclusion with Gray-code updates,
/// O(2^m m). Dimension is guarded at 20.
cplx permanent(const Eigen::MatrixXcd& a);

/// Naive O(m!) permanent for cross-checks; guarded at dimension 7.
cplx permanent_naive(const Eigen::MatrixXcd& a);

/// The n x n matrix whose permanent gives the QFT heralding amplitude:
/// built from sqrt(n+1) * qft_matrix(n+1) by taking n-j copies of column 0
/// and j copies of column 1, dropping row m0.
Eigen::MatrixXcd omega_submatrix(int n, int j, int m0);

/// Transition amplitude <output| U |input> between occupation tuples.
/// Photon-number mismatch gives exactly 0.
cplx scatter_amplitude(const ScatteringMatrix& u, const std::vector<int>& input,
                       const std::vector<int>& output);

/// Exact evolution of a sparse multimode state through the network; the
/// brute-force oracle behind the closed forms. Output norm equals input
/// norm (unitarity), terms below 1e-15 pruned.
MultimodeState apply_network(const ScatteringMatrix& u, const MultimodeState& state);

/// Same, with u acting on the listed modes only (identity elsewhere).
MultimodeState apply_network_on_modes(const ScatteringMatrix& u,
                                      const MultimodeState& state,
                                      const std::vector<int>& modes);

/// Photon-count projection on a subset of modes. Measured mode indices
/// must be distinct and in range.
struct MeasurementPattern {
    std::vector<int> modes;
    std::vector<int> counts;
};

struct PostselectResult {
    MultimodeState kept;  // unnormalized; over the unmeasured modes in order
    double probability;   // its squared norm
};

PostselectResult postselect(const MultimodeState& state,
                            const MeasurementPattern& pattern);

/// Consistency check against the scattering matrices of the previously
/// published 1-QS and 3-QSBP devices, which are QFTs up to permutations
/// and phases.
struct LegacyEquivalenceReport {
    double f2_deviation;
    double f4_deviation;
    double max_deviation;
};

LegacyEquivalenceReport legacy_equivalence_check();

}  // namespace qs
