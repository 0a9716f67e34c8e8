#pragma once

#include "qs/fock.hpp"

namespace qs {

/// Pure-loss bosonic channel with Kraus operators
/// A_l = sqrt((1-eta)^l / l!) eta^{n/2} a^l, l = 0..max_loss_terms.
struct LossChannel {
    double eta;
    int max_loss_terms;

    LossChannel(double eta_, int max_loss_terms_ = 60);

    /// A_l as a dim x dim matrix.
    Eigen::MatrixXcd kraus_operator(int l, int dim) const;
    /// max_k |1 - sum_l <k|A_l^dag A_l|k>| on the truncated space.
    double completeness_defect(int dim) const;
};

/// Kraus sum applied to one mode of a density operator. Trace-preserving
/// whenever max_loss_terms covers the mode dimension.
DensityOperator apply_loss(const LossChannel& channel, const DensityOperator& rho,
                           int mode);

/// Distributed n-QS relay: Alice's channel eta_a, Bob's channel eta_b,
/// TMSV squeezing chi. eta_a * eta_b is the total transmissivity.
struct RelayConfig {
    int n = 1;
    double g = 1.0;
    double eta_a = 1.0;
    double eta_b = 1.0;
    double chi = 0.25;

    double eta() const { return eta_a * eta_b; }
    void validate() const;

    static RelayConfig middle(int n, double g, double chi, double eta);
    static RelayConfig end(int n, double g, double chi, double eta);
};

/// Fibre-loss distance model eta = 10^{-0.02 d} (d in km).
double eta_from_distance(double d_km);
double distance_from_eta(double eta);

/// Closed-form output of the n-QS preceded by loss eta_a on the input and
/// eta_b on the relay arm (single kept mode, unnormalized; the trace is
/// the success probability). The m0 = 0 heralding pattern is assumed.
DensityOperator lossy_nqs_rho(const RelayConfig& config, const FockVector& input);

/// Closed-form two-mode relay output for a TMSV input (modes: Alice, Bob;
/// unnormalized, trace = P_loss).
DensityOperator relay_output_rho(const RelayConfig& config);

/// Closed-form P_loss = Tr(rho_AB), evaluated independently of the state
/// assembly (the l_A sum is done analytically).
double relay_success_probability(const RelayConfig& config);

/// Two-mode covariance matrix in the block form
/// [[a,0,c,0],[0,a,0,-c],[c,0,b,0],[0,-c,0,b]] (vacuum has a = b = 1).
struct CovarianceMatrix {
    double a = 1.0;
    double b = 1.0;
    double c = 0.0;

    Eigen::Matrix4d matrix() const;
    /// Symplectic eigenvalues {nu_minus, nu_plus} of the matrix itself.
    std::pair<double, double> symplectic_eigenvalues() const;
    /// Smallest symplectic eigenvalue after partial transposition.
    double pt_min_symplectic() const;
    bool is_physical(double tol = 1e-9) const;
};

/// Second moments of a (trace-normalized) two-mode density operator.
CovarianceMatrix covariance_from_rho(const DensityOperator& rho);

/// log2 of the trace norm of the partial transpose, clamped at 0.
double log_negativity_full(const DensityOperator& rho, int max_dim = 4096);

/// Gaussian log negativity max(0, -log2 nu_tilde_minus).
double log_negativity_gaussian(const CovarianceMatrix& cm);

/// Gaussian reverse coherent information S(rho_B) - S(rho_AB) in bits per
/// use, from the symplectic spectra.
double gaussian_rci(const CovarianceMatrix& cm);

/// Repeaterless bound -log2(1 - eta) in bits per use.
double plob_bound(double eta);

}  // namespace qs
