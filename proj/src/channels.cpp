#include "qs/channels.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qs {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double binomial(int n, int k) {
    return factorial(n) / (factorial(k) * factorial(n - k));
}

// Bosonic entropy of a symplectic eigenvalue, in bits.
double entropy_h(double x) {
    if (x <= 1.0) return 0.0;
    double p = 0.5 * (x + 1.0), m = 0.5 * (x - 1.0);
    return p * std::log2(p) - m * std::log2(m);
}

}  // namespace

LossChannel::LossChannel(double eta_, int max_loss_terms_)
    : eta(eta_), max_loss_terms(max_loss_terms_) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("loss transmissivity must lie in [0,1]");
    if (max_loss_terms < 0)
        throw std::invalid_argument("max_loss_terms must be >= 0");
}

Eigen::MatrixXcd LossChannel::kraus_operator(int l, int dim) const {
    if (l < 0 || l > max_loss_terms)
        throw std::invalid_argument("Kraus index out of range");
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = l; k < dim; ++k)
        a(k - l, k) = std::sqrt(binomial(k, l) * std::pow(1.0 - eta, l) *
                                std::pow(eta, k - l));
    return a;
}

double LossChannel::completeness_defect(int dim) const {
    double worst = 0.0;
    for (int k = 0; k < dim; ++k) {
        double s = 0.0;
        for (int l = 0; l <= std::min(k, max_loss_terms); ++l)
            s += binomial(k, l) * std::pow(1.0 - eta, l) * std::pow(eta, k - l);
        worst = std::max(worst, std::abs(1.0 - s));
    }
    return worst;
}

DensityOperator apply_loss(const LossChannel& channel, const DensityOperator& rho,
                           int mode) {
    if (mode < 0 || mode >= rho.modes())
        throw std::invalid_argument("apply_loss: bad mode index");
    // Same basis layout is reused; loss only lowers photon numbers, so a
    // capped basis stays closed under the map.
    DensityOperator out(rho.dims(), rho.total_cap());

    const auto& basis = rho.basis();
    const int nb = rho.basis_size();
    std::vector<int> t2, u2;
    for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < nb; ++j) {
            cplx v = rho.matrix()(i, j);
            if (v == cplx{0.0, 0.0}) continue;
            const int ki = basis[i][mode], kj = basis[j][mode];
            const int lmax = std::min({ki, kj, channel.max_loss_terms});
            for (int l = 0; l <= lmax; ++l) {
                double fi = std::sqrt(binomial(ki, l) * std::pow(1.0 - channel.eta, l) *
                                      std::pow(channel.eta, ki - l));
                double fj = std::sqrt(binomial(kj, l) * std::pow(1.0 - channel.eta, l) *
                                      std::pow(channel.eta, kj - l));
                t2 = basis[i];
                u2 = basis[j];
                t2[mode] = ki - l;
                u2[mode] = kj - l;
                int oi = out.index_of(t2), oj = out.index_of(u2);
                out.matrix()(oi, oj) += fi * fj * v;
            }
        }
    }
    return out;
}

void RelayConfig::validate() const {
    if (n < 1) throw std::invalid_argument("relay size n must be >= 1");
    if (!(g > 0.0)) throw std::invalid_argument("gain g must be > 0");
    if (eta_a <= 0.0 || eta_a > 1.0 || eta_b <= 0.0 || eta_b > 1.0)
        throw std::invalid_argument("channel transmissivities must lie in (0,1]");
    if (chi < 0.0 || chi >= 1.0)
        throw std::invalid_argument("TMSV squeezing must lie in [0,1)");
}

RelayConfig RelayConfig::middle(int n, double g, double chi, double eta) {
    double root = std::sqrt(eta);
    return RelayConfig{n, g, root, root, chi};
}

RelayConfig RelayConfig::end(int n, double g, double chi, double eta) {
    return RelayConfig{n, g, eta, 1.0, chi};
}

double eta_from_distance(double d_km) {
    if (d_km < 0.0) throw std::invalid_argument("distance must be >= 0");
    return std::pow(10.0, -0.02 * d_km);
}

double distance_from_eta(double eta) {
    if (eta <= 0.0 || eta > 1.0) throw std::invalid_argument("eta must lie in (0,1]");
    return -50.0 * std::log10(eta);
}

DensityOperator lossy_nqs_rho(const RelayConfig& config, const FockVector& input) {
    config.validate();
    const int n = config.n;
    const double g = config.g;
    const double ea = config.eta_a, eb = config.eta_b;
    const double pref = factorial(n) / std::pow(n + 1.0, n) / std::pow(g * g + 1.0, n);
    const double geff = g * std::sqrt(ea / eb);

    DensityOperator rho({n + 1}, -1);
    const int la_max = input.cutoff();  // c_{j+la+lb} vanishes beyond the cutoff
    for (int la = 0; la <= la_max; ++la) {
        for (int lb = 0; lb <= n; ++lb) {
            double weight = std::pow(1.0 - ea, la) * std::pow(1.0 - eb, lb) *
                            std::pow(ea, lb) * std::pow(eb, n - lb) /
                            (factorial(la) * factorial(lb));
            if (weight == 0.0) continue;
            for (int j1 = 0; j1 <= n - lb; ++j1) {
                int k1 = j1 + la + lb;
                if (k1 > input.cutoff()) continue;
                for (int j2 = 0; j2 <= n - lb; ++j2) {
                    int k2 = j2 + la + lb;
                    if (k2 > input.cutoff()) continue;
                    double amp = std::pow(geff, j1 + j2) * weight *
                                 std::sqrt(factorial(k1) * factorial(k2) /
                                           (factorial(j1) * factorial(j2)));
                    rho.matrix()(j1, j2) +=
                        pref * amp * input[k1] * std::conj(input[k2]);
                }
            }
        }
    }
    return rho;
}

DensityOperator relay_output_rho(const RelayConfig& config) {
    config.validate();
    const int n = config.n;
    const double g = config.g, chi = config.chi;
    const double ea = config.eta_a, eb = config.eta_b;
    const double pref = factorial(n) * (1.0 - chi * chi) /
                        (std::pow(n + 1.0, n) * std::pow(g * g + 1.0, n));
    const double gchi = g * chi * std::sqrt(ea / eb);

    // First pass: choose the l_A truncation from per-l_A trace
    // contributions (relative 1e-14 stop, hard cap 60).
    auto la_trace = [&](int la) {
        double t = 0.0;
        for (int lb = 0; lb <= n; ++lb) {
            double weight = std::pow(chi, 2.0 * (la + lb)) * std::pow(1.0 - ea, la) *
                            std::pow(1.0 - eb, lb) * std::pow(ea, lb) *
                            std::pow(eb, n - lb) / (factorial(la) * factorial(lb));
            for (int j = 0; j <= n - lb; ++j)
                t += std::pow(gchi, 2 * j) * weight * factorial(j + la + lb) /
                     factorial(j);
        }
        return pref * t;
    };
    int la_max = 0;
    double running = la_trace(0);
    while (la_max < 60) {
        double added = la_trace(la_max + 1);
        if (added < 1e-14 * std::max(running, 1e-300)) break;
        ++la_max;
        running += added;
    }

    const int dim_a = n + la_max + 1;  // k = j + l_A + l_B <= n + l_A
    DensityOperator rho({dim_a, n + 1}, -1);
    for (int la = 0; la <= la_max; ++la) {
        for (int lb = 0; lb <= n; ++lb) {
            double weight = std::pow(chi, 2.0 * (la + lb)) * std::pow(1.0 - ea, la) *
                            std::pow(1.0 - eb, lb) * std::pow(ea, lb) *
                            std::pow(eb, n - lb) / (factorial(la) * factorial(lb));
            if (weight == 0.0) continue;
            for (int j1 = 0; j1 <= n - lb; ++j1) {
                for (int j2 = 0; j2 <= n - lb; ++j2) {
                    int k1 = j1 + la + lb, k2 = j2 + la + lb;
                    double amp = pref * std::pow(gchi, j1 + j2) * weight *
                                 std::sqrt(factorial(k1) * factorial(k2) /
                                           (factorial(j1) * factorial(j2)));
                    int i = rho.index_of({k1, j1}), j = rho.index_of({k2, j2});
                    rho.matrix()(i, j) += amp;
                }
            }
        }
    }
    return rho;
}

double relay_success_probability(const RelayConfig& config) {
    config.validate();
    const int n = config.n;
    const double g = config.g, chi = config.chi;
    const double ea = config.eta_a, eb = config.eta_b;
    const double pref = factorial(n) * (1.0 - chi * chi) /
                        (std::pow(n + 1.0, n) * std::pow(g * g + 1.0, n));
    const double gchi2 = std::pow(g * chi, 2) * ea / eb;
    const double denom_base = 1.0 - chi * chi + chi * chi * ea;

    double sum = 0.0;
    for (int lb = 0; lb <= n; ++lb) {
        for (int j = 0; j <= n - lb; ++j) {
            sum += std::pow(gchi2, j) * std::pow(chi, 2 * lb) *
                   std::pow(1.0 - eb, lb) * std::pow(ea, lb) * std::pow(eb, n - lb) /
                   std::pow(denom_base, 1 + j + lb) * factorial(j + lb) /
                   (factorial(j) * factorial(lb));
        }
    }
    return pref * sum;
}

Eigen::Matrix4d CovarianceMatrix::matrix() const {
    Eigen::Matrix4d m;
    m << a, 0, c, 0,
         0, a, 0, -c,
         c, 0, b, 0,
         0, -c, 0, b;
    return m;
}

std::pair<double, double> CovarianceMatrix::symplectic_eigenvalues() const {
    // Standard two-mode form: det C block = -c^2.
    double delta = a * a + b * b - 2.0 * c * c;
    double det = std::pow(a * b - c * c, 2);
    double disc = std::max(delta * delta - 4.0 * det, 0.0);
    double lo = std::sqrt(std::max(0.5 * (delta - std::sqrt(disc)), 0.0));
    double hi = std::sqrt(0.5 * (delta + std::sqrt(disc)));
    return {lo, hi};
}

double CovarianceMatrix::pt_min_symplectic() const {
    // Partial transposition flips the sign of det C.
    double delta = a * a + b * b + 2.0 * c * c;
    double det = std::pow(a * b - c * c, 2);
    double disc = std::max(delta * delta - 4.0 * det, 0.0);
    return std::sqrt(std::max(0.5 * (delta - std::sqrt(disc)), 0.0));
}

bool CovarianceMatrix::is_physical(double tol) const {
    if (a < 1.0 - tol || b < 1.0 - tol) return false;
    return symplectic_eigenvalues().first >= 1.0 - tol;
}

CovarianceMatrix covariance_from_rho(const DensityOperator& rho) {
    if (rho.modes() != 2)
        throw std::invalid_argument("covariance_from_rho needs a two-mode state");
    double tr = rho.trace();
    if (tr <= 0.0) throw std::invalid_argument("covariance of non-positive-trace state");

    double na = 0.0, nb = 0.0;
    cplx aa{0.0, 0.0};
    const auto& basis = rho.basis();
    for (int i = 0; i < rho.basis_size(); ++i) {
        na += basis[i][0] * rho.matrix()(i, i).real();
        nb += basis[i][1] * rho.matrix()(i, i).real();
        // <a_A a_B> picks up rho[(kA-1,kB-1),(kA,kB)] weights.
        if (basis[i][0] >= 1 && basis[i][1] >= 1) {
            int j = rho.index_of({basis[i][0] - 1, basis[i][1] - 1});
            if (j >= 0)
                aa += std::sqrt(static_cast<double>(basis[i][0]) * basis[i][1]) *
                      rho.matrix()(i, j);
        }
    }
    na /= tr;
    nb /= tr;
    aa /= tr;
    return {1.0 + 2.0 * na, 1.0 + 2.0 * nb, 2.0 * aa.real()};
}

double log_negativity_full(const DensityOperator& rho, int max_dim) {
    if (rho.modes() != 2)
        throw std::invalid_argument("log_negativity_full needs a two-mode state");
    if (rho.basis_size() > max_dim)
        throw guard_error("log_negativity_full: matrix dimension " +
                          std::to_string(rho.basis_size()) + " exceeds guard");
    double tr = rho.trace();
    if (tr <= 0.0) throw std::invalid_argument("log negativity of zero-trace state");
    DensityOperator pt = rho.partial_transpose(1);
    Eigen::MatrixXcd h = 0.5 * (pt.matrix() + pt.matrix().adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    double trace_norm = es.eigenvalues().cwiseAbs().sum() / tr;
    return std::max(0.0, std::log2(trace_norm));
}

double log_negativity_gaussian(const CovarianceMatrix& cm) {
    if (!cm.is_physical())
        throw std::invalid_argument("log_negativity_gaussian: unphysical covariance");
    double nu = cm.pt_min_symplectic();
    return nu >= 1.0 ? 0.0 : -std::log2(nu);
}

double gaussian_rci(const CovarianceMatrix& cm) {
    if (!cm.is_physical())
        throw std::invalid_argument("gaussian_rci: unphysical covariance");
    auto [lo, hi] = cm.symplectic_eigenvalues();
    return entropy_h(cm.b) - entropy_h(lo) - entropy_h(hi);
}

double plob_bound(double eta) {
    if (eta < 0.0 || eta >= 1.0)
        throw std::invalid_argument("plob_bound needs eta in [0,1)");
    return -std::log2(1.0 - eta);
}

}  // namespace qs
