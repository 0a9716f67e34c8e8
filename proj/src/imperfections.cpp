#include "qs/imperfections.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include <Eigen/SparseCore>

#include "qs/interferometer.hpp"

namespace qs {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double binomial_pmf(int successes, int trials, double p) {
    double b = factorial(trials) / (factorial(successes) * factorial(trials - successes));
    return b * std::pow(p, successes) * std::pow(1.0 - p, trials - successes);
}

// Thermal photon-number distribution with mean nbar.
double thermal_pmf(int k, double nbar) {
    if (nbar <= 0.0) return k == 0 ? 1.0 : 0.0;
    return std::pow(nbar / (1.0 + nbar), k) / (1.0 + nbar);
}

std::vector<std::vector<int>> compositions(int total, int modes) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(modes, 0);
    // Lexicographic enumeration by recursion on slots.
    auto rec = [&](auto&& self, int slot, int left) -> void {
        if (slot == modes - 1) {
            cur[slot] = left;
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            cur[slot] = v;
            self(self, slot + 1, left - v);
        }
    };
    if (modes > 0) rec(rec, 0, total);
    return out;
}

// Many-body matrix of `u` acting on the given modes of the capped basis.
Eigen::SparseMatrix<cplx> network_operator(const DensityOperator& rho,
                                           const ScatteringMatrix& u,
                                           const std::vector<int>& modes) {
    const int k = static_cast<int>(modes.size());
    const int d = rho.basis_size();
    std::map<std::pair<std::vector<int>, std::vector<int>>, cplx> amp_cache;
    std::map<int, std::vector<std::vector<int>>> comp_cache;

    std::vector<Eigen::Triplet<cplx>> triplets;
    std::vector<int> sub(k), occ;
    for (int col = 0; col < d; ++col) {
        const auto& t = rho.basis()[col];
        int total = 0;
        for (int i = 0; i < k; ++i) {
            sub[i] = t[modes[i]];
            total += sub[i];
        }
        auto [it, inserted] = comp_cache.try_emplace(total);
        if (inserted) it->second = compositions(total, k);
        occ = t;
        for (const auto& sub_out : it->second) {
            auto [ait, fresh] = amp_cache.try_emplace({sub, sub_out});
            if (fresh) ait->second = scatter_amplitude(u, sub, sub_out);
            if (ait->second == cplx{0.0, 0.0}) continue;
            for (int i = 0; i < k; ++i) occ[modes[i]] = sub_out[i];
            int row = rho.index_of(occ);
            if (row >= 0) triplets.emplace_back(row, col, ait->second);
        }
    }
    Eigen::SparseMatrix<cplx> w(d, d);
    w.setFromTriplets(triplets.begin(), triplets.end());
    return w;
}

void apply_unitary(DensityOperator& rho, const ScatteringMatrix& u,
                   const std::vector<int>& modes) {
    Eigen::SparseMatrix<cplx> w = network_operator(rho, u, modes);
    rho.matrix() = w * rho.matrix() * w.adjoint();
}

// Applies a Fock-diagonal POVM element on `mode` and traces that mode out.
DensityOperator apply_povm_and_remove(const DensityOperator& rho, int mode,
                                      const Eigen::VectorXd& diag) {
    std::vector<int> dims;
    for (int m = 0; m < rho.modes(); ++m)
        if (m != mode) dims.push_back(rho.dims()[m]);
    if (dims.empty()) throw std::invalid_argument("cannot remove the last mode");
    DensityOperator out(dims, rho.total_cap());

    const int d = rho.basis_size();
    std::vector<int> t2, u2;
    for (int i = 0; i < d; ++i) {
        const auto& ti = rho.basis()[i];
        for (int j = 0; j < d; ++j) {
            if (rho.matrix()(i, j) == cplx{0.0, 0.0}) continue;
            const auto& tj = rho.basis()[j];
            if (ti[mode] != tj[mode]) continue;  // traced index must agree
            t2.clear();
            u2.clear();
            for (int m = 0; m < rho.modes(); ++m) {
                if (m == mode) continue;
                t2.push_back(ti[m]);
                u2.push_back(tj[m]);
            }
            int oi = out.index_of(t2), oj = out.index_of(u2);
            out.matrix()(oi, oj) += diag[ti[mode]] * rho.matrix()(i, j);
        }
    }
    return out;
}

// C1(m0) phase e^{2 pi i j m0/(n+1)} on one mode of a density operator.
void apply_phase_correction(DensityOperator& rho, int mode, int n, int m0) {
    const int d = rho.basis_size();
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (rho.matrix()(i, j) == cplx{0.0, 0.0}) continue;
            int diff = rho.basis()[i][mode] - rho.basis()[j][mode];
            double phase = 2.0 * std::numbers::pi * diff * m0 / (n + 1.0);
            rho.matrix()(i, j) *= std::polar(1.0, phase);
        }
    }
}

// rho = piece_0 (x) piece_1 (x) ... over the capped basis.
DensityOperator init_product(const std::vector<Eigen::MatrixXcd>& pieces, int cap) {
    std::vector<int> dims(pieces.size(), cap + 1);
    DensityOperator rho(dims, cap);
    const int d = rho.basis_size();
    for (int i = 0; i < d; ++i) {
        const auto& t = rho.basis()[i];
        for (int j = 0; j < d; ++j) {
            const auto& u = rho.basis()[j];
            cplx v{1.0, 0.0};
            for (size_t m = 0; m < pieces.size() && v != cplx{0.0, 0.0}; ++m) {
                const auto& p = pieces[m];
                v *= (t[m] < p.rows() && u[m] < p.cols()) ? p(t[m], u[m])
                                                          : cplx{0.0, 0.0};
            }
            if (v != cplx{0.0, 0.0}) rho.matrix()(i, j) = v;
        }
    }
    return rho;
}

Eigen::MatrixXcd pure_piece(const FockVector& v) {
    int d = v.cutoff() + 1;
    Eigen::MatrixXcd m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = v[i] * std::conj(v[j]);
    return m;
}

Eigen::MatrixXcd vacuum_piece() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(1, 1);
    m(0, 0) = 1.0;
    return m;
}

Eigen::VectorXd povm_diagonal(const DeviceProfile& profile, int click, int dim) {
    Eigen::VectorXd diag(dim);
    for (int j = 0; j < dim; ++j)
        diag[j] = detector_click_probability(profile, click, j);
    return diag;
}

// Shared BP evolution: modes [0]=resource, [1]=arm, [2]=input,
// [3..n+1]=QFT vacuum ports. Channel losses eta_b (arm, after the
// splitter) and eta_a (input, before the QFT) cover the relay use; 1,1
// gives the amplifier. Returns the pre-measurement state.
DensityOperator evolve_bp_network(const DeviceProfile& profile, int n, double g,
                                  double eta_a, double eta_b,
                                  const Eigen::MatrixXcd& input_piece,
                                  int input_max_photons) {
    const int cap = input_max_photons + n;
    std::vector<Eigen::MatrixXcd> pieces;
    Eigen::MatrixXcd res = noisy_resource(profile, ScissorVariant::BP, n).matrix();
    pieces.push_back(res);
    pieces.push_back(vacuum_piece());
    pieces.push_back(input_piece);
    for (int m = 3; m <= n + 1; ++m) pieces.push_back(vacuum_piece());

    DensityOperator rho = init_product(pieces, cap);
    apply_unitary(rho, beam_splitter_matrix(g * g / (1.0 + g * g)), {0, 1});
    if (eta_b < 1.0) rho = apply_loss(LossChannel(eta_b, cap), rho, 1);
    if (eta_a < 1.0) rho = apply_loss(LossChannel(eta_a, cap), rho, 2);
    std::vector<int> qft_modes(n + 1);
    for (int i = 0; i <= n; ++i) qft_modes[i] = i + 1;
    apply_unitary(rho, qft_matrix(n + 1), qft_modes);
    return rho;
}

DensityOperator run_bp_network(const DeviceProfile& profile, int n, double g,
                               double eta_a, double eta_b,
                               const Eigen::MatrixXcd& input_piece,
                               int input_max_photons) {
    DensityOperator rho = evolve_bp_network(profile, n, g, eta_a, eta_b,
                                            input_piece, input_max_photons);
    // Accept every heralding port, phase-correcting each branch.
    DensityOperator out({n + 1}, -1);
    const int dim = input_max_photons + n + 1;
    Eigen::VectorXd click0 = povm_diagonal(profile, 0, dim);
    Eigen::VectorXd click1 = povm_diagonal(profile, 1, dim);
    for (int m0 = 0; m0 <= n; ++m0) {
        DensityOperator branch = rho;
        for (int mode = n + 1; mode >= 1; --mode)
            branch = apply_povm_and_remove(branch, mode,
                                           mode == m0 + 1 ? click0 : click1);
        apply_phase_correction(branch, 0, n, m0);
        for (int a = 0; a <= n; ++a)
            for (int b = 0; b <= n; ++b)
                out.matrix()(a, b) += branch.matrix()(branch.index_of({a}),
                                                      branch.index_of({b}));
    }
    return out;
}

// SP engine: modes [0]=input, [1..n+1]=QFT ports; single photons enter
// ports 2..n+1, the heralds are n photons at the splitter's first output
// and vacuum elsewhere. No resource preparation, single pattern.
DensityOperator run_sp_network(const DeviceProfile& profile, int n, double g,
                               const Eigen::MatrixXcd& input_piece,
                               int input_max_photons) {
    const int cap = input_max_photons + n;
    std::vector<Eigen::MatrixXcd> pieces;
    pieces.push_back(input_piece);
    pieces.push_back(vacuum_piece());
    Eigen::MatrixXcd single(2, 2);
    single << 1.0 - profile.tau_r, 0.0, 0.0, profile.tau_r;
    for (int m = 2; m <= n + 1; ++m) pieces.push_back(single);

    DensityOperator rho = init_product(pieces, cap);
    std::vector<int> qft_modes(n + 1);
    for (int i = 0; i <= n; ++i) qft_modes[i] = i + 1;
    ScatteringMatrix f = qft_matrix(n + 1);
    apply_unitary(rho, ScatteringMatrix::from_matrix(f.matrix().adjoint()),
                  qft_modes);
    ScatteringMatrix b = beam_splitter_matrix(g * g / (1.0 + g * g));
    apply_unitary(rho, ScatteringMatrix::from_matrix(b.matrix().adjoint()), {0, 1});

    const int dim = cap + 1;
    Eigen::VectorXd click0 = povm_diagonal(profile, 0, dim);
    Eigen::VectorXd clickn = povm_diagonal(profile, n, dim);
    for (int mode = n + 1; mode >= 3; --mode)
        rho = apply_povm_and_remove(rho, mode, click0);
    rho = apply_povm_and_remove(rho, 1, click0);
    rho = apply_povm_and_remove(rho, 0, clickn);

    DensityOperator out({n + 1}, -1);
    for (int a = 0; a <= n; ++a)
        for (int b2 = 0; b2 <= n; ++b2)
            out.matrix()(a, b2) = rho.matrix()(rho.index_of({a}), rho.index_of({b2}));
    return out;
}

NoisySimResult finish_with_fidelity(DensityOperator out, const ScissorConfig& config,
                                    const FockVector& input) {
    double prob = out.trace();
    double fid = std::numeric_limits<double>::quiet_NaN();
    ScissorOutput ideal = nqs_output(config, input);
    if (ideal.success_probability > 0.0 && prob > 0.0) {
        FockVector ref = ideal.state.normalized();
        cplx acc{0.0, 0.0};
        for (int a = 0; a <= config.n; ++a)
            for (int b = 0; b <= config.n; ++b)
                acc += std::conj(ref[a]) * out.matrix()(a, b) * ref[b];
        fid = acc.real() / prob;
    }
    return {std::move(out), prob, fid};
}

}  // namespace qs::(anonymous)

void DeviceProfile::validate() const {
    if (tau_d <= 0.0 || tau_d > 1.0)
        throw std::invalid_argument("detector efficiency must lie in (0,1]");
    if (tau_r <= 0.0 || tau_r > 1.0)
        throw std::invalid_argument("resource transmissivity must lie in (0,1]");
    if (dark_count < 0.0 || dark_count >= 1.0)
        throw std::invalid_argument("dark-count probability must lie in [0,1)");
    if (dark_count >= tau_d)
        throw std::invalid_argument("dark-count probability must stay below tau_d");
    if (dark_count > 0.2)
        throw std::invalid_argument("dark-count probability above model range (0.2)");
}

bool DeviceProfile::is_ideal() const {
    return tau_d == 1.0 && dark_count == 0.0 && tau_r == 1.0;
}

double calibrate_thermal_mean(double dark_count) {
    if (dark_count < 0.0 || dark_count > 0.2)
        throw std::invalid_argument("dark count out of calibration range [0, 0.2]");
    if (dark_count == 0.0) return 0.0;
    // P(1 click | vacuum) = nbar/(1+nbar)^2, increasing on [0,1).
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double p = mid / ((1.0 + mid) * (1.0 + mid));
        (p < dark_count ? lo : hi) = mid;
        if (hi - lo < 1e-16 * std::max(lo, 1e-30)) break;
    }
    return 0.5 * (lo + hi);
}

double detector_click_probability(const DeviceProfile& profile, int click_count,
                                  int photons) {
    profile.validate();
    if (click_count < 0 || photons < 0)
        throw std::invalid_argument("negative click or photon count");
    double nbar = calibrate_thermal_mean(profile.dark_count);
    double p = 0.0;
    for (int m = 0; m <= std::min(click_count, photons); ++m)
        p += binomial_pmf(m, photons, profile.tau_d) *
             thermal_pmf(click_count - m, nbar);
    return p;
}

Eigen::MatrixXcd noisy_detector_povm(const DeviceProfile& profile, int click_count,
                                     int cutoff) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
    for (int j = 0; j <= cutoff; ++j)
        e(j, j) = detector_click_probability(profile, click_count, j);
    return e;
}

DensityOperator noisy_resource(const DeviceProfile& profile, ScissorVariant variant,
                               int n) {
    profile.validate();
    if (n < 1) throw std::invalid_argument("noisy_resource needs n >= 1");
    if (variant == ScissorVariant::BP) {
        DensityOperator rho({n + 1}, -1);
        for (int k = 0; k <= n; ++k)
            rho.matrix()(k, k) = binomial_pmf(k, n, profile.tau_r);
        return rho;
    }
    // SP: n independent single photons, each degraded to diag(1-tau_r, tau_r).
    DensityOperator rho(std::vector<int>(n, 2), -1);
    for (int i = 0; i < rho.basis_size(); ++i) {
        double p = 1.0;
        for (int m = 0; m < n; ++m)
            p *= rho.basis()[i][m] == 1 ? profile.tau_r : 1.0 - profile.tau_r;
        rho.matrix()(i, i) = p;
    }
    return rho;
}

NoisySimResult simulate_noisy_nqs(const DeviceProfile& profile,
                                  const ScissorConfig& config,
                                  const FockVector& input) {
    profile.validate();
    config.validate();
    if (config.n > 3)
        throw guard_error("simulate_noisy_nqs supports n <= 3");
    DensityOperator out =
        config.variant == ScissorVariant::BP
            ? run_bp_network(profile, config.n, config.g, 1.0, 1.0,
                             pure_piece(input), input.cutoff())
            : run_sp_network(profile, config.n, config.g, pure_piece(input),
                             input.cutoff());
    return finish_with_fidelity(std::move(out), config, input);
}

NoisySimResult simulate_noisy_nqs(const DeviceProfile& profile,
                                  const ScissorConfig& config,
                                  const DensityOperator& input) {
    profile.validate();
    config.validate();
    if (config.n > 3)
        throw guard_error("simulate_noisy_nqs supports n <= 3");
    if (input.modes() != 1)
        throw std::invalid_argument("mixed-state input must be single-mode");
    Eigen::MatrixXcd piece = input.matrix();
    DensityOperator out =
        config.variant == ScissorVariant::BP
            ? run_bp_network(profile, config.n, config.g, 1.0, 1.0, piece,
                             input.dims()[0] - 1)
            : run_sp_network(profile, config.n, config.g, piece,
                             input.dims()[0] - 1);
    double prob = out.trace();
    return {std::move(out), prob, std::numeric_limits<double>::quiet_NaN()};
}

NoisySimResult simulate_noisy_relay(const DeviceProfile& profile,
                                    const RelayConfig& relay, int flying_cutoff) {
    profile.validate();
    relay.validate();
    if (relay.n > 2) throw guard_error("simulate_noisy_relay supports n <= 2");

    int K = flying_cutoff;
    if (K < 0) {
        K = 1;
        double tail = relay.chi * relay.chi;
        while (K < 8 && std::pow(tail, K + 1) / (1.0 - tail) > 1e-8) ++K;
    }
    // TMSV Schmidt weights lambda_k = sqrt(1-chi^2) chi^k.
    std::vector<double> lambda(K + 1);
    for (int k = 0; k <= K; ++k)
        lambda[k] = std::sqrt(1.0 - relay.chi * relay.chi) * std::pow(relay.chi, k);

    // Bob-side map applied to each flying-mode basis operator |k1><k2|.
    const int n = relay.n;
    std::vector<std::vector<Eigen::MatrixXcd>> mapped(
        K + 1, std::vector<Eigen::MatrixXcd>(K + 1));
    for (int k1 = 0; k1 <= K; ++k1) {
        for (int k2 = k1; k2 <= K; ++k2) {
            Eigen::MatrixXcd piece = Eigen::MatrixXcd::Zero(K + 1, K + 1);
            piece(k1, k2) = 1.0;
            DensityOperator out = run_bp_network(profile, n, relay.g, relay.eta_a,
                                                 relay.eta_b, piece, K);
            mapped[k1][k2] = out.matrix();
            if (k2 != k1) mapped[k2][k1] = out.matrix().adjoint();
        }
    }

    DensityOperator rho_ab({K + 1, n + 1}, -1);
    for (int k1 = 0; k1 <= K; ++k1)
        for (int k2 = 0; k2 <= K; ++k2) {
            double w = lambda[k1] * lambda[k2];
            for (int b1 = 0; b1 <= n; ++b1)
                for (int b2 = 0; b2 <= n; ++b2)
                    rho_ab.matrix()(rho_ab.index_of({k1, b1}),
                                    rho_ab.index_of({k2, b2})) +=
                        w * mapped[k1][k2](b1, b2);
        }
    double prob = rho_ab.trace();
    return {std::move(rho_ab), prob, std::numeric_limits<double>::quiet_NaN()};
}

std::map<std::vector<int>, double> noisy_bp_click_distribution(
    const DeviceProfile& profile, const ScissorConfig& config,
    const FockVector& input, int max_click) {
    profile.validate();
    config.validate();
    if (config.n > 3)
        throw guard_error("noisy_bp_click_distribution supports n <= 3");
    const int n = config.n;
    DensityOperator rho = evolve_bp_network(profile, n, config.g, 1.0, 1.0,
                                            pure_piece(input), input.cutoff());
    const int dim = input.cutoff() + n + 1;
    std::vector<Eigen::VectorXd> povms;
    for (int c = 0; c <= max_click; ++c)
        povms.push_back(povm_diagonal(profile, c, dim));

    std::map<std::vector<int>, double> table;
    std::vector<int> clicks(n + 1, 0);
    // Read detectors from the highest mode down so indices stay stable.
    auto rec = [&](auto&& self, const DensityOperator& state, int mode) -> void {
        if (mode == 0) {
            table[clicks] = state.trace();
            return;
        }
        for (int c = 0; c <= max_click; ++c) {
            clicks[mode - 1] = c;
            self(self, apply_povm_and_remove(state, mode, povms[c]), mode - 1);
        }
        clicks[mode - 1] = 0;
    };
    rec(rec, rho, n + 1);
    return table;
}

}  // namespace qs
