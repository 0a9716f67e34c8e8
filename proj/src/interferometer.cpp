#include "qs/interferometer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace qs {

namespace {

constexpr int kPermanentGuard = 20;

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

// All ways to distribute `total` photons over `modes` slots, lexicographic.
void enumerate_compositions(int total, int modes, std::vector<int>& current,
                            int slot, std::vector<std::vector<int>>& out) {
    if (slot == modes - 1) {
        current[slot] = total;
        out.push_back(current);
        return;
    }
    for (int n = 0; n <= total; ++n) {
        current[slot] = n;
        enumerate_compositions(total - n, modes, current, slot + 1, out);
    }
}

std::vector<std::vector<int>> compositions(int total, int modes) {
    std::vector<std::vector<int>> out;
    std::vector<int> current(modes, 0);
    if (modes == 0) {
        if (total == 0) out.push_back({});
        return out;
    }
    enumerate_compositions(total, modes, current, 0, out);
    return out;
}

}  // namespace

ScatteringMatrix ScatteringMatrix::from_matrix(Eigen::MatrixXcd u) {
    if (u.rows() != u.cols() || u.rows() == 0)
        throw std::invalid_argument("scattering matrix must be square and nonempty");
    ScatteringMatrix s(std::move(u));
    if (s.unitarity_error() >= 1e-10)
        throw std::invalid_argument("scattering matrix is not unitary");
    return s;
}

double ScatteringMatrix::unitarity_error() const {
    Eigen::MatrixXcd d = u_.adjoint() * u_ -
                         Eigen::MatrixXcd::Identity(u_.rows(), u_.cols());
    return d.cwiseAbs().maxCoeff();
}

ScatteringMatrix beam_splitter_matrix(double tau) {
    if (!(tau > 0.0 && tau < 1.0))
        throw std::invalid_argument("beam splitter transmissivity must be in (0,1)");
    Eigen::MatrixXcd u(2, 2);
    double t = std::sqrt(tau), r = std::sqrt(1.0 - tau);
    u << -t, r, r, t;
    return ScatteringMatrix::from_matrix(std::move(u));
}

ScatteringMatrix qft_matrix(int m) {
    if (m < 1) throw std::invalid_argument("QFT needs m >= 1");
    Eigen::MatrixXcd u(m, m);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m));
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
            double phase = -2.0 * std::numbers::pi * j * k / m;
            u(j, k) = std::polar(norm, phase);
        }
    return ScatteringMatrix::from_matrix(std::move(u));
}

cplx permanent(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("permanent of non-square matrix");
    const int n = static_cast<int>(a.rows());
    if (n > kPermanentGuard)
        throw guard_error("permanent dimension exceeds guard of " +
                          std::to_string(kPermanentGuard));
    if (n == 0) return {1.0, 0.0};

    // Ryser: Per(A) = (-1)^n sum_{S != 0} (-1)^|S| prod_i sum_{j in S} a_ij,
    // visiting column subsets in Gray-code order so each step updates the
    // row sums with a single column.
    std::vector<cplx> rowsum(n, cplx{0.0, 0.0});
    cplx total{0.0, 0.0};
    const std::uint64_t count = 1ull << n;
    std::uint64_t gray_prev = 0;
    int popcount = 0;
    for (std::uint64_t k = 1; k < count; ++k) {
        std::uint64_t gray = k ^ (k >> 1);
        std::uint64_t diff = gray ^ gray_prev;
        int col = std::countr_zero(diff);
        if (gray & diff) {
            for (int i = 0; i < n; ++i) rowsum[i] += a(i, col);
            ++popcount;
        } else {
            for (int i = 0; i < n; ++i) rowsum[i] -= a(i, col);
            --popcount;
        }
        gray_prev = gray;
        cplx prod{1.0, 0.0};
        for (int i = 0; i < n; ++i) prod *= rowsum[i];
        total += (popcount & 1) ? -prod : prod;
    }
    return (n & 1) ? -total : total;
}

cplx permanent_naive(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("permanent of non-square matrix");
    const int n = static_cast<int>(a.rows());
    if (n > 7) throw guard_error("naive permanent guarded at dimension 7");
    if (n == 0) return {1.0, 0.0};
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    cplx total{0.0, 0.0};
    do {
        cplx prod{1.0, 0.0};
        for (int i = 0; i < n; ++i) prod *= a(i, perm[i]);
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

Eigen::MatrixXcd omega_submatrix(int n, int j, int m0) {
    if (n < 1) throw std::invalid_argument("omega_submatrix needs n >= 1");
    if (j < 0 || j > n || m0 < 0 || m0 > n)
        throw std::invalid_argument("omega_submatrix indices out of range");
    const Eigen::MatrixXcd f =
        std::sqrt(static_cast<double>(n + 1)) * qft_matrix(n + 1).matrix();
    Eigen::MatrixXcd out(n, n);
    int row = 0;
    for (int r = 0; r <= n; ++r) {
        if (r == m0) continue;
        for (int c = 0; c < n; ++c) out(row, c) = f(r, c < n - j ? 0 : 1);
        ++row;
    }
    return out;
}

cplx scatter_amplitude(const ScatteringMatrix& u, const std::vector<int>& input,
                       const std::vector<int>& output) {
    const int m = u.dim();
    if (static_cast<int>(input.size()) != m || static_cast<int>(output.size()) != m)
        throw std::invalid_argument("occupation tuples must match network dimension");
    int pin = 0, pout = 0;
    for (int v : input) pin += v;
    for (int v : output) pout += v;
    if (pin != pout) return {0.0, 0.0};
    if (pin == 0) return {1.0, 0.0};

    // Expanded matrix: row i repeated input_i times, column j repeated
    // output_j times; amplitude = Per / sqrt(prod in! prod out!).
    Eigen::MatrixXcd ex(pin, pin);
    int r = 0;
    for (int i = 0; i < m; ++i) {
        for (int cnt = 0; cnt < input[i]; ++cnt, ++r) {
            int c = 0;
            for (int jm = 0; jm < m; ++jm)
                for (int cc = 0; cc < output[jm]; ++cc, ++c) ex(r, c) = u(i, jm);
        }
    }
    double denom = 1.0;
    for (int v : input) denom *= factorial(v);
    for (int v : output) denom *= factorial(v);
    return permanent(ex) / std::sqrt(denom);
}

MultimodeState apply_network(const ScatteringMatrix& u, const MultimodeState& state) {
    if (u.dim() != state.modes())
        throw std::invalid_argument("network dimension does not match state modes");
    std::vector<int> all(state.modes());
    for (int i = 0; i < state.modes(); ++i) all[i] = i;
    return apply_network_on_modes(u, state, all);
}

MultimodeState apply_network_on_modes(const ScatteringMatrix& u,
                                      const MultimodeState& state,
                                      const std::vector<int>& modes) {
    const int k = static_cast<int>(modes.size());
    if (u.dim() != k)
        throw std::invalid_argument("network dimension does not match mode subset");
    for (int m : modes)
        if (m < 0 || m >= state.modes())
            throw std::invalid_argument("mode index out of range");

    MultimodeState out(state.modes(), state.cutoff());
    std::vector<int> sub_in(k), occ(state.modes());
    for (const auto& [occ_in, amp] : state.terms()) {
        int total = 0;
        for (int i = 0; i < k; ++i) {
            sub_in[i] = occ_in[modes[i]];
            total += sub_in[i];
        }
        occ = occ_in;
        for (const auto& sub_out : compositions(total, k)) {
            cplx a = scatter_amplitude(u, sub_in, sub_out);
            if (a == cplx{0.0, 0.0}) continue;
            for (int i = 0; i < k; ++i) occ[modes[i]] = sub_out[i];
            out.add_term(occ, amp * a);
        }
    }
    out.prune(1e-15);
    return out;
}

PostselectResult postselect(const MultimodeState& state,
                            const MeasurementPattern& pattern) {
    if (pattern.modes.size() != pattern.counts.size())
        throw std::invalid_argument("pattern modes/counts length mismatch");
    std::vector<bool> measured(state.modes(), false);
    for (size_t i = 0; i < pattern.modes.size(); ++i) {
        int m = pattern.modes[i];
        if (m < 0 || m >= state.modes())
            throw std::invalid_argument("measured mode out of range");
        if (measured[m]) throw std::invalid_argument("duplicate measured mode");
        if (pattern.counts[i] < 0) throw std::invalid_argument("negative count");
        measured[m] = true;
    }

    int kept_modes = state.modes() - static_cast<int>(pattern.modes.size());
    MultimodeState kept(kept_modes, state.cutoff());
    std::vector<int> kocc;
    kocc.reserve(kept_modes);
    for (const auto& [occ, amp] : state.terms()) {
        bool match = true;
        for (size_t i = 0; i < pattern.modes.size() && match; ++i)
            match = occ[pattern.modes[i]] == pattern.counts[i];
        if (!match) continue;
        kocc.clear();
        for (int m = 0; m < state.modes(); ++m)
            if (!measured[m]) kocc.push_back(occ[m]);
        kept.add_term(kocc, amp);
    }
    return {kept, kept.norm2()};
}

LegacyEquivalenceReport legacy_equivalence_check() {
    using std::numbers::pi;
    const cplx i{0.0, 1.0};

    // 1-QS: the published device's splitter F2' is our F2 up to a pi phase
    // on the second output.
    Eigen::MatrixXcd f2p(2, 2);
    f2p << 1, 1, -1, 1;
    f2p /= std::sqrt(2.0);
    Eigen::MatrixXcd c12 = Eigen::Vector2cd(1.0, std::exp(i * pi)).asDiagonal();
    double f2_dev = (qft_matrix(2).matrix() - c12 * f2p).cwiseAbs().maxCoeff();

    // 3-QSBP: the published four-splitter network F4'. Only its two middle
    // columns carry the scattering dynamics; they coincide with columns of
    // F4 after a row permutation and per-row/column phases.
    Eigen::MatrixXcd f4p(4, 4);
    f4p << std::sqrt(2.0), 1, 1, 0,
           -1, std::exp(-i * pi / 4.0), std::exp(i * pi / 4.0), std::exp(i * pi / 2.0),
           1, std::exp(-3.0 * i * pi / 4.0), std::exp(3.0 * i * pi / 4.0), std::exp(i * pi / 2.0),
           0, 1, -1, std::sqrt(2.0);
    f4p /= 2.0;

    // Permutation-with-phases D and the rearranged QFT factor M, with
    // F4 = D M and M columns 0,1 equal to F4' columns 1,2.
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(4, 4);
    d(0, 0) = 1.0;
    d(1, 2) = std::exp(3.0 * i * pi / 4.0);
    d(2, 3) = 1.0;
    d(3, 1) = std::exp(i * pi / 4.0);
    Eigen::MatrixXcd m(4, 4);
    m << 1, 1, 1, 1,
         std::exp(-i * pi / 4.0), std::exp(i * pi / 4.0), -std::exp(-i * pi / 4.0), std::exp(-3.0 * i * pi / 4.0),
         std::exp(-3.0 * i * pi / 4.0), std::exp(3.0 * i * pi / 4.0), -std::exp(-3.0 * i * pi / 4.0), std::exp(-i * pi / 4.0),
         1, -1, 1, -1;
    m /= 2.0;

    double f4_dev = (qft_matrix(4).matrix() - d * m).cwiseAbs().maxCoeff();
    f4_dev = std::max(f4_dev,
                      (m.block(0, 0, 4, 2) - f4p.block(0, 1, 4, 2)).cwiseAbs().maxCoeff());

    return {f2_dev, f4_dev, std::max(f2_dev, f4_dev)};
}

}  // namespace qs
