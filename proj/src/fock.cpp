#include "qs/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qs {

double FockVector::norm2() const {
    double s = 0.0;
    for (const auto& c : amplitudes) s += std::norm(c);
    return s;
}

bool FockVector::is_normalized(double tol) const {
    return std::abs(norm2() - 1.0) <= tol;
}

FockVector FockVector::normalized() const {
    double n2 = norm2();
    if (n2 <= 0.0) throw std::invalid_argument("cannot normalize zero-norm state");
    FockVector out = *this;
    double inv = 1.0 / std::sqrt(n2);
    for (auto& c : out.amplitudes) c *= inv;
    return out;
}

double truncation_loss(const FockVector& v) { return 1.0 - v.norm2(); }

int recommended_cutoff(double mean_photons) {
    if (mean_photons < 0.0) throw std::invalid_argument("negative mean photon number");
    return static_cast<int>(std::ceil(mean_photons + 6.0 * std::sqrt(mean_photons)));
}

FockVector coherent_state(cplx alpha, int cutoff, bool strict, double max_loss) {
    if (cutoff < 0) throw std::invalid_argument("cutoff must be >= 0");
    FockVector v(cutoff);
    // c_j built by the stable ratio c_j = c_{j-1} * alpha / sqrt(j).
    cplx c = std::exp(-0.5 * std::norm(alpha));
    v[0] = c;
    for (int j = 1; j <= cutoff; ++j) {
        c *= alpha / std::sqrt(static_cast<double>(j));
        v[j] = c;
    }
    if (strict && truncation_loss(v) > max_loss)
        throw std::invalid_argument("coherent_state: truncation loss exceeds bound");
    return v;
}

FockVector smsv_state(double s, int cutoff, bool strict, double max_loss) {
    if (s < 0.0 || s >= 1.0)
        throw std::invalid_argument("smsv_state: squeezing must lie in [0,1)");
    if (cutoff < 0) throw std::invalid_argument("cutoff must be >= 0");
    FockVector v(cutoff);
    // c_{2j} = c_{2(j-1)} * s * sqrt((2j)(2j-1)) / (2j); odd entries stay 0.
    double c = std::pow(1.0 - s * s, 0.25);
    v[0] = c;
    for (int j = 1; 2 * j <= cutoff; ++j) {
        double tj = 2.0 * j;
        c *= s * std::sqrt(tj * (tj - 1.0)) / tj;
        v[2 * j] = c;
    }
    if (strict && truncation_loss(v) > max_loss)
        throw std::invalid_argument("smsv_state: truncation loss exceeds bound");
    return v;
}

FockVector even_cat_state(double alpha, int cutoff) {
    FockVector plus = coherent_state(alpha, cutoff);
    FockVector v(cutoff);
    for (int j = 0; j <= cutoff; j += 2) v[j] = plus[j];
    return v.normalized();
}

MultimodeState tmsv_state(double chi, int cutoff, bool strict, double max_loss) {
    if (chi < 0.0 || chi >= 1.0)
        throw std::invalid_argument("tmsv_state: squeezing must lie in [0,1)");
    MultimodeState out(2, cutoff);
    double amp = std::sqrt(1.0 - chi * chi);
    for (int k = 0; 2 * k <= cutoff; ++k) {
        if (amp != 0.0) out.add_term({k, k}, amp);
        amp *= chi;
    }
    if (strict && 1.0 - out.norm2() > max_loss)
        throw std::invalid_argument("tmsv_state: truncation loss exceeds bound");
    return out;
}

double state_fidelity(const FockVector& a, const FockVector& b, bool normalize) {
    double na = a.norm2(), nb = b.norm2();
    if (na <= 0.0 || nb <= 0.0)
        throw std::invalid_argument("state_fidelity: zero-norm input");
    if (!normalize && (std::abs(na - 1.0) > 1e-9 || std::abs(nb - 1.0) > 1e-9))
        throw std::invalid_argument("state_fidelity: inputs not normalized");
    int n = std::min(a.cutoff(), b.cutoff());
    cplx ip{0.0, 0.0};
    for (int j = 0; j <= n; ++j) ip += std::conj(a[j]) * b[j];
    return std::norm(ip) / (na * nb);
}

MultimodeState::MultimodeState(int modes, int cutoff)
    : modes_(modes), cutoff_(cutoff) {
    if (modes < 0) throw std::invalid_argument("modes must be >= 0");
    if (cutoff < 0) throw std::invalid_argument("cutoff must be >= 0");
}

void MultimodeState::add_term(const std::vector<int>& occupation, cplx amp) {
    if (static_cast<int>(occupation.size()) != modes_)
        throw std::invalid_argument("occupation tuple has wrong length");
    int total = 0;
    for (int n : occupation) {
        if (n < 0) throw std::invalid_argument("negative occupation");
        total += n;
    }
    if (total > cutoff_)
        throw std::invalid_argument("occupation exceeds total-photon cutoff");
    terms_[occupation] += amp;
}

cplx MultimodeState::amplitude(const std::vector<int>& occupation) const {
    auto it = terms_.find(occupation);
    return it == terms_.end() ? cplx{0.0, 0.0} : it->second;
}

double MultimodeState::norm2() const {
    double s = 0.0;
    for (const auto& [occ, amp] : terms_) s += std::norm(amp);
    return s;
}

void MultimodeState::prune(double threshold) {
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) < threshold)
            it = terms_.erase(it);
        else
            ++it;
    }
}

MultimodeState MultimodeState::scaled(cplx factor) const {
    MultimodeState out(modes_, cutoff_);
    for (const auto& [occ, amp] : terms_) out.terms_[occ] = amp * factor;
    return out;
}

MultimodeState MultimodeState::tensor(const MultimodeState& other) const {
    MultimodeState out(modes_ + other.modes_, cutoff_ + other.cutoff_);
    for (const auto& [occ_a, amp_a] : terms_) {
        for (const auto& [occ_b, amp_b] : other.terms_) {
            std::vector<int> occ = occ_a;
            occ.insert(occ.end(), occ_b.begin(), occ_b.end());
            out.terms_[occ] = amp_a * amp_b;
        }
    }
    return out;
}

MultimodeState MultimodeState::from_fock(const FockVector& v) {
    MultimodeState out(1, v.cutoff());
    for (int j = 0; j <= v.cutoff(); ++j)
        if (v[j] != cplx{0.0, 0.0}) out.add_term({j}, v[j]);
    return out;
}

MultimodeState MultimodeState::vacuum(int modes, int cutoff) {
    MultimodeState out(modes, cutoff);
    out.add_term(std::vector<int>(modes, 0), cplx{1.0, 0.0});
    return out;
}

FockVector MultimodeState::to_fock_vector() const {
    if (modes_ != 1)
        throw std::invalid_argument("to_fock_vector requires a 1-mode state");
    FockVector v(cutoff_);
    for (const auto& [occ, amp] : terms_) v[occ[0]] = amp;
    return v;
}

cplx inner_product(const MultimodeState& a, const MultimodeState& b) {
    if (a.modes() != b.modes())
        throw std::invalid_argument("inner_product: mode count mismatch");
    cplx s{0.0, 0.0};
    for (const auto& [occ, amp] : a.terms()) {
        cplx bo = b.amplitude(occ);
        if (bo != cplx{0.0, 0.0}) s += std::conj(amp) * bo;
    }
    return s;
}

namespace {

void enumerate_basis(const std::vector<int>& dims, int total_cap, int mode,
                     int used, std::vector<int>& current,
                     std::vector<std::vector<int>>& out) {
    if (mode == static_cast<int>(dims.size())) {
        out.push_back(current);
        return;
    }
    int max_here = dims[mode] - 1;
    if (total_cap >= 0) max_here = std::min(max_here, total_cap - used);
    for (int n = 0; n <= max_here; ++n) {
        current[mode] = n;
        enumerate_basis(dims, total_cap, mode + 1, used + n, current, out);
    }
    current[mode] = 0;
}

constexpr int kMaxBasisStates = 20000;

}  // namespace

DensityOperator::DensityOperator(std::vector<int> dims, int total_cap)
    : dims_(std::move(dims)), total_cap_(total_cap) {
    if (dims_.empty()) throw std::invalid_argument("DensityOperator needs >= 1 mode");
    for (int d : dims_)
        if (d < 1) throw std::invalid_argument("mode dimension must be >= 1");
    std::vector<int> current(dims_.size(), 0);
    enumerate_basis(dims_, total_cap_, 0, 0, current, basis_);
    if (static_cast<int>(basis_.size()) > kMaxBasisStates)
        throw guard_error("DensityOperator basis exceeds " +
                          std::to_string(kMaxBasisStates) + " states");
    for (int i = 0; i < static_cast<int>(basis_.size()); ++i) index_[basis_[i]] = i;
    mat_ = Eigen::MatrixXcd::Zero(basis_.size(), basis_.size());
}

DensityOperator DensityOperator::from_pure(const MultimodeState& state) {
    std::vector<int> dims(state.modes(), 1);
    for (const auto& [occ, amp] : state.terms())
        for (int m = 0; m < state.modes(); ++m)
            dims[m] = std::max(dims[m], occ[m] + 1);
    DensityOperator rho(dims);
    for (const auto& [occ1, amp1] : state.terms()) {
        int i = rho.index_of(occ1);
        for (const auto& [occ2, amp2] : state.terms()) {
            int j = rho.index_of(occ2);
            rho.mat_(i, j) = amp1 * std::conj(amp2);
        }
    }
    return rho;
}

DensityOperator DensityOperator::from_pure(const FockVector& v) {
    return from_pure(MultimodeState::from_fock(v));
}

int DensityOperator::index_of(const std::vector<int>& occupation) const {
    auto it = index_.find(occupation);
    return it == index_.end() ? -1 : it->second;
}

double DensityOperator::trace() const { return mat_.trace().real(); }

double DensityOperator::purity() const {
    double t = trace();
    if (t <= 0.0) throw std::invalid_argument("purity of non-positive-trace state");
    double t2 = (mat_ * mat_).trace().real();
    return t2 / (t * t);
}

double DensityOperator::hermiticity_error() const {
    return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityOperator::min_eigenvalue() const {
    Eigen::MatrixXcd h = 0.5 * (mat_ + mat_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

DensityOperator DensityOperator::partial_trace_keep(const std::vector<int>& keep) const {
    std::vector<int> kept_dims;
    for (int m : keep) {
        if (m < 0 || m >= modes()) throw std::invalid_argument("bad mode index");
        kept_dims.push_back(dims_[m]);
    }
    DensityOperator out(kept_dims, total_cap_);
    const int n = basis_size();
    std::vector<int> ko1(keep.size()), ko2(keep.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (mat_(i, j) == cplx{0.0, 0.0}) continue;
            // Contributes only when the traced-out modes agree.
            bool same = true;
            for (int m = 0; m < modes() && same; ++m) {
                if (std::find(keep.begin(), keep.end(), m) == keep.end())
                    same = basis_[i][m] == basis_[j][m];
            }
            if (!same) continue;
            for (size_t k = 0; k < keep.size(); ++k) {
                ko1[k] = basis_[i][keep[k]];
                ko2[k] = basis_[j][keep[k]];
            }
            int oi = out.index_of(ko1), oj = out.index_of(ko2);
            if (oi >= 0 && oj >= 0) out.mat_(oi, oj) += mat_(i, j);
        }
    }
    return out;
}

DensityOperator DensityOperator::partial_transpose(int mode) const {
    if (mode < 0 || mode >= modes()) throw std::invalid_argument("bad mode index");
    if (total_cap_ >= 0)
        throw std::invalid_argument("partial transpose needs an uncapped product basis");
    DensityOperator out(dims_, total_cap_);
    const int n = basis_size();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (mat_(i, j) == cplx{0.0, 0.0}) continue;
            std::vector<int> oi = basis_[i], oj = basis_[j];
            std::swap(oi[mode], oj[mode]);
            out.mat_(out.index_of(oi), out.index_of(oj)) = mat_(i, j);
        }
    }
    return out;
}

double DensityOperator::mean_photon_number(int mode) const {
    double t = trace();
    if (t <= 0.0) throw std::invalid_argument("mean photon number of zero-trace state");
    double s = 0.0;
    for (int i = 0; i < basis_size(); ++i)
        s += basis_[i][mode] * mat_(i, i).real();
    return s / t;
}

double mean_photon_number(const FockVector& v) {
    double n2 = v.norm2();
    if (n2 <= 0.0) throw std::invalid_argument("zero-norm state");
    double s = 0.0;
    for (int j = 0; j <= v.cutoff(); ++j) s += j * std::norm(v[j]);
    return s / n2;
}

double mean_photon_number(const DensityOperator& rho) {
    return rho.mean_photon_number(0);
}

}  // namespace qs
