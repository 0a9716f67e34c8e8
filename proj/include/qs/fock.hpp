#pragma once

#include <complex>
#include <map>
#include <vector>

#include <Eigen/Dense>

namespace qs {

using cplx = std::complex<double>;

/// Guard/dimension violations (Hilbert-space caps, permanent size limits).
/// Kept distinct from std::invalid_argument so the CLI can map them to a
/// dedicated exit code.
struct guard_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Single-mode pure state as amplitudes over photon numbers 0..cutoff.
/// States may be unnormalized; the squared norm then carries physical
/// meaning (e.g. a heralding probability).
struct FockVector {
    std::vector<cplx> amplitudes;

    FockVector() = default;
    explicit FockVector(int cutoff) : amplitudes(cutoff + 1, cplx{0.0, 0.0}) {}
    explicit FockVector(std::vector<cplx> amps) : amplitudes(std::move(amps)) {}

    int cutoff() const { return static_cast<int>(amplitudes.size()) - 1; }
    cplx& operator[](int j) { return amplitudes[j]; }
    const cplx& operator[](int j) const { return amplitudes[j]; }

    double norm2() const;
    bool is_normalized(double tol = 1e-12) const;
    FockVector normalized() const;  // throws on zero norm
};

/// 1 - sum |c_j|^2, the probability weight lost to the cutoff when the
/// untruncated state is normalized.
double truncation_loss(const FockVector& v);

/// Smallest cutoff recommended for a state with mean photon number lambda:
/// ceil(lambda + 6 sqrt(lambda)).
int recommended_cutoff(double mean_photons);

/// Coherent state |alpha>: c_j = e^{-|alpha|^2/2} alpha^j / sqrt(j!).
/// In strict mode, rejects cutoffs whose truncation loss exceeds max_loss.
FockVector coherent_state(cplx alpha, int cutoff, bool strict = false,
                          double max_loss = 1e-6);

/// Single-mode squeezed vacuum, s in [0,1). Only even photon numbers are
/// populated: c_{2j} = (1-s^2)^{1/4} sqrt((2j)!) s^j / (2^j j!); odd
/// entries are exactly zero.
FockVector smsv_state(double s, int cutoff, bool strict = false,
                      double max_loss = 1e-6);

/// Normalized even cat state |alpha> + |-alpha> (vacuum when alpha = 0).
FockVector even_cat_state(double alpha, int cutoff);

class MultimodeState;

/// Two-mode squeezed vacuum sqrt(1-chi^2) sum_k chi^k |k>|k>, truncated so
/// that every kept term has k <= cutoff/2 photons per mode.
MultimodeState tmsv_state(double chi, int cutoff, bool strict = false,
                          double max_loss = 1e-6);

/// |<a|b>|^2 for normalized inputs. With normalize=true, inputs are
/// normalized internally; zero-norm inputs are always rejected.
double state_fidelity(const FockVector& a, const FockVector& b,
                      bool normalize = false);

/// Sparse pure state of an m-mode system. Keys are occupation tuples
/// (n_1..n_m); `cutoff` bounds the total photon number of every key.
class MultimodeState {
  public:
    using Terms = std::map<std::vector<int>, cplx>;

    MultimodeState(int modes, int cutoff);

    int modes() const { return modes_; }
    int cutoff() const { return cutoff_; }
    const Terms& terms() const { return terms_; }

    /// Accumulates amp onto the given occupation tuple.
    void add_term(const std::vector<int>& occupation, cplx amp);
    cplx amplitude(const std::vector<int>& occupation) const;

    double norm2() const;
    /// Drops terms below the threshold in magnitude.
    void prune(double threshold = 1e-15);

    MultimodeState scaled(cplx factor) const;

    /// Tensor product, this ⊗ other (mode indices of `other` shifted up).
    MultimodeState tensor(const MultimodeState& other) const;

    static MultimodeState from_fock(const FockVector& v);
    static MultimodeState vacuum(int modes, int cutoff);

    /// Single-mode view of a 1-mode state.
    FockVector to_fock_vector() const;

  private:
    int modes_;
    int cutoff_;
    Terms terms_;
};

/// Inner product <a|b> over matching occupation tuples.
cplx inner_product(const MultimodeState& a, const MultimodeState& b);

/// Truncated mixed state over an explicit occupation-tuple basis. Intended
/// for one or two modes; more modes are used internally by the noisy
/// network simulations, where `total_cap` bounds the summed photon number
/// to keep the basis small.
class DensityOperator {
  public:
    /// dims[i] = local dimension of mode i (cutoff_i + 1); total_cap < 0
    /// means no cap on the total photon number.
    explicit DensityOperator(std::vector<int> dims, int total_cap = -1);

    static DensityOperator from_pure(const MultimodeState& state);
    static DensityOperator from_pure(const FockVector& v);

    int modes() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }
    int total_cap() const { return total_cap_; }
    int basis_size() const { return static_cast<int>(basis_.size()); }
    const std::vector<std::vector<int>>& basis() const { return basis_; }
    /// Row/column of an occupation tuple, or -1 if outside the basis.
    int index_of(const std::vector<int>& occupation) const;

    Eigen::MatrixXcd& matrix() { return mat_; }
    const Eigen::MatrixXcd& matrix() const { return mat_; }

    double trace() const;
    /// Tr(rho^2)/Tr(rho)^2; 1 for pure states.
    double purity() const;
    double hermiticity_error() const;
    /// Most negative eigenvalue (0 if none); uses the Hermitian part.
    double min_eigenvalue() const;

    /// Keeps the listed modes, traces out the rest.
    DensityOperator partial_trace_keep(const std::vector<int>& keep) const;
    /// Partial transpose on the given mode (two-mode use).
    DensityOperator partial_transpose(int mode) const;

    /// <n_mode> on the trace-normalized state.
    double mean_photon_number(int mode) const;

  private:
    std::vector<int> dims_;
    int total_cap_;
    std::vector<std::vector<int>> basis_;
    std::map<std::vector<int>, int> index_;
    Eigen::MatrixXcd mat_;
};

/// Mean photon number of a normalized single-mode pure state.
double mean_photon_number(const FockVector& v);
/// Mean photon number of mode 0 of a density operator (trace-normalized).
double mean_photon_number(const DensityOperator& rho);

}  // namespace qs
