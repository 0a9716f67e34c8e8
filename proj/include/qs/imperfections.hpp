#pragma once

#include "qs/channels.hpp"
#include "qs/fock.hpp"
#include "qs/scissors.hpp"

namespace qs {

/// Detector efficiency, single-photon dark-count probability and resource
/// transmissivity. The ideal profile is (1, 0, 1).
struct DeviceProfile {
    double tau_d = 1.0;
    double dark_count = 0.0;
    double tau_r = 1.0;

    void validate() const;
    bool is_ideal() const;
    static DeviceProfile ideal() { return {}; }
};

/// Thermal mean photon number nbar solved (bisection) so that the noisy
/// detector clicks "1" on vacuum with probability exactly dark_count.
double calibrate_thermal_mean(double dark_count);

/// P(click = c | j photons incident): binomial detection at tau_d plus
/// calibrated thermal dark counts.
double detector_click_probability(const DeviceProfile& profile, int click_count,
                                  int photons);

/// Diagonal POVM element for observing click_count photons, on a mode
/// truncated at `cutoff`. Elements over all counts sum to identity.
Eigen::MatrixXcd noisy_detector_povm(const DeviceProfile& profile, int click_count,
                                     int cutoff);

/// Resource state after preparation loss tau_r: a binomial mixture of |n>
/// for BP (one mode), or n independently degraded single photons for SP
/// (n modes).
DensityOperator noisy_resource(const DeviceProfile& profile, ScissorVariant variant,
                               int n);

struct NoisySimResult {
    DensityOperator output;      // kept mode(s), unnormalized
    double success_probability;  // trace of `output`
    double fidelity_vs_ideal;    // vs the normalized closed form; NaN for
                                 // mixed inputs and relay outputs
};

/// Full (n+2)-mode density-matrix run of the noisy scissors. BP accepts
/// all n+1 heralding ports with phase correction (so the ideal profile
/// reproduces (n+1) x the closed-form projector output); SP is simulated
/// without resource preparation on its single heralding pattern.
NoisySimResult simulate_noisy_nqs(const DeviceProfile& profile,
                                  const ScissorConfig& config,
                                  const FockVector& input);
NoisySimResult simulate_noisy_nqs(const DeviceProfile& profile,
                                  const ScissorConfig& config,
                                  const DensityOperator& input);

/// TMSV through channel losses into a noisy BP relay; output holds the
/// two kept modes (Alice, Bob). flying_cutoff < 0 picks a cutoff from the
/// TMSV tail automatically.
NoisySimResult simulate_noisy_relay(const DeviceProfile& profile,
                                    const RelayConfig& relay,
                                    int flying_cutoff = -1);

/// Joint click statistics of the BP heralding detectors without any
/// post-selection: probability of every click tuple (c_1..c_{n+1}) with
/// entries up to max_click.
std::map<std::vector<int>, double> noisy_bp_click_distribution(
    const DeviceProfile& profile, const ScissorConfig& config,
    const FockVector& input, int max_click);

}  // namespace qs
