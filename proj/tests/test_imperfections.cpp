#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qs/imperfections.hpp"
#include "qs/interferometer.hpp"
#include "oracles.hpp"

using namespace qs;

namespace {

const DeviceProfile kPaperProfile{0.7, 1e-8, 0.7};

}  // namespace

TEST_CASE("thermal mean calibration") {
    CHECK(calibrate_thermal_mean(0.0) == 0.0);
    for (double cd : {1e-8, 1e-4, 0.01}) {
        double nbar = calibrate_thermal_mean(cd);
        double back = nbar / ((1.0 + nbar) * (1.0 + nbar));
        CHECK(std::abs(back - cd) < 1e-14 * cd + 1e-20);
    }
}

TEST_CASE("detector click probabilities") {
    DeviceProfile ideal = DeviceProfile::ideal();
    CHECK(detector_click_probability(ideal, 1, 1) == doctest::Approx(1.0));
    CHECK(detector_click_probability(ideal, 1, 0) == 0.0);

    DeviceProfile dark{1.0, 1e-8, 1.0};
    CHECK(detector_click_probability(dark, 1, 0) ==
          doctest::Approx(1e-8).epsilon(1e-12));

    // Binomial oracle at tau_d = 0.7 (dark counts shift it only at O(C_d)).
    DeviceProfile lossy{0.7, 1e-8, 1.0};
    CHECK(std::abs(detector_click_probability(lossy, 1, 1) -
                   oracles::binomial_detection(1, 1, 0.7)) < 1e-7);
    CHECK(std::abs(detector_click_probability(lossy, 2, 3) -
                   oracles::binomial_detection(2, 3, 0.7)) < 1e-7);
}

TEST_CASE("povm completeness") {
    for (const auto& profile :
         {DeviceProfile::ideal(), kPaperProfile, DeviceProfile{0.4, 1e-3, 1.0}}) {
        for (int cutoff : {4, 9}) {
            Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(cutoff + 1, cutoff + 1);
            for (int c = 0; c <= cutoff + 4; ++c)
                sum += noisy_detector_povm(profile, c, cutoff);
            CHECK((sum - Eigen::MatrixXcd::Identity(cutoff + 1, cutoff + 1))
                      .cwiseAbs()
                      .maxCoeff() < 1e-9);
        }
    }
}

TEST_CASE("noisy resource states") {
    auto pure = noisy_resource(DeviceProfile::ideal(), ScissorVariant::BP, 2);
    CHECK(pure.matrix()(2, 2).real() == doctest::Approx(1.0));

    DeviceProfile p{1.0, 0.0, 0.7};
    auto one = noisy_resource(p, ScissorVariant::BP, 1);
    CHECK(one.matrix()(0, 0).real() == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(one.matrix()(1, 1).real() == doctest::Approx(0.7).epsilon(1e-14));

    // Kraus-channel oracle for the n = 2 binomial mixture.
    auto two = noisy_resource(p, ScissorVariant::BP, 2);
    DensityOperator fock2({3}, -1);
    fock2.matrix()(2, 2) = 1.0;
    auto via_kraus = apply_loss(LossChannel(0.7), fock2, 0);
    for (int k = 0; k <= 2; ++k)
        CHECK(two.matrix()(k, k).real() ==
              doctest::Approx(via_kraus.matrix()(k, k).real()).epsilon(1e-12));
    CHECK(two.matrix()(0, 0).real() == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(two.matrix()(1, 1).real() == doctest::Approx(0.42).epsilon(1e-12));
    CHECK(two.matrix()(2, 2).real() == doctest::Approx(0.49).epsilon(1e-12));

    // SP: independent singles.
    auto sp = noisy_resource(p, ScissorVariant::SP, 2);
    CHECK(sp.modes() == 2);
    CHECK(sp.matrix()(sp.index_of({1, 1}), sp.index_of({1, 1})).real() ==
          doctest::Approx(0.49).epsilon(1e-12));
    CHECK(sp.trace() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ideal profile reduces to the closed form") {
    FockVector in = coherent_state(0.3, 6);
    for (int n : {1, 2}) {
        for (double g : {0.8, 1.7}) {
            ScissorConfig config{n, g, ScissorVariant::BP, 0};
            auto sim = simulate_noisy_nqs(DeviceProfile::ideal(), config, in);
            auto closed = nqs_output(config, in);
            // All n+1 heralding ports accepted: probability is P_BP.
            CHECK(std::abs(sim.success_probability - closed.p_bp) < 1e-9);
            CHECK(sim.fidelity_vs_ideal == doctest::Approx(1.0).epsilon(1e-9));
            for (int a = 0; a <= n; ++a)
                for (int b = 0; b <= n; ++b) {
                    cplx expected = (n + 1.0) * closed.state[a] *
                                    std::conj(closed.state[b]);
                    CHECK(std::abs(sim.output.matrix()(a, b) - expected) < 1e-9);
                }

            ScissorConfig sp_config{n, g, ScissorVariant::SP, 0};
            auto sp = simulate_noisy_nqs(DeviceProfile::ideal(), sp_config, in);
            CHECK(std::abs(sp.success_probability - closed.success_probability) <
                  1e-9);
            CHECK(sp.fidelity_vs_ideal == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("success probability keeps the n+1 enhancement under noise") {
    FockVector in = coherent_state(0.3, 5);
    for (int n : {1, 2}) {
        ScissorConfig config{n, 1.2, ScissorVariant::BP, 0};
        auto dist = noisy_bp_click_distribution(kPaperProfile, config, in, 1);
        // Every heralding pattern (single vacuum port) has equal probability.
        std::vector<double> herald_probs;
        for (int m0 = 0; m0 <= n; ++m0) {
            std::vector<int> clicks(n + 1, 1);
            clicks[m0] = 0;
            herald_probs.push_back(dist.at(clicks));
        }
        for (double p : herald_probs)
            CHECK(p == doctest::Approx(herald_probs[0]).epsilon(1e-10));
        auto sim = simulate_noisy_nqs(kPaperProfile, config, in);
        CHECK(sim.success_probability ==
              doctest::Approx((n + 1) * herald_probs[0]).epsilon(1e-9));
    }
}

TEST_CASE("click patterns sum to unity without post-selection") {
    FockVector in = coherent_state(0.3, 8);  // truncation loss ~ 1e-14
    ScissorConfig config{1, 1.0, ScissorVariant::BP, 0};
    for (const auto& profile : {DeviceProfile::ideal(), kPaperProfile}) {
        auto dist = noisy_bp_click_distribution(profile, config, in, 10);
        double total = 0.0;
        for (const auto& [clicks, p] : dist) {
            CHECK(p >= -1e-12);
            total += p;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("noisy BP keeps improving with n, noisy SP collapses") {
    FockVector in = coherent_state(0.3, 6);
    bool sp_violated = false;
    for (double g : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        auto bp1 = simulate_noisy_nqs(kPaperProfile, {1, g, ScissorVariant::BP}, in);
        auto bp2 = simulate_noisy_nqs(kPaperProfile, {2, g, ScissorVariant::BP}, in);
        CHECK(bp2.fidelity_vs_ideal >= bp1.fidelity_vs_ideal - 1e-9);

        auto sp1 = simulate_noisy_nqs(kPaperProfile, {1, g, ScissorVariant::SP}, in);
        auto sp2 = simulate_noisy_nqs(kPaperProfile, {2, g, ScissorVariant::SP}, in);
        if (sp2.fidelity_vs_ideal < sp1.fidelity_vs_ideal) sp_violated = true;
    }
    CHECK(sp_violated);
}

TEST_CASE("monotone damping in each imperfection knob") {
    FockVector in = coherent_state(0.3, 5);
    ScissorConfig config{2, 1.5, ScissorVariant::BP, 0};
    auto fidelity = [&](DeviceProfile p) {
        return simulate_noisy_nqs(p, config, in).fidelity_vs_ideal;
    };
    // Worse detectors.
    CHECK(fidelity({0.9, 1e-8, 0.9}) >= fidelity({0.6, 1e-8, 0.9}) - 1e-10);
    // Worse resource.
    CHECK(fidelity({0.9, 1e-8, 0.9}) >= fidelity({0.9, 1e-8, 0.6}) - 1e-10);
    // Fewer dark counts help.
    CHECK(fidelity({0.7, 1e-10, 0.7}) >= fidelity({0.7, 1e-3, 0.7}) - 1e-10);
}

TEST_CASE("noisy relay reduces to the closed form for an ideal device") {
    RelayConfig relay = RelayConfig::middle(1, 2.0, 0.25, 0.25);
    auto sim = simulate_noisy_relay(DeviceProfile::ideal(), relay, 6);
    auto closed = relay_output_rho(relay);
    CHECK(sim.success_probability ==
          doctest::Approx((relay.n + 1) * closed.trace()).epsilon(1e-9));
    for (int k1 = 0; k1 <= 4; ++k1)
        for (int j1 = 0; j1 <= 1; ++j1)
            for (int k2 = 0; k2 <= 4; ++k2)
                for (int j2 = 0; j2 <= 1; ++j2) {
                    int si = sim.output.index_of({k1, j1});
                    int sj = sim.output.index_of({k2, j2});
                    int ci = closed.index_of({k1, j1});
                    int cj = closed.index_of({k2, j2});
                    cplx expected = ci >= 0 && cj >= 0
                                        ? 2.0 * closed.matrix()(ci, cj)
                                        : cplx{0.0, 0.0};
                    CHECK(std::abs(sim.output.matrix()(si, sj) - expected) < 1e-9);
                }
}

TEST_CASE("imperfections dampen relay entanglement") {
    RelayConfig relay = RelayConfig::middle(1, 4.0, 0.25, 0.05);
    auto ideal = simulate_noisy_relay(DeviceProfile::ideal(), relay);
    auto noisy = simulate_noisy_relay(kPaperProfile, relay);
    double ln_ideal = log_negativity_full(ideal.output);
    double ln_noisy = log_negativity_full(noisy.output);
    CHECK(ln_noisy < ln_ideal);
    CHECK(ln_noisy > 0.0);  // entanglement survives at eta = 0.05
}

TEST_CASE("guards") {
    FockVector in = coherent_state(0.3, 4);
    CHECK_THROWS_AS(simulate_noisy_nqs(kPaperProfile, {4, 1.0}, in), guard_error);
    CHECK_THROWS_AS(
        simulate_noisy_relay(kPaperProfile, RelayConfig::middle(3, 1.0, 0.25, 0.5)),
        guard_error);
    DeviceProfile bad{0.7, 0.8, 0.7};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
