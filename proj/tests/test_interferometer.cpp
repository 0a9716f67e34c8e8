#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qs/interferometer.hpp"
#include "qs/reference.hpp"
#include "oracles.hpp"

using namespace qs;

namespace {

Eigen::MatrixXcd random_complex_matrix(int n, std::mt19937& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx{dist(rng), dist(rng)};
    return m;
}

ScatteringMatrix random_unitary(int n, std::mt19937& rng) {
    Eigen::MatrixXcd m = random_complex_matrix(n, rng);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    Eigen::MatrixXcd q = qr.householderQ();
    return ScatteringMatrix::from_matrix(q);
}

}  // namespace

TEST_CASE("beam splitter matrix convention") {
    auto b = beam_splitter_matrix(0.5);
    double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(b(0, 0) - cplx{-r, 0.0}) < 1e-15);
    CHECK(std::abs(b(0, 1) - cplx{r, 0.0}) < 1e-15);
    CHECK(std::abs(b(1, 0) - cplx{r, 0.0}) < 1e-15);
    CHECK(std::abs(b(1, 1) - cplx{r, 0.0}) < 1e-15);
    CHECK(b.unitarity_error() < 1e-12);

    // tau = g^2/(1+g^2) at g=1 is a balanced splitter.
    double g = 1.0;
    CHECK(g * g / (1.0 + g * g) == doctest::Approx(0.5));

    CHECK_THROWS_AS(beam_splitter_matrix(0.0), std::invalid_argument);
    CHECK_THROWS_AS(beam_splitter_matrix(1.0), std::invalid_argument);
}

TEST_CASE("splitter action on the bunched resource") {
    // B |n,0> carries amplitudes (-1)^j g^j sqrt(C(n,j)) / (g^2+1)^{n/2}
    // on |j, n-j>, here n = 2, g = 1.
    const int n = 2;
    const double g = 1.0;
    MultimodeState in(2, n);
    in.add_term({n, 0}, {1.0, 0.0});
    auto out = apply_network(beam_splitter_matrix(g * g / (1 + g * g)), in);
    const double denom = std::pow(g * g + 1.0, 0.5 * n);
    const double binom[3] = {1.0, 2.0, 1.0};
    for (int j = 0; j <= n; ++j) {
        cplx expected = std::pow(-g, j) * std::sqrt(binom[j]) / denom;
        CHECK(std::abs(out.amplitude({j, n - j}) - expected) < 1e-12);
    }
}

TEST_CASE("qft matrix") {
    auto f2 = qft_matrix(2);
    double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(f2(0, 0) - cplx{r, 0}) < 1e-15);
    CHECK(std::abs(f2(0, 1) - cplx{r, 0}) < 1e-15);
    CHECK(std::abs(f2(1, 0) - cplx{r, 0}) < 1e-15);
    CHECK(std::abs(f2(1, 1) - cplx{-r, 0}) < 1e-15);

    // Row sums of F3 vanish except in the first row (roots of unity).
    auto f3 = qft_matrix(3);
    for (int j = 0; j < 3; ++j) {
        cplx sum{0.0, 0.0};
        for (int k = 0; k < 3; ++k) sum += f3(j, k);
        cplx expected = j == 0 ? cplx{std::sqrt(3.0), 0.0} : cplx{0.0, 0.0};
        CHECK(std::abs(sum - expected) < 1e-14);
    }

    // F4^dag as displayed: (1/2) [[1,1,1,1],[1,w^-1,w^-2,w^-3],...].
    auto f4 = qft_matrix(4);
    cplx w = std::polar(1.0, -2.0 * std::numbers::pi / 4.0);
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
            CHECK(std::abs(std::conj(f4(k, j)) - 0.5 * std::pow(w, -j * k)) < 1e-14);

    for (int m = 1; m <= 9; ++m) CHECK(qft_matrix(m).unitarity_error() < 1e-12);
}

TEST_CASE("permanent basics") {
    CHECK(std::abs(permanent(Eigen::MatrixXcd::Identity(3, 3)) - cplx{1.0, 0.0}) <
          1e-14);
    for (int n = 1; n <= 8; ++n) {
        Eigen::MatrixXcd ones = Eigen::MatrixXcd::Ones(n, n);
        double fact = 1.0;
        for (int k = 2; k <= n; ++k) fact *= k;
        CHECK(std::abs(permanent(ones) - cplx{fact, 0.0}) < 1e-9 * fact);
    }
    // Omega_{3,1} has permanent (-1)^1 1! 2! = -2.
    CHECK(std::abs(permanent(omega_submatrix(3, 1, 0)) - cplx{-2.0, 0.0}) < 1e-12);

    CHECK_THROWS_AS(permanent(Eigen::MatrixXcd::Identity(21, 21)), guard_error);
    CHECK_THROWS_AS(permanent_naive(Eigen::MatrixXcd::Identity(8, 8)), guard_error);
}

TEST_CASE("permanent cross-check against the naive sum") {
    std::mt19937 rng(11);
    for (int n = 1; n <= 7; ++n) {
        for (int rep = 0; rep < 4; ++rep) {
            Eigen::MatrixXcd m = random_complex_matrix(n, rng);
            cplx a = permanent(m), b = permanent_naive(m);
            CHECK(std::abs(a - b) <= 1e-11 * std::max(1.0, std::abs(b)));
        }
    }
}

TEST_CASE("permanent column scaling") {
    std::mt19937 rng(13);
    std::uniform_int_distribution<int> pick(0, 4);
    for (int rep = 0; rep < 6; ++rep) {
        Eigen::MatrixXcd m = random_complex_matrix(5, rng);
        cplx base = permanent(m);
        cplx s{1.7, -0.4};
        Eigen::MatrixXcd scaled = m;
        scaled.col(pick(rng)) *= s;
        CHECK(std::abs(permanent(scaled) - s * base) < 1e-10 * std::abs(base));
    }
}

TEST_CASE("omega submatrix displays") {
    Eigen::MatrixXcd m20 = omega_submatrix(2, 0, 0);
    CHECK((m20 - Eigen::MatrixXcd::Ones(2, 2)).cwiseAbs().maxCoeff() < 1e-14);

    Eigen::MatrixXcd m21 = omega_submatrix(2, 1, 0);
    cplx w = std::polar(1.0, -2.0 * std::numbers::pi / 3.0);
    CHECK(std::abs(m21(0, 0) - cplx{1.0, 0.0}) < 1e-14);
    CHECK(std::abs(m21(0, 1) - w) < 1e-14);
    CHECK(std::abs(m21(1, 0) - cplx{1.0, 0.0}) < 1e-14);
    CHECK(std::abs(m21(1, 1) - w * w) < 1e-14);

    CHECK_THROWS_AS(omega_submatrix(2, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS(omega_submatrix(2, 0, 3), std::invalid_argument);
}

TEST_CASE("closed-form permanent identity") {
    // Per(Omega_{n,j,m0}) = w^{j m0} (-1)^j j! (n-j)! for all n <= 8.
    for (int n = 1; n <= 8; ++n) {
        cplx w = std::polar(1.0, -2.0 * std::numbers::pi / (n + 1.0));
        for (int j = 0; j <= n; ++j) {
            double fact = 1.0;
            for (int k = 2; k <= j; ++k) fact *= k;
            for (int k = 2; k <= n - j; ++k) fact *= k;
            for (int m0 = 0; m0 <= n; ++m0) {
                cplx expected = std::pow(w, j * m0) * fact * ((j & 1) ? -1.0 : 1.0);
                cplx got = permanent(omega_submatrix(n, j, m0));
                CHECK(std::abs(got - expected) < 1e-9 * std::abs(expected));
            }
        }
    }
}

TEST_CASE("roots of unity sums match (-1)^j") {
    for (int n = 1; n <= 8; ++n)
        for (int j = 0; j <= n; ++j) {
            cplx expected{(j & 1) ? -1.0 : 1.0, 0.0};
            CHECK(std::abs(oracles::roots_of_unity_sum(n, j) - expected) < 1e-10);
        }
}

TEST_CASE("scatter amplitude") {
    auto f2 = qft_matrix(2);
    CHECK(std::abs(scatter_amplitude(f2, {1, 0}, {0, 1}) -
                   cplx{1.0 / std::sqrt(2.0), 0.0}) < 1e-14);
    // Photon-number mismatch is exactly zero, not an error.
    CHECK(scatter_amplitude(f2, {1, 0}, {1, 1}) == cplx{0.0, 0.0});

    // QFT heralding amplitude (-1)^j sqrt(j!(n-j)!)/(n+1)^{n/2}.
    for (int n = 1; n <= 6; ++n) {
        auto f = qft_matrix(n + 1);
        for (int j = 0; j <= n; ++j) {
            std::vector<int> in(n + 1, 0), out(n + 1, 1);
            in[0] = n - j;
            in[1] = j;
            out[0] = 0;
            double fact = 1.0;
            for (int k = 2; k <= j; ++k) fact *= k;
            for (int k = 2; k <= n - j; ++k) fact *= k;
            cplx expected = ((j & 1) ? -1.0 : 1.0) * std::sqrt(fact) /
                            std::pow(n + 1.0, 0.5 * n);
            CHECK(std::abs(scatter_amplitude(f, in, out) - expected) < 1e-12);
        }
    }
}

TEST_CASE("amplitude unitarity over output tuples") {
    std::mt19937 rng(17);
    for (int m = 2; m <= 5; ++m) {
        auto u = random_unitary(m, rng);
        std::uniform_int_distribution<int> photon(0, 2);
        std::vector<int> in(m, 0);
        int total = 0;
        for (int i = 0; i < m; ++i) {
            in[i] = photon(rng);
            total += in[i];
        }
        if (total > 6 || total == 0) {
            in.assign(m, 0);
            in[0] = 2;
            in[m - 1] = 1;
        }
        MultimodeState s(m, 12);
        s.add_term(in, {1.0, 0.0});
        auto out = apply_network(u, s);
        CHECK(std::abs(out.norm2() - 1.0) < 1e-9);
    }
}

TEST_CASE("apply_network basics") {
    MultimodeState s(2, 3);
    s.add_term({1, 0}, {1.0, 0.0});
    auto id = ScatteringMatrix::from_matrix(Eigen::MatrixXcd::Identity(2, 2));
    auto same = apply_network(id, s);
    CHECK(std::abs(same.amplitude({1, 0}) - cplx{1.0, 0.0}) < 1e-15);
    CHECK(same.terms().size() == 1);

    // B(1/2) sends |1,0> to (-|1,0> + |0,1>)/sqrt(2).
    auto b = beam_splitter_matrix(0.5);
    auto out = apply_network(b, s);
    double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(out.amplitude({1, 0}) - cplx{-r, 0.0}) < 1e-14);
    CHECK(std::abs(out.amplitude({0, 1}) - cplx{r, 0.0}) < 1e-14);

    MultimodeState bad(3, 3);
    bad.add_term({1, 0, 0}, {1.0, 0.0});
    CHECK_THROWS_AS(apply_network(b, bad), std::invalid_argument);
}

TEST_CASE("postselect") {
    MultimodeState s(1, 2);
    s.add_term({1}, {1.0, 0.0});
    auto full = postselect(s, {{0}, {1}});
    CHECK(full.probability == doctest::Approx(1.0));
    CHECK(full.kept.modes() == 0);
    CHECK(std::abs(full.kept.amplitude({}) - cplx{1.0, 0.0}) < 1e-15);

    MultimodeState bell(2, 2);
    double r = 1.0 / std::sqrt(2.0);
    bell.add_term({1, 0}, {r, 0.0});
    bell.add_term({0, 1}, {r, 0.0});
    auto half = postselect(bell, {{0}, {1}});
    CHECK(half.probability == doctest::Approx(0.5).epsilon(1e-12));

    auto none = postselect(bell, {{0}, {2}});
    CHECK(none.probability == 0.0);
    CHECK(none.kept.terms().empty());

    CHECK_THROWS_AS(postselect(bell, {{0, 0}, {1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(postselect(bell, {{5}, {1}}), std::invalid_argument);
}

TEST_CASE("1-QSBP end to end on vacuum heralds with probability 1/4") {
    // Brute-force circuit, n = 1, g = 1, vacuum input.
    FockVector vac = coherent_state(0.0, 2);
    auto result = qs::reference::bp_circuit(1, 1.0, vac);
    CHECK(result.probability == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::abs(result.state[0] - cplx{0.5, 0.0}) < 1e-12);
}

TEST_CASE("legacy scattering equivalence") {
    auto report = legacy_equivalence_check();
    CHECK(report.f2_deviation < 1e-12);
    CHECK(report.f4_deviation < 1e-12);
    CHECK(report.max_deviation == std::max(report.f2_deviation, report.f4_deviation));
    // Exact constructions agree to representation noise, not just 1e-3.
    CHECK(report.max_deviation < 1e-14);
}
