#include "qs/scissors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qs {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace

void ScissorConfig::validate() const {
    if (n < 1) throw std::invalid_argument("scissor size n must be >= 1");
    if (!(g > 0.0)) throw std::invalid_argument("gain g must be > 0");
    if (m0 < 0 || m0 > n) throw std::invalid_argument("m0 must lie in [0, n]");
}

ScissorOutput nqs_output(const ScissorConfig& config, const FockVector& input) {
    config.validate();
    const int n = config.n;
    const double g = config.g;

    const double prefactor = std::sqrt(factorial(n)) /
                             (std::pow(n + 1.0, 0.5 * n) * std::pow(g * g + 1.0, 0.5 * n));
    FockVector state(n);
    double gj = 1.0;
    for (int j = 0; j <= n; ++j) {
        if (j <= input.cutoff()) state[j] = prefactor * gj * input[j];
        gj *= g;
    }

    ScissorOutput out;
    out.state = state;
    out.success_probability = state.norm2();
    out.p_bp = (n + 1.0) * out.success_probability;
    out.p_sp = out.success_probability / resource_prep_probability(n);
    out.p_xp = std::max(out.p_bp, out.p_sp);
    switch (config.variant) {
        case ScissorVariant::BP: out.variant_probability = out.p_bp; break;
        case ScissorVariant::SP: out.variant_probability = out.success_probability; break;
        case ScissorVariant::SPPrepared: out.variant_probability = out.p_sp; break;
    }
    return out;
}

MultimodeState resource_state(int n) {
    if (n < 1) throw std::invalid_argument("resource_state needs n >= 1");
    MultimodeState out(2, n);
    const double scale = 1.0 / std::pow(n + 1.0, 0.5 * n);
    for (int j = 0; j <= n; ++j) {
        double amp = scale * std::sqrt(factorial(j) * factorial(n - j));
        out.add_term({n - j, j}, (j & 1) ? -amp : amp);
    }
    return out;
}

double resource_prep_probability(int n) {
    if (n < 1) throw std::invalid_argument("resource_prep_probability needs n >= 1");
    double sum = 0.0;
    for (int j = 0; j <= n; ++j) sum += factorial(j) * factorial(n - j);
    double pn = sum / std::pow(n + 1.0, n);
    // Quoted bound P_n < (n+1)!/(n+1)^n.
    if (!(pn < factorial(n + 1) / std::pow(n + 1.0, n) + 1e-12))
        throw std::logic_error("resource preparation probability bound violated");
    return pn;
}

FockVector phase_correction(int n, int m0, const FockVector& state) {
    if (n < 1) throw std::invalid_argument("phase_correction needs n >= 1");
    if (m0 < 0 || m0 > n) throw std::invalid_argument("m0 must lie in [0, n]");
    if (state.cutoff() > n)
        throw std::invalid_argument("phase_correction: state cutoff exceeds n");
    FockVector out = state;
    for (int j = 0; j <= state.cutoff(); ++j) {
        double phase = 2.0 * std::numbers::pi * j * m0 / (n + 1.0);
        out[j] *= std::polar(1.0, phase);
    }
    return out;
}

ScissorOutput x10_output(int n, double g, const FockVector& input) {
    if (n < 1) throw std::invalid_argument("x10_output needs n >= 1");
    if (!(g > 0.0)) throw std::invalid_argument("gain g must be > 0");

    const double nf = factorial(n);
    const double scale = nf / std::pow(g * g + 1.0, 0.5 * n);
    FockVector state(n);
    double gj = 1.0, nj = 1.0;
    for (int j = 0; j <= n; ++j) {
        if (j <= input.cutoff())
            state[j] = scale * gj * input[j] / (factorial(n - j) * nj);
        gj *= g;
        nj *= n;
    }

    ScissorOutput out;
    out.state = state;
    out.success_probability = state.norm2();
    out.variant_probability = out.success_probability;
    out.p_bp = out.success_probability;
    out.p_sp = out.success_probability;
    out.p_xp = out.success_probability;
    return out;
}

double truncation_fidelity(int n, double g, const FockVector& input) {
    if (n < 1) throw std::invalid_argument("truncation_fidelity needs n >= 1");
    if (!(g > 0.0)) throw std::invalid_argument("gain g must be > 0");

    const int cutoff = input.cutoff();
    const double log_g = std::log(g);
    double numer = 0.0, denom = 0.0;
    double last = 0.0, prev = 0.0;
    int last_j = -1, prev_j = -1;
    for (int j = 0; j <= cutoff; ++j) {
        double w = std::norm(input[j]);
        // g^{2j} w in log space; keeps empty slots at zero even when the
        // bare g^{2j} factor would overflow.
        double term = w > 0.0 ? std::exp(2.0 * j * log_g + std::log(w)) : 0.0;
        if (term > 0.0) {
            prev = last;
            prev_j = last_j;
            last = term;
            last_j = j;
        }
        denom += term;
        if (j <= n) numer += term;
    }
    if (denom <= 0.0)
        throw std::invalid_argument("truncation_fidelity: zero-weight input");
    if (cutoff <= n) return numer / denom;  // nothing truncated, F = 1 exactly

    // The denominator is an infinite series evaluated at the input cutoff;
    // refuse to report a fidelity when its tail has clearly not converged.
    if (prev_j >= 0 && last > 0.0) {
        double step_ratio = last / prev;  // growth per populated step
        if (step_ratio >= 1.0)
            throw std::invalid_argument(
                "truncation_fidelity: series diverging at the cutoff; "
                "increase the input cutoff or reduce g");
        double tail = last * step_ratio / (1.0 - step_ratio);
        if (tail > 1e-10 * denom)
            throw std::invalid_argument(
                "truncation_fidelity: denominator tail above 1e-10; "
                "increase the input cutoff");
    }
    return numer / denom;
}

double x10_fidelity(int n, double g, const FockVector& input) {
    // Reuses the convergence guard of truncation_fidelity on the same series.
    (void)truncation_fidelity(n, g, input);
    FockVector ideal(input.cutoff());
    double gj = 1.0;
    for (int j = 0; j <= input.cutoff(); ++j) {
        ideal[j] = gj * input[j];
        gj *= g;
    }
    FockVector x10 = x10_output(n, g, input).state;
    return state_fidelity(ideal.normalized(), x10.normalized());
}

TeleportResult teleport_fidelity_cat(double alpha, int n) {
    if (n < 1) throw std::invalid_argument("teleport_fidelity_cat needs n >= 1");
    if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
    int cutoff = std::max(recommended_cutoff(alpha * alpha) * 2 + 8, n + 8);
    FockVector cat = even_cat_state(alpha, cutoff);
    double fidelity = truncation_fidelity(n, 1.0, cat);
    ScissorConfig config{n, 1.0, ScissorVariant::BP, 0};
    ScissorOutput out = nqs_output(config, cat);
    return {fidelity, out.p_xp};
}

}  // namespace qs
