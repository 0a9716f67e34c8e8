// Command-line frontend: reproduces the protocol figures as CSV tables and
// exposes single-point evaluations.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qs/channels.hpp"
#include "qs/fock.hpp"
#include "qs/imperfections.hpp"
#include "qs/interferometer.hpp"
#include "qs/reference.hpp"
#include "qs/scissors.hpp"
#include "qs/sweep.hpp"
#include "qs/version.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitGuard = 3;

struct OutputSink {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    void open(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw std::invalid_argument("cannot open output file: " + path);
        stream = &file;
    }
    std::ostream& out() { return *stream; }
};

std::string join_sizes(const std::vector<int>& sizes) {
    std::string s;
    for (size_t i = 0; i < sizes.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(sizes[i]);
    }
    return s;
}

// Shared fixed parameters of one command invocation.
struct SweepSpec {
    std::string axis;
    qs::SweepRange range;
    std::vector<int> sizes{1, 2, 3, 4, 5, 6};
    std::string protocol = "nqs-bp";
    std::string input_kind = "coherent";
    double alpha = 0.3;
    double squeezing = 0.29;
    double g = 1.0;
    bool g_explicit = false;
    double chi = 0.25;
    double eta = 0.05;
    std::string placement = "middle";
    int cutoff = -1;
    qs::DeviceProfile profile;
    std::string profile_name = "ideal";
    int threads = qs::worker_thread_cap();

    double max_axis(const std::string& name, double fixed) const {
        return axis == name ? range.max : fixed;
    }
};

qs::FockVector make_input(const SweepSpec& spec, double alpha, double s,
                          int cutoff) {
    if (spec.input_kind == "coherent") return qs::coherent_state(alpha, cutoff);
    if (spec.input_kind == "smsv") return qs::smsv_state(s, cutoff);
    if (spec.input_kind == "cat") return qs::even_cat_state(alpha, cutoff);
    throw std::invalid_argument("input must be coherent, smsv or cat");
}

int resolve_cutoff(const SweepSpec& spec) {
    if (spec.cutoff >= 0) return spec.cutoff;
    double gmax = spec.max_axis("g", spec.g);
    double mean = 0.0;
    if (spec.input_kind == "coherent" || spec.input_kind == "cat") {
        double a = spec.max_axis("alpha", spec.alpha);
        double out_amp = gmax * a;
        mean = out_amp * out_amp;
    } else {
        double s = spec.max_axis("s", spec.squeezing);
        double x = gmax * gmax * s;
        if (x >= 1.0)
            throw std::invalid_argument(
                "g^2 s reaches 1 on this grid; no finite cutoff represents the "
                "amplified SMSV, reduce the gain range or set --cutoff");
        mean = x * x / (1.0 - x * x);
    }
    int n_max = *std::max_element(spec.sizes.begin(), spec.sizes.end());
    int rec = qs::recommended_cutoff(mean);
    return std::max({rec + 8, n_max + 4, 12});
}

void emit_header(std::ostream& out, const std::string& command,
                 const SweepSpec& spec, int cutoff) {
    out << "# qscissor " << qs::kVersion << " command=" << command
        << " protocol=" << spec.protocol << " input=" << spec.input_kind
        << " alpha=" << qs::format_csv_double(spec.alpha)
        << " s=" << qs::format_csv_double(spec.squeezing)
        << " g=" << qs::format_csv_double(spec.g)
        << " chi=" << qs::format_csv_double(spec.chi)
        << " eta=" << qs::format_csv_double(spec.eta)
        << " placement=" << spec.placement << " n=" << join_sizes(spec.sizes)
        << " sweep=" << spec.axis << ":" << qs::format_csv_double(spec.range.min)
        << ":" << qs::format_csv_double(spec.range.max) << ":" << spec.range.points
        << ":" << (spec.range.log_scale ? "log" : "lin") << " cutoff=" << cutoff
        << " profile=" << spec.profile_name
        << " tau_d=" << qs::format_csv_double(spec.profile.tau_d)
        << " dark_count=" << qs::format_csv_double(spec.profile.dark_count)
        << " tau_r=" << qs::format_csv_double(spec.profile.tau_r)
        << " threads=" << spec.threads << "\n";
}

std::string amplify_row(const SweepSpec& spec, double axis_value, int n,
                        int cutoff) {
    double g = spec.axis == "g" ? axis_value : spec.g;
    double alpha = spec.axis == "alpha" ? axis_value : spec.alpha;
    double s = spec.axis == "s" ? axis_value : spec.squeezing;
    qs::FockVector input = make_input(spec, alpha, s, cutoff);

    double fidelity, p, p_bp, p_sp, p_xp;
    if (spec.protocol == "x10") {
        fidelity = qs::x10_fidelity(n, g, input);
        auto out = qs::x10_output(n, g, input);
        p = p_bp = p_sp = p_xp = out.success_probability;
    } else {
        fidelity = qs::truncation_fidelity(n, g, input);
        auto out = qs::nqs_output({n, g}, input);
        p = out.success_probability;
        p_bp = out.p_bp;
        p_sp = out.p_sp;
        p_xp = out.p_xp;
    }
    std::ostringstream row;
    row << qs::format_csv_double(axis_value) << "," << n << ","
        << qs::format_csv_double(fidelity) << ","
        << qs::format_csv_double(1.0 - fidelity) << "," << qs::format_csv_double(p)
        << "," << qs::format_csv_double(p_bp) << "," << qs::format_csv_double(p_sp)
        << "," << qs::format_csv_double(p_xp);
    return row.str();
}

void run_amplify_like(const std::string& command, const SweepSpec& spec,
                      OutputSink& sink) {
    if (spec.protocol != "nqs-bp" && spec.protocol != "nqs-sp" &&
        spec.protocol != "x10")
        throw std::invalid_argument("protocol must be nqs-bp, nqs-sp or x10");
    int cutoff = resolve_cutoff(spec);
    emit_header(sink.out(), command, spec, cutoff);
    sink.out() << "axis,n,fidelity,infidelity,P,P_BP,P_SP,P_XP\n";

    auto values = qs::sweep_values(spec.range);
    const int total = static_cast<int>(values.size() * spec.sizes.size());
    std::vector<std::string> rows(total);
    qs::parallel_for(total, spec.threads, [&](int i) {
        int vi = i / static_cast<int>(spec.sizes.size());
        int ni = i % static_cast<int>(spec.sizes.size());
        rows[i] = amplify_row(spec, values[vi], spec.sizes[ni], cutoff);
    });
    for (const auto& row : rows) sink.out() << row << "\n";
}

struct RelayPoint {
    double axis_value = 0.0;
    int n = 0;
    double eta = 0.0;
    double ln_full = 0.0;
    double ln_gauss = 0.0;
    double rci = 0.0;
    double p_loss = 0.0;
};

double relay_gain(const SweepSpec& spec, double eta) {
    if (spec.g_explicit) return spec.g;
    // Default gain rule: counteract loss at the end placement, unit gain
    // in the middle.
    return spec.placement == "end" ? 1.0 / std::sqrt(eta) : 1.0;
}

RelayPoint relay_point(const SweepSpec& spec, double axis_value, int n) {
    double eta = spec.axis == "distance" ? qs::eta_from_distance(axis_value)
                                         : spec.eta;
    double g = spec.axis == "g" ? axis_value : relay_gain(spec, eta);
    double chi = spec.axis == "chi" ? axis_value : spec.chi;

    qs::RelayConfig config = spec.placement == "end"
                                 ? qs::RelayConfig::end(n, g, chi, eta)
                                 : qs::RelayConfig::middle(n, g, chi, eta);
    RelayPoint point;
    point.axis_value = axis_value;
    point.n = n;
    point.eta = eta;
    if (spec.profile.is_ideal()) {
        auto rho = qs::relay_output_rho(config);
        point.ln_full = qs::log_negativity_full(rho);
        auto cm = qs::covariance_from_rho(rho);
        point.ln_gauss = qs::log_negativity_gaussian(cm);
        point.rci = qs::gaussian_rci(cm);
        point.p_loss = qs::relay_success_probability(config);
    } else {
        auto sim = qs::simulate_noisy_relay(spec.profile, config);
        point.ln_full = qs::log_negativity_full(sim.output);
        auto cm = qs::covariance_from_rho(sim.output);
        point.ln_gauss = qs::log_negativity_gaussian(cm);
        point.rci = qs::gaussian_rci(cm);
        // Per-herald probability, comparable to the ideal P_loss column.
        point.p_loss = sim.success_probability / (n + 1.0);
    }
    return point;
}

std::string relay_row(const SweepSpec& spec, const RelayPoint& p) {
    std::ostringstream row;
    double plob = p.eta >= 1.0 ? std::numeric_limits<double>::infinity()
                               : qs::plob_bound(p.eta);
    row << qs::format_csv_double(p.axis_value) << "," << p.n << ","
        << spec.placement << "," << qs::format_csv_double(p.ln_full) << ","
        << qs::format_csv_double(p.ln_gauss) << "," << qs::format_csv_double(p.rci)
        << "," << qs::format_csv_double(p.p_loss) << ","
        << qs::format_csv_double(plob);
    return row.str();
}

void run_relay(const std::string& command, const SweepSpec& spec,
               OutputSink& sink) {
    if (spec.axis != "g" && spec.axis != "distance" && spec.axis != "chi")
        throw std::invalid_argument("relay sweeps over g, distance or chi");
    if (spec.placement != "middle" && spec.placement != "end")
        throw std::invalid_argument("placement must be middle or end");
    if (!spec.profile.is_ideal()) {
        for (int n : spec.sizes)
            if (n > 2)
                throw qs::guard_error(
                    "noisy relay runs support n <= 2: the density-matrix "
                    "simulation cost grows exponentially with n");
    }
    emit_header(sink.out(), command, spec, -1);
    sink.out() << "axis,n,placement,LN_full,LN_gaussian,RCI,P_loss,PLOB";
    if (!spec.profile.is_ideal()) sink.out() << ",tau_d,dark_count,tau_r";
    sink.out() << "\n";

    auto values = qs::sweep_values(spec.range);
    const int total = static_cast<int>(values.size() * spec.sizes.size());
    std::vector<RelayPoint> points(total);
    qs::parallel_for(total, spec.threads, [&](int i) {
        int vi = i / static_cast<int>(spec.sizes.size());
        int ni = i % static_cast<int>(spec.sizes.size());
        points[i] = relay_point(spec, values[vi], spec.sizes[ni]);
    });
    std::string profile_suffix;
    if (!spec.profile.is_ideal())
        profile_suffix = "," + qs::format_csv_double(spec.profile.tau_d) + "," +
                         qs::format_csv_double(spec.profile.dark_count) + "," +
                         qs::format_csv_double(spec.profile.tau_r);
    for (const auto& p : points)
        sink.out() << relay_row(spec, p) << profile_suffix << "\n";

    // Scaling summary for distance sweeps: fitted P_loss exponent in eta
    // over the 1e-3..1e-1 window.
    if (spec.axis == "distance") {
        for (int n : spec.sizes) {
            std::vector<double> etas, probs;
            for (const auto& p : points) {
                if (p.n != n || p.eta < 1e-3 || p.eta > 1e-1) continue;
                etas.push_back(p.eta);
                probs.push_back(p.p_loss);
            }
            if (etas.size() < 3) continue;
            double slope = qs::loglog_slope(etas, probs);
            double expected = spec.placement == "end" ? n : 0.5 * n;
            sink.out() << "# fit n=" << n << " placement=" << spec.placement
                       << " exponent=" << qs::format_csv_double(slope)
                       << " expected=" << qs::format_csv_double(expected) << "\n";
        }
    }
}

std::string noisy_amplify_row(const SweepSpec& spec, double axis_value, int n,
                              int cutoff) {
    if (spec.profile.is_ideal()) return amplify_row(spec, axis_value, n, cutoff);

    double g = spec.axis == "g" ? axis_value : spec.g;
    double alpha = spec.axis == "alpha" ? axis_value : spec.alpha;
    double s = spec.axis == "s" ? axis_value : spec.squeezing;
    qs::FockVector input = make_input(spec, alpha, s, cutoff);

    qs::ScissorVariant variant = spec.protocol == "nqs-sp"
                                     ? qs::ScissorVariant::SP
                                     : qs::ScissorVariant::BP;
    auto sim = qs::simulate_noisy_nqs(spec.profile, {n, g, variant}, input);
    double nan = std::numeric_limits<double>::quiet_NaN();
    double p, p_bp, p_xp;
    if (variant == qs::ScissorVariant::BP) {
        p = sim.success_probability / (n + 1.0);
        p_bp = sim.success_probability;
        p_xp = sim.success_probability;
    } else {
        // SP is simulated without resource preparation: one pattern only.
        p = sim.success_probability;
        p_bp = nan;
        p_xp = nan;
    }
    std::ostringstream row;
    row << qs::format_csv_double(axis_value) << "," << n << ","
        << qs::format_csv_double(sim.fidelity_vs_ideal) << ","
        << qs::format_csv_double(1.0 - sim.fidelity_vs_ideal) << ","
        << qs::format_csv_double(p) << "," << qs::format_csv_double(p_bp) << ","
        << qs::format_csv_double(nan) << "," << qs::format_csv_double(p_xp);
    return row.str();
}

void run_noisy(const SweepSpec& spec, const std::string& task, OutputSink& sink) {
    if (task == "relay") {
        run_relay("noisy", spec, sink);
        return;
    }
    if (spec.protocol == "x10")
        throw std::invalid_argument("noisy runs cover the scissors protocols only");
    if (!spec.profile.is_ideal()) {
        for (int n : spec.sizes)
            if (n > 2)
                throw qs::guard_error(
                    "noisy runs support n <= 2: the density-matrix simulation "
                    "cost grows exponentially with n");
    }
    int cutoff = resolve_cutoff(spec);
    emit_header(sink.out(), "noisy", spec, cutoff);
    sink.out() << "axis,n,fidelity,infidelity,P,P_BP,P_SP,P_XP";
    if (!spec.profile.is_ideal()) sink.out() << ",tau_d,dark_count,tau_r";
    sink.out() << "\n";

    auto values = qs::sweep_values(spec.range);
    const int total = static_cast<int>(values.size() * spec.sizes.size());
    std::vector<std::string> rows(total);
    qs::parallel_for(total, spec.threads, [&](int i) {
        int vi = i / static_cast<int>(spec.sizes.size());
        int ni = i % static_cast<int>(spec.sizes.size());
        rows[i] = noisy_amplify_row(spec, values[vi], spec.sizes[ni], cutoff);
    });
    std::string profile_suffix;
    if (!spec.profile.is_ideal())
        profile_suffix = "," + qs::format_csv_double(spec.profile.tau_d) + "," +
                         qs::format_csv_double(spec.profile.dark_count) + "," +
                         qs::format_csv_double(spec.profile.tau_r);
    for (const auto& row : rows) sink.out() << row << profile_suffix << "\n";
}

int run_selftest(OutputSink& sink) {
    auto& out = sink.out();
    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok, double worst) {
        out << (ok ? "PASS" : "FAIL") << " " << name << " (max deviation "
            << qs::format_csv_double(worst) << ")\n";
        all_ok = all_ok && ok;
    };

    {  // Permanent identity suite.
        double worst = 0.0;
        for (int n = 1; n <= 8; ++n) {
            qs::cplx w = std::polar(1.0, -2.0 * M_PI / (n + 1.0));
            for (int j = 0; j <= n; ++j) {
                double fact = 1.0;
                for (int k = 2; k <= j; ++k) fact *= k;
                for (int k = 2; k <= n - j; ++k) fact *= k;
                for (int m0 = 0; m0 <= n; ++m0) {
                    qs::cplx expected =
                        std::pow(w, j * m0) * fact * ((j & 1) ? -1.0 : 1.0);
                    qs::cplx got = qs::permanent(qs::omega_submatrix(n, j, m0));
                    worst = std::max(worst,
                                     std::abs(got - expected) / std::abs(expected));
                }
            }
        }
        report("permanent-identity n<=8", worst < 1e-9, worst);
    }

    {  // Oracle equivalence of the closed form against both circuits.
        double worst = 0.0;
        qs::FockVector input = qs::coherent_state(0.3, 8);
        for (int n : {1, 2}) {
            for (double g : {0.5, 1.0, 2.0}) {
                auto closed = qs::nqs_output({n, g}, input);
                auto bp = qs::reference::bp_circuit(n, g, input);
                auto sp = qs::reference::sp_circuit(n, g, input);
                worst = std::max(
                    worst, std::abs(bp.probability - closed.success_probability));
                worst = std::max(
                    worst, std::abs(sp.probability - closed.success_probability));
                for (int j = 0; j <= n; ++j) {
                    worst = std::max(worst, std::abs(bp.state[j] - closed.state[j]));
                    worst = std::max(worst, std::abs(sp.state[j] - closed.state[j]));
                }
            }
        }
        report("oracle-equivalence n<=2", worst < 1e-10, worst);
    }

    {  // Legacy scattering equivalence.
        auto legacy = qs::legacy_equivalence_check();
        report("legacy-scattering", legacy.max_deviation < 1e-12,
               legacy.max_deviation);
    }

    out << (all_ok ? "selftest passed" : "selftest FAILED") << "\n";
    return all_ok ? 0 : 1;
}

qs::DeviceProfile load_profile(const std::string& path, std::string& name) {
    if (path.empty() || path == "ideal") {
        name = "ideal";
        return qs::DeviceProfile::ideal();
    }
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open profile file: " + path);
    qs::DeviceProfile profile;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            auto last = s.find_last_not_of(" \t\r");
            s.erase(last == std::string::npos ? 0 : last + 1);
            return s;
        };
        std::string key = trim(line.substr(0, eq));
        double value = std::stod(trim(line.substr(eq + 1)));
        if (key == "tau_d")
            profile.tau_d = value;
        else if (key == "dark_count")
            profile.dark_count = value;
        else if (key == "tau_r")
            profile.tau_r = value;
        else
            throw std::invalid_argument("unknown profile key: " + key);
    }
    profile.validate();
    name = path;
    return profile;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"n-photon quantum scissors tele-amplification toolkit"};
    app.set_config("--config", "", "key = value configuration file");
    app.require_subcommand(1);

    SweepSpec spec;
    std::string sweep_text, out_path, profile_path, task = "amplify";

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--n", spec.sizes, "scissor sizes (repeatable)")
            ->capture_default_str();
        auto* g_opt = cmd->add_option("--g", spec.g, "gain")->capture_default_str();
        cmd->add_option("--alpha", spec.alpha, "coherent amplitude")
            ->capture_default_str();
        cmd->add_option("--s", spec.squeezing, "SMSV squeezing")
            ->capture_default_str();
        cmd->add_option("--chi", spec.chi, "TMSV squeezing")->capture_default_str();
        cmd->add_option("--eta", spec.eta, "total channel transmissivity")
            ->capture_default_str();
        cmd->add_option("--placement", spec.placement, "middle or end")
            ->capture_default_str();
        cmd->add_option("--protocol", spec.protocol, "nqs-bp, nqs-sp or x10")
            ->capture_default_str();
        cmd->add_option("--input", spec.input_kind, "coherent, smsv or cat")
            ->capture_default_str();
        cmd->add_option("--cutoff", spec.cutoff, "Fock cutoff (-1 = automatic)")
            ->capture_default_str();
        cmd->add_option("--profile", profile_path, "device profile file or 'ideal'");
        cmd->add_option("--sweep", sweep_text, "axis:min:max:points:lin|log")
            ->required();
        cmd->add_option("--out", out_path, "output CSV path (default stdout)");
        cmd->callback([&spec, g_opt]() { spec.g_explicit = g_opt->count() > 0; });
    };

    auto* amplify = app.add_subcommand("amplify", "NLA fidelity and probability");
    add_common(amplify);
    auto* teleport = app.add_subcommand("teleport", "teleportation at g = 1");
    add_common(teleport);
    auto* relay = app.add_subcommand("relay", "lossy relay entanglement");
    add_common(relay);
    auto* noisy = app.add_subcommand("noisy", "imperfect-device runs");
    add_common(noisy);
    noisy->add_option("--task", task, "amplify or relay")->capture_default_str();
    auto* selftest = app.add_subcommand(
        "selftest", "permanent-identity and oracle-equivalence checks");
    selftest->add_option("--out", out_path, "output path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    OutputSink sink;
    try {
        sink.open(out_path);
        if (selftest->parsed()) return run_selftest(sink);

        spec.profile = load_profile(profile_path, spec.profile_name);
        spec.axis = qs::parse_sweep_spec(sweep_text, spec.range);
        if (spec.sizes.empty())
            throw std::invalid_argument("at least one --n value is required");
        for (int n : spec.sizes)
            if (n < 1) throw std::invalid_argument("sizes must be >= 1");

        if (amplify->parsed()) {
            if (spec.axis != "g" && spec.axis != "alpha" && spec.axis != "s")
                throw std::invalid_argument("amplify sweeps over g, alpha or s");
            run_amplify_like("amplify", spec, sink);
        } else if (teleport->parsed()) {
            if (spec.axis != "alpha" && spec.axis != "s")
                throw std::invalid_argument("teleport sweeps over alpha or s");
            if (spec.g_explicit && spec.g != 1.0)
                throw std::invalid_argument("teleportation fixes g = 1");
            spec.g = 1.0;
            run_amplify_like("teleport", spec, sink);
        } else if (relay->parsed()) {
            run_relay("relay", spec, sink);
        } else if (noisy->parsed()) {
            if (task != "amplify" && task != "relay")
                throw std::invalid_argument("noisy task must be amplify or relay");
            run_noisy(spec, task, sink);
        }
    } catch (const qs::guard_error& e) {
        std::cerr << "guard error: " << e.what() << "\n";
        return kExitGuard;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
