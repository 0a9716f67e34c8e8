#pragma once

#include <functional>
#include <string>
#include <vector>

namespace qs {

/// Parameter grid "min:max:points" on a linear or logarithmic axis.
struct SweepRange {
    double min = 0.0;
    double max = 0.0;
    int points = 0;
    bool log_scale = false;

    void validate() const;
};

/// Axis values of the grid, endpoints included.
std::vector<double> sweep_values(const SweepRange& range);

/// Parses "axis:min:max:points:lin|log"; returns the axis name.
std::string parse_sweep_spec(const std::string& text, SweepRange& range);

/// Thread cap from QSCISSOR_THREADS (hardware concurrency when unset).
int worker_thread_cap();

/// Runs fn(0..count-1) on a small worker pool. Results must be written to
/// pre-sized slots so output order is independent of scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Fixed CSV float formatting, 12 significant digits.
std::string format_csv_double(double v);

}  // namespace qs
