#include "qs/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace qs {

void SweepRange::validate() const {
    if (!(min < max)) throw std::invalid_argument("sweep range needs min < max");
    if (points < 2) throw std::invalid_argument("sweep range needs >= 2 points");
    if (log_scale && min <= 0.0)
        throw std::invalid_argument("log sweep needs min > 0");
}

std::vector<double> sweep_values(const SweepRange& range) {
    range.validate();
    std::vector<double> out(range.points);
    if (range.log_scale) {
        double l0 = std::log(range.min), l1 = std::log(range.max);
        for (int i = 0; i < range.points; ++i)
            out[i] = std::exp(l0 + (l1 - l0) * i / (range.points - 1));
    } else {
        for (int i = 0; i < range.points; ++i)
            out[i] = range.min + (range.max - range.min) * i / (range.points - 1);
    }
    out.front() = range.min;
    out.back() = range.max;
    return out;
}

std::string parse_sweep_spec(const std::string& text, SweepRange& range) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
        size_t pos = text.find(':', start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    if (parts.size() != 5)
        throw std::invalid_argument(
            "sweep spec must be axis:min:max:points:lin|log");
    try {
        range.min = std::stod(parts[1]);
        range.max = std::stod(parts[2]);
        range.points = std::stoi(parts[3]);
    } catch (const std::exception&) {
        throw std::invalid_argument("sweep spec has non-numeric fields");
    }
    if (parts[4] == "lin")
        range.log_scale = false;
    else if (parts[4] == "log")
        range.log_scale = true;
    else
        throw std::invalid_argument("sweep scale must be lin or log");
    range.validate();
    return parts[0];
}

int worker_thread_cap() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    const char* env = std::getenv("QSCISSOR_THREADS");
    if (env != nullptr) {
        int cap = std::atoi(env);
        if (cap >= 1) return std::min(cap, hw * 4);
    }
    return hw;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            while (true) {
                int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("loglog_slope needs matched samples (>= 2)");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= 0.0 || y[i] <= 0.0)
            throw std::invalid_argument("loglog_slope needs positive samples");
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string format_csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace qs
