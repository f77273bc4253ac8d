#include "rpst/ensemble.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include <omp.h>

namespace rpst {

void for_each_path_serial(std::size_t count, const std::function<void(std::size_t)>& body) {
    for (std::size_t i = 0; i < count; ++i) body(i);
}

void for_each_path(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
    if (jobs <= 1 || count < 2) {
        for_each_path_serial(count, body);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    const auto n = static_cast<long long>(count);
#pragma omp parallel for num_threads(jobs) schedule(dynamic, 1)
    for (long long i = 0; i < n; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double ordered_sum(std::span<const double> values) {
    double sum = 0.0;
    double carry = 0.0;
    for (double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            carry += (sum - t) + v;
        else
            carry += (v - t) + sum;
        sum = t;
    }
    return sum + carry;
}

SampleStats sample_stats(std::span<const double> values) {
    SampleStats s;
    s.count = values.size();
    if (values.empty()) return s;
    s.mean = ordered_sum(values) / static_cast<double>(values.size());
    if (values.size() < 2) return s;
    std::vector<double> dev2(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) dev2[i] = (values[i] - s.mean) * (values[i] - s.mean);
    s.variance = ordered_sum(dev2) / static_cast<double>(values.size() - 1);
    s.stderr_mean = std::sqrt(s.variance / static_cast<double>(values.size()));
    return s;
}

int hardware_jobs() { return omp_get_num_procs(); }

} // namespace rpst
