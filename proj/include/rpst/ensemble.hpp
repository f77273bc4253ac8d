#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace rpst {

/**
 * Runs body(i) for i in [0, count). With jobs <= 1 this is the plain serial
 * loop (the reference implementation); otherwise the indices are spread over
 * an OpenMP team of `jobs` threads. Bodies must only write to per-index
 * slots. If any body throws, the exception of the lowest failing index is
 * rethrown after the loop.
 */
void for_each_path(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

void for_each_path_serial(std::size_t count, const std::function<void(std::size_t)>& body);

/// Compensated (Neumaier) sum in index order; result is independent of how values were produced.
double ordered_sum(std::span<const double> values);

struct SampleStats {
    double mean = 0.0;
    double variance = 0.0; // unbiased
    double stderr_mean = 0.0;
    std::size_t count = 0;
};

SampleStats sample_stats(std::span<const double> values);

/// Number of worker threads the runtime offers (1 when OpenMP is unavailable).
int hardware_jobs();

} // namespace rpst
