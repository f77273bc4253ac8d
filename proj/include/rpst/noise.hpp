#pragma once

#include "rpst/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace rpst {

struct TimeWindow {
    double start = 0.0;
    double end = 0.0;

    double length() const { return end - start; }
};

/// Index n with n * width == t, or WindowError if t is not on the grid.
std::int64_t grid_index(double t, double width);

/// True when t is (to rounding) an integer multiple of width.
bool on_grid(double t, double width);

/**
 * Brownian increments of a two-sided Wiener process in R^m over the cells of
 * a window, either on a dyadic grid of width 2^-L or on a uniform grid of an
 * arbitrary width (no refinement available).
 *
 * Each fine increment is sqrt(h) * Z with Z drawn from a counter-based
 * generator keyed by (seed, path_index, component, absolute cell index), so a
 * wider window reproduces the overlapping increments bit for bit.
 *
 * Coarser increments are stored as a pairwise pyramid: the increment of a
 * level-c cell is exactly the sum of its two level-(c+1) children, so every
 * coarse path is an exact restriction of the fine one.
 */
class WienerGrid {
public:
    static WienerGrid generate(std::uint64_t seed, std::uint64_t path_index, int fine_level, TimeWindow window,
                               int noise_dim);
    static WienerGrid generate_uniform(std::uint64_t seed, std::uint64_t path_index, double cell_width,
                                       TimeWindow window, int noise_dim);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t path_index() const { return path_index_; }
    int noise_dim() const { return noise_dim_; }
    TimeWindow window() const { return window_; }
    bool is_dyadic() const { return fine_level_.has_value(); }
    std::optional<int> fine_level() const { return fine_level_; }
    double cell_width() const { return cell_width_; }
    /// Absolute index of the first fine cell and the number of fine cells.
    std::int64_t first_cell() const { return first_cell_; }
    std::int64_t cell_count() const { return cell_count_; }
    /// Coarsest dyadic level stored in the pyramid.
    int coarsest_level() const;

    Vector fine_increment(std::int64_t cell) const;
    Vector coarse_increment(int coarse_level, std::int64_t cell) const;

    /// Sum of fine increments [first, first + count) by recursive halving.
    Vector sum_fine(std::int64_t first, std::int64_t count) const;

    /// W(t) with W(0) = 0 (requires 0 and t inside the window).
    Vector value(double t) const;

    /// Raw fine increments, cell-major (cell_count x noise_dim).
    const std::vector<double>& fine_data() const { return levels_.front(); }

    void write_binary(std::ostream& out) const;
    static WienerGrid read_binary(std::istream& in);

private:
    WienerGrid() = default;
    void fill(std::uint64_t seed, std::uint64_t path_index, int noise_dim, TimeWindow window, double width);
    void build_pyramid();
    const double* cell_ptr(int depth, std::int64_t cell) const;

    std::uint64_t seed_ = 0;
    std::uint64_t path_index_ = 0;
    int noise_dim_ = 1;
    TimeWindow window_;
    std::optional<int> fine_level_;
    double cell_width_ = 1.0;
    std::int64_t first_cell_ = 0;
    std::int64_t cell_count_ = 0;
    // levels_[r] holds level (fine_level - r), cell-major.
    std::vector<std::vector<double>> levels_;
};

/**
 * Noise seen through the Wiener shift: the increment of the view over
 * [a, b] is the base increment over [a + shift, b + shift]. Holds a
 * reference to its base grid, which must outlive it.
 */
class NoiseView {
public:
    NoiseView(const WienerGrid& base); // NOLINT(google-explicit-constructor)

    const WienerGrid& base() const { return *base_; }
    double shift() const;
    std::int64_t shift_cells() const { return shift_cells_; }
    int noise_dim() const { return base_->noise_dim(); }

    /// Window of view time for which increments are available.
    TimeWindow window() const;
    bool covers(TimeWindow w) const;

    /// Increment over view cell [cell * width, (cell + 1) * width].
    Vector increment(double width, std::int64_t cell) const;

private:
    friend NoiseView shift_view(const NoiseView& view, double shift);
    const WienerGrid* base_;
    std::int64_t shift_cells_ = 0;
};

/// Dyadic grid when dt == 2^-L exactly, uniform grid of width dt otherwise.
WienerGrid generate_for_step(std::uint64_t seed, std::uint64_t path_index, double dt, TimeWindow window,
                             int noise_dim);

/// Theta_shift applied to the noise; composes additively.
NoiseView shift_view(const NoiseView& view, double shift);

} // namespace rpst
