#include "rpst/noise.hpp"

#include "rpst/philox.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace rpst {

namespace {

constexpr char kMagic[8] = {'R', 'P', 'S', 'T', 'W', 'G', 'R', '1'};

std::string describe(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

template <class T>
void put_le(std::ostream& out, T value) {
    static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get_le(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw std::runtime_error("truncated Wiener grid dump");
    return value;
}

} // namespace

bool on_grid(double t, double width) {
    const double n = std::nearbyint(t / width);
    return std::abs(n * width - t) <= 1e-9 * std::max(1.0, std::abs(t));
}

std::int64_t grid_index(double t, double width) {
    if (!(width > 0.0)) throw WindowError("grid width must be positive");
    if (!on_grid(t, width))
        throw WindowError("time " + describe(t) + " is not a multiple of the grid width " + describe(width));
    return static_cast<std::int64_t>(std::llround(t / width));
}

WienerGrid WienerGrid::generate(std::uint64_t seed, std::uint64_t path_index, int fine_level, TimeWindow window,
                                int noise_dim) {
    if (fine_level < 0 || fine_level > 30) throw ParameterError("fine_level must lie in [0, 30]");
    WienerGrid g;
    g.fine_level_ = fine_level;
    g.fill(seed, path_index, noise_dim, window, std::ldexp(1.0, -fine_level));
    g.build_pyramid();
    return g;
}

WienerGrid WienerGrid::generate_uniform(std::uint64_t seed, std::uint64_t path_index, double cell_width,
                                        TimeWindow window, int noise_dim) {
    if (!(cell_width > 0.0)) throw ParameterError("cell_width must be positive");
    WienerGrid g;
    g.fill(seed, path_index, noise_dim, window, cell_width);
    return g;
}

void WienerGrid::fill(std::uint64_t seed, std::uint64_t path_index, int noise_dim, TimeWindow window, double width) {
    if (noise_dim < 1 || noise_dim > kMaxDim) throw ParameterError("noise_dim out of range");
    if (!(window.start < window.end)) throw WindowError("window must satisfy t_min < t_max");
    seed_ = seed;
    path_index_ = path_index;
    noise_dim_ = noise_dim;
    window_ = window;
    cell_width_ = width;
    first_cell_ = grid_index(window.start, width);
    cell_count_ = grid_index(window.end, width) - first_cell_;

    const double scale = std::sqrt(width);
    std::vector<double> fine(static_cast<std::size_t>(cell_count_) * noise_dim);
    for (std::int64_t i = 0; i < cell_count_; ++i)
        for (int j = 0; j < noise_dim; ++j)
            fine[static_cast<std::size_t>(i) * noise_dim + j] =
                scale * keyed_normal(seed, path_index, static_cast<std::uint32_t>(j), first_cell_ + i);
    levels_.clear();
    levels_.push_back(std::move(fine));
}

void WienerGrid::build_pyramid() {
    const int m = noise_dim_;
    std::int64_t first = first_cell_;
    std::int64_t count = cell_count_;
    int level = *fine_level_;
    // Descend while the window stays aligned with the next coarser level.
    while (level > 0 && first % 2 == 0 && count % 2 == 0 && count > 0) {
        const auto& finer = levels_.back();
        std::vector<double> coarse(static_cast<std::size_t>(count / 2) * m);
        for (std::int64_t i = 0; i < count / 2; ++i)
            for (int j = 0; j < m; ++j)
                coarse[static_cast<std::size_t>(i) * m + j] = finer[static_cast<std::size_t>(2 * i) * m + j] +
                                                              finer[static_cast<std::size_t>(2 * i + 1) * m + j];
        levels_.push_back(std::move(coarse));
        first /= 2;
        count /= 2;
        --level;
    }
}

int WienerGrid::coarsest_level() const {
    if (!fine_level_) throw ParameterError("uniform grid has no dyadic levels");
    return *fine_level_ - static_cast<int>(levels_.size()) + 1;
}

const double* WienerGrid::cell_ptr(int depth, std::int64_t cell) const {
    const std::int64_t first = first_cell_ >> depth;
    const std::int64_t count = cell_count_ >> depth;
    if (cell < first || cell >= first + count)
        throw WindowError("cell " + std::to_string(cell) + " lies outside the generated window");
    return levels_[static_cast<std::size_t>(depth)].data() + static_cast<std::size_t>(cell - first) * noise_dim_;
}

Vector WienerGrid::fine_increment(std::int64_t cell) const {
    const double* p = cell_ptr(0, cell);
    return Eigen::Map<const Vector>(p, noise_dim_);
}

Vector WienerGrid::coarse_increment(int coarse_level, std::int64_t cell) const {
    if (!fine_level_) {
        throw ParameterError("coarse increments require a dyadic grid");
    }
    const int depth = *fine_level_ - coarse_level;
    if (depth < 0) throw ParameterError("coarse_level exceeds fine_level");
    if (depth >= static_cast<int>(levels_.size()))
        throw WindowError("window is not aligned at level " + std::to_string(coarse_level));
    return Eigen::Map<const Vector>(cell_ptr(depth, cell), noise_dim_);
}

Vector WienerGrid::sum_fine(std::int64_t first, std::int64_t count) const {
    if (count <= 0) return Vector::Zero(noise_dim_);
    if (count == 1) return fine_increment(first);
    const std::int64_t half = count / 2;
    return sum_fine(first, half) + sum_fine(first + half, count - half);
}

Vector WienerGrid::value(double t) const {
    const std::int64_t n = grid_index(t, cell_width_);
    if (first_cell_ > 0 || first_cell_ + cell_count_ < 0)
        throw WindowError("W(t) needs time 0 inside the window");
    if (n < first_cell_ || n > first_cell_ + cell_count_) throw WindowError("time outside the window");
    if (n >= 0) return sum_fine(0, n);
    return -sum_fine(n, -n);
}

void WienerGrid::write_binary(std::ostream& out) const {
    out.write(kMagic, sizeof kMagic);
    put_le<std::uint64_t>(out, seed_);
    put_le<std::uint64_t>(out, path_index_);
    put_le<std::int32_t>(out, fine_level_ ? *fine_level_ : -1);
    put_le<std::int32_t>(out, noise_dim_);
    put_le<double>(out, cell_width_);
    put_le<double>(out, window_.start);
    put_le<double>(out, window_.end);
    put_le<std::int64_t>(out, cell_count_);
    for (double v : levels_.front()) put_le<double>(out, v);
}

WienerGrid WienerGrid::read_binary(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) throw std::runtime_error("not a Wiener grid dump");
    WienerGrid g;
    g.seed_ = get_le<std::uint64_t>(in);
    g.path_index_ = get_le<std::uint64_t>(in);
    const auto level = get_le<std::int32_t>(in);
    g.noise_dim_ = get_le<std::int32_t>(in);
    g.cell_width_ = get_le<double>(in);
    g.window_.start = get_le<double>(in);
    g.window_.end = get_le<double>(in);
    g.cell_count_ = get_le<std::int64_t>(in);
    if (level >= 0) g.fine_level_ = level;
    g.first_cell_ = grid_index(g.window_.start, g.cell_width_);
    std::vector<double> fine(static_cast<std::size_t>(g.cell_count_) * g.noise_dim_);
    for (double& v : fine) v = get_le<double>(in);
    g.levels_.push_back(std::move(fine));
    if (g.fine_level_) g.build_pyramid();
    return g;
}

NoiseView::NoiseView(const WienerGrid& base) : base_(&base) {}

double NoiseView::shift() const { return static_cast<double>(shift_cells_) * base_->cell_width(); }

TimeWindow NoiseView::window() const {
    const double h = base_->cell_width();
    return {static_cast<double>(base_->first_cell() - shift_cells_) * h,
            static_cast<double>(base_->first_cell() + base_->cell_count() - shift_cells_) * h};
}

bool NoiseView::covers(TimeWindow w) const {
    const TimeWindow own = window();
    const double slack = 1e-9 * std::max({1.0, std::abs(w.start), std::abs(w.end)});
    return w.start >= own.start - slack && w.end <= own.end + slack;
}

Vector NoiseView::increment(double width, std::int64_t cell) const {
    const double h = base_->cell_width();
    const double ratio = width / h;
    const auto fine_per_cell = static_cast<std::int64_t>(std::llround(ratio));
    if (fine_per_cell < 1 || std::abs(ratio - static_cast<double>(fine_per_cell)) > 1e-9 * ratio ||
        !std::has_single_bit(static_cast<std::uint64_t>(fine_per_cell)))
        throw WindowError("step width " + describe(width) + " is not a dyadic multiple of the noise cell width " +
                          describe(h));
    if (fine_per_cell > 1 && !base_->is_dyadic())
        throw WindowError("uniform noise grids cannot be coarsened");

    const std::int64_t first_fine = cell * fine_per_cell + shift_cells_;
    if (first_fine < base_->first_cell() || first_fine + fine_per_cell > base_->first_cell() + base_->cell_count())
        throw WindowError("noise requested outside the generated window");
    if (fine_per_cell == 1) return base_->fine_increment(first_fine);
    const int depth = std::countr_zero(static_cast<std::uint64_t>(fine_per_cell));
    if (first_fine % fine_per_cell == 0 && depth <= *base_->fine_level() - base_->coarsest_level())
        return base_->coarse_increment(*base_->fine_level() - depth, first_fine / fine_per_cell);
    return base_->sum_fine(first_fine, fine_per_cell);
}

WienerGrid generate_for_step(std::uint64_t seed, std::uint64_t path_index, double dt, TimeWindow window,
                             int noise_dim) {
    const double level = -std::log2(dt);
    const double rounded = std::nearbyint(level);
    if (rounded >= 0.0 && rounded <= 30.0 && std::ldexp(1.0, -static_cast<int>(rounded)) == dt)
        return WienerGrid::generate(seed, path_index, static_cast<int>(rounded), window, noise_dim);
    return WienerGrid::generate_uniform(seed, path_index, dt, window, noise_dim);
}

NoiseView shift_view(const NoiseView& view, double shift) {
    const double h = view.base().cell_width();
    if (!on_grid(shift, h))
        throw WindowError("shift " + describe(shift) + " is not a multiple of the grid width " + describe(h));
    const std::int64_t cells = grid_index(shift, h);
    const std::int64_t total = view.shift_cells_ + cells;
    if (total < -view.base().cell_count() || total > view.base().cell_count())
        throw WindowError("shift " + describe(shift) + " moves the view off the generated window");
    NoiseView out = view;
    out.shift_cells_ = total;
    return out;
}

} // namespace rpst
