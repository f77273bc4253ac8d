#include "rpst/ensemble.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace rpst;

TEST_CASE("parallel loop visits every index once, like the serial loop") {
    constexpr std::size_t n = 1000;
    for (int jobs : {1, 2, 8}) {
        std::vector<int> hits(n, 0);
        std::vector<double> values(n);
        for_each_path(n, jobs, [&](std::size_t i) {
            ++hits[i];
            values[i] = std::sin(static_cast<double>(i));
        });
        std::vector<double> serial(n);
        for_each_path_serial(n, [&](std::size_t i) { serial[i] = std::sin(static_cast<double>(i)); });
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(hits[i] == 1);
            CHECK(values[i] == serial[i]);
        }
        CHECK(ordered_sum(values) == ordered_sum(serial));
    }
    for_each_path(0, 4, [](std::size_t) { FAIL("empty range must not call the body"); });
}

TEST_CASE("the lowest failing index wins") {
    for (int jobs : {1, 4}) {
        try {
            for_each_path(100, jobs, [](std::size_t i) {
                if (i == 17 || i == 63 || i == 90) throw std::runtime_error("index " + std::to_string(i));
            });
            FAIL("expected an exception");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()) == "index 17");
        }
    }
}

TEST_CASE("compensated ordered sum") {
    const std::vector<double> cancel{1e16, 1.0, -1e16};
    CHECK(ordered_sum(cancel) == 1.0);
    CHECK(ordered_sum(std::vector<double>{}) == 0.0);
    std::vector<double> tenths(10, 0.1);
    CHECK(ordered_sum(tenths) == 1.0);
}

TEST_CASE("sample statistics") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    const SampleStats s = sample_stats(v);
    CHECK(s.count == 4);
    CHECK(s.mean == doctest::Approx(2.5));
    CHECK(s.variance == doctest::Approx(5.0 / 3.0));
    CHECK(s.stderr_mean == doctest::Approx(std::sqrt(5.0 / 12.0)));

    const SampleStats one = sample_stats(std::vector<double>{7.0});
    CHECK(one.mean == 7.0);
    CHECK(one.variance == 0.0);
    CHECK(hardware_jobs() >= 1);
}
