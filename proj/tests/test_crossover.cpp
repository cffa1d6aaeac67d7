#include <doctest.h>

#include <cmath>

#include "kpztail/crossover.hpp"
#include "kpztail/fredholm.hpp"

using namespace kpztail;
using crossover::MuContourSpec;
using crossover::SweepRow;

namespace {

const airy::TabulatedAiry& tab8() {
    static airy::TabulatedAiry tab(8.0);
    return tab;
}

std::vector<SweepRow> synthetic(double c1, double c2, double c3,
                                const std::vector<double>& ss,
                                const std::vector<double>& Ts) {
    std::vector<SweepRow> rows;
    for (double T : Ts) {
        for (double s : ss) {
            double v = c1 * (std::exp(-c2 * std::cbrt(T) * s) +
                             std::exp(-c3 * s * std::sqrt(s)));
            rows.push_back({s, T, v, 0.0});
        }
    }
    return rows;
}

} // namespace

TEST_CASE("mu-contour geometry") {
    MuContourSpec mc;
    auto c = mc.build();
    CHECK_NOTHROW(c.validate());
    REQUIRE(c.segments.size() == 3);
    CHECK(std::abs(contour::segment_start(c.segments[0]) - Complex(40.0, -0.5)) < 1e-12);
    CHECK(std::abs(contour::segment_end(c.segments[2]) - Complex(40.0, 0.5)) < 1e-12);
    // distinct radius and delta still connect
    MuContourSpec wide{0.25, 0.75, 30.0};
    CHECK_NOTHROW(wide.build().validate());
    MuContourSpec bad{0.0, 0.5, 40.0};
    CHECK_THROWS_AS(bad.build(), std::invalid_argument);
}

TEST_CASE("tail stays a probability at moderate s") {
    // kernel far from small here: exercises the LU determinant route
    auto r = crossover::tail_probability(2.0, 8.0, MuContourSpec{}, 1e-8,
                                         default_config(), &tab8());
    CHECK(r.tail > 0.0);
    CHECK(r.tail < 1.0);
    CHECK(!r.clipped);
}

TEST_CASE("tail is positive, real, and decreasing on a probe pair") {
    MuContourSpec mc;
    auto t12 = crossover::tail_probability(12.0, 8.0, mc, 1e-8, default_config(), &tab8());
    auto t14 = crossover::tail_probability(14.0, 8.0, mc, 1e-8, default_config(), &tab8());
    CHECK(t12.tail > 0);
    CHECK(t14.tail > 0);
    CHECK(t12.tail >= t14.tail);
    CHECK(t12.imag_residual <= 1e-6 * std::max(1e-12, t12.tail));
    CHECK(!t12.clipped);
}

TEST_CASE("contour robustness: delta and truncation variations") {
    auto base = crossover::tail_probability(10.0, 8.0, MuContourSpec{0.5, 0.5, 40.0}, 1e-8,
                                            default_config(), &tab8());
    auto half_delta = crossover::tail_probability(10.0, 8.0, MuContourSpec{0.25, 0.5, 40.0},
                                                  1e-8, default_config(), &tab8());
    auto long_trunc = crossover::tail_probability(10.0, 8.0, MuContourSpec{0.5, 0.5, 80.0},
                                                  1e-8, default_config(), &tab8());
    CHECK(std::abs(half_delta.tail - base.tail) <= 1e-5 * base.tail);
    CHECK(std::abs(long_trunc.tail - base.tail) <= 1e-5 * base.tail);
}

TEST_CASE("synthetic envelope recovery within 5%") {
    auto rows = synthetic(1.0, 0.5, 0.6, {8, 10, 12, 14, 16, 18, 20}, {8.0, 64.0});
    auto fit = crossover::fit_tail_envelope(rows);
    CHECK(std::abs(fit.c1 - 1.0) <= 0.05);
    CHECK(std::abs(fit.c2 - 0.5) <= 0.025);
    CHECK(std::abs(fit.c3 - 0.6) <= 0.03);
    CHECK(fit.rms_log_residual < 1e-3);
    CHECK(fit.max_log_residual >= 0);
}

TEST_CASE("T-dominated synthetic data shows the (T2/T1)^(1/3) slope ratio") {
    // pure e^{-c2 T^{1/3} s} data: per-T log-slopes scale as T^{1/3}
    std::vector<SweepRow> rows;
    for (double T : {8.0, 64.0}) {
        for (double s : {8.0, 10.0, 12.0, 14.0, 16.0}) {
            rows.push_back({s, T, 0.8 * std::exp(-0.4 * std::cbrt(T) * s), 0.0});
        }
    }
    auto fit = crossover::fit_tail_envelope(rows);
    CHECK(fit.model_slope_ratio == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.empirical_slope_ratio == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("fit preconditions") {
    auto few = synthetic(1, 0.5, 0.6, {8, 10}, {8.0});
    CHECK_THROWS_AS(crossover::fit_tail_envelope(few), std::invalid_argument);
    auto one_T = synthetic(1, 0.5, 0.6, {8, 10, 12, 14, 16, 18}, {8.0});
    CHECK_THROWS_AS(crossover::fit_tail_envelope(one_T), std::invalid_argument);
    auto rows = synthetic(1, 0.5, 0.6, {8, 10, 12}, {8.0, 64.0});
    rows[2].tail = -1e-9;
    CHECK_THROWS_AS(crossover::fit_tail_envelope(rows), std::invalid_argument);
}

TEST_CASE("csv round trip and determinism") {
    std::vector<SweepRow> rows{{8, 8, 1.2345678901234567e-8, 1e-12},
                               {10, 8, 3.4e-11, 2e-15}};
    auto text = crossover::to_csv(rows);
    auto back = crossover::from_csv(text);
    REQUIRE(back.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].s == rows[i].s);
        CHECK(back[i].T == rows[i].T);
        CHECK(back[i].tail == rows[i].tail);
        CHECK(back[i].err == rows[i].err);
    }
    CHECK(crossover::to_csv(back) == text);
    CHECK_THROWS_AS(crossover::from_csv("s,T,tail,err\nnot,a,row\n"),
                    std::invalid_argument);
}

TEST_CASE("sweep determinism: identical invocations produce identical bytes") {
    MuContourSpec mc;
    auto r1 = crossover::sweep({12.0}, {8.0}, mc, 1e-8, default_config(), 1);
    auto r2 = crossover::sweep({12.0}, {8.0}, mc, 1e-8, default_config(), 1);
    CHECK(crossover::to_csv(r1) == crossover::to_csv(r2));
    // ordering and values independent of the worker bound
    auto r3 = crossover::sweep({12.0}, {8.0}, mc, 1e-8, default_config(), 3);
    CHECK(crossover::to_csv(r3) == crossover::to_csv(r1));
}
