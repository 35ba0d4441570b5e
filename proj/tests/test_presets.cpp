#include <doctest.h>

#include <cmath>

#include "coprony/presets.hpp"

using namespace coprony;

namespace {

const Complex I(0.0, 1.0);

Complex e(double x) { return std::exp(I * kTwoPi * x); }

// alpha_i and phi_i written out as printed.
Complex table1_direct(double t) {
    struct Row {
        double beta, gamma, psi, omega;
    };
    static const Row rows[] = {
        {6.5, 0.15, -0.19, -453.1},    {6.8, 0, -0.132, -452.19},    {6.8, 0.3, -0.183, -451.02},
        {6.4, 0.9, -0.11, -450.21},    {7.1, 0.7, -0.21, -448.39},   {4.71, 0.12, -0.106, -132.5},
        {3.9, 0.1, -0.129, -131.4},    {7.2, -0.234, -0.203, -130.01}, {7.43, 0.2, -0.16, -129.17},
        {4.4, -0.52, -0.19, -128.39},  {3, 0.21, -0.101, 9.1},       {3, -0.8, -0.127, 11.81},
        {7.2, -0.106, -0.21, 126.01},  {6.53, 0.2, -0.15, 127.62},   {6.7, -0.3, -0.173, 128.98},
        {6.8, -0.15, -0.11, 334.01},   {6, 0.26, -0.12, 335.18},     {7.1, -0.2, -0.157, 336.01},
        {7.1, 0, -0.120, 337.91},      {6, -0.1, -0.18, 339.61},
    };
    Complex s = 0.0;
    for (const auto& r : rows)
        s += r.beta * std::exp(I * r.gamma) * std::exp((r.psi + I * kTwoPi * r.omega) * t);
    return s;
}

Complex table2_direct(double t) {
    return 18.0 * e(191.9 * t) - 20.0 * e(291.9 * t) + 20.0 * e(391.9 * t) +
           5.0 * e(526.2 * t) + 5.0 * e(858.1 * t) + 11.0 * e(958.1 * t);
}

Complex cancel7_direct(double t) {
    return e(t) - e(21 * t) + e(41 * t) - e(61 * t) + e(0.72) * e(11 * t) -
           e(0.32) * e(31 * t) + e(9 * t);
}

Complex collide7_direct(double t) {
    return e(t) - e(21 * t) + e(41 * t) - e(61 * t) + e(11 * t) - e(31 * t) + e(51 * t);
}

}  // namespace

TEST_CASE("preset models match the printed signals on the sampling grid") {
    struct Case {
        SignalModel model;
        Complex (*direct)(double);
        double delta;
        std::size_t terms;
    };
    const Case cases[] = {{table1_model(), table1_direct, 1e-3, 20},
                          {table2_model(), table2_direct, 1e-3, 6},
                          {cancel7_model(), cancel7_direct, 0.01, 7},
                          {collide7_model(), collide7_direct, 0.01, 7}};
    for (const auto& c : cases) {
        CHECK(c.model.terms.size() == c.terms);
        CHECK_NOTHROW(c.model.validate());
        for (SampleIndex j : {0, 1, 5, 11, 133, 240, 1463}) {
            const double t = static_cast<double>(j) * c.delta;
            const Complex want = c.direct(t);
            CHECK(std::abs(evaluate_at_index(c.model, j, c.delta) - want) <
                  1e-9 * (1 + std::abs(want)));
        }
    }
}

TEST_CASE("preset frequencies lie in the band") {
    for (const auto& name : preset_names()) {
        const auto p = find_preset(name);
        REQUIRE(p);
        for (const auto& t : p->model.terms) {
            CHECK(t.omega >= 0.0);
            CHECK(t.omega < p->model.omega_max);
        }
        CHECK_NOTHROW(p->scheme.validate(p->model.omega_max));
    }
    // Negative printed frequencies are wrapped into [0, Omega).
    CHECK(table1_model().terms[0].omega == doctest::Approx(546.9));
}

TEST_CASE("preset schemes") {
    const auto t1 = *find_preset("table1");
    CHECK(t1.scheme.delta == 1e-3);
    CHECK(t1.scheme.r == 11);
    CHECK(t1.scheme.rho == 5);
    CHECK(t1.scheme.M == 180);
    CHECK(t1.scheme.N == 60);
    CHECK(t1.snr_db == 32.0);
    CHECK(t1.pipeline == "collision_free");
    CHECK(t1.keep == 20u);

    const auto t2 = *find_preset("table2");
    CHECK(t2.scheme.r == 100);
    CHECK(t2.scheme.rho == 133);
    CHECK(t2.scheme.M == 60);
    CHECK(t2.scheme.N == 30);
    CHECK(t2.snr_db == 20.0);
    CHECK(t2.pipeline == "full");

    for (const char* name : {"cancel7", "collide7"}) {
        const auto p = *find_preset(name);
        CHECK(p.scheme.delta == 0.01);
        CHECK(p.scheme.r == 5);
        CHECK(p.scheme.rho == 12);
        CHECK_FALSE(p.snr_db);
    }
    CHECK_FALSE(find_preset("table3"));
}
