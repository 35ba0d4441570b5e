#pragma once

// Shared oracles for the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "coprony/model.hpp"

namespace testing_support {

using coprony::Complex;

inline double circ(double a, double b, double period) {
    const double d = std::fmod(std::fabs(a - b), period);
    return std::min(d, period - d);
}

// Smallest achievable max |a_i - b_pi(i)| over all permutations (small sets only).
inline double best_pairing_error(std::vector<Complex> a, std::vector<Complex> b) {
    if (a.size() != b.size())
        return std::numeric_limits<double>::infinity();
    std::vector<std::size_t> perm(b.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
        best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Greedy nearest assignment, for sets too large to permute.
inline double greedy_pairing_error(const std::vector<Complex>& a, std::vector<Complex> b) {
    if (a.size() != b.size())
        return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const auto& x : a) {
        auto it = std::min_element(b.begin(), b.end(), [&](Complex p, Complex q) {
            return std::abs(p - x) < std::abs(q - x);
        });
        worst = std::max(worst, std::abs(*it - x));
        b.erase(it);
    }
    return worst;
}

// lambda^power written with the phase reduced first, as an exact oracle.
inline Complex power_of(const coprony::ExponentialTerm& t, std::int64_t power, double delta) {
    const double cycles = t.omega * static_cast<double>(power) * delta;
    const double frac = cycles - std::floor(cycles);
    return std::exp(t.psi * static_cast<double>(power) * delta) *
           std::polar(1.0, coprony::kTwoPi * frac);
}

// Direct term-by-term sum, independent of the library's evaluate().
inline Complex direct_sum(const coprony::SignalModel& m, double t) {
    Complex acc = 0.0;
    for (const auto& term : m.terms)
        acc += std::polar(term.beta, term.gamma) *
               std::exp(Complex(term.psi * t, coprony::kTwoPi * term.omega * t));
    return acc;
}

}  // namespace testing_support
