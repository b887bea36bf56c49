#pragma once

#include <cmath>
#include <limits>

#include "ckdiag/error.hpp"

namespace ckdiag {

namespace detail {

// Lower regularized incomplete gamma P(s, x) by power series; converges fast
// for x < s + 1.
inline double gamma_p_series(double s, double x) {
    double term = 1.0 / s;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= x / (s + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Upper regularized incomplete gamma Q(s, x) by continued fraction
// (modified Lentz); converges fast for x >= s + 1.
inline double gamma_q_cont_fraction(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

}  // namespace detail

// Upper regularized incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s).
inline double regularized_gamma_q(double s, double x) {
    if (s <= 0.0) throw InvalidArgument("regularized_gamma_q: s must be positive");
    if (x < 0.0) throw InvalidArgument("regularized_gamma_q: x must be non-negative");
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) return 1.0 - detail::gamma_p_series(s, x);
    return detail::gamma_q_cont_fraction(s, x);
}

// Chi-square upper-tail probability P(X >= statistic) for the given degrees
// of freedom.
inline double chi_square_sf(double statistic, int df) {
    if (df <= 0) throw InvalidArgument("chi_square_sf: df must be positive");
    if (statistic <= 0.0) return 1.0;
    return regularized_gamma_q(0.5 * df, 0.5 * statistic);
}

}  // namespace ckdiag
