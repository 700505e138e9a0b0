#include "fkppsb/analytics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fkppsb {

namespace {

void require_nonnegative_rates(double c, double c_prime, const char* who) {
    if (!(c >= 0.0) || !(c_prime >= 0.0) || !std::isfinite(c) ||
        !std::isfinite(c_prime)) {
        throw SimError(ErrorCode::NegativeRate,
                       std::string(who) + ": c and c_prime must be finite and >= 0");
    }
}

double sinhc(double h) {
    if (std::abs(h) < 1e-5) {
        const double h2 = h * h;
        return 1.0 + h2 / 6.0 + h2 * h2 / 120.0;
    }
    return std::sinh(h) / h;
}

} // namespace

double count_constant_a(double c, double c_prime) {
    return (c - 1.0) * (c - 1.0) + 2.0 * c * c_prime + c_prime * c_prime +
           2.0 * c_prime;
}

CountCurve expected_counts_closed_form(double c, double c_prime, double t) {
    require_nonnegative_rates(c, c_prime, "expected_counts_closed_form");
    if (!(t >= 0.0)) {
        throw SimError(ErrorCode::NonPositiveArgument,
                       "expected_counts_closed_form: t must be >= 0");
    }
    const double a = count_constant_a(c, c_prime);
    const double ra = std::sqrt(a);
    const double mu = 0.5 * (1.0 - c - c_prime); // mean of the two exponents
    const double h = 0.5 * ra * t;               // half-spread times t
    const double b = 0.5 * (c_prime - c + 1.0);

    CountCurve out;
    out.t = t;
    out.a = a;
    if (h > 350.0) {
        // cosh/sinh would overflow; the e^{-h} branch is below 1e-300 here.
        const double lead = std::exp(mu * t + h);
        out.x = lead * (0.5 + b / ra);
        out.y = lead * (c / ra);
    } else {
        const double lead = std::exp(mu * t);
        out.x = lead * (std::cosh(h) + b * t * sinhc(h));
        out.y = lead * c * t * sinhc(h);
    }
    return out;
}

CountPair expected_counts_ode(const ModelParams& p, double t) {
    require_nonnegative_rates(p.c, p.c_prime, "expected_counts_ode");
    if (!(p.s >= 0.0)) {
        throw SimError(ErrorCode::NegativeRate, "expected_counts_ode: s < 0");
    }
    if (!(t >= 0.0)) {
        throw SimError(ErrorCode::NonPositiveArgument,
                       "expected_counts_ode: t must be >= 0");
    }
    const double s = p.s, c = p.c, cp = p.c_prime;
    const auto fx = [&](double x, double y) { return s * x - c * x + cp * y; };
    const auto fy = [&](double x, double y) { return c * x - cp * y; };

    const double h_nominal = 1e-4;
    const auto n_full = static_cast<std::uint64_t>(std::floor(t / h_nominal));
    double x = 1.0, y = 0.0;
    const auto rk4 = [&](double h) {
        const double k1x = fx(x, y), k1y = fy(x, y);
        const double k2x = fx(x + 0.5 * h * k1x, y + 0.5 * h * k1y);
        const double k2y = fy(x + 0.5 * h * k1x, y + 0.5 * h * k1y);
        const double k3x = fx(x + 0.5 * h * k2x, y + 0.5 * h * k2y);
        const double k3y = fy(x + 0.5 * h * k2x, y + 0.5 * h * k2y);
        const double k4x = fx(x + h * k3x, y + h * k3y);
        const double k4y = fy(x + h * k3x, y + h * k3y);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    };
    for (std::uint64_t k = 0; k < n_full; ++k) rk4(h_nominal);
    const double rem = t - static_cast<double>(n_full) * h_nominal;
    if (rem > 0.0) rk4(rem);
    return {x, y};
}

SpeedBound speed_bound(double c, double c_prime) {
    require_nonnegative_rates(c, c_prime, "speed_bound");
    const double a = count_constant_a(c, c_prime);
    const double arg = 1.0 - c - c_prime + std::sqrt(a);
    // a - (c + c' - 1)^2 = 4c' >= 0, so arg >= 0 always; the max guards
    // round-off on the degenerate line c' = 0, c >= 1 where arg = 0.
    return {std::sqrt(std::max(0.0, arg))};
}

double gaussian_tail_bound(double x) {
    if (!(x > 0.0)) {
        throw SimError(ErrorCode::NonPositiveArgument,
                       "gaussian_tail_bound: x must be > 0");
    }
    constexpr double inv_sqrt_2pi = 0.39894228040143268;
    return std::exp(-0.5 * x * x) * inv_sqrt_2pi / x;
}

double crossing_prob_bound(double c, double c_prime, double lambda, double t) {
    if (!(lambda > 0.0) || !(t > 0.0)) {
        throw SimError(ErrorCode::NonPositiveArgument,
                       "crossing_prob_bound: lambda and t must be > 0");
    }
    const CountCurve counts = expected_counts_closed_form(c, c_prime, t);
    return (counts.x + counts.y) * gaussian_tail_bound(lambda * std::sqrt(t));
}

} // namespace fkppsb
