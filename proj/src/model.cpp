#include "fkppsb/model.hpp"

#include <algorithm>
#include <cmath>

namespace fkppsb {

namespace {

struct NamedRate {
    const char* name;
    double value;
};

} // namespace

ValidationResult validate_rates(const ModelParams& p) {
    const NamedRate rates[] = {
        {"c", p.c},   {"c_prime", p.c_prime}, {"s", p.s},
        {"nu", p.nu}, {"m1", p.m1},           {"m2", p.m2},
    };
    for (const auto& r : rates) {
        if (!std::isfinite(r.value)) {
            return {false, ErrorCode::NonFiniteRate,
                    std::string(r.name) + " is not finite"};
        }
    }
    for (const auto& r : rates) {
        if (r.value < 0.0) {
            return {false, ErrorCode::NegativeRate,
                    std::string(r.name) + " = " + std::to_string(r.value)};
        }
    }
    return {};
}

ValidationResult validate_params(const ModelParams& p, const Lattice& l) {
    if (const ValidationResult r = validate_rates(p); !r.ok) return r;
    if (!std::isfinite(l.x_min) || !std::isfinite(l.x_max) ||
        !std::isfinite(l.dx) || !std::isfinite(l.dt)) {
        return {false, ErrorCode::NonFiniteRate, "lattice field is not finite"};
    }
    if (!(l.dx > 0.0) || !(l.x_min < l.x_max)) {
        return {false, ErrorCode::NegativeRate,
                "lattice requires dx > 0 and x_min < x_max"};
    }
    if (l.n() < 3) {
        return {false, ErrorCode::NegativeRate, "lattice needs at least 3 nodes"};
    }
    if (!(l.dt > 0.0) || l.dt > 0.5 * l.dx * l.dx) {
        return {false, ErrorCode::UnstableTimeStep,
                "dt = " + std::to_string(l.dt) + " exceeds dx^2/2 = " +
                    std::to_string(0.5 * l.dx * l.dx)};
    }
    return {};
}

void require_valid_rates(const ModelParams& p) {
    const ValidationResult r = validate_rates(p);
    if (!r.ok) throw SimError(r.code, r.message);
}

void require_valid(const ModelParams& p, const Lattice& l) {
    const ValidationResult r = validate_params(p, l);
    if (!r.ok) throw SimError(r.code, r.message);
}

double InitialCondition::u0_at(double x, const Lattice& l) const {
    switch (kind) {
        case Kind::HeavisideRight: return x >= 0.0 ? 1.0 : 0.0;
        case Kind::HeavisideLeft: return x <= 0.0 ? 1.0 : 0.0;
        case Kind::Constant: return a;
        case Kind::Table: break;
    }
    // Linear interpolation in the table; callers guarantee x is on-domain.
    if (x <= l.x_min) return table_u.front();
    if (x >= l.x_max) return table_u.back();
    const double f = (x - l.x_min) / l.dx;
    const auto i = static_cast<std::size_t>(f);
    const double w = f - static_cast<double>(i);
    return (1.0 - w) * table_u[i] + w * table_u[i + 1];
}

double InitialCondition::v0_at(double x, const Lattice& l) const {
    switch (kind) {
        case Kind::HeavisideRight: return x >= 0.0 ? 1.0 : 0.0;
        case Kind::HeavisideLeft: return x <= 0.0 ? 1.0 : 0.0;
        case Kind::Constant: return b;
        case Kind::Table: break;
    }
    if (x <= l.x_min) return table_v.front();
    if (x >= l.x_max) return table_v.back();
    const double f = (x - l.x_min) / l.dx;
    const auto i = static_cast<std::size_t>(f);
    const double w = f - static_cast<double>(i);
    return (1.0 - w) * table_v[i] + w * table_v[i + 1];
}

Fields build_fields(const InitialCondition& ic, const Lattice& l) {
    const std::size_t n = l.n();
    if (ic.kind == InitialCondition::Kind::Table) {
        if (ic.table_u.size() != n || ic.table_v.size() != n) {
            throw SimError(ErrorCode::TableOutOfRange,
                           "table length " + std::to_string(ic.table_u.size()) +
                               "/" + std::to_string(ic.table_v.size()) +
                               " does not match lattice size " + std::to_string(n));
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double tu = ic.table_u[i];
            const double tv = ic.table_v[i];
            if (!(tu >= 0.0 && tu <= 1.0) || !(tv >= 0.0 && tv <= 1.0)) {
                throw SimError(ErrorCode::TableOutOfRange,
                               "table value outside [0,1] at node " +
                                   std::to_string(i));
            }
        }
    } else if (ic.kind == InitialCondition::Kind::Constant) {
        for (double lvl : {ic.a, ic.b}) {
            if (!(lvl >= 0.0 && lvl <= 1.0)) {
                throw SimError(ErrorCode::TableOutOfRange,
                               "constant level outside [0,1]: " +
                                   std::to_string(lvl));
            }
        }
    }

    Fields f;
    f.t = 0.0;
    f.u.resize(n);
    f.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        f.u[i] = ic.u0_at(l.x(i), l);
        f.v[i] = ic.v0_at(l.x(i), l);
    }
    return f;
}

double noise_coefficient(double u, double nu) {
    const double q = nu * u * (1.0 - u);
    return q > 0.0 ? std::sqrt(q) : 0.0;
}

} // namespace fkppsb
