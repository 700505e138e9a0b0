#pragma once

// Model definition shared by the lattice solvers and the particle dual:
// a pair of fields (u, v) on an interval, where u is the active density,
// v is the dormant reservoir, and the rates are
//   c   : exchange u <- v   (deactivation pressure on u)
//   c'  : exchange v <- u   (wake-up rate of the reservoir)
//   s   : logistic selection strength
//   nu  : strength of the u(1-u) fluctuation term
//   m1  : decay acting on u
//   m2  : recolonisation source acting on u
// Everything downstream assumes validate_params() has accepted the set.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fkppsb/errors.hpp"

namespace fkppsb {

struct ModelParams {
    double c = 1.0;       // active -> dormant exchange rate
    double c_prime = 1.0; // dormant -> active exchange rate
    double s = 1.0;       // selection strength
    double nu = 0.0;      // noise strength
    double m1 = 0.0;      // death rate
    double m2 = 0.0;      // immigration rate
};

// Uniform grid on [x_min, x_max] with spacing dx and explicit time step dt;
// nodes are x_min, x_min+dx, ..., x_max (n = round((x_max-x_min)/dx) + 1).
// Boundary handling is always zero-flux (mirrored neighbours).
struct Lattice {
    double x_min = -10.0;
    double x_max = 10.0;
    double dx = 0.1;
    double dt = 0.0025; // stability requires dt <= dx^2/2; default dx^2/4

    static Lattice make(double x_min, double x_max, double dx) {
        return Lattice{x_min, x_max, dx, 0.25 * dx * dx};
    }

    std::size_t n() const {
        return static_cast<std::size_t>(std::round((x_max - x_min) / dx)) + 1;
    }
    double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
};

struct ValidationResult {
    bool ok = true;
    ErrorCode code = ErrorCode::NonFiniteRate;
    std::string message;
};

// Checks every rate is finite and nonnegative.
ValidationResult validate_rates(const ModelParams& p);

// validate_rates plus lattice checks (x_min < x_max, n >= 3, dx > 0,
// 0 < dt <= dx^2/2).  Returns a result instead of throwing so that
// config-driven entry points can report context.
ValidationResult validate_params(const ModelParams& p, const Lattice& l);

// Throwing convenience wrappers used by the solver entry points.
void require_valid_rates(const ModelParams& p);
void require_valid(const ModelParams& p, const Lattice& l);

// Field pair on a lattice at one instant.
struct Fields {
    double t = 0.0;
    std::vector<double> u;
    std::vector<double> v;
};

// Initial profiles. The analytic forms are also evaluable off-lattice
// (needed when particle positions are fed through the initial data).
struct InitialCondition {
    enum class Kind {
        HeavisideRight, // u = v = 1 on [0, inf), 0 to the left (closed at 0)
        HeavisideLeft,  // mirror image: 1 on (-inf, 0], 0 to the right
        Constant,       // u = a, v = b everywhere
        Table,          // explicit per-node values
    };

    Kind kind = Kind::HeavisideRight;
    double a = 1.0; // Constant: u level
    double b = 1.0; // Constant: v level
    std::vector<double> table_u; // Table: one value per lattice node
    std::vector<double> table_v;

    static InitialCondition heaviside_right() { return {}; }
    static InitialCondition heaviside_left() {
        InitialCondition ic;
        ic.kind = Kind::HeavisideLeft;
        return ic;
    }
    static InitialCondition constant(double a, double b) {
        InitialCondition ic;
        ic.kind = Kind::Constant;
        ic.a = a;
        ic.b = b;
        return ic;
    }
    static InitialCondition table(std::vector<double> u, std::vector<double> v) {
        InitialCondition ic;
        ic.kind = Kind::Table;
        ic.table_u = std::move(u);
        ic.table_v = std::move(v);
        return ic;
    }

    // Pointwise evaluation; Table interpolates linearly on the given lattice.
    double u0_at(double x, const Lattice& l) const;
    double v0_at(double x, const Lattice& l) const;
};

// Materialise the initial condition on a lattice.  Throws TableOutOfRange
// if tabulated values leave [0,1] or the table length does not match.
Fields build_fields(const InitialCondition& ic, const Lattice& l);

// Multiplier of the noise increment: sqrt(nu * u * (1-u)), with the argument
// clamped at 0 so that round-off just outside [0,1] cannot produce NaN.
double noise_coefficient(double u, double nu);

} // namespace fkppsb
