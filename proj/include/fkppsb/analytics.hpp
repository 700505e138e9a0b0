#pragma once

// Closed-form and semi-analytic reference quantities for the branching
// particle system started from one active particle:
//
//   expected counts  x(t) = E[#active], y(t) = E[#dormant] solving
//       x' = s x - c x + c' y,   y' = c x - c' y,   (x,y)(0) = (1,0);
//   for s = 1 the closed form uses a = (c-1)^2 + 2cc' + c'^2 + 2c' and the
//   exponents (1 - c - c' +- sqrt(a)) / 2;
//   the propagation bound lambda* = sqrt(1 - c - c' + sqrt(a));
//   the Gaussian tail majorant e^{-x^2/2} / (x sqrt(2 pi));
//   and the first-moment crossing bound
//       P(some particle beyond lambda t) <= (x(t)+y(t)) * tail(lambda sqrt(t)).
//
// All functions are pure; the ODE integrator exists to cross-check the
// closed form (and to cover s != 1, where no closed form is exposed).

#include "fkppsb/model.hpp"

namespace fkppsb {

struct CountCurve {
    double t = 0.0;
    double x = 1.0; // expected active count
    double y = 0.0; // expected dormant count
    double a = 0.0; // (c-1)^2 + 2cc' + c'^2 + 2c'
};

struct CountPair {
    double x = 1.0;
    double y = 0.0;
};

struct SpeedBound {
    double lambda_star = 0.0;
};

double count_constant_a(double c, double c_prime);

// Two-exponential closed form (unit branching rate).  Evaluated in a
// cancellation-free cosh/sinhc arrangement so the c = c' = 0 degeneration
// (a -> 1) and large-rate regimes stay accurate.
CountCurve expected_counts_closed_form(double c, double c_prime, double t);

// RK4 integration of the count ODEs with step 1e-4; honours p.s, p.c,
// p.c_prime (other rates ignored).  Serves as the independent oracle for
// the closed form.
CountPair expected_counts_ode(const ModelParams& p, double t);

// lambda* = sqrt(1 - c - c' + sqrt(a)); real and positive for all
// c, c' >= 0 except the degenerate line c' = 0, c >= 1 where it reaches 0.
SpeedBound speed_bound(double c, double c_prime);

// e^{-x^2/2} / (x sqrt(2 pi)); dominates the true upper tail of a standard
// normal for every x > 0.
double gaussian_tail_bound(double x);

// (x(t) + y(t)) * gaussian_tail_bound(lambda sqrt(t)) via the closed-form
// counts (unit branching rate regime).
double crossing_prob_bound(double c, double c_prime, double lambda, double t);

} // namespace fkppsb
