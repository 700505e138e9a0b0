#pragma once

// Two-sided verification of the moment identity linking the lattice system
// and the particle dual.  For a dual started at positions x_beta (active)
// and y_gamma (dormant),
//
//   E[ prod_beta u(t, x_beta) * prod_gamma v(t, y_gamma) ]
//     = E[ prod_{active at t} u0(pos) * prod_{dormant at t} v0(pos)
//          * e^{-m1 A} ],
//
// and, for the deterministic regime (nu = m1 = m2 = 0, Heaviside start,
// single active dual particle at 0),
//
//   u(t, x) = P( max over all particles at t <= x ).
//
// Both sides are estimated with independent replicate streams; reports
// carry the two estimates, their standard errors, the discrepancy in
// combined sigmas, and a pass flag against tolerance = tol_abs + 3 sigma.

#include <cstdint>
#include <vector>

#include "fkppsb/dual.hpp"
#include "fkppsb/model.hpp"
#include "fkppsb/spde.hpp"

namespace fkppsb {

struct DualityReport {
    Estimate lhs;                   // lattice side
    Estimate rhs;                   // particle side
    double discrepancy_sigmas = 0.0; // |lhs-rhs| / sqrt(se_l^2 + se_r^2)
    double tol_abs = 0.0;           // fixed discretization allowance
    double tolerance = 0.0;         // tol_abs + 3 sqrt(se_l^2 + se_r^2)
    double probe = 0.0;             // max-CDF checks: the probe position
    bool pass = false;
};

struct DualityOptions {
    Lattice lattice = {};     // defaults to [-10, 10], dx = 0.1, dt = dx^2/4
    double tol_abs = 0.03;    // discretization allowance
    double dt_d = 1e-3;       // dual time step
    double eps = 0.0;         // local-time bandwidth; <= 0 = 4 sqrt(dt_d)
    int threads = 0;          // 0 = runtime default
};

// Estimate both sides of the moment identity.  lhs averages the product of
// u (at initially-active positions) and v (at initially-dormant positions)
// over n_spde lattice replicates, read off the grid by linear interpolation;
// with nu = 0 the lattice side is deterministic and runs once.  rhs averages
// the initial-condition product at final particle positions times the
// killing weight over n_dual particle replicates (pruning disabled).
DualityReport moment_duality_check(const InitialCondition& ic,
                                   const ModelParams& p,
                                   const std::vector<DualInit>& dual_initial,
                                   double t, long long n_spde, long long n_dual,
                                   std::uint64_t seed,
                                   const DualityOptions& opts = {});

// Max-CDF checks at several probe positions against one deterministic run
// (pde must come from run_spde on heaviside_right data with the same
// params).  Requires nu = m1 = m2 = 0.  The dual starts from a single
// active particle at 0; one replicate ensemble serves all probes.
std::vector<DualityReport> max_cdf_check(const ModelParams& p, double t,
                                         const std::vector<double>& probes,
                                         long long n_dual, std::uint64_t seed,
                                         const SpdeRun& pde, const Lattice& l,
                                         const DualityOptions& opts = {});

// Linear interpolation of a lattice field at x (clamped to the domain).
double interpolate_field(const std::vector<double>& field, const Lattice& l,
                         double x);

} // namespace fkppsb
