#pragma once

// The particle dual of the lattice system: an on/off branching coalescing
// Brownian motion with killing.  Active particles diffuse, branch (rate s),
// die (rate m2), and fall dormant (rate c); dormant particles are frozen in
// place and wake at rate c'.  Two active particles within eps of each other
// accrue approximate intersection local time at rate 1/(2 eps); each
// unordered pair owns a lazily created clock with an Exp(nu/2) threshold,
// and when the accumulated local time passes the threshold the pair
// coalesces (the higher id is removed).  The killing functional
// A = \int_0^t #active ds feeds the weight e^{-m1 A}.
//
// Time advances in fixed steps dt_d.  Within one step each active particle
// resolves at most one discrete event (first arrival among the competing
// exponentials); every particle that is active after event resolution takes
// a Gaussian increment of variance dt_d.  Runs are deterministic functions
// of their seed.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "fkppsb/model.hpp"
#include "fkppsb/rng.hpp"

namespace fkppsb {

enum class PState : std::uint8_t { active, dormant };

struct Particle {
    std::uint64_t id = 0;
    double pos = 0.0;
    PState state = PState::active;
    bool alive = true;
};

struct PairClock {
    double local_time = 0.0;
    double threshold = 0.0; // Exp(nu/2) draw, made on first contact
};

struct DualInit {
    double pos = 0.0;
    PState state = PState::active;
};

struct ContactPair {
    std::uint64_t id_lo = 0;
    std::uint64_t id_hi = 0;
    std::uint32_t idx_a = 0;
    std::uint32_t idx_b = 0;
};

struct DualSystem {
    std::vector<Particle> particles;
    double t = 0.0;
    double A = 0.0; // accumulated active-count integral
    double dt_d = 1e-3;
    double eps = 0.0; // local-time bandwidth
    std::map<std::pair<std::uint64_t, std::uint64_t>, PairClock> pair_clocks;
    Rng rng{0};
    std::uint64_t next_id = 0;
    std::uint64_t step_count = 0;

    // reusable workspace for the contact sweep; not logical state
    std::vector<std::uint32_t> scratch_active;
    std::vector<ContactPair> scratch_pairs;

    std::size_t n_active() const;
    std::size_t n_dormant() const;
};

// Start a system at t = 0.  eps <= 0 selects the default 4 sqrt(dt_d).
// Throws EmptyInitial for an empty configuration.
DualSystem init_dual(const std::vector<DualInit>& initial, const ModelParams& p,
                     double dt_d, double eps, std::uint64_t seed);

// Advance one step of dt_d.  Dead particles are removed before returning.
void step_dual(DualSystem& sys, const ModelParams& p);

// Maximum position over all living particles, active and dormant alike.
// Throws Extinct when none remain.
double rightmost(const DualSystem& sys);

// e^{-m1 * A}.
double killing_weight(const DualSystem& sys, double m1);

struct DualTraceRow {
    double t = 0.0;
    std::size_t n_active = 0;
    std::size_t n_dormant = 0;
    double rightmost = 0.0; // meaningless once extinct (rows stop earlier)
    double A = 0.0;
};

struct DualOptions {
    double prune_gap = 0.0;            // > 0: drop particles below max - gap
    std::uint64_t cap = 5'000'000;     // population explosion guard
    std::uint64_t record_every = 0;    // trace cadence in steps; 0 = ends only
};

struct DualRun {
    std::vector<Particle> final_particles;
    std::vector<DualTraceRow> trace;
    double A = 0.0;
    double weight = 1.0; // e^{-m1 A}
    bool pruned = false;
    bool extinct = false;
};

// Run to `horizon` (integer multiple of dt_d).  Pruning, when enabled,
// discards any particle more than prune_gap below the current maximum
// position after each step.  Throws ExplosionGuard if the population
// exceeds opts.cap.
DualRun simulate_dual(const std::vector<DualInit>& initial, const ModelParams& p,
                      double horizon, double dt_d, double eps,
                      const DualOptions& opts, std::uint64_t seed);

// ---------------------------------------------------------------------------
// statistics built on the dual

struct Estimate {
    double value = 0.0;
    double se = 0.0;
    long long n = 0;
};

// Sample mean with its standard error (sd / sqrt(n)); needs n >= 2.
Estimate summarize_samples(const std::vector<double>& xs, const char* what);

struct ManyToOneResult {
    Estimate lhs;         // E[sum over particles of 1{pos >= x0}]
    Estimate rhs;         // E[#particles] * P(single path >= x0), with
                          // the product's propagated standard error
    Estimate count_mean;  // E[#particles] from count-only replicates
    Estimate single_prob; // P(B_t >= x0) from single on/off paths
};

// Check E[sum_K F] = E|K| * E[F(B)] for F = 1_{[x0, inf)} with three
// independent replicate ensembles (full runs / count-only chains / single
// on/off Brownian paths).  Requires m1 = m2 = nu = 0.
ManyToOneResult many_to_one_estimate(const ModelParams& p, double x0, double t,
                                     long long n_replicates, double dt_d,
                                     std::uint64_t seed, int threads = 0);

struct LocalTimeCalibration {
    Estimate mean_local_time;
    double target = 0.0; // sqrt(1/pi), the continuum value at t = 1
};

// Mean approximate pair local time of two independent always-active
// standard Brownian motions run to time t.
LocalTimeCalibration calibrate_local_time(double t, double eps, double dt_d,
                                          long long n_replicates,
                                          std::uint64_t seed, int threads = 0);

} // namespace fkppsb
