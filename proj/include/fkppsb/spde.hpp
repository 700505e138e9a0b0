#pragma once

// Lattice solvers for the coupled (u, v) system:
//
//   du = [ 1/2 u_xx + c(v - u) + s(u^2 - u) - m1 u + m2 (1 - u) ] dt
//        + sqrt(nu u (1-u)) dW,
//   dv = c'(u - v) dt,
//
// discretized by explicit Euler-Maruyama in u (noise scaled by sqrt(dt/dx)
// per node) and an exact exponential relaxation in v (u frozen over the
// step).  Post-step values of u are clamped to [0,1] and clamp events are
// counted.  Boundaries are zero-flux via mirrored neighbours.
//
// The same system can be evolved in its delay form, where v is eliminated
// in favour of the memory integral S(t) = c' \int_0^t e^{-c'(t-s)} u(s) ds
// plus the decaying initial reservoir e^{-c't} v0.  Both forms share the
// identical u-update arithmetic, so their u trajectories agree bit-for-bit
// on a common noise stream (asserted in the tests).
//
// A deterministic mild-form solver (heat-kernel convolution with Strang
// splitting of the reaction) provides an independent cross-check for nu = 0.

#include <cstdint>
#include <span>
#include <vector>

#include "fkppsb/model.hpp"

namespace fkppsb {

// ---------------------------------------------------------------------------
// noise panels

// Fill `panel` (already sized to the lattice) with iid standard gaussians
// for one step.  Reproducible: the stream is a pure function of
// (run_seed, step_index); run seeds for replicate k of an estimator are
// derived as mix64(master_seed, k).
void fill_noise_panel(std::vector<double>& panel, std::uint64_t run_seed,
                      std::uint64_t step_index);

// ---------------------------------------------------------------------------
// single steps

struct StepWorkspace {
    std::vector<double> u_next;
};

// One explicit step of the coupled system, in place.  `noise` is either
// empty (deterministic run) or one standard gaussian per node.  Returns
// the number of clamp events in this step.
long long step_coupled(Fields& f, const ModelParams& p, const Lattice& l,
                       std::span<const double> noise, StepWorkspace& ws);

// State of the delay form.  Internally the solver evolves the composed
// reservoir v = S + v0_decay directly (field `v`), because that is the
// quantity entering the u-drift: updating it with the exact same floating
// point expression as step_coupled keeps the two u trajectories identical
// rather than merely O(eps)-close.  S is exposed as the derived view
// memory() = clamp(v - v0_decay, 0, 1).
struct DelayState {
    double t = 0.0;
    std::vector<double> u;
    std::vector<double> v;        // composed reservoir, = S + v0_decay
    std::vector<double> v0_decay; // e^{-c' t} v0

    std::vector<double> memory() const; // the integral term S
};

DelayState make_delay_state(const Fields& initial);

// One step of the delay form on the same arithmetic as step_coupled.
long long step_delay(DelayState& d, const ModelParams& p, const Lattice& l,
                     std::span<const double> noise, StepWorkspace& ws);

// ---------------------------------------------------------------------------
// full runs

struct FrontSample {
    double t = 0.0;
    double front = 0.0;
};

struct FrontTrace {
    std::vector<FrontSample> samples;
    double threshold = 0.5;
};

struct RunOptions {
    bool track_front = true; // sample the front at every snapshot
    double theta = 0.5;      // front threshold on p = 1 - u
    bool use_delay = false;  // evolve via the delay form (testing hook)
};

struct SpdeRun {
    std::vector<Fields> snapshots; // first entry t = 0, last entry t = horizon
    FrontTrace front;
    long long clamp_count = 0;
    std::uint64_t steps = 0;
};

// Run from t = 0 to `horizon` (must be an integer multiple of l.dt).
// A snapshot (and front sample, if tracking) is recorded at t = 0, every
// `record_every` steps (0 = none in between), and at the horizon.  Throws
// BoundaryContact if a tracked front comes within 10 dx of either boundary;
// snapshots where no level crossing exists contribute no front sample.
SpdeRun run_spde(const InitialCondition& ic, const ModelParams& p,
                 const Lattice& l, double horizon, std::uint64_t record_every,
                 std::uint64_t seed, const RunOptions& opts = {});

// ---------------------------------------------------------------------------
// deterministic mild-form solver (nu = 0 only)

struct MildOptions {
    // Macro-step is substeps_per_macro * l.dt; the reaction halves are
    // integrated with Euler substeps of size l.dt and the exact exponential
    // v-relaxation, mirroring the finite-difference reaction treatment.
    int substeps_per_macro = 10;
};

// Heat-kernel-convolution solver: per macro-step tau, Strang splitting
// reaction(tau/2) -> exact heat flow via discrete Gaussian convolution
// (kernel truncated at 8 sqrt(tau), renormalised to unit mass, zero-flux by
// reflection) -> reaction(tau/2).  Throws RequiresDeterministic if nu != 0.
Fields mild_deterministic(const InitialCondition& ic, const ModelParams& p,
                          const Lattice& l, double horizon,
                          const MildOptions& opts = {});

// ---------------------------------------------------------------------------
// front tracking

// Position of the invasion front of p = 1 - u: the rightmost level crossing
// sup{x : p(x) >= theta}, located by linear interpolation on the bracketing
// segment (exact for piecewise-linear profiles).  Throws NoCrossing if p is
// everywhere below theta or everywhere at/above it.
double front_position(const Fields& f, const Lattice& l, double theta = 0.5);

struct SpeedFit {
    double speed = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
};

// Least-squares slope of front position vs time over samples with
// t in [t_lo, t_hi].  Requires at least 10 samples in the window.
SpeedFit invasion_speed(const FrontTrace& trace, double t_lo, double t_hi);

} // namespace fkppsb
