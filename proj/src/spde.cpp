#include "fkppsb/spde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fkppsb/rng.hpp"

namespace fkppsb {

namespace {

// The u-update shared by the coupled and delay steppers.  Both forms must
// run the exact same floating-point expressions: the sqrt coefficient of the
// noise amplifies any last-bit discrepancy between the two reservoirs at the
// front's toe, so "algebraically equal" is not enough for trajectory-level
// agreement.
long long advance_u(const std::vector<double>& u, const std::vector<double>& v_eff,
                    const ModelParams& p, const Lattice& l,
                    std::span<const double> noise, std::vector<double>& out) {
    const std::size_t n = u.size();
    const double dt = l.dt;
    const double diff = 0.5 / (l.dx * l.dx);
    const double noise_scale = std::sqrt(dt / l.dx);
    const bool noisy = p.nu > 0.0 && !noise.empty();
    long long clamps = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ul = u[i == 0 ? 1 : i - 1];       // mirrored neighbours
        const double ur = u[i == n - 1 ? n - 2 : i + 1];
        const double ui = u[i];
        const double lap = diff * (ul - 2.0 * ui + ur);
        const double drift = p.c * (v_eff[i] - ui) + p.s * (ui * ui - ui) -
                             p.m1 * ui + p.m2 * (1.0 - ui);
        double un = ui + dt * (lap + drift);
        if (noisy) un += noise_coefficient(ui, p.nu) * noise_scale * noise[i];
        if (un < 0.0) {
            un = 0.0;
            ++clamps;
        } else if (un > 1.0) {
            un = 1.0;
            ++clamps;
        }
        out[i] = un;
    }
    return clamps;
}

// Exact exponential relaxation of the reservoir towards the (frozen) u.
// e + g sums to 1 exactly for moderate c'*dt (Sterbenz); the guard covers
// the one-ulp overshoot possible when e < 1/2.
inline double relax(double v, double u_old, double e, double g) {
    double r = e * v + g * u_old;
    if (r > 1.0) r = 1.0;
    if (r < 0.0) r = 0.0;
    return r;
}

} // namespace

void fill_noise_panel(std::vector<double>& panel, std::uint64_t run_seed,
                      std::uint64_t step_index) {
    Rng rng(mix64(run_seed, step_index));
    for (auto& z : panel) z = rng.gaussian();
}

long long step_coupled(Fields& f, const ModelParams& p, const Lattice& l,
                       std::span<const double> noise, StepWorkspace& ws) {
    const std::size_t n = f.u.size();
    ws.u_next.resize(n);
    const long long clamps = advance_u(f.u, f.v, p, l, noise, ws.u_next);
    const double e = std::exp(-p.c_prime * l.dt);
    const double g = 1.0 - e;
    for (std::size_t i = 0; i < n; ++i) f.v[i] = relax(f.v[i], f.u[i], e, g);
    f.u.swap(ws.u_next);
    f.t += l.dt;
    return clamps;
}

std::vector<double> DelayState::memory() const {
    std::vector<double> s(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        s[i] = std::clamp(v[i] - v0_decay[i], 0.0, 1.0);
    }
    return s;
}

DelayState make_delay_state(const Fields& initial) {
    DelayState d;
    d.t = initial.t;
    d.u = initial.u;
    d.v = initial.v;        // S(0) = 0, so the composed reservoir is v0
    d.v0_decay = initial.v;
    return d;
}

long long step_delay(DelayState& d, const ModelParams& p, const Lattice& l,
                     std::span<const double> noise, StepWorkspace& ws) {
    const std::size_t n = d.u.size();
    ws.u_next.resize(n);
    const long long clamps = advance_u(d.u, d.v, p, l, noise, ws.u_next);
    const double e = std::exp(-p.c_prime * l.dt);
    const double g = 1.0 - e;
    for (std::size_t i = 0; i < n; ++i) d.v[i] = relax(d.v[i], d.u[i], e, g);
    for (std::size_t i = 0; i < n; ++i) d.v0_decay[i] *= e;
    d.u.swap(ws.u_next);
    d.t += l.dt;
    return clamps;
}

namespace {

std::uint64_t integral_steps(double horizon, double dt, const char* what) {
    if (!(horizon >= 0.0)) {
        throw std::invalid_argument(std::string(what) + ": horizon must be >= 0");
    }
    const double real = horizon / dt;
    const auto n = static_cast<std::uint64_t>(std::llround(real));
    if (std::abs(static_cast<double>(n) * dt - horizon) >
        1e-9 * std::max(1.0, horizon)) {
        throw std::invalid_argument(std::string(what) +
                                    ": horizon must be an integer multiple of dt");
    }
    return n;
}

// Sample the front into the trace; silently skip snapshots with no level
// crossing, abort the run if the front violates the boundary margin.
void sample_front(const Fields& f, const Lattice& l, const RunOptions& opts,
                  FrontTrace& trace) {
    double fr;
    try {
        fr = front_position(f, l, opts.theta);
    } catch (const SimError& e) {
        if (e.code() == ErrorCode::NoCrossing) return;
        throw;
    }
    const double margin = 10.0 * l.dx;
    if (fr > l.x_max - margin || fr < l.x_min + margin) {
        throw SimError(ErrorCode::BoundaryContact,
                       "front at " + std::to_string(fr) +
                           " is within 10 dx of the domain boundary");
    }
    trace.samples.push_back({f.t, fr});
}

} // namespace

SpdeRun run_spde(const InitialCondition& ic, const ModelParams& p,
                 const Lattice& l, double horizon, std::uint64_t record_every,
                 std::uint64_t seed, const RunOptions& opts) {
    require_valid(p, l);
    const std::uint64_t n_steps = integral_steps(horizon, l.dt, "run_spde");

    Fields f = build_fields(ic, l);
    DelayState d;
    if (opts.use_delay) d = make_delay_state(f);

    SpdeRun run;
    run.front.threshold = opts.theta;
    run.snapshots.push_back(f);
    if (opts.track_front) sample_front(f, l, opts, run.front);

    std::vector<double> panel;
    if (p.nu > 0.0) panel.resize(l.n());
    StepWorkspace ws;

    for (std::uint64_t step = 0; step < n_steps; ++step) {
        std::span<const double> noise;
        if (p.nu > 0.0) {
            fill_noise_panel(panel, seed, step);
            noise = panel;
        }
        if (opts.use_delay) {
            run.clamp_count += step_delay(d, p, l, noise, ws);
            f.u = d.u;
            f.v = d.v;
        } else {
            run.clamp_count += step_coupled(f, p, l, noise, ws);
        }
        f.t = static_cast<double>(step + 1) * l.dt;

        const bool last = step + 1 == n_steps;
        if (last || (record_every > 0 && (step + 1) % record_every == 0)) {
            run.snapshots.push_back(f);
            if (opts.track_front) sample_front(f, l, opts, run.front);
        }
    }
    run.steps = n_steps;
    return run;
}

namespace {

// One reaction half-interval: n_substep explicit Euler substeps of size dt
// for u with the exact exponential v-relaxation, i.e. the same reaction
// treatment as the finite-difference stepper minus the Laplacian.
void reaction_half(std::vector<double>& u, std::vector<double>& v,
                   const ModelParams& p, double dt, int n_substep) {
    const double e = std::exp(-p.c_prime * dt);
    const double g = 1.0 - e;
    const std::size_t n = u.size();
    for (int k = 0; k < n_substep; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const double ui = u[i];
            const double drift = p.c * (v[i] - ui) + p.s * (ui * ui - ui) -
                                 p.m1 * ui + p.m2 * (1.0 - ui);
            double un = ui + dt * drift;
            un = std::clamp(un, 0.0, 1.0);
            v[i] = relax(v[i], ui, e, g);
            u[i] = un;
        }
    }
}

} // namespace

Fields mild_deterministic(const InitialCondition& ic, const ModelParams& p,
                          const Lattice& l, double horizon,
                          const MildOptions& opts) {
    require_valid(p, l);
    if (p.nu != 0.0) {
        throw SimError(ErrorCode::RequiresDeterministic,
                       "mild solver is defined for nu = 0 only (nu = " +
                           std::to_string(p.nu) + ")");
    }
    if (opts.substeps_per_macro < 2 || opts.substeps_per_macro % 2 != 0) {
        throw std::invalid_argument(
            "mild_deterministic: substeps_per_macro must be even and >= 2");
    }

    Fields f = build_fields(ic, l);
    if (horizon == 0.0) return f;

    const double tau = static_cast<double>(opts.substeps_per_macro) * l.dt;
    const std::uint64_t n_macro = integral_steps(horizon, tau, "mild_deterministic");

    // Truncated, renormalised Gaussian kernel sampled on the lattice.
    const auto half_width =
        static_cast<std::ptrdiff_t>(std::ceil(8.0 * std::sqrt(tau) / l.dx));
    const auto n = static_cast<std::ptrdiff_t>(l.n());
    if (half_width >= n) {
        throw std::invalid_argument(
            "mild_deterministic: kernel wider than the domain; refine dx or "
            "shrink the macro-step");
    }
    std::vector<double> w(static_cast<std::size_t>(half_width) + 1);
    for (std::ptrdiff_t k = 0; k <= half_width; ++k) {
        const double r = static_cast<double>(k) * l.dx;
        w[static_cast<std::size_t>(k)] = std::exp(-r * r / (2.0 * tau));
    }
    double mass = w[0];
    for (std::ptrdiff_t k = 1; k <= half_width; ++k) {
        mass += 2.0 * w[static_cast<std::size_t>(k)];
    }
    for (auto& wk : w) wk /= mass;

    std::vector<double> conv(f.u.size());
    const int half_sub = opts.substeps_per_macro / 2;

    for (std::uint64_t m = 0; m < n_macro; ++m) {
        reaction_half(f.u, f.v, p, l.dt, half_sub);

        // Heat flow on u: discrete convolution with zero-flux reflection.
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            double acc = w[0] * f.u[static_cast<std::size_t>(i)];
            for (std::ptrdiff_t k = 1; k <= half_width; ++k) {
                std::ptrdiff_t jl = i - k;
                std::ptrdiff_t jr = i + k;
                if (jl < 0) jl = -jl;
                if (jr > n - 1) jr = 2 * (n - 1) - jr;
                acc += w[static_cast<std::size_t>(k)] *
                       (f.u[static_cast<std::size_t>(jl)] +
                        f.u[static_cast<std::size_t>(jr)]);
            }
            conv[static_cast<std::size_t>(i)] = std::clamp(acc, 0.0, 1.0);
        }
        f.u.swap(conv);

        reaction_half(f.u, f.v, p, l.dt, half_sub);
    }
    f.t = horizon;
    return f;
}

double front_position(const Fields& f, const Lattice& l, double theta) {
    if (!(theta > 0.0 && theta < 1.0)) {
        throw std::invalid_argument("front_position: theta must be in (0,1)");
    }
    const auto& u = f.u;
    const std::size_t n = u.size();
    // p = 1 - u decays left to right for invading fronts; find the rightmost
    // node still at or above the level.
    std::ptrdiff_t j = -1;
    for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(n) - 1; i >= 0; --i) {
        if (1.0 - u[static_cast<std::size_t>(i)] >= theta) {
            j = i;
            break;
        }
    }
    if (j < 0) {
        throw SimError(ErrorCode::NoCrossing, "p is everywhere below theta");
    }
    if (j == static_cast<std::ptrdiff_t>(n) - 1) {
        bool all = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (1.0 - u[i] < theta) {
                all = false;
                break;
            }
        }
        if (all) {
            throw SimError(ErrorCode::NoCrossing, "p is everywhere at or above theta");
        }
        return l.x(n - 1); // crossing lies beyond the right edge; clip
    }
    const double pj = 1.0 - u[static_cast<std::size_t>(j)];
    const double pj1 = 1.0 - u[static_cast<std::size_t>(j) + 1];
    return l.x(static_cast<std::size_t>(j)) + l.dx * (pj - theta) / (pj - pj1);
}

SpeedFit invasion_speed(const FrontTrace& trace, double t_lo, double t_hi) {
    std::vector<FrontSample> in;
    for (const auto& s : trace.samples) {
        if (s.t >= t_lo && s.t <= t_hi) in.push_back(s);
    }
    if (in.size() < 10) {
        throw SimError(ErrorCode::InsufficientSamples,
                       "need >= 10 front samples in the window, have " +
                           std::to_string(in.size()));
    }
    const auto m = static_cast<double>(in.size());
    double st = 0.0, sf = 0.0;
    for (const auto& s : in) {
        st += s.t;
        sf += s.front;
    }
    const double mt = st / m;
    const double mf = sf / m;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& s : in) {
        sxx += (s.t - mt) * (s.t - mt);
        sxy += (s.t - mt) * (s.front - mf);
    }
    const double slope = sxy / sxx;
    const double intercept = mf - slope * mt;
    double ssr = 0.0;
    for (const auto& s : in) {
        const double r = s.front - (intercept + slope * s.t);
        ssr += r * r;
    }
    const double var = std::max(0.0, ssr / (m - 2.0));
    return {slope, std::sqrt(var / sxx), in.size()};
}

} // namespace fkppsb
