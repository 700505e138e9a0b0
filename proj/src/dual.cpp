#include "fkppsb/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

#include "fkppsb/parallel.hpp"

namespace fkppsb {

namespace {

std::uint64_t integral_steps(double horizon, double dt, const char* what) {
    if (!(horizon >= 0.0)) {
        throw std::invalid_argument(std::string(what) + ": horizon must be >= 0");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument(std::string(what) + ": dt must be > 0");
    }
    const auto n = static_cast<std::uint64_t>(std::llround(horizon / dt));
    if (std::abs(static_cast<double>(n) * dt - horizon) >
        1e-9 * std::max(1.0, horizon)) {
        throw std::invalid_argument(std::string(what) +
                                    ": horizon must be an integer multiple of dt");
    }
    return n;
}

} // namespace

Estimate summarize_samples(const std::vector<double>& xs, const char* what) {
    if (xs.size() < 2) {
        throw SimError(ErrorCode::InsufficientSamples,
                       std::string(what) + ": need at least 2 replicates");
    }
    const auto n = static_cast<double>(xs.size());
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, sd / std::sqrt(n), static_cast<long long>(xs.size())};
}

std::size_t DualSystem::n_active() const {
    std::size_t k = 0;
    for (const auto& q : particles) {
        if (q.alive && q.state == PState::active) ++k;
    }
    return k;
}

std::size_t DualSystem::n_dormant() const {
    std::size_t k = 0;
    for (const auto& q : particles) {
        if (q.alive && q.state == PState::dormant) ++k;
    }
    return k;
}

DualSystem init_dual(const std::vector<DualInit>& initial, const ModelParams& p,
                     double dt_d, double eps, std::uint64_t seed) {
    require_valid_rates(p);
    if (initial.empty()) {
        throw SimError(ErrorCode::EmptyInitial, "no particles in the initial state");
    }
    if (!(dt_d > 0.0) || !std::isfinite(dt_d)) {
        throw std::invalid_argument("init_dual: dt_d must be positive and finite");
    }
    DualSystem sys;
    sys.dt_d = dt_d;
    sys.eps = eps > 0.0 ? eps : 4.0 * std::sqrt(dt_d);
    sys.rng = Rng(seed);
    sys.particles.reserve(initial.size());
    for (const auto& q : initial) {
        sys.particles.push_back({sys.next_id++, q.pos, q.state, true});
    }
    return sys;
}

void step_dual(DualSystem& sys, const ModelParams& p) {
    const double dt = sys.dt_d;
    auto& parts = sys.particles;
    const std::size_t n0 = parts.size();

    // Occupation integral: active count taken before event resolution.
    std::size_t active_before = 0;
    for (const auto& q : parts) {
        if (q.state == PState::active) ++active_before;
    }
    sys.A += static_cast<double>(active_before) * dt;

    // Discrete events: at most one per active particle per step, chosen by
    // first arrival among the competing exponentials (rates s, m2, c).
    const double total_rate = p.s + p.m2 + p.c;
    const double p_event =
        total_rate > 0.0 ? -std::expm1(-total_rate * dt) : 0.0;
    const double p_wake =
        p.c_prime > 0.0 ? -std::expm1(-p.c_prime * dt) : 0.0;

    bool removed_any = false;
    for (std::size_t i = 0; i < n0; ++i) {
        if (parts[i].state == PState::active) {
            if (p_event > 0.0 && sys.rng.uniform() < p_event) {
                const double which = sys.rng.uniform() * total_rate;
                if (which < p.s) {
                    parts.push_back({sys.next_id++, parts[i].pos,
                                     PState::active, true});
                } else if (which < p.s + p.m2) {
                    parts[i].alive = false;
                    removed_any = true;
                } else {
                    parts[i].state = PState::dormant;
                }
            }
        } else {
            if (p_wake > 0.0 && sys.rng.uniform() < p_wake) {
                parts[i].state = PState::active;
            }
        }
    }

    // Motion: everything active after event resolution (children included)
    // moves; dormant particles stay frozen.
    const double sd = std::sqrt(dt);
    for (auto& q : parts) {
        if (q.alive && q.state == PState::active) {
            q.pos += sd * sys.rng.gaussian();
        }
    }

    // Coalescence: active pairs closer than eps accrue approximate local
    // time dt/(2 eps) on their (lazily created) clock.
    if (p.nu > 0.0) {
        auto& act = sys.scratch_active;
        act.clear();
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (parts[i].alive && parts[i].state == PState::active) {
                act.push_back(static_cast<std::uint32_t>(i));
            }
        }
        std::sort(act.begin(), act.end(),
                  [&](std::uint32_t a, std::uint32_t b) {
                      if (parts[a].pos != parts[b].pos) {
                          return parts[a].pos < parts[b].pos;
                      }
                      return parts[a].id < parts[b].id;
                  });
        auto& pairs = sys.scratch_pairs;
        pairs.clear();
        for (std::size_t a = 0; a + 1 < act.size(); ++a) {
            for (std::size_t b = a + 1; b < act.size(); ++b) {
                if (parts[act[b]].pos - parts[act[a]].pos >= sys.eps) break;
                const auto ia = act[a];
                const auto ib = act[b];
                ContactPair cp;
                cp.id_lo = std::min(parts[ia].id, parts[ib].id);
                cp.id_hi = std::max(parts[ia].id, parts[ib].id);
                cp.idx_a = ia;
                cp.idx_b = ib;
                pairs.push_back(cp);
            }
        }
        // Deterministic processing order: by id pair, independent of the
        // position sort above.
        std::sort(pairs.begin(), pairs.end(),
                  [](const ContactPair& x, const ContactPair& y) {
                      return std::tie(x.id_lo, x.id_hi) <
                             std::tie(y.id_lo, y.id_hi);
                  });
        const double dl = dt / (2.0 * sys.eps);
        for (const auto& cp : pairs) {
            if (!parts[cp.idx_a].alive || !parts[cp.idx_b].alive) continue;
            auto [it, fresh] =
                sys.pair_clocks.try_emplace({cp.id_lo, cp.id_hi});
            if (fresh) {
                it->second.threshold = sys.rng.exponential(0.5 * p.nu);
            }
            it->second.local_time += dl;
            if (it->second.local_time >= it->second.threshold) {
                auto& loser = parts[cp.idx_a].id > parts[cp.idx_b].id
                                  ? parts[cp.idx_a]
                                  : parts[cp.idx_b];
                loser.alive = false;
                removed_any = true;
                sys.pair_clocks.erase(it);
            }
        }
    }

    if (removed_any) {
        std::erase_if(parts, [](const Particle& q) { return !q.alive; });
    }
    ++sys.step_count;
    sys.t = static_cast<double>(sys.step_count) * dt;
}

double rightmost(const DualSystem& sys) {
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& q : sys.particles) {
        if (!q.alive) continue;
        any = true;
        best = std::max(best, q.pos);
    }
    if (!any) throw SimError(ErrorCode::Extinct, "no living particles");
    return best;
}

double killing_weight(const DualSystem& sys, double m1) {
    return std::exp(-m1 * sys.A);
}

namespace {

void record_row(const DualSystem& sys, std::vector<DualTraceRow>& out) {
    if (sys.particles.empty()) return; // rows stop at extinction
    out.push_back({sys.t, sys.n_active(), sys.n_dormant(), rightmost(sys),
                   sys.A});
}

} // namespace

DualRun simulate_dual(const std::vector<DualInit>& initial, const ModelParams& p,
                      double horizon, double dt_d, double eps,
                      const DualOptions& opts, std::uint64_t seed) {
    DualSystem sys = init_dual(initial, p, dt_d, eps, seed);
    const std::uint64_t n_steps = integral_steps(horizon, dt_d, "simulate_dual");

    DualRun run;
    record_row(sys, run.trace);
    for (std::uint64_t step = 1; step <= n_steps; ++step) {
        step_dual(sys, p);
        if (sys.particles.size() > opts.cap) {
            throw SimError(ErrorCode::ExplosionGuard,
                           "population " + std::to_string(sys.particles.size()) +
                               " exceeds cap " + std::to_string(opts.cap));
        }
        if (opts.prune_gap > 0.0 && !sys.particles.empty()) {
            double maxpos = sys.particles.front().pos;
            for (const auto& q : sys.particles) maxpos = std::max(maxpos, q.pos);
            const double cut = maxpos - opts.prune_gap;
            const std::size_t before = sys.particles.size();
            std::erase_if(sys.particles,
                          [cut](const Particle& q) { return q.pos < cut; });
            if (sys.particles.size() != before) run.pruned = true;
        }
        if (sys.particles.empty()) {
            // Frozen forever; A and the weight no longer change.
            sys.t = static_cast<double>(n_steps) * dt_d;
            break;
        }
        if (step == n_steps ||
            (opts.record_every > 0 && step % opts.record_every == 0)) {
            record_row(sys, run.trace);
        }
    }
    run.final_particles = sys.particles;
    run.A = sys.A;
    run.weight = killing_weight(sys, p.m1);
    run.extinct = sys.particles.empty();
    return run;
}

ManyToOneResult many_to_one_estimate(const ModelParams& p, double x0, double t,
                                     long long n_replicates, double dt_d,
                                     std::uint64_t seed, int threads) {
    require_valid_rates(p);
    if (p.m1 != 0.0 || p.m2 != 0.0 || p.nu != 0.0) {
        throw std::invalid_argument(
            "many_to_one_estimate: requires m1 = m2 = nu = 0");
    }
    if (n_replicates < 2) {
        throw SimError(ErrorCode::InsufficientSamples,
                       "many_to_one_estimate: need at least 2 replicates");
    }
    const std::uint64_t n_steps = integral_steps(t, dt_d, "many_to_one_estimate");
    const auto n = static_cast<std::size_t>(n_replicates);

    // Full branching runs.
    std::vector<double> lhs_vals(n);
    const std::uint64_t master_full = mix64(seed, 1);
    for_each_replicate(
        n,
        [&](std::size_t k) {
            const DualRun r =
                simulate_dual({{0.0, PState::active}}, p, t, dt_d, 0.0,
                              DualOptions{}, mix64(master_full, k));
            double cnt = 0.0;
            for (const auto& q : r.final_particles) {
                if (q.pos >= x0) cnt += 1.0;
            }
            lhs_vals[k] = cnt;
        },
        ExecMode::Parallel, threads);

    // Count-only chains (no positions).
    std::vector<double> count_vals(n);
    const std::uint64_t master_cnt = mix64(seed, 2);
    const double total_rate = p.s + p.m2 + p.c;
    const double p_event =
        total_rate > 0.0 ? -std::expm1(-total_rate * dt_d) : 0.0;
    const double p_wake =
        p.c_prime > 0.0 ? -std::expm1(-p.c_prime * dt_d) : 0.0;
    for_each_replicate(
        n,
        [&](std::size_t k) {
            Rng rng(mix64(master_cnt, k));
            std::uint64_t i = 1, j = 0;
            for (std::uint64_t step = 0; step < n_steps; ++step) {
                std::uint64_t branches = 0, to_dormant = 0, wakes = 0;
                for (std::uint64_t a = 0; a < i; ++a) {
                    if (p_event > 0.0 && rng.uniform() < p_event) {
                        const double which = rng.uniform() * total_rate;
                        if (which < p.s) {
                            ++branches;
                        } else if (which < p.s + p.m2) {
                            // unreachable: m2 = 0
                        } else {
                            ++to_dormant;
                        }
                    }
                }
                for (std::uint64_t d = 0; d < j; ++d) {
                    if (p_wake > 0.0 && rng.uniform() < p_wake) ++wakes;
                }
                i = i + branches + wakes - to_dormant;
                j = j + to_dormant - wakes;
            }
            count_vals[k] = static_cast<double>(i + j);
        },
        ExecMode::Parallel, threads);

    // Single on/off Brownian paths (switching only).
    std::vector<double> bm_vals(n);
    const std::uint64_t master_bm = mix64(seed, 3);
    const double p_off = p.c > 0.0 ? -std::expm1(-p.c * dt_d) : 0.0;
    const double sd = std::sqrt(dt_d);
    for_each_replicate(
        n,
        [&](std::size_t k) {
            Rng rng(mix64(master_bm, k));
            double pos = 0.0;
            bool active = true;
            for (std::uint64_t step = 0; step < n_steps; ++step) {
                if (active) {
                    if (p_off > 0.0 && rng.uniform() < p_off) active = false;
                } else {
                    if (p_wake > 0.0 && rng.uniform() < p_wake) active = true;
                }
                if (active) pos += sd * rng.gaussian();
            }
            bm_vals[k] = pos >= x0 ? 1.0 : 0.0;
        },
        ExecMode::Parallel, threads);

    ManyToOneResult out;
    out.lhs = summarize_samples(lhs_vals, "many_to_one lhs");
    out.count_mean = summarize_samples(count_vals, "many_to_one counts");
    out.single_prob = summarize_samples(bm_vals, "many_to_one single path");
    out.rhs.value = out.count_mean.value * out.single_prob.value;
    out.rhs.se = std::sqrt(
        out.count_mean.se * out.single_prob.value * out.count_mean.se *
            out.single_prob.value +
        out.count_mean.value * out.single_prob.se * out.count_mean.value *
            out.single_prob.se);
    out.rhs.n = n_replicates;
    return out;
}

LocalTimeCalibration calibrate_local_time(double t, double eps, double dt_d,
                                          long long n_replicates,
                                          std::uint64_t seed, int threads) {
    if (!(eps > 0.0)) {
        throw SimError(ErrorCode::NonPositiveArgument,
                       "calibrate_local_time: eps must be > 0");
    }
    if (n_replicates < 2) {
        throw SimError(ErrorCode::InsufficientSamples,
                       "calibrate_local_time: need at least 2 replicates");
    }
    const std::uint64_t n_steps = integral_steps(t, dt_d, "calibrate_local_time");
    const auto n = static_cast<std::size_t>(n_replicates);
    const double sd = std::sqrt(dt_d);
    const double dl = dt_d / (2.0 * eps);

    std::vector<double> vals(n);
    for_each_replicate(
        n,
        [&](std::size_t k) {
            Rng rng(mix64(seed, k));
            double x1 = 0.0, x2 = 0.0, local = 0.0;
            for (std::uint64_t step = 0; step < n_steps; ++step) {
                x1 += sd * rng.gaussian();
                x2 += sd * rng.gaussian();
                if (std::abs(x1 - x2) < eps) local += dl;
            }
            vals[k] = local;
        },
        ExecMode::Parallel, threads);

    LocalTimeCalibration out;
    out.mean_local_time = summarize_samples(vals, "calibrate_local_time");
    out.target = 0.5641895835477563; // sqrt(1/pi)
    return out;
}

} // namespace fkppsb
