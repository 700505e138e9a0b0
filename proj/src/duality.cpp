#include "fkppsb/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fkppsb/parallel.hpp"

namespace fkppsb {

double interpolate_field(const std::vector<double>& field, const Lattice& l,
                         double x) {
    if (x <= l.x_min) return field.front();
    if (x >= l.x_max) return field.back();
    const double f = (x - l.x_min) / l.dx;
    const auto i = static_cast<std::size_t>(f);
    const double w = f - static_cast<double>(i);
    return (1.0 - w) * field[i] + w * field[i + 1];
}

namespace {

void finalize_report(DualityReport& rep, double tol_abs) {
    const double combined =
        std::sqrt(rep.lhs.se * rep.lhs.se + rep.rhs.se * rep.rhs.se);
    const double diff = std::abs(rep.lhs.value - rep.rhs.value);
    rep.discrepancy_sigmas = combined > 0.0
                                 ? diff / combined
                                 : (diff == 0.0 ? 0.0
                                                : std::numeric_limits<double>::infinity());
    rep.tol_abs = tol_abs;
    rep.tolerance = tol_abs + 3.0 * combined;
    rep.pass = diff <= rep.tolerance;
}

double dual_side_product(const DualRun& run, const InitialCondition& ic,
                         const Lattice& l) {
    double prod = 1.0;
    for (const auto& q : run.final_particles) {
        prod *= q.state == PState::active ? ic.u0_at(q.pos, l)
                                          : ic.v0_at(q.pos, l);
    }
    return prod * run.weight;
}

} // namespace

DualityReport moment_duality_check(const InitialCondition& ic,
                                   const ModelParams& p,
                                   const std::vector<DualInit>& dual_initial,
                                   double t, long long n_spde, long long n_dual,
                                   std::uint64_t seed,
                                   const DualityOptions& opts) {
    if (dual_initial.empty()) {
        throw SimError(ErrorCode::EmptyInitial, "moment_duality_check");
    }
    const Lattice& l = opts.lattice;
    require_valid(p, l);
    const double margin = 10.0 * l.dx;
    for (const auto& q : dual_initial) {
        if (q.pos < l.x_min + margin || q.pos > l.x_max - margin) {
            throw std::invalid_argument(
                "moment_duality_check: dual initial position too close to the "
                "lattice boundary");
        }
    }

    DualityReport rep;

    // Lattice side.  Deterministic when nu = 0: one run, zero SE.
    const std::uint64_t master_lhs = mix64(seed, 1);
    const auto lhs_products = [&](const Fields& final_fields) {
        double prod = 1.0;
        for (const auto& q : dual_initial) {
            const auto& field =
                q.state == PState::active ? final_fields.u : final_fields.v;
            prod *= interpolate_field(field, l, q.pos);
        }
        return prod;
    };
    RunOptions ro;
    ro.track_front = false;
    if (p.nu == 0.0) {
        const SpdeRun run = run_spde(ic, p, l, t, 0, master_lhs, ro);
        rep.lhs = {lhs_products(run.snapshots.back()), 0.0, 1};
    } else {
        const auto n = static_cast<std::size_t>(n_spde);
        std::vector<double> vals(n);
        for_each_replicate(
            n,
            [&](std::size_t k) {
                const SpdeRun run =
                    run_spde(ic, p, l, t, 0, mix64(master_lhs, k), ro);
                vals[k] = lhs_products(run.snapshots.back());
            },
            ExecMode::Parallel, opts.threads);
        rep.lhs = summarize_samples(vals, "moment_duality lattice side");
    }

    // Particle side.
    const std::uint64_t master_rhs = mix64(seed, 2);
    const auto nd = static_cast<std::size_t>(n_dual);
    std::vector<double> vals(nd);
    for_each_replicate(
        nd,
        [&](std::size_t k) {
            const DualRun run = simulate_dual(dual_initial, p, t, opts.dt_d,
                                              opts.eps, DualOptions{},
                                              mix64(master_rhs, k));
            vals[k] = dual_side_product(run, ic, l);
        },
        ExecMode::Parallel, opts.threads);
    if (nd == 1) {
        rep.rhs = {vals[0], 0.0, 1};
    } else {
        rep.rhs = summarize_samples(vals, "moment_duality particle side");
    }

    finalize_report(rep, opts.tol_abs);
    return rep;
}

std::vector<DualityReport> max_cdf_check(const ModelParams& p, double t,
                                         const std::vector<double>& probes,
                                         long long n_dual, std::uint64_t seed,
                                         const SpdeRun& pde, const Lattice& l,
                                         const DualityOptions& opts) {
    if (p.nu != 0.0 || p.m1 != 0.0 || p.m2 != 0.0) {
        throw std::invalid_argument("max_cdf_check: requires nu = m1 = m2 = 0");
    }
    if (probes.empty()) {
        throw std::invalid_argument("max_cdf_check: no probes");
    }
    if (pde.snapshots.empty() ||
        std::abs(pde.snapshots.back().t - t) > 1e-9 * std::max(1.0, t)) {
        throw std::invalid_argument(
            "max_cdf_check: pde run does not end at the requested time");
    }

    // One replicate ensemble of rightmost positions serves every probe.
    const auto nd = static_cast<std::size_t>(n_dual);
    std::vector<double> right(nd);
    const std::uint64_t master = mix64(seed, 2);
    for_each_replicate(
        nd,
        [&](std::size_t k) {
            const DualRun run =
                simulate_dual({{0.0, PState::active}}, p, t, opts.dt_d,
                              opts.eps, DualOptions{}, mix64(master, k));
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& q : run.final_particles) {
                best = std::max(best, q.pos);
            }
            right[k] = best; // population never shrinks here (m2 = nu = 0)
        },
        ExecMode::Parallel, opts.threads);

    const Fields& final_fields = pde.snapshots.back();
    std::vector<DualityReport> reports;
    reports.reserve(probes.size());
    for (const double x : probes) {
        DualityReport rep;
        rep.probe = x;
        rep.lhs = {interpolate_field(final_fields.u, l, x), 0.0, 1};
        double hits = 0.0;
        for (const double r : right) {
            if (r <= x) hits += 1.0;
        }
        const double phat = hits / static_cast<double>(nd);
        const double se =
            std::sqrt(std::max(0.0, phat * (1.0 - phat)) /
                      static_cast<double>(nd));
        rep.rhs = {phat, se, n_dual};
        finalize_report(rep, opts.tol_abs);
        reports.push_back(rep);
    }
    return reports;
}

} // namespace fkppsb
