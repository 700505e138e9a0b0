#pragma once

// Replicate-level parallelism.  Monte Carlo estimators in this project are
// embarrassingly parallel across replicates: replicate k draws from its own
// generator seeded by mix64(master_seed, k), writes into its own output slot,
// and shares no mutable state.  That makes the OpenMP schedule irrelevant to
// the results, so the parallel path and the serial reference path below are
// required to produce identical output (asserted in the test suite and timed
// against each other in the bench tool).
//
// Exceptions thrown inside a parallel region must not escape it; the runner
// captures the first one and rethrows after the region ends.

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fkppsb {

enum class ExecMode { Serial, Parallel };

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Run body(k) for k in [0, n).  `threads` <= 0 means the OpenMP default.
// The serial reference path is kept unconditionally; mode Serial always uses
// it, even in OpenMP builds.
template <typename Body>
void for_each_replicate(std::size_t n, const Body& body,
                        ExecMode mode = ExecMode::Parallel, int threads = 0) {
#ifdef _OPENMP
    if (mode == ExecMode::Parallel && n > 1) {
        std::exception_ptr first_error = nullptr;
        std::atomic<bool> failed{false};
        std::mutex error_mutex;
        const int requested = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(requested)
        for (long long k = 0; k < static_cast<long long>(n); ++k) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
                body(static_cast<std::size_t>(k));
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
        if (first_error) std::rethrow_exception(first_error);
        return;
    }
#else
    (void)mode;
    (void)threads;
#endif
    for (std::size_t k = 0; k < n; ++k) body(k);
}

} // namespace fkppsb
