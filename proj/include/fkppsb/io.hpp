#pragma once

// File emission.  All floating-point values are printed with %.17g so that
// reruns of the same config produce byte-identical files and parsing the
// files back recovers the exact doubles.

#include <string>
#include <vector>

#include "fkppsb/analytics.hpp"
#include "fkppsb/dual.hpp"
#include "fkppsb/model.hpp"
#include "fkppsb/spde.hpp"

namespace fkppsb {

std::string format_double(double x);

// header: t,x,u,v — one row per (snapshot, node)
void write_fields_csv(const std::string& path, const Lattice& l,
                      const std::vector<Fields>& snapshots);

// header: t,front
void write_front_csv(const std::string& path, const FrontTrace& trace);

// header: t,n_active,n_dormant,rightmost,A
void write_dual_trace_csv(const std::string& path,
                          const std::vector<DualTraceRow>& rows);

// header: id,pos,state — state printed as "active"/"dormant"
void write_particles_csv(const std::string& path,
                         const std::vector<Particle>& particles);

struct CountRow {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double bound_lambda = 0.0;
};

// header: t,x,y,total,bound_lambda
void write_counts_csv(const std::string& path, const std::vector<CountRow>& rows);

void write_text_file(const std::string& path, const std::string& content);

// Parse back a fields CSV (used by range checks over emitted values).
struct FieldsCsvRow {
    double t = 0.0, x = 0.0, u = 0.0, v = 0.0;
};
std::vector<FieldsCsvRow> read_fields_csv(const std::string& path);

} // namespace fkppsb
