#pragma once

#include "dpps/sampler.hpp"

#include <string>

namespace dpps {

// Per-step trace CSV. Columns:
//   t,residual,n_candidates,selected_index,min_distance,mean_distance[,mu_error_ref]
// The trailing column appears iff the run had a ground-truth reference.
// Numbers print as %.17g so identical runs produce byte-identical files.
void write_trace_csv(const std::string& path, const RunTrace& trace);

std::string format_double(double v);

}  // namespace dpps
