#include "dpps/trace_io.hpp"

#include <cstdio>
#include <fstream>

namespace dpps {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_csv(const std::string& path, const RunTrace& trace) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "t,residual,n_candidates,selected_index,min_distance,mean_distance";
  if (trace.has_mu_error) out << ",mu_error_ref";
  out << "\n";
  for (const StepRecord& r : trace.steps) {
    out << r.t << ',' << format_double(r.residual) << ',' << r.n_candidates << ','
        << r.selected_index << ',' << format_double(r.min_distance) << ','
        << format_double(r.mean_distance);
    if (trace.has_mu_error) out << ',' << format_double(r.mu_error_ref);
    out << "\n";
  }
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace dpps
