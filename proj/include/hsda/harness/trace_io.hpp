#pragma once

#include "hsda/trace.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace hsda::harness {

/// t,f_gap,grad_norm,v_abs,delta_or_zeta,step_norm,inner_iters,lanczos_iters,hvp_cum,wall_ms
const std::vector<std::string>& trace_columns();

/// One row per outer iteration plus a closing row t = T + 1 holding the final
/// f_gap and grad_norm. Missing values are blank; numbers use 17 significant
/// digits and '.' as decimal point.
void write_trace_csv(std::ostream& out, const IterateTrace<double>& trace);
std::string trace_csv(const IterateTrace<double>& trace);

/// Termination reason, final-iterate quantities and totals.
nlohmann::json trace_summary(const IterateTrace<double>& trace);

struct TraceTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a trace CSV and checks its header against trace_columns().
TraceTable read_trace_csv(const std::string& path);
TraceTable parse_trace_csv(const std::string& text);

}  // namespace hsda::harness
