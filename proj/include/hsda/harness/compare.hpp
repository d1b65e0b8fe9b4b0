#pragma once

#include <string>
#include <vector>

namespace hsda::harness {

/// Merges trace CSVs into one table keyed by t, with one column group per
/// input labelled by its algorithm. Each trace needs its JSON summary next to
/// it (same stem); all summaries must carry the same problem identity.
/// Throws MismatchedProblem on differing identities and
/// PreconditionViolation for fewer than two inputs.
std::string compare_runs(const std::vector<std::string>& trace_paths);

}  // namespace hsda::harness
