#pragma once

// Batch front end: parse configs, dispatch flows and application drivers,
// emit deterministic CSV/JSON results and traces.
//
// Exit codes: 0 success/converged, 1 input error, 2 not converged,
// 3 internal invariant violation.

#include <string>
#include <vector>

namespace uflow::cli {

int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

} // namespace uflow::cli
