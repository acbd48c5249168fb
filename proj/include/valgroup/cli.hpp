#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace valgroup {

/// Dispatches one CLI invocation. Exit codes: 0 success (including
/// NotMinimal verdicts and neither-finite-nor-cofinite outcomes), 2 invalid
/// input, 3 internal inconsistency (a decision procedure disagreed with its
/// brute-force oracle, or an unexpected failure).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace valgroup
