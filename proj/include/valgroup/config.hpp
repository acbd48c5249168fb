#pragma once

#include <string>
#include <string_view>

#include "valgroup/valuation.hpp"

namespace valgroup {

/// Parses the line-oriented key-value config format:
///
///     kind = prufer            # prufer | elem
///     prime = 2
///     factors = 2              # prufer only
///     label = round robin      # optional
///
///     [prefix]                 # optional; one line per level
///     deepen = 0,1             # prufer: factor indices to deepen
///     mult = 3                 # elem: fresh slots at this level
///
///     [eventual]               # required
///     deepen = 0               # periodic schedule lines, or for elem:
///     mult = 1                 #   either mult lines (periodic tail)
///     affine_base = -6         #   or an affine tail m_k = base + slope*k
///     affine_slope = 1
///
/// Validation failures raise ValidationError with the offending field path.
FiltrationSpec parse_spec_config(std::string_view text);

/// Reads and parses a config file; IO failures become ValidationError too.
FiltrationSpec load_spec_config(const std::string& path);

/// FNV-1a 64-bit over the spec's canonical serialization, in hex.
std::string spec_fingerprint(const FiltrationSpec& spec);

} // namespace valgroup
