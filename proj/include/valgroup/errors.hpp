#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace valgroup {

/// Two values from incompatible groups met (descriptor mismatch, or an
/// element that is not a member of the filtration's group).
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The request would require materializing an infinite (or over-budget) set.
class BoundedEnumerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A filtration violated an integrity requirement: axiom exceptions beyond
/// the prefix region, f_p not well-defined in the eventual regime, etc.
class SpecIntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Config-file validation failure; `field()` names the offending field path.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Incomparability of the supplied order is not an equivalence relation.
/// Carries a witness triple (indices into the carrier).
class NotAlmostLinearError : public std::runtime_error {
public:
    NotAlmostLinearError(const std::string& message, std::size_t a, std::size_t b, std::size_t c)
        : std::runtime_error(message), witness_{a, b, c} {}

    const std::array<std::size_t, 3>& witness() const { return witness_; }

private:
    std::array<std::size_t, 3> witness_;
};

/// The eventual truth value of a reduced one-variable condition is not
/// constant over the verification window: the defined set is neither finite
/// nor co-finite, so no classification verdict exists.
class EventualNotConstantError : public std::runtime_error {
public:
    EventualNotConstantError(int first_level, std::vector<bool> pattern)
        : std::runtime_error("eventual truth value not constant from level " +
                             std::to_string(first_level)),
          first_level_(first_level), pattern_(std::move(pattern)) {}

    int first_level() const { return first_level_; }
    const std::vector<bool>& pattern() const { return pattern_; }

private:
    int first_level_;
    std::vector<bool> pattern_;
};

/// A decision procedure disagreed with its brute-force oracle.
class InconsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace valgroup
