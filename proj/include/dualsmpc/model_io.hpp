#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualsmpc/model.hpp"
#include "dualsmpc/solver.hpp"

namespace dualsmpc {

/// Parse failure with a position and one of the documented error classes.
class ParseError : public std::runtime_error {
public:
    enum class Kind {
        syntax,         // malformed token, unknown directive, bad structure
        dimension,      // index or entry-count disagrees with the declared sizes
        stochasticity,  // a probability row sums outside tolerance
        unknown_name,   // a state/action/observation name was never declared
        duplicate,      // a once-only directive appears twice
        value,          // a number is outside its legal range
    };

    ParseError(Kind kind, int line, int column, const std::string& message);

    Kind kind() const { return kind_; }
    /// 1-based line of the offending token; 0 when no single line applies.
    int line() const { return line_; }
    /// 1-based column of the offending token; 0 when unknown.
    int column() const { return column_; }

    static const char* kind_name(Kind kind);

private:
    Kind kind_;
    int line_;
    int column_;
};

struct ParseResult {
    PomdpModel model;
    /// The file's `discount:` directive when present. Discount belongs to
    /// the solve configuration, not the model, so it is surfaced separately.
    std::optional<double> discount;
    /// The file's `start:` distribution when present.
    std::optional<Vec> start;
    /// Non-fatal notes, e.g. the reward-to-cost conversion.
    std::vector<std::string> warnings;
};

/// Parses the whitespace/keyword structured text format: header directives
/// discount:/values:/states:/actions:/observations:/start:, body directives
/// T:/O:/R: in matrix, keyword (uniform, identity) and single-entry forms
/// with `*` wildcards, plus the nonstandard `terminal:` cost vector.
/// `values: reward` input is negated into costs (and shifted up if needed to
/// keep costs nonnegative, which preserves optimal policies) with a warning.
/// The returned model always passes validate_model.
ParseResult parse_pomdp(std::istream& in);
ParseResult parse_pomdp(const std::string& text);

/// Emits the same grammar with fixed ordering and 17-significant-digit
/// floats; parse_pomdp(serialize(m)) reproduces m entrywise.
std::string serialize(const PomdpModel& model);

/// The built-in healthcare decision model: 3 disease stages, actions
/// skip / appointment / diagnose / treatment, 3 noisy stage readings,
/// terminal cost [0, 4, 30]. Exact table values; uniform rows are 1/3.
PomdpModel healthcare_model();

/// Flat text policy format: comment header, then per stage a line
/// `stage <k> vectors <count>` followed by `action coeff...` lines with
/// 17-significant-digit floats. Deterministic byte-for-byte.
void write_policy(std::ostream& os, const PolicyStack& stack);
std::string policy_text(const PolicyStack& stack);

/// Reads the format written by write_policy. Throws ParseError.
PolicyStack read_policy(std::istream& in);

}  // namespace dualsmpc
