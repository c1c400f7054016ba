#pragma once

#include <string>
#include <vector>

#include "spe/model.hpp"
#include "spe/softmodel.hpp"

namespace spe {

struct ParseOptions {
    /// When set, alt branches and decision outcomes may omit probabilities;
    /// the parser fills 1/k over the k outcomes. Off by default: the source
    /// diagrams never state probabilities, so silent defaults are refused.
    bool uniform_probs = false;
};

/// Parses one model document. Throws ParseError (with line/column) on syntax
/// errors, unknown section kinds, and duplicate identifiers.
DesignModel parse_model(const std::string& text, const ParseOptions& opts = {});

/// Canonical text form: sections sorted by kind and name, map entries sorted
/// by key, 2-space indent, shortest round-trip number formatting. Parsing the
/// result reproduces the model exactly.
std::string serialize_model(const DesignModel& m);

/// Parses an objectives document: lines of `<metric> <= <threshold>` inside
/// an `objectives { ... }` block, metric one of shortest|average|longest.
std::vector<Objective> parse_objectives(const std::string& text);

std::string serialize_objectives(const std::vector<Objective>& objectives);

} // namespace spe
