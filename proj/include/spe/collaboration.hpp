#pragma once

#include <map>
#include <string>
#include <vector>

#include "spe/model.hpp"

namespace spe {

/// Collaboration-diagram view of a scenario: counts each syntactic message
/// or self-call once, regardless of loop counts and branch probabilities
/// (the structural "arrows leading to a component" reading). Ref steps are
/// scenario boundaries and contribute nothing.
InteractionMatrix derive_collaboration(const SequenceScenario& s);

/// Execution-weighted variant: loop and self-call counts multiply, alt
/// branches contribute their probability. Exposed behind an option flag;
/// the structural count stays the default.
struct WeightedInteractions {
    std::vector<std::string> components;
    std::map<std::string, double> in_count;
    std::map<std::string, double> out_count;
};
WeightedInteractions derive_collaboration_weighted(const SequenceScenario& s);

struct RankedComponent {
    std::string component;
    double load_score = 0.0; // in + out
    double in = 0.0;
    double out = 0.0;
};

/// Components ordered by descending load score (in + out interactions),
/// ties broken lexicographically. The most loaded components are the ones
/// whose performance attributes need watching.
std::vector<RankedComponent> rank_components(const InteractionMatrix& m);
std::vector<RankedComponent> rank_components(const WeightedInteractions& m);

} // namespace spe
