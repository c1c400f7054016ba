#include "spe/collaboration.hpp"

#include <algorithm>

namespace spe {

namespace {

template <typename Count>
struct Tally {
    std::map<std::string, Count> in;
    std::map<std::string, Count> out;
};

// Structural: every syntactic arrow counts once. Weighted: loop counts,
// self-call repetitions and alt probabilities scale the contribution.
template <typename Count>
void tally_steps(const std::vector<Step>& steps, double weight, bool weighted,
                 Tally<Count>& t) {
    for (const auto& step : steps) {
        if (const auto* msg = std::get_if<MessageStep>(&step.node)) {
            t.out[msg->from] += static_cast<Count>(weighted ? weight : 1);
            t.in[msg->to] += static_cast<Count>(weighted ? weight : 1);
        } else if (const auto* self = std::get_if<SelfCallStep>(&step.node)) {
            const double w = weighted ? weight * static_cast<double>(self->repetitions) : 1;
            t.out[self->on] += static_cast<Count>(w);
            t.in[self->on] += static_cast<Count>(w);
        } else if (const auto* loop = std::get_if<LoopStep>(&step.node)) {
            const double w = weighted ? weight * static_cast<double>(loop->count) : weight;
            tally_steps(loop->body, w, weighted, t);
        } else if (const auto* alt = std::get_if<AltStep>(&step.node)) {
            for (const auto& b : alt->branches)
                tally_steps(b.body, weighted ? weight * b.probability : weight, weighted, t);
        } else if (const auto* par = std::get_if<ParStep>(&step.node)) {
            for (const auto& b : par->branches) tally_steps(b, weight, weighted, t);
        }
        // Ref steps are scenario boundaries; they contribute nothing here.
    }
}

template <typename Matrix, typename Count>
Matrix build_matrix(const SequenceScenario& s, bool weighted) {
    Tally<Count> t;
    for (const auto& p : s.participants) {
        t.in[p] = Count{};
        t.out[p] = Count{};
    }
    tally_steps(s.body, 1.0, weighted, t);
    Matrix m;
    m.components = s.participants;
    m.in_count = std::move(t.in);
    m.out_count = std::move(t.out);
    return m;
}

template <typename Matrix>
std::vector<RankedComponent> rank(const Matrix& m) {
    std::vector<RankedComponent> ranked;
    for (const auto& c : m.components) {
        RankedComponent rc;
        rc.component = c;
        auto in_it = m.in_count.find(c);
        auto out_it = m.out_count.find(c);
        rc.in = in_it == m.in_count.end() ? 0.0 : static_cast<double>(in_it->second);
        rc.out = out_it == m.out_count.end() ? 0.0 : static_cast<double>(out_it->second);
        rc.load_score = rc.in + rc.out;
        ranked.push_back(std::move(rc));
    }
    std::sort(ranked.begin(), ranked.end(),
              [](const RankedComponent& x, const RankedComponent& y) {
                  if (x.load_score != y.load_score) return x.load_score > y.load_score;
                  return x.component < y.component;
              });
    return ranked;
}

} // namespace

InteractionMatrix derive_collaboration(const SequenceScenario& s) {
    return build_matrix<InteractionMatrix, std::int64_t>(s, false);
}

WeightedInteractions derive_collaboration_weighted(const SequenceScenario& s) {
    return build_matrix<WeightedInteractions, double>(s, true);
}

std::vector<RankedComponent> rank_components(const InteractionMatrix& m) { return rank(m); }

std::vector<RankedComponent> rank_components(const WeightedInteractions& m) { return rank(m); }

} // namespace spe
