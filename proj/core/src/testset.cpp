#include "turnkit/testset.hpp"

#include "turnkit/errors.hpp"
#include "turnkit/rng.hpp"

#include <random>

namespace turnkit {

std::vector<UtteranceRecord> compose(const std::vector<UtteranceRecord>& pool,
                                     const TestsetSpec& spec) {
    if (spec.ratio_real < 0 || spec.ratio_synth < 0 || spec.ratio_real + spec.ratio_synth <= 0)
        throw ValidationError("compose: invalid real:synth ratio");
    for (int c : spec.per_state_counts)
        if (c < 0) throw ValidationError("compose: negative per-state count");

    std::string unlabeled;
    for (const auto& r : pool)
        if (!r.state) unlabeled += (unlabeled.empty() ? "" : ",") + r.id;
    if (!unlabeled.empty())
        throw ValidationError("compose: pool records without state: " + unlabeled);

    // Pool indices per (state, origin), in pool order.
    std::array<std::array<std::vector<std::size_t>, 2>, 4> cells;
    for (std::size_t i = 0; i < pool.size(); ++i)
        cells[turn_state_index(*pool[i].state)][pool[i].origin == Origin::Real ? 0 : 1].push_back(i);

    // Real share rounds up: with ratio a:b, real gets ceil(count*a/(a+b)).
    const std::int64_t a = spec.ratio_real, b = spec.ratio_synth;
    std::array<std::array<std::size_t, 2>, 4> need{};
    std::string shortfalls;
    for (TurnState s : kAllTurnStates) {
        const std::size_t idx = turn_state_index(s);
        const std::int64_t count = spec.per_state_counts[idx];
        const std::int64_t real = (count * a + (a + b) - 1) / (a + b);
        need[idx][0] = static_cast<std::size_t>(real);
        need[idx][1] = static_cast<std::size_t>(count - real);
        for (int o = 0; o < 2; ++o) {
            if (cells[idx][o].size() < need[idx][o]) {
                if (!shortfalls.empty()) shortfalls += "; ";
                shortfalls += std::string(to_string(s)) + "/" + (o == 0 ? "real" : "synthetic") +
                              " shortfall " + std::to_string(need[idx][o] - cells[idx][o].size());
            }
        }
    }
    if (!shortfalls.empty()) throw ValidationError("compose: " + shortfalls);

    std::mt19937_64 rng(spec.seed);
    std::vector<std::size_t> chosen;
    for (TurnState s : kAllTurnStates) {
        const std::size_t idx = turn_state_index(s);
        for (int o = 0; o < 2; ++o) {
            auto picks = sample_without_replacement(cells[idx][o], need[idx][o], rng);
            chosen.insert(chosen.end(), picks.begin(), picks.end());
        }
    }
    deterministic_shuffle(chosen, rng);

    std::vector<UtteranceRecord> out;
    out.reserve(chosen.size());
    for (std::size_t i : chosen) out.push_back(pool[i]);
    return out;
}

} // namespace turnkit
