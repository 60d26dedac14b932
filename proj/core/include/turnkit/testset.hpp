#pragma once

#include "turnkit/record.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace turnkit {

/// Balanced test-set composition request.
struct TestsetSpec {
    /// Records wanted per state, indexed by turn_state_index().
    std::array<int, 4> per_state_counts{};
    /// real:synthetic split per state (ratio_real:ratio_synth). When a cell
    /// count does not divide exactly, real gets the extra record.
    int ratio_real = 1;
    int ratio_synth = 1;
    std::uint64_t seed = 0;
};

/// Draw a balanced testset from a fully labeled pool: per state exactly
/// per_state_counts[s] records, origins split per the ratio, uniform
/// without replacement, then shuffled — all from one stream seeded with
/// spec.seed. Throws ValidationError naming every deficient
/// "<state>/<origin> shortfall <n>" cell, or listing unlabeled ids.
std::vector<UtteranceRecord> compose(const std::vector<UtteranceRecord>& pool,
                                     const TestsetSpec& spec);

} // namespace turnkit
