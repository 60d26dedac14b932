#pragma once

#include "turnkit/rational.hpp"
#include "turnkit/record.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace turnkit {

/// Entry count and total speech duration for one turn state. Duration is kept
/// in integer milliseconds; hours are derived exactly and rounded only when
/// rendered.
struct StateStats {
    std::int64_t entries = 0;
    std::int64_t duration_ms = 0;

    Rational hours() const { return Rational(duration_ms, 3'600'000); }

    bool operator==(const StateStats&) const = default;
};

struct DatasetStats {
    std::array<StateStats, 4> per_state{}; // indexed by turn_state_index()

    const StateStats& of(TurnState s) const { return per_state[turn_state_index(s)]; }
    StateStats& of(TurnState s) { return per_state[turn_state_index(s)]; }

    std::int64_t total_entries() const;
    std::int64_t total_duration_ms() const;
    Rational total_hours() const { return Rational(total_duration_ms(), 3'600'000); }

    bool operator==(const DatasetStats&) const = default;
};

/// Tally entries and durations per state. Every record must have its state
/// set; otherwise throws ValidationError listing the offending ids.
DatasetStats compute_stats(std::span<const UtteranceRecord> records);

/// Aligned text table: State | Entries (k) | Speech Duration (h), one row per
/// state plus a Total row. Entries are shown in thousands with one decimal,
/// durations in hours with one decimal (both rounded half-up).
std::string render_stats_table(const DatasetStats& stats);

} // namespace turnkit
