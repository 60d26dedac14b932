#include "turnkit/stats.hpp"

#include "turnkit/errors.hpp"

#include <sstream>
#include <vector>

namespace turnkit {

std::int64_t DatasetStats::total_entries() const {
    std::int64_t sum = 0;
    for (const auto& s : per_state) sum += s.entries;
    return sum;
}

std::int64_t DatasetStats::total_duration_ms() const {
    std::int64_t sum = 0;
    for (const auto& s : per_state) sum += s.duration_ms;
    return sum;
}

DatasetStats compute_stats(std::span<const UtteranceRecord> records) {
    std::vector<std::string> unlabeled;
    DatasetStats stats;
    for (const auto& r : records) {
        if (!r.state) {
            unlabeled.push_back(r.id);
            continue;
        }
        auto& cell = stats.of(*r.state);
        cell.entries += 1;
        cell.duration_ms += r.duration_ms;
    }
    if (!unlabeled.empty()) {
        std::string ids;
        for (const auto& id : unlabeled) {
            if (!ids.empty()) ids += ",";
            ids += id;
        }
        throw ValidationError("compute_stats: records without state: " + ids);
    }
    return stats;
}

namespace {

// One-decimal fixed-point display of value/scale, rounded half-up.
std::string one_decimal(std::int64_t value, std::int64_t scale) {
    const std::int64_t tenths = (value * 10 + scale / 2) / scale;
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

std::string display_name(TurnState s) {
    switch (s) {
        case TurnState::Complete: return "Complete";
        case TurnState::Incomplete: return "Incomplete";
        case TurnState::Backchannel: return "Backchannel";
        case TurnState::Wait: return "Wait";
    }
    return "?";
}

} // namespace

std::string render_stats_table(const DatasetStats& stats) {
    const std::array<std::string, 3> header = {"State", "Entries (k)", "Speech Duration (h)"};
    std::vector<std::array<std::string, 3>> rows;
    for (TurnState s : kAllTurnStates) {
        const auto& cell = stats.of(s);
        rows.push_back({display_name(s), one_decimal(cell.entries, 1000),
                        one_decimal(cell.duration_ms, 3'600'000)});
    }
    rows.push_back({"Total", one_decimal(stats.total_entries(), 1000),
                    one_decimal(stats.total_duration_ms(), 3'600'000)});

    std::array<std::size_t, 3> width{};
    for (std::size_t c = 0; c < 3; ++c) width[c] = header[c].size();
    for (const auto& row : rows)
        for (std::size_t c = 0; c < 3; ++c) width[c] = std::max(width[c], row[c].size());

    std::ostringstream out;
    auto emit = [&](const std::array<std::string, 3>& row) {
        for (std::size_t c = 0; c < 3; ++c) {
            std::string cell = row[c];
            cell.resize(width[c], ' ');
            out << cell;
            if (c + 1 < 3) out << " | ";
        }
        out << '\n';
    };
    emit(header);
    for (const auto& row : rows) emit(row);
    return out.str();
}

} // namespace turnkit
