#include "turnkit/stats.hpp"

#include "turnkit/errors.hpp"
#include "turnkit/rng.hpp"
#include "support/fixtures.hpp"

#include <doctest.h>

using namespace turnkit;

TEST_SUITE("turn_core") {

TEST_CASE("one hour-long complete record counts as 1 entry and 1.0 h") {
    const auto r = test::make_record("a", TurnState::Complete, Origin::Real, 3'600'000);
    const DatasetStats stats = compute_stats(std::vector{r});
    CHECK(stats.of(TurnState::Complete).entries == 1);
    CHECK(stats.of(TurnState::Complete).hours() == Rational(1));
    CHECK(stats.total_entries() == 1);
    CHECK(stats.total_hours() == Rational(1));
}

TEST_CASE("trainset-scale stats render the expected table rows") {
    DatasetStats stats;
    stats.of(TurnState::Complete) = {423'000, 580LL * 3'600'000};
    stats.of(TurnState::Incomplete) = {712'000, 532LL * 3'600'000};
    stats.of(TurnState::Backchannel) = {41'000, 10LL * 3'600'000};
    stats.of(TurnState::Wait) = {40'000, 23LL * 3'600'000};

    CHECK(render_stats_table(stats) ==
          "State       | Entries (k) | Speech Duration (h)\n"
          "Complete    | 423.0       | 580.0              \n"
          "Incomplete  | 712.0       | 532.0              \n"
          "Backchannel | 41.0        | 10.0               \n"
          "Wait        | 40.0        | 23.0               \n"
          "Total       | 1216.0      | 1145.0             \n");
}

TEST_CASE("totals equal a brute-force sum over random records") {
    std::mt19937_64 rng(3);
    std::vector<UtteranceRecord> records;
    for (int i = 0; i < 10; ++i) {
        auto r = test::random_record(rng, "r" + std::to_string(i));
        r.state = kAllTurnStates[uniform_u64(rng, 4)];
        records.push_back(std::move(r));
    }
    const DatasetStats stats = compute_stats(records);

    std::int64_t entries = 0, duration = 0;
    std::array<std::int64_t, 4> per_state_ms{};
    for (const auto& r : records) {
        entries += 1;
        duration += r.duration_ms;
        per_state_ms[turn_state_index(*r.state)] += r.duration_ms;
    }
    CHECK(stats.total_entries() == entries);
    CHECK(stats.total_duration_ms() == duration);
    for (TurnState s : kAllTurnStates)
        CHECK(stats.of(s).duration_ms == per_state_ms[turn_state_index(s)]);
}

TEST_CASE("stats are permutation-invariant") {
    std::mt19937_64 rng(5);
    std::vector<UtteranceRecord> records;
    for (int i = 0; i < 30; ++i) {
        auto r = test::random_record(rng, "r" + std::to_string(i));
        r.state = kAllTurnStates[uniform_u64(rng, 4)];
        records.push_back(std::move(r));
    }
    const DatasetStats before = compute_stats(records);
    deterministic_shuffle(records, rng);
    CHECK(compute_stats(records) == before);
}

TEST_CASE("records without a state are rejected with their ids") {
    std::vector<UtteranceRecord> records{test::make_record("ok", TurnState::Wait),
                                         test::make_record("bad1"), test::make_record("bad2")};
    CHECK_THROWS_WITH_AS(compute_stats(records), "compute_stats: records without state: bad1,bad2",
                         ValidationError);
}

TEST_CASE("empty input renders an all-zero table") {
    const DatasetStats stats = compute_stats(std::vector<UtteranceRecord>{});
    const std::string table = render_stats_table(stats);
    CHECK(table.find("Complete    | 0.0") != std::string::npos);
    CHECK(table.find("Total       | 0.0") != std::string::npos);
}

TEST_CASE("display rounds half-up only at the rendering step") {
    DatasetStats stats;
    // 1,950 entries -> 2.0k after half-up rounding; 90 s -> 0.0 h (exactly 0.025 h).
    stats.of(TurnState::Wait) = {1950, 90'000};
    CHECK(stats.of(TurnState::Wait).hours() == Rational(1, 40));
    const std::string table = render_stats_table(stats);
    CHECK(table.find("Wait        | 2.0") != std::string::npos);
}

} // TEST_SUITE
