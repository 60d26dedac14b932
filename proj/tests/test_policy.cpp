#include "turnkit/policy.hpp"

#include "turnkit/errors.hpp"
#include "turnkit/rng.hpp"

#include <doctest.h>

#include <random>

using namespace turnkit;

namespace {

PolicyEvent det(TurnState s, std::int64_t t = 0) { return PolicyEvent::detection(s, t); }

std::vector<PolicyEvent> all_events_at(std::int64_t t) {
    return {det(TurnState::Complete, t),   det(TurnState::Incomplete, t),
            det(TurnState::Backchannel, t), det(TurnState::Wait, t),
            PolicyEvent::patience_timeout(t), PolicyEvent::speech_ended(t),
            PolicyEvent::reset(t)};
}

PolicyEvent random_event(std::mt19937_64& rng, std::int64_t t) {
    const auto events = all_events_at(t);
    return events[uniform_u64(rng, events.size())];
}

} // namespace

TEST_SUITE("policy") {

TEST_CASE("listening transitions") {
    PolicyConfig cfg;
    CHECK(step(SystemPhase::Listening, det(TurnState::Complete), cfg) ==
          StepResult{SystemPhase::Speaking, PolicyAction::Respond, false});
    CHECK(step(SystemPhase::Listening, det(TurnState::Incomplete), cfg) ==
          StepResult{SystemPhase::Listening, PolicyAction::ContinueListening, false});
    CHECK(step(SystemPhase::Listening, det(TurnState::Backchannel), cfg) ==
          StepResult{SystemPhase::Listening, PolicyAction::Ignore, false});
    CHECK(step(SystemPhase::Listening, det(TurnState::Wait), cfg) ==
          StepResult{SystemPhase::Halted, PolicyAction::EndDialogue, false});
    CHECK(step(SystemPhase::Listening, PolicyEvent::patience_timeout(0), cfg) ==
          StepResult{SystemPhase::Speaking, PolicyAction::Respond, false});
    CHECK(step(SystemPhase::Listening, PolicyEvent::speech_ended(0), cfg) ==
          StepResult{SystemPhase::Listening, PolicyAction::Ignore, false});
}

TEST_CASE("speaking transitions") {
    PolicyConfig cfg;
    CHECK(step(SystemPhase::Speaking, det(TurnState::Backchannel), cfg) ==
          StepResult{SystemPhase::Speaking, PolicyAction::Ignore, false});
    CHECK(step(SystemPhase::Speaking, det(TurnState::Wait), cfg) ==
          StepResult{SystemPhase::Listening, PolicyAction::HaltSpeech, false});
    CHECK(step(SystemPhase::Speaking, det(TurnState::Incomplete), cfg) ==
          StepResult{SystemPhase::Speaking, PolicyAction::Ignore, false});
    CHECK(step(SystemPhase::Speaking, PolicyEvent::speech_ended(0), cfg) ==
          StepResult{SystemPhase::Listening, PolicyAction::Ignore, false});

    // Barge-in: halt speech, then respond to the same event.
    const StepResult barge = step(SystemPhase::Speaking, det(TurnState::Complete), cfg);
    CHECK(barge.phase == SystemPhase::Speaking);
    CHECK(barge.action == PolicyAction::HaltSpeech);
    CHECK(barge.then_respond);
}

TEST_CASE("halted absorbs everything except reset") {
    PolicyConfig cfg;
    for (const auto& event : all_events_at(0)) {
        const StepResult r = step(SystemPhase::Halted, event, cfg);
        if (event.kind == PolicyEvent::Kind::Reset) {
            CHECK(r.phase == SystemPhase::Listening);
        } else {
            CHECK(r.phase == SystemPhase::Halted);
            CHECK(r.action == PolicyAction::Ignore);
        }
    }
    CHECK(step(SystemPhase::Halted, det(TurnState::Complete), cfg) ==
          StepResult{SystemPhase::Halted, PolicyAction::Ignore, false});
}

TEST_CASE("reset returns every phase to listening") {
    PolicyConfig cfg;
    for (SystemPhase p : {SystemPhase::Listening, SystemPhase::Speaking, SystemPhase::Halted})
        CHECK(step(p, PolicyEvent::reset(0), cfg) ==
              StepResult{SystemPhase::Listening, PolicyAction::Ignore, false});
}

TEST_CASE("the transition table is total over 3 phases x 7 event kinds") {
    PolicyConfig cfg;
    int combinations = 0;
    for (SystemPhase p : {SystemPhase::Listening, SystemPhase::Speaking, SystemPhase::Halted}) {
        for (const auto& event : all_events_at(5)) {
            const StepResult r = step(p, event, cfg);
            CHECK((r.phase == SystemPhase::Listening || r.phase == SystemPhase::Speaking ||
                   r.phase == SystemPhase::Halted));
            ++combinations;
        }
    }
    CHECK(combinations == 21);
}

TEST_CASE("simulate: a completion within patience needs no timeout") {
    const SimResult r = simulate({det(TurnState::Incomplete, 0), det(TurnState::Complete, 800)},
                                 PolicyConfig{});
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[0].action == PolicyAction::ContinueListening);
    CHECK(r.entries[1].action == PolicyAction::Respond);
    CHECK(r.injected_positions.empty());
}

TEST_CASE("simulate: a stalled incomplete triggers the patience fallback") {
    const SimResult r = simulate({det(TurnState::Incomplete, 0)}, PolicyConfig{}, 5000);
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[0].action == PolicyAction::ContinueListening);
    CHECK(r.entries[1].action == PolicyAction::Respond);
    CHECK(r.entries[1].event.kind == PolicyEvent::Kind::PatienceTimeout);
    CHECK(r.entries[1].event.timestamp_ms == 2000);
    CHECK(r.entries[1].injected);
    CHECK(r.injected_positions == std::vector<std::size_t>{1});
}

TEST_CASE("simulate: wait halts the dialogue and later detections are absorbed") {
    const SimResult r = simulate({det(TurnState::Wait, 0), det(TurnState::Complete, 100)},
                                 PolicyConfig{});
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[0].action == PolicyAction::EndDialogue);
    CHECK(r.entries[0].phase == SystemPhase::Halted);
    CHECK(r.entries[1].action == PolicyAction::Ignore);
    CHECK(r.entries[1].phase == SystemPhase::Halted);
}

TEST_CASE("simulate: without an explicit end the window stops at the last event") {
    const SimResult r = simulate({det(TurnState::Incomplete, 0)}, PolicyConfig{});
    CHECK(r.entries.size() == 1);
    CHECK(r.injected_positions.empty());
}

TEST_CASE("simulate: a gap equal to patience does not fire the timer") {
    const SimResult r = simulate({det(TurnState::Incomplete, 0), det(TurnState::Complete, 2000)},
                                 PolicyConfig{});
    CHECK(r.entries.size() == 2);
    CHECK(r.injected_positions.empty());

    const SimResult at_end = simulate({det(TurnState::Incomplete, 0)}, PolicyConfig{}, 2000);
    CHECK(at_end.injected_positions.empty());
}

TEST_CASE("simulate: any detection cancels the pending timer") {
    const SimResult r = simulate(
        {det(TurnState::Incomplete, 0), det(TurnState::Backchannel, 1000)}, PolicyConfig{}, 9000);
    CHECK(r.entries.size() == 2);
    CHECK(r.injected_positions.empty());
}

TEST_CASE("simulate: non-detection events do not cancel the timer") {
    const SimResult r = simulate(
        {det(TurnState::Incomplete, 0), PolicyEvent::speech_ended(500)}, PolicyConfig{}, 5000);
    REQUIRE(r.entries.size() == 3);
    CHECK(r.entries[2].event.kind == PolicyEvent::Kind::PatienceTimeout);
    CHECK(r.entries[2].event.timestamp_ms == 2000);
}

TEST_CASE("simulate: the timeout fires before a later event and re-arms per incomplete") {
    const SimResult r = simulate(
        {det(TurnState::Incomplete, 0), det(TurnState::Incomplete, 3000),
         det(TurnState::Complete, 3500)},
        PolicyConfig{}, 10'000);
    // timeout at 2000 (injected), incomplete at 3000 re-arms, complete at 3500 cancels
    REQUIRE(r.entries.size() == 4);
    CHECK(r.entries[1].injected);
    CHECK(r.entries[1].event.timestamp_ms == 2000);
    CHECK(r.injected_positions == std::vector<std::size_t>{1});
}

TEST_CASE("simulate: a custom patience window moves the injection point") {
    PolicyConfig cfg;
    cfg.patience_ms = 100;
    const SimResult r = simulate({det(TurnState::Incomplete, 50)}, cfg, 1000);
    REQUIRE(r.entries.size() == 2);
    CHECK(r.entries[1].event.timestamp_ms == 150);
}

TEST_CASE("simulate rejects decreasing timestamps") {
    CHECK_THROWS_AS(simulate({det(TurnState::Complete, 100), det(TurnState::Wait, 50)},
                             PolicyConfig{}),
                    ValidationError);
}

TEST_CASE("property: backchannel never halts, wait always halts unless absorbed") {
    std::mt19937_64 rng(123);
    PolicyConfig cfg;
    for (int trace_no = 0; trace_no < 1000; ++trace_no) {
        std::int64_t t = 0;
        std::vector<PolicyEvent> trace;
        const std::size_t len = 1 + uniform_u64(rng, 12);
        for (std::size_t i = 0; i < len; ++i) {
            t += static_cast<std::int64_t>(uniform_u64(rng, 3000));
            trace.push_back(random_event(rng, t));
        }
        const SimResult r = simulate(trace, cfg, t + static_cast<std::int64_t>(uniform_u64(rng, 5000)));

        SystemPhase before = SystemPhase::Listening;
        for (const auto& entry : r.entries) {
            if (entry.event.kind == PolicyEvent::Kind::Detection) {
                if (entry.event.detected == TurnState::Backchannel) {
                    CHECK(entry.action != PolicyAction::HaltSpeech);
                    CHECK(entry.action != PolicyAction::EndDialogue);
                }
                if (entry.event.detected == TurnState::Wait && before != SystemPhase::Halted) {
                    CHECK((entry.action == PolicyAction::HaltSpeech ||
                           entry.action == PolicyAction::EndDialogue));
                }
            }
            before = entry.phase;
        }
    }
}

TEST_CASE("property: simulate is deterministic and never leaves halted without reset") {
    std::mt19937_64 rng(321);
    PolicyConfig cfg;
    for (int trace_no = 0; trace_no < 300; ++trace_no) {
        std::int64_t t = 0;
        std::vector<PolicyEvent> trace;
        const std::size_t len = uniform_u64(rng, 15);
        for (std::size_t i = 0; i < len; ++i) {
            t += static_cast<std::int64_t>(uniform_u64(rng, 2500));
            trace.push_back(random_event(rng, t));
        }
        const SimResult a = simulate(trace, cfg, t);
        const SimResult b = simulate(trace, cfg, t);
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            CHECK(a.entries[i].phase == b.entries[i].phase);
            CHECK(a.entries[i].action == b.entries[i].action);
        }

        bool halted = false;
        for (const auto& entry : a.entries) {
            if (halted && entry.event.kind != PolicyEvent::Kind::Reset)
                CHECK(entry.phase == SystemPhase::Halted);
            halted = entry.phase == SystemPhase::Halted;
        }
    }
}

} // TEST_SUITE
