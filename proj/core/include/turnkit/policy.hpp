#pragma once

#include "turnkit/turn_state.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace turnkit {

/// What the system is doing right now. Halted is absorbing until a Reset.
enum class SystemPhase {
    Listening,
    Speaking,
    Halted,
};

/// What the system should do in response to an event.
enum class PolicyAction {
    Respond,
    ContinueListening,
    Ignore,
    HaltSpeech,
    EndDialogue,
};

std::string_view to_string(SystemPhase p);
std::string_view to_string(PolicyAction a);

struct PolicyEvent {
    enum class Kind {
        Detection,        // carries a TurnState
        PatienceTimeout,  // injected by the simulator when an incomplete stalls
        SystemSpeechEnded,
        Reset,
    };
    Kind kind = Kind::Detection;
    std::optional<TurnState> detected; // set iff kind == Detection
    std::int64_t timestamp_ms = 0;

    static PolicyEvent detection(TurnState s, std::int64_t t) {
        return {Kind::Detection, s, t};
    }
    static PolicyEvent patience_timeout(std::int64_t t) {
        return {Kind::PatienceTimeout, std::nullopt, t};
    }
    static PolicyEvent speech_ended(std::int64_t t) {
        return {Kind::SystemSpeechEnded, std::nullopt, t};
    }
    static PolicyEvent reset(std::int64_t t) { return {Kind::Reset, std::nullopt, t}; }
};

std::string_view to_string(PolicyEvent::Kind k);

struct PolicyConfig {
    /// How long to wait after an incomplete detection before responding anyway.
    std::int64_t patience_ms = 2000;
};

struct StepResult {
    SystemPhase phase = SystemPhase::Listening;
    PolicyAction action = PolicyAction::Ignore;
    /// Barge-in marker: the system halts its speech and then responds to the
    /// same event (Speaking + complete detection).
    bool then_respond = false;

    bool operator==(const StepResult&) const = default;
};

/// The turn-policy transition table. Total: every (phase, event) pair maps to
/// exactly one result.
///
///   Listening + complete     -> Speaking,  Respond
///   Listening + incomplete   -> Listening, ContinueListening (patience timer arms)
///   Listening + backchannel  -> Listening, Ignore
///   Listening + wait         -> Halted,    EndDialogue
///   Listening + timeout      -> Speaking,  Respond
///   Speaking  + complete     -> Speaking,  HaltSpeech + then_respond (barge-in)
///   Speaking  + incomplete   -> Speaking,  Ignore
///   Speaking  + backchannel  -> Speaking,  Ignore
///   Speaking  + wait         -> Listening, HaltSpeech
///   Speaking  + timeout      -> Speaking,  Ignore
///   *         + SystemSpeechEnded -> Speaking drops to Listening, Ignore
///   *         + Reset        -> Listening, Ignore
///   Halted    + anything but Reset -> Halted, Ignore
StepResult step(SystemPhase phase, const PolicyEvent& event, const PolicyConfig& cfg);

struct SimEntry {
    PolicyEvent event;
    SystemPhase phase = SystemPhase::Listening; // phase after the event
    PolicyAction action = PolicyAction::Ignore;
    bool then_respond = false;
    bool injected = false; // simulator-made PatienceTimeout
};

struct SimResult {
    std::vector<SimEntry> entries;
    std::vector<std::size_t> injected_positions; // indices into entries
};

/// Fold step over the trace starting from Listening. The simulator injects a
/// PatienceTimeout at t+patience_ms whenever an incomplete detection at t is
/// followed by a gap > patience_ms with no intervening Detection (other event
/// kinds do not cancel the timer). end_ms extends the observation window past
/// the last event; it defaults to the last event's timestamp. Throws
/// ValidationError on decreasing timestamps.
SimResult simulate(const std::vector<PolicyEvent>& trace, const PolicyConfig& cfg,
                   std::optional<std::int64_t> end_ms = {});

} // namespace turnkit
