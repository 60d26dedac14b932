#include "turnkit/policy.hpp"

#include "turnkit/errors.hpp"

namespace turnkit {

std::string_view to_string(SystemPhase p) {
    switch (p) {
        case SystemPhase::Listening: return "listening";
        case SystemPhase::Speaking: return "speaking";
        case SystemPhase::Halted: return "halted";
    }
    return "invalid";
}

std::string_view to_string(PolicyAction a) {
    switch (a) {
        case PolicyAction::Respond: return "respond";
        case PolicyAction::ContinueListening: return "continue_listening";
        case PolicyAction::Ignore: return "ignore";
        case PolicyAction::HaltSpeech: return "halt_speech";
        case PolicyAction::EndDialogue: return "end_dialogue";
    }
    return "invalid";
}

std::string_view to_string(PolicyEvent::Kind k) {
    switch (k) {
        case PolicyEvent::Kind::Detection: return "detection";
        case PolicyEvent::Kind::PatienceTimeout: return "patience_timeout";
        case PolicyEvent::Kind::SystemSpeechEnded: return "system_speech_ended";
        case PolicyEvent::Kind::Reset: return "reset";
    }
    return "invalid";
}

StepResult step(SystemPhase phase, const PolicyEvent& event, const PolicyConfig&) {
    using Kind = PolicyEvent::Kind;

    if (event.kind == Kind::Reset) return {SystemPhase::Listening, PolicyAction::Ignore};

    if (phase == SystemPhase::Halted) return {SystemPhase::Halted, PolicyAction::Ignore};

    if (event.kind == Kind::SystemSpeechEnded)
        return {SystemPhase::Listening, PolicyAction::Ignore};

    if (event.kind == Kind::PatienceTimeout) {
        if (phase == SystemPhase::Listening)
            return {SystemPhase::Speaking, PolicyAction::Respond};
        return {SystemPhase::Speaking, PolicyAction::Ignore};
    }

    if (!event.detected)
        throw ValidationError("policy step: detection event without a turn state");

    if (phase == SystemPhase::Listening) {
        switch (*event.detected) {
            case TurnState::Complete: return {SystemPhase::Speaking, PolicyAction::Respond};
            case TurnState::Incomplete:
                return {SystemPhase::Listening, PolicyAction::ContinueListening};
            case TurnState::Backchannel: return {SystemPhase::Listening, PolicyAction::Ignore};
            case TurnState::Wait: return {SystemPhase::Halted, PolicyAction::EndDialogue};
        }
    }
    // Speaking
    switch (*event.detected) {
        case TurnState::Complete:
            return {SystemPhase::Speaking, PolicyAction::HaltSpeech, true}; // barge-in
        case TurnState::Incomplete: return {SystemPhase::Speaking, PolicyAction::Ignore};
        case TurnState::Backchannel: return {SystemPhase::Speaking, PolicyAction::Ignore};
        case TurnState::Wait: return {SystemPhase::Listening, PolicyAction::HaltSpeech};
    }
    throw ValidationError("policy step: unreachable event");
}

SimResult simulate(const std::vector<PolicyEvent>& trace, const PolicyConfig& cfg,
                   std::optional<std::int64_t> end_ms) {
    for (std::size_t i = 1; i < trace.size(); ++i)
        if (trace[i].timestamp_ms < trace[i - 1].timestamp_ms)
            throw ValidationError("simulate: trace timestamps decrease at event " +
                                  std::to_string(i + 1));

    SimResult result;
    SystemPhase phase = SystemPhase::Listening;
    std::int64_t timer_deadline = -1; // armed iff >= 0

    auto apply = [&](const PolicyEvent& event, bool injected) {
        const StepResult r = step(phase, event, cfg);
        phase = r.phase;
        result.entries.push_back({event, r.phase, r.action, r.then_respond, injected});
        if (injected) result.injected_positions.push_back(result.entries.size() - 1);
    };

    auto fire_timer_before = [&](std::int64_t next_ts) {
        if (timer_deadline >= 0 && timer_deadline < next_ts) {
            apply(PolicyEvent::patience_timeout(timer_deadline), true);
            timer_deadline = -1;
        }
    };

    for (const PolicyEvent& event : trace) {
        fire_timer_before(event.timestamp_ms);
        if (event.kind == PolicyEvent::Kind::Detection) {
            timer_deadline = event.detected == TurnState::Incomplete
                                 ? event.timestamp_ms + cfg.patience_ms
                                 : -1;
        }
        apply(event, false);
    }

    const std::int64_t window_end =
        end_ms.value_or(trace.empty() ? 0 : trace.back().timestamp_ms);
    fire_timer_before(window_end);
    return result;
}

} // namespace turnkit
