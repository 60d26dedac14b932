#include "turnkit/turn_state.hpp"

#include "turnkit/errors.hpp"

namespace turnkit {

std::string_view to_string(TurnState s) {
    switch (s) {
        case TurnState::Complete: return "complete";
        case TurnState::Incomplete: return "incomplete";
        case TurnState::Backchannel: return "backchannel";
        case TurnState::Wait: return "wait";
    }
    return "invalid";
}

std::optional<TurnState> turn_state_from_string(std::string_view token) {
    for (TurnState s : kAllTurnStates)
        if (token == to_string(s)) return s;
    return std::nullopt;
}

TurnState parse_turn_state(std::string_view token) {
    if (auto s = turn_state_from_string(token)) return *s;
    throw ValidationError("unknown turn state '" + std::string(token) +
                          "' (expected complete|incomplete|backchannel|wait)");
}

} // namespace turnkit
