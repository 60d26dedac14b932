#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace turnkit {

/// The four dialogue turn states. Closed set: parsing any other token is an
/// error, never a fifth variant.
enum class TurnState {
    Complete,
    Incomplete,
    Backchannel,
    Wait,
};

inline constexpr std::array<TurnState, 4> kAllTurnStates = {
    TurnState::Complete,
    TurnState::Incomplete,
    TurnState::Backchannel,
    TurnState::Wait,
};

/// Canonical lowercase form: "complete" / "incomplete" / "backchannel" / "wait".
std::string_view to_string(TurnState s);

/// Exact match against the canonical lowercase forms; nullopt otherwise.
std::optional<TurnState> turn_state_from_string(std::string_view token);

/// As turn_state_from_string, but throws ValidationError naming the token.
TurnState parse_turn_state(std::string_view token);

/// Stable index 0..3 in kAllTurnStates order.
inline std::size_t turn_state_index(TurnState s) { return static_cast<std::size_t>(s); }

} // namespace turnkit
