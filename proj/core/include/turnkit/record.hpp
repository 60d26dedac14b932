#pragma once

#include "turnkit/turn_state.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace turnkit {

/// Where a sample came from.
enum class Origin {
    Real,
    Synthetic,
};

std::string_view to_string(Origin o);
std::optional<Origin> origin_from_string(std::string_view token);

/// One labeler's raw response and parsed label for one utterance.
struct AnnotationVerdict {
    std::string annotator_id;
    std::string raw_response;
    /// Absent iff no valid label token was extractable after all retries.
    std::optional<TurnState> parsed_label;
    int attempt_count = 1;

    bool operator==(const AnnotationVerdict&) const = default;
};

/// One audio sample + transcription + provenance + label; the unit flowing
/// through every pipeline stage. Serialized as one JSONL manifest line with
/// keys in field order below; optional fields are omitted (not null).
struct UtteranceRecord {
    std::string id;                      // unique within a manifest
    std::string audio_path;              // relative to the manifest's directory
    int sample_rate = 0;                 // Hz, positive
    std::int64_t duration_ms = 0;        // non-negative
    std::string text;                    // UTF-8 transcription
    std::string speaker;
    Origin origin = Origin::Real;
    std::optional<TurnState> state;      // set only after an annotation policy passed
    std::vector<AnnotationVerdict> annotations;
    std::optional<double> wer;           // synthetic records keep wer == 0 after validation

    bool operator==(const UtteranceRecord&) const = default;
};

} // namespace turnkit
