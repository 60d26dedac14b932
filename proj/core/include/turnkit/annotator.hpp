#pragma once

#include "turnkit/record.hpp"
#include "turnkit/service_client.hpp"
#include "turnkit/turn_state.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace turnkit {

/// Labeling prompt with a single `{utterance}` placeholder.
struct PromptTemplate {
    std::string id;
    std::string text;
    std::vector<TurnState> target_labels;
};

/// Throws ValidationError unless the template contains `{utterance}` exactly once.
void validate_template(const PromptTemplate& tmpl);

/// Substitute the utterance into the placeholder.
std::string render_prompt(const PromptTemplate& tmpl, std::string_view utterance);

/// Extract a turn-state label from a raw model response. Rule order:
///   1. first angle-bracketed canonical tag, case-insensitive, with
///      "incomplete" checked before "complete";
///   2. else, the trimmed lowercase response equal to a bare canonical word;
///   3. else absent.
std::optional<TurnState> label_parse(std::string_view raw);

/// One labeling endpoint: a client plus the prompt template it is asked with.
struct AnnotatorEndpoint {
    std::string id;
    PromptTemplate prompt;
    std::shared_ptr<ServiceClient> client;
};

/// Ask one annotator about one utterance. Unparseable responses are re-asked
/// up to 2 more times with a clarification instruction appended; the verdict
/// then records the last raw response with parsed_label absent. A
/// TransientFailure (after the client's retries) also yields an absent
/// verdict, with the failure noted in raw_response. PermanentFailure
/// propagates.
AnnotationVerdict annotate_one(const PromptTemplate& tmpl, const UtteranceRecord& record,
                               const std::string& annotator_id, ServiceClient& client);

/// Retention policy: a record is kept iff every required annotator parsed the
/// target state AND (max_duration_ms unset OR duration_ms < max_duration_ms).
struct CrossAnnotationPolicy {
    std::vector<std::string> required_annotators; // must match endpoint ids, length >= 1
    TurnState target_state = TurnState::Complete;
    std::optional<std::int64_t> max_duration_ms;
};

struct CrossAnnotationResult {
    std::vector<UtteranceRecord> kept;     // state set to target, annotations attached
    std::vector<UtteranceRecord> rejected; // annotations attached, state unset
};

/// Label every record with every required annotator and partition by the
/// retention predicate. The duration gate is applied before any endpoint
/// call: gated-out records are rejected with zero annotations. Records are
/// annotated concurrently (annotator calls per record stay in declared
/// order); both partitions preserve input order. A failed or unparseable
/// verdict counts as disagreement.
CrossAnnotationResult cross_annotate(const std::vector<UtteranceRecord>& records,
                                     const std::vector<AnnotatorEndpoint>& annotators,
                                     const CrossAnnotationPolicy& policy);

} // namespace turnkit
