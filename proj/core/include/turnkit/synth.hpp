#pragma once

#include "turnkit/annotator.hpp"
#include "turnkit/record.hpp"
#include "turnkit/service_client.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace turnkit {

/// One synthetic-data production run.
struct SynthJob {
    TurnState target_state = TurnState::Complete;
    std::string generation_prompt; // instructs the model to emit one candidate per line
    int count = 0;
    std::filesystem::path reference_dir; // reference WAVs for voice cloning
    /// Terminal silence injection, Incomplete only; 0 <= min <= max <= 1000.
    std::optional<std::pair<int, int>> pause_range_ms;
    std::uint64_t seed = 0;
};

/// Throws ValidationError on out-of-range fields (pause range outside
/// [0,1000], pause set for a non-Incomplete target, count < 1).
void validate_job(const SynthJob& job);

struct SynthEndpoints {
    std::shared_ptr<ServiceClient> generator;
    std::shared_ptr<ServiceClient> tts;
    std::shared_ptr<ServiceClient> asr;
    std::vector<AnnotatorEndpoint> annotators; // all are required by the policy
};

struct GenerateResult {
    std::vector<std::string> texts; // unique, trimmed, in arrival order
    int rounds = 0;
    bool hit_round_cap = false; // true when 10 rounds passed with < count texts
};

/// Gather job.count unique candidate texts: call the generator repeatedly,
/// split each response on lines, trim, drop empties and duplicates (first
/// occurrence kept). Hard cap of 10 rounds; a short result sets hit_round_cap.
GenerateResult generate_texts(const SynthJob& job, ServiceClient& generator);

/// Per-stage accounting. generated == kept_after_annotation + rejected_annotation;
/// kept_after_annotation == survived + dropped_tts + dropped_asr + dropped_wer.
struct SynthCounters {
    int generated = 0;
    int rejected_annotation = 0;
    int kept_after_annotation = 0;
    int dropped_tts = 0;
    int dropped_asr = 0;
    int dropped_wer = 0;
    int survived = 0;
    bool generation_hit_cap = false;

    nlohmann::json to_json() const;
};

struct SynthResult {
    std::vector<UtteranceRecord> records; // origin=synthetic, state=target, wer=0
    SynthCounters counters;
    std::vector<std::string> drop_log; // one human-readable line per dropped item
};

/// The full synthetic pipeline: generate -> cross-annotate -> per kept text:
/// seeded uniform reference pick -> TTS -> optional seeded pause injection ->
/// ASR round trip -> keep iff WER(normalize(text), normalize(asr)) == 0.
/// Audio is written to out_dir as <record-id>.wav. All random choices are
/// drawn up front from mt19937_64(job.seed), so identical jobs and fakes
/// produce byte-identical outputs. Transient/protocol failures drop the item;
/// PermanentFailure aborts.
SynthResult synth_pipeline(const SynthJob& job, const SynthEndpoints& endpoints,
                           const std::filesystem::path& out_dir);

} // namespace turnkit
