#pragma once

#include "turnkit/rational.hpp"
#include "turnkit/record.hpp"
#include "turnkit/service_client.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace turnkit {

/// What a detector claims to handle. Records whose gold state is unsupported
/// are skipped: no request is made, the state renders as "-" and stays out
/// of acc_avg.
struct DetectorCapabilities {
    std::vector<TurnState> supported_states = {TurnState::Complete, TurnState::Incomplete,
                                               TurnState::Backchannel, TurnState::Wait};
    bool accepts_audio = true;

    bool supports(TurnState s) const;
};

/// User-supplied metadata. Params/memory are report fields, not measured.
struct DetectorMeta {
    std::string name;
    std::optional<double> params_mb;
    std::optional<double> memory_mb;
};

struct DetectorOutput {
    std::string transcript;
    TurnState state;
};

/// Split "transcript<state>" detector output: the LAST angle-bracketed
/// canonical tag is the state, the transcript is everything before it,
/// trimmed. nullopt when no canonical tag is present.
std::optional<DetectorOutput> parse_detector_output(std::string_view raw);

struct StateScore {
    int n = 0;         // records with this gold state that were processed
    int correct = 0;   // predicted == gold
    int incorrect = 0; // parsed but wrong state
    int malformed = 0; // unparseable output or call failed after retries
    bool supported = true;
    std::optional<Rational> accuracy; // correct/n, exact; unset when unsupported or n == 0
};

struct LatencyStats {
    double mean_ms = 0;
    double p50_ms = 0; // nearest-rank percentiles over successful calls
    double p95_ms = 0;
    int samples = 0;
};

struct EvalReport {
    DetectorMeta meta;
    std::array<StateScore, 4> per_state{}; // indexed by turn_state_index()
    /// Unweighted mean over states that are both supported and present.
    std::optional<Rational> acc_avg;
    LatencyStats latency;
    std::optional<Rational> transcript_wer_mean; // over records whose output parsed
    int total = 0;     // testset size
    int evaluated = 0; // records actually sent to the detector
    bool partial = false; // a PermanentFailure aborted the run early
};

struct EvalOptions {
    std::string prompt;
    std::filesystem::path audio_root; // record audio_paths resolve against this
    /// One request at a time (default) so latency is uncontaminated by
    /// queuing; turn off to fan out under the endpoint's in-flight cap.
    bool serial = true;
};

/// Score a detector on a labeled testset. Wall-clock latency is measured
/// around each detect call and includes its retries. A record whose call ends
/// in TransientFailure scores as malformed; a PermanentFailure stops the run
/// and returns the partial report with partial=true.
EvalReport evaluate(const std::vector<UtteranceRecord>& testset, ServiceClient& detector,
                    const DetectorCapabilities& caps, const DetectorMeta& meta,
                    const EvalOptions& opts);

enum class ReportFormat { Table, Json };

/// Table format: Model | Params(MB) | Latency(ms) | Memory(MB) | ACC_cp |
/// ACC_incp | ACC_bc | ACC_wait, one data row, "-" for unsupported states
/// and absent metadata. Accuracies print as percentages with up to two
/// decimals (trailing zeros trimmed); latency is the mean. Json format is a
/// stable-key serialization that report_from_json restores exactly.
std::string render_report(const EvalReport& report, ReportFormat format);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

} // namespace turnkit
