#pragma once

#include "turnkit/audio.hpp"
#include "turnkit/http.hpp"
#include "turnkit/turn_state.hpp"

#include <json.hpp>

#include <atomic>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace turnkit {

// Deterministic in-process fakes for the four model services. Pipelines and
// the evaluator are tested entirely against these; no test opens a socket.

/// Encode a UTF-8 string into PCM samples: a 3-sample preamble, a length
/// sample, one sample per byte, then tail_samples of a fixed carrier pattern.
/// Survives slicing at segment boundaries and trailing silence.
AudioClip clip_from_text(const std::string& text, int sample_rate, int tail_samples = 1600);

/// Recover the text embedded by clip_from_text; nullopt when no valid
/// preamble is present.
std::optional<std::string> text_from_clip(const AudioClip& clip);

/// Substring -> label rule table. First matching rule wins.
struct LabelRule {
    std::string contains;
    TurnState label;
};

TurnState apply_label_rules(const std::vector<LabelRule>& rules, const std::string& text,
                            TurnState fallback);

/// Replays a scripted sequence of responses / transport failures and records
/// every request it sees. Steps are consumed in order; with repeat_last the
/// final step repeats forever.
class ScriptedTransport : public Transport {
public:
    ScriptedTransport& respond(int status, std::string body,
                               std::string content_type = "application/json");
    ScriptedTransport& fail_transport(std::string reason = "injected timeout");
    ScriptedTransport& delay(int delay_ms); // applies to the previously pushed step
    void set_repeat_last(bool repeat) { repeat_last_ = repeat; }

    HttpResponse send(const HttpRequest& request) override;

    std::vector<HttpRequest> requests() const;
    int send_count() const { return send_count_.load(); }

private:
    struct Step {
        bool fail = false;
        std::string fail_reason;
        HttpResponse response;
        int delay_ms = 0;
    };

    mutable std::mutex mutex_;
    std::deque<Step> steps_;
    std::optional<Step> last_step_;
    bool repeat_last_ = false;
    std::vector<HttpRequest> requests_;
    std::atomic<int> send_count_{0};
};

/// Wraps another transport and tracks concurrency: total sends and the peak
/// number of simultaneously outstanding sends.
class CountingTransport : public Transport {
public:
    explicit CountingTransport(std::unique_ptr<Transport> inner) : inner_(std::move(inner)) {}

    HttpResponse send(const HttpRequest& request) override;

    int total_sends() const { return total_.load(); }
    int peak_inflight() const { return peak_.load(); }

private:
    std::unique_ptr<Transport> inner_;
    std::atomic<int> total_{0};
    std::atomic<int> inflight_{0};
    std::atomic<int> peak_{0};
};

/// Chat-completions fake. Modes:
///  - echo: returns the last user message content
///  - fixed: returns scripted responses in call order (last one repeats)
///  - keyword_label: applies a LabelRule table to the user content and
///    returns the bracketed tag "<label>"
class FakeChatTransport : public Transport {
public:
    static std::unique_ptr<FakeChatTransport> echo();
    static std::unique_ptr<FakeChatTransport> fixed(std::vector<std::string> responses);
    static std::unique_ptr<FakeChatTransport> keyword_label(std::vector<LabelRule> rules,
                                                            TurnState fallback);

    /// Full control: maps user content to assistant content.
    void set_reply_fn(std::function<std::string(const std::string&)> fn);

    HttpResponse send(const HttpRequest& request) override;

    std::vector<std::string> user_contents() const;
    int send_count() const { return send_count_.load(); }

private:
    mutable std::mutex mutex_;
    std::function<std::string(const std::string&)> reply_fn_;
    std::vector<std::string> fixed_responses_;
    bool use_fixed_ = false;
    std::vector<std::string> user_contents_;
    std::atomic<int> send_count_{0};
};

/// TTS fake: synthesizes clip_from_text(text) at the configured rate (or the
/// rate requested in the call). Records request bodies for payload checks.
class FakeTtsTransport : public Transport {
public:
    explicit FakeTtsTransport(int sample_rate = 16'000, int tail_samples = 1600)
        : sample_rate_(sample_rate), tail_samples_(tail_samples) {}

    HttpResponse send(const HttpRequest& request) override;

    std::vector<std::string> request_bodies() const;

private:
    int sample_rate_;
    int tail_samples_;
    mutable std::mutex mutex_;
    std::vector<std::string> bodies_;
};

/// ASR fake: decodes the embedded text from the posted WAV. A corruption
/// predicate, when set, marks texts whose transcription comes back altered
/// (one extra leading token).
class FakeAsrTransport : public Transport {
public:
    FakeAsrTransport() = default;

    void set_corrupt_predicate(std::function<bool(const std::string&)> fn);

    HttpResponse send(const HttpRequest& request) override;

    int send_count() const { return send_count_.load(); }

private:
    std::mutex mutex_;
    std::function<bool(const std::string&)> corrupt_;
    std::atomic<int> send_count_{0};
};

/// Detector fake: decodes the embedded text and answers "<text><state>" with
/// the state chosen by a LabelRule table, or by a custom output function.
class FakeDetectorTransport : public Transport {
public:
    FakeDetectorTransport(std::vector<LabelRule> rules, TurnState fallback)
        : rules_(std::move(rules)), fallback_(fallback) {}

    /// Full control: maps decoded text to the raw detector output string.
    void set_output_fn(std::function<std::string(const std::string&)> fn);
    void set_delay_ms(int delay_ms) { delay_ms_ = delay_ms; }

    HttpResponse send(const HttpRequest& request) override;

    int send_count() const { return send_count_.load(); }

private:
    std::mutex mutex_;
    std::vector<LabelRule> rules_;
    TurnState fallback_;
    std::function<std::string(const std::string&)> output_fn_;
    int delay_ms_ = 0;
    std::atomic<int> send_count_{0};
};

/// Always answers with one fixed HTTP status and body, whatever the request;
/// injects wire-level failures from config.
class FixedStatusTransport : public Transport {
public:
    FixedStatusTransport(int status, std::string body)
        : status_(status), body_(std::move(body)) {}

    HttpResponse send(const HttpRequest&) override { return {status_, body_, "text/plain"}; }

private:
    int status_;
    std::string body_;
};

/// Build a fake transport from a config endpoint entry, e.g.
///   {"service":"chat","mode":"keyword_label","rules":[["uh-huh","backchannel"]],
///    "default_label":"complete"}
///   {"service":"tts","sample_rate":16000}
///   {"service":"asr","corrupt_containing":["glitch"]}
///   {"service":"detect","rules":[...],"default_label":"complete"}
///   {"service":"error","status":401,"body":"denied"}
std::unique_ptr<Transport> make_fake_transport(const nlohmann::json& spec);

} // namespace turnkit
