#pragma once

#include "turnkit/audio.hpp"
#include "turnkit/http.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace turnkit {

struct EndpointConfig {
    std::string base_url;
    std::optional<std::string> api_key; // sent as Authorization: Bearer <key>
    std::string model = "default";      // chat-completions "model" field
    int timeout_ms = 30'000;
    int max_retries = 3;
    int backoff_base_ms = 500;
    int max_inflight = 8;
};

/// Client for one service endpoint.
///
/// Every call classifies the outcome: 2xx success; 4xx PermanentFailure
/// (never retried); 5xx and transport errors retried with
/// backoff_base_ms * 2^attempt +/-20% jitter, then TransientFailure; other
/// statuses ProtocolError. Total attempts per call <= max_retries + 1. At
/// most max_inflight requests are outstanding at any instant; the slot is
/// released while backing off. Safe to share across worker threads.
class ServiceClient {
public:
    using SleepFn = std::function<void(std::chrono::milliseconds)>;

    ServiceClient(EndpointConfig config, std::unique_ptr<Transport> transport,
                  SleepFn sleep = {}, std::optional<std::uint64_t> jitter_seed = {});

    /// Raw retrying call; the typed operations below are built on it.
    HttpResponse call(const HttpRequest& request);

    /// OpenAI-compatible chat completion: POST /v1/chat/completions with
    /// {model, messages:[{role,content}...]}; returns choices[0].message.content.
    /// An empty system_prompt sends no system message.
    std::string chat_complete(std::string_view system_prompt, std::string_view user_content);

    /// POST /synthesize {text, reference_wav_base64?, sample_rate?}; the
    /// response body is a WAV byte stream. text must be non-empty.
    AudioClip synthesize_speech(std::string_view text, const AudioClip* reference_audio = nullptr,
                                std::optional<int> sample_rate = {});

    /// POST /transcribe with raw WAV bytes (Content-Type: audio/wav);
    /// response {"text": ...}. The clip must contain samples.
    std::string transcribe(const AudioClip& clip);

    /// POST /detect {wav_base64, prompt}; response {"output": ...} returned
    /// verbatim for downstream parsing.
    std::string detect_turn(const AudioClip& clip, std::string_view prompt);

    const EndpointConfig& config() const { return config_; }

private:
    class InflightSlot;
    std::chrono::milliseconds backoff_for_attempt(int attempt);

    EndpointConfig config_;
    std::unique_ptr<Transport> transport_;
    SleepFn sleep_;

    std::mutex rng_mutex_;
    std::mt19937_64 rng_;

    std::mutex inflight_mutex_;
    std::condition_variable inflight_cv_;
    int inflight_ = 0;
};

} // namespace turnkit
