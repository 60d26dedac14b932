#include "turnkit/service_client.hpp"

#include "turnkit/base64.hpp"
#include "turnkit/rng.hpp"

#include <json.hpp>

#include <thread>

namespace turnkit {

using nlohmann::json;

class ServiceClient::InflightSlot {
public:
    explicit InflightSlot(ServiceClient& client) : client_(client) {
        std::unique_lock lock(client_.inflight_mutex_);
        client_.inflight_cv_.wait(lock, [&] { return client_.inflight_ < client_.config_.max_inflight; });
        ++client_.inflight_;
    }
    ~InflightSlot() {
        {
            std::lock_guard lock(client_.inflight_mutex_);
            --client_.inflight_;
        }
        client_.inflight_cv_.notify_one();
    }

private:
    ServiceClient& client_;
};

ServiceClient::ServiceClient(EndpointConfig config, std::unique_ptr<Transport> transport,
                             SleepFn sleep, std::optional<std::uint64_t> jitter_seed)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      sleep_(sleep ? std::move(sleep)
                   : [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }),
      rng_(jitter_seed ? *jitter_seed : std::random_device{}()) {}

std::chrono::milliseconds ServiceClient::backoff_for_attempt(int attempt) {
    const std::int64_t base = static_cast<std::int64_t>(config_.backoff_base_ms) << attempt;
    std::int64_t jitter;
    {
        std::lock_guard lock(rng_mutex_);
        // +/-20%: uniform in [80%, 120%] of base, in per-mille steps.
        jitter = uniform_i64(rng_, 800, 1200);
    }
    return std::chrono::milliseconds(base * jitter / 1000);
}

HttpResponse ServiceClient::call(const HttpRequest& request) {
    HttpRequest req = request;
    if (config_.api_key)
        req.headers.emplace_back("Authorization", "Bearer " + *config_.api_key);

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        try {
            HttpResponse res;
            {
                InflightSlot slot(*this);
                res = transport_->send(req);
            }
            if (res.status >= 200 && res.status < 300) return res;
            if (res.status >= 400 && res.status < 500)
                throw PermanentFailure("HTTP " + std::to_string(res.status) + " from " +
                                       config_.base_url + req.path + ": " + res.body);
            if (res.status >= 500) {
                last_error = "HTTP " + std::to_string(res.status);
            } else {
                throw ProtocolError("unexpected HTTP status " + std::to_string(res.status) +
                                    " from " + config_.base_url + req.path);
            }
        } catch (const TransportError& e) {
            last_error = e.what();
        }
        if (attempt < config_.max_retries) sleep_(backoff_for_attempt(attempt));
    }
    throw TransientFailure("request to " + config_.base_url + req.path + " failed after " +
                           std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

std::string ServiceClient::chat_complete(std::string_view system_prompt, std::string_view user_content) {
    json messages = json::array();
    if (!system_prompt.empty())
        messages.push_back({{"role", "system"}, {"content", std::string(system_prompt)}});
    messages.push_back({{"role", "user"}, {"content", std::string(user_content)}});

    HttpRequest req;
    req.path = "/v1/chat/completions";
    req.body = json{{"model", config_.model}, {"messages", std::move(messages)}}.dump();
    const HttpResponse res = call(req);

    json body = json::parse(res.body, nullptr, false);
    if (body.is_discarded()) throw ProtocolError("chat response is not valid JSON");
    if (!body.contains("choices") || !body["choices"].is_array() || body["choices"].empty())
        throw ProtocolError("chat response missing choices");
    const json& msg = body["choices"][0];
    if (!msg.contains("message") || !msg["message"].contains("content") ||
        !msg["message"]["content"].is_string())
        throw ProtocolError("chat response missing choices[0].message.content");
    return msg["message"]["content"].get<std::string>();
}

AudioClip ServiceClient::synthesize_speech(std::string_view text, const AudioClip* reference_audio,
                                           std::optional<int> sample_rate) {
    if (text.empty()) throw PermanentFailure("synthesize_speech: empty text");

    json body{{"text", std::string(text)}};
    if (reference_audio) {
        const auto wav = encode_wav(*reference_audio);
        body["reference_wav_base64"] = base64_encode(wav);
    }
    if (sample_rate) body["sample_rate"] = *sample_rate;

    HttpRequest req;
    req.path = "/synthesize";
    req.body = body.dump();
    const HttpResponse res = call(req);
    try {
        return decode_wav(std::span(reinterpret_cast<const std::uint8_t*>(res.body.data()),
                                    res.body.size()));
    } catch (const ValidationError& e) {
        throw ProtocolError(std::string("synthesize response is not a WAV stream: ") + e.what());
    }
}

std::string ServiceClient::transcribe(const AudioClip& clip) {
    if (clip.samples.empty()) throw PermanentFailure("transcribe: empty clip");

    const auto wav = encode_wav(clip);
    HttpRequest req;
    req.path = "/transcribe";
    req.body.assign(reinterpret_cast<const char*>(wav.data()), wav.size());
    req.content_type = "audio/wav";
    const HttpResponse res = call(req);

    json body = json::parse(res.body, nullptr, false);
    if (body.is_discarded() || !body.contains("text") || !body["text"].is_string())
        throw ProtocolError("transcribe response missing text field");
    return body["text"].get<std::string>();
}

std::string ServiceClient::detect_turn(const AudioClip& clip, std::string_view prompt) {
    const auto wav = encode_wav(clip);
    HttpRequest req;
    req.path = "/detect";
    req.body = json{{"wav_base64", base64_encode(wav)}, {"prompt", std::string(prompt)}}.dump();
    const HttpResponse res = call(req);

    json body = json::parse(res.body, nullptr, false);
    if (body.is_discarded() || !body.contains("output") || !body["output"].is_string())
        throw ProtocolError("detect response missing output field");
    return body["output"].get<std::string>();
}

} // namespace turnkit
