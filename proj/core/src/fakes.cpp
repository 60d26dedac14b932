#include "turnkit/fakes.hpp"

#include "turnkit/base64.hpp"

#include <chrono>
#include <thread>

namespace turnkit {

using nlohmann::json;

namespace {

constexpr std::int16_t kPreamble[3] = {32767, -32768, 4660};

std::string last_user_content(const std::string& body) {
    json req = json::parse(body, nullptr, false);
    if (req.is_discarded() || !req.contains("messages") || !req["messages"].is_array())
        return {};
    std::string content;
    for (const auto& m : req["messages"])
        if (m.value("role", "") == "user") content = m.value("content", "");
    return content;
}

HttpResponse json_response(json body) {
    HttpResponse res;
    res.status = 200;
    res.body = body.dump();
    res.content_type = "application/json";
    return res;
}

HttpResponse chat_response(const std::string& content) {
    return json_response(
        json{{"choices", json::array({json{{"message", json{{"role", "assistant"},
                                                            {"content", content}}}}})}});
}

} // namespace

AudioClip clip_from_text(const std::string& text, int sample_rate, int tail_samples) {
    AudioClip clip;
    clip.sample_rate = sample_rate;
    clip.samples.reserve(4 + text.size() + static_cast<std::size_t>(tail_samples));
    clip.samples.insert(clip.samples.end(), std::begin(kPreamble), std::end(kPreamble));
    clip.samples.push_back(static_cast<std::int16_t>(text.size()));
    for (unsigned char b : text) clip.samples.push_back(static_cast<std::int16_t>(b));
    for (int i = 0; i < tail_samples; ++i)
        clip.samples.push_back(i % 2 == 0 ? 3000 : -3000);
    return clip;
}

std::optional<std::string> text_from_clip(const AudioClip& clip) {
    const auto& s = clip.samples;
    for (std::size_t i = 0; i + 4 <= s.size(); ++i) {
        if (s[i] != kPreamble[0] || s[i + 1] != kPreamble[1] || s[i + 2] != kPreamble[2]) continue;
        const int len = s[i + 3];
        if (len < 0 || i + 4 + static_cast<std::size_t>(len) > s.size()) return std::nullopt;
        std::string text;
        text.reserve(static_cast<std::size_t>(len));
        for (int k = 0; k < len; ++k) {
            const std::int16_t v = s[i + 4 + static_cast<std::size_t>(k)];
            if (v < 0 || v > 255) return std::nullopt;
            text.push_back(static_cast<char>(v));
        }
        return text;
    }
    return std::nullopt;
}

TurnState apply_label_rules(const std::vector<LabelRule>& rules, const std::string& text,
                            TurnState fallback) {
    for (const auto& rule : rules)
        if (text.find(rule.contains) != std::string::npos) return rule.label;
    return fallback;
}

// --- ScriptedTransport ---

ScriptedTransport& ScriptedTransport::respond(int status, std::string body, std::string content_type) {
    std::lock_guard lock(mutex_);
    Step step;
    step.response = HttpResponse{status, std::move(body), std::move(content_type)};
    steps_.push_back(std::move(step));
    return *this;
}

ScriptedTransport& ScriptedTransport::fail_transport(std::string reason) {
    std::lock_guard lock(mutex_);
    Step step;
    step.fail = true;
    step.fail_reason = std::move(reason);
    steps_.push_back(std::move(step));
    return *this;
}

ScriptedTransport& ScriptedTransport::delay(int delay_ms) {
    std::lock_guard lock(mutex_);
    if (!steps_.empty()) steps_.back().delay_ms = delay_ms;
    return *this;
}

HttpResponse ScriptedTransport::send(const HttpRequest& request) {
    Step step;
    {
        std::lock_guard lock(mutex_);
        requests_.push_back(request);
        if (!steps_.empty()) {
            step = steps_.front();
            steps_.pop_front();
            last_step_ = step;
        } else if (repeat_last_ && last_step_) {
            step = *last_step_;
        } else {
            throw std::logic_error("ScriptedTransport: script exhausted");
        }
    }
    ++send_count_;
    if (step.delay_ms > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(step.delay_ms));
    if (step.fail) throw TransportError(step.fail_reason);
    return step.response;
}

std::vector<HttpRequest> ScriptedTransport::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

// --- CountingTransport ---

HttpResponse CountingTransport::send(const HttpRequest& request) {
    ++total_;
    const int now = ++inflight_;
    int prev = peak_.load();
    while (now > prev && !peak_.compare_exchange_weak(prev, now)) {
    }
    try {
        HttpResponse res = inner_->send(request);
        --inflight_;
        return res;
    } catch (...) {
        --inflight_;
        throw;
    }
}

// --- FakeChatTransport ---

std::unique_ptr<FakeChatTransport> FakeChatTransport::echo() {
    auto t = std::make_unique<FakeChatTransport>();
    t->reply_fn_ = [](const std::string& content) { return content; };
    return t;
}

std::unique_ptr<FakeChatTransport> FakeChatTransport::fixed(std::vector<std::string> responses) {
    auto t = std::make_unique<FakeChatTransport>();
    t->fixed_responses_ = std::move(responses);
    t->use_fixed_ = true;
    return t;
}

std::unique_ptr<FakeChatTransport> FakeChatTransport::keyword_label(std::vector<LabelRule> rules,
                                                                    TurnState fallback) {
    auto t = std::make_unique<FakeChatTransport>();
    t->reply_fn_ = [rules = std::move(rules), fallback](const std::string& content) {
        return "<" + std::string(to_string(apply_label_rules(rules, content, fallback))) + ">";
    };
    return t;
}

void FakeChatTransport::set_reply_fn(std::function<std::string(const std::string&)> fn) {
    std::lock_guard lock(mutex_);
    reply_fn_ = std::move(fn);
    use_fixed_ = false;
}

HttpResponse FakeChatTransport::send(const HttpRequest& request) {
    const std::string content = last_user_content(request.body);
    std::string reply;
    {
        std::lock_guard lock(mutex_);
        user_contents_.push_back(content);
        if (use_fixed_) {
            const std::size_t i = static_cast<std::size_t>(send_count_.load());
            reply = fixed_responses_.empty()
                        ? std::string()
                        : fixed_responses_[std::min(i, fixed_responses_.size() - 1)];
        } else {
            reply = reply_fn_ ? reply_fn_(content) : content;
        }
    }
    ++send_count_;
    return chat_response(reply);
}

std::vector<std::string> FakeChatTransport::user_contents() const {
    std::lock_guard lock(mutex_);
    return user_contents_;
}

// --- FakeTtsTransport ---

HttpResponse FakeTtsTransport::send(const HttpRequest& request) {
    {
        std::lock_guard lock(mutex_);
        bodies_.push_back(request.body);
    }
    json req = json::parse(request.body, nullptr, false);
    if (req.is_discarded() || !req.contains("text") || !req["text"].is_string())
        return HttpResponse{400, "missing text", "text/plain"};
    const std::string text = req["text"].get<std::string>();
    const int rate = req.value("sample_rate", sample_rate_);
    const auto wav = encode_wav(clip_from_text(text, rate, tail_samples_));
    HttpResponse res;
    res.status = 200;
    res.body.assign(reinterpret_cast<const char*>(wav.data()), wav.size());
    res.content_type = "audio/wav";
    return res;
}

std::vector<std::string> FakeTtsTransport::request_bodies() const {
    std::lock_guard lock(mutex_);
    return bodies_;
}

// --- FakeAsrTransport ---

void FakeAsrTransport::set_corrupt_predicate(std::function<bool(const std::string&)> fn) {
    std::lock_guard lock(mutex_);
    corrupt_ = std::move(fn);
}

HttpResponse FakeAsrTransport::send(const HttpRequest& request) {
    ++send_count_;
    AudioClip clip;
    try {
        clip = decode_wav(std::span(reinterpret_cast<const std::uint8_t*>(request.body.data()),
                                    request.body.size()));
    } catch (const ValidationError&) {
        return HttpResponse{400, "not a wav payload", "text/plain"};
    }
    const auto text = text_from_clip(clip);
    if (!text) return json_response(json{{"text", ""}});
    std::function<bool(const std::string&)> corrupt;
    {
        std::lock_guard lock(mutex_);
        corrupt = corrupt_;
    }
    if (corrupt && corrupt(*text)) return json_response(json{{"text", "zzz " + *text}});
    return json_response(json{{"text", *text}});
}

// --- FakeDetectorTransport ---

void FakeDetectorTransport::set_output_fn(std::function<std::string(const std::string&)> fn) {
    std::lock_guard lock(mutex_);
    output_fn_ = std::move(fn);
}

HttpResponse FakeDetectorTransport::send(const HttpRequest& request) {
    ++send_count_;
    if (delay_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
    json req = json::parse(request.body, nullptr, false);
    if (req.is_discarded() || !req.contains("wav_base64") || !req["wav_base64"].is_string())
        return HttpResponse{400, "missing wav_base64", "text/plain"};
    AudioClip clip;
    try {
        clip = decode_wav(base64_decode(req["wav_base64"].get<std::string>()));
    } catch (const ValidationError&) {
        return HttpResponse{400, "invalid wav payload", "text/plain"};
    }
    const std::string text = text_from_clip(clip).value_or("");
    std::function<std::string(const std::string&)> output_fn;
    std::vector<LabelRule> rules;
    TurnState fallback;
    {
        std::lock_guard lock(mutex_);
        output_fn = output_fn_;
        rules = rules_;
        fallback = fallback_;
    }
    std::string output;
    if (output_fn) {
        output = output_fn(text);
    } else {
        output = text + "<" + std::string(to_string(apply_label_rules(rules, text, fallback))) + ">";
    }
    return json_response(json{{"output", output}});
}

// --- config-driven construction ---

namespace {

std::vector<LabelRule> rules_from_json(const json& spec) {
    std::vector<LabelRule> rules;
    if (!spec.contains("rules")) return rules;
    for (const auto& entry : spec["rules"]) {
        if (!entry.is_array() || entry.size() != 2)
            throw ValidationError("fake endpoint: each rule must be [substring, label]");
        auto label = turn_state_from_string(entry[1].get<std::string>());
        if (!label)
            throw ValidationError("fake endpoint: unknown label '" + entry[1].get<std::string>() + "'");
        rules.push_back({entry[0].get<std::string>(), *label});
    }
    return rules;
}

TurnState fallback_from_json(const json& spec) {
    const std::string name = spec.value("default_label", "complete");
    auto label = turn_state_from_string(name);
    if (!label) throw ValidationError("fake endpoint: unknown default_label '" + name + "'");
    return *label;
}

} // namespace

std::unique_ptr<Transport> make_fake_transport(const json& spec) {
    const std::string service = spec.value("service", "");
    if (service == "chat") {
        const std::string mode = spec.value("mode", "echo");
        if (mode == "echo") return FakeChatTransport::echo();
        if (mode == "fixed") {
            std::vector<std::string> responses;
            for (const auto& r : spec.value("responses", json::array()))
                responses.push_back(r.get<std::string>());
            return FakeChatTransport::fixed(std::move(responses));
        }
        if (mode == "keyword_label")
            return FakeChatTransport::keyword_label(rules_from_json(spec), fallback_from_json(spec));
        throw ValidationError("fake chat endpoint: unknown mode '" + mode + "'");
    }
    if (service == "tts")
        return std::make_unique<FakeTtsTransport>(spec.value("sample_rate", 16'000),
                                                  spec.value("tail_samples", 1600));
    if (service == "asr") {
        auto t = std::make_unique<FakeAsrTransport>();
        if (spec.contains("corrupt_containing")) {
            std::vector<std::string> needles;
            for (const auto& n : spec["corrupt_containing"]) needles.push_back(n.get<std::string>());
            t->set_corrupt_predicate([needles](const std::string& text) {
                for (const auto& n : needles)
                    if (text.find(n) != std::string::npos) return true;
                return false;
            });
        }
        return t;
    }
    if (service == "detect")
        return std::make_unique<FakeDetectorTransport>(rules_from_json(spec), fallback_from_json(spec));
    if (service == "error")
        return std::make_unique<FixedStatusTransport>(spec.value("status", 500),
                                                      spec.value("body", "injected error"));
    throw ValidationError("fake endpoint: unknown service '" + service +
                          "' (expected chat|tts|asr|detect|error)");
}

} // namespace turnkit
