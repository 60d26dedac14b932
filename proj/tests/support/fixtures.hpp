#pragma once

#include "turnkit/audio.hpp"
#include "turnkit/fakes.hpp"
#include "turnkit/record.hpp"
#include "turnkit/rng.hpp"
#include "turnkit/segmenter.hpp"

#include <random>
#include <string>
#include <vector>

namespace turnkit::test {

inline UtteranceRecord make_record(std::string id, std::optional<TurnState> state = {},
                                   Origin origin = Origin::Real, std::int64_t duration_ms = 1000,
                                   std::string text = "hello there") {
    UtteranceRecord r;
    r.id = std::move(id);
    r.audio_path = r.id + ".wav";
    r.sample_rate = 16'000;
    r.duration_ms = duration_ms;
    r.text = std::move(text);
    r.speaker = "spk";
    r.origin = origin;
    r.state = state;
    return r;
}

inline UtteranceRecord random_record(std::mt19937_64& rng, const std::string& id) {
    static const std::vector<std::string> texts = {
        "how are you", "i was wondering if", "uh-huh", "please stop", "你好吗",
        "tell me a story", "那个我想问一下", "okay right", ""};
    UtteranceRecord r;
    r.id = id;
    r.audio_path = id + ".wav";
    r.sample_rate = 8000 + static_cast<int>(uniform_u64(rng, 4)) * 8000;
    r.duration_ms = static_cast<std::int64_t>(uniform_u64(rng, 5000));
    r.text = texts[uniform_u64(rng, texts.size())];
    r.speaker = "spk" + std::to_string(uniform_u64(rng, 3));
    r.origin = uniform_u64(rng, 2) ? Origin::Real : Origin::Synthetic;
    if (uniform_u64(rng, 2))
        r.state = kAllTurnStates[uniform_u64(rng, 4)];
    if (uniform_u64(rng, 3) == 0) {
        AnnotationVerdict v;
        v.annotator_id = "ann" + std::to_string(uniform_u64(rng, 2));
        v.raw_response = "<complete> maybe";
        if (uniform_u64(rng, 2)) v.parsed_label = kAllTurnStates[uniform_u64(rng, 4)];
        v.attempt_count = 1 + static_cast<int>(uniform_u64(rng, 3));
        r.annotations.push_back(std::move(v));
    }
    if (uniform_u64(rng, 4) == 0) r.wer = 0.0;
    return r;
}

inline AudioClip random_clip(std::mt19937_64& rng, int sample_rate = 16'000,
                             std::size_t max_samples = 4000) {
    AudioClip clip;
    clip.sample_rate = sample_rate;
    const std::size_t n = 1 + uniform_u64(rng, max_samples);
    clip.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        clip.samples.push_back(static_cast<std::int16_t>(
            static_cast<std::int64_t>(uniform_u64(rng, 65536)) - 32768));
    return clip;
}

/// One utterance slot of a synthetic conversation.
struct ConversationTurn {
    std::string speaker;
    std::string text;
    std::int64_t duration_ms;
    std::int64_t gap_after_ms;
};

struct Conversation {
    AudioClip audio;
    std::vector<TranscriptLine> lines;
};

/// Lay turns out on a single track: each utterance region starts with the
/// text-embedding preamble (so sliced clips decode back to their text) and is
/// padded with silence to its duration; gaps are silent.
inline Conversation build_conversation(const std::vector<ConversationTurn>& turns,
                                       int sample_rate = 16'000) {
    Conversation conv;
    conv.audio.sample_rate = sample_rate;
    std::int64_t cursor_ms = 0;
    for (const auto& turn : turns) {
        const auto start_sample = ms_to_samples(cursor_ms, sample_rate);
        const auto end_sample = ms_to_samples(cursor_ms + turn.duration_ms, sample_rate);
        AudioClip body = clip_from_text(turn.text, sample_rate, /*tail_samples=*/0);
        if (static_cast<std::int64_t>(body.samples.size()) > end_sample - start_sample)
            throw std::logic_error("fixture: utterance too short to embed its text");
        conv.audio.samples.resize(static_cast<std::size_t>(start_sample), 0);
        conv.audio.samples.insert(conv.audio.samples.end(), body.samples.begin(),
                                  body.samples.end());
        conv.audio.samples.resize(static_cast<std::size_t>(end_sample), 0);
        conv.lines.push_back(
            {cursor_ms, cursor_ms + turn.duration_ms, turn.speaker, turn.text});
        cursor_ms += turn.duration_ms + turn.gap_after_ms;
    }
    conv.audio.samples.resize(static_cast<std::size_t>(ms_to_samples(cursor_ms, sample_rate)), 0);
    return conv;
}

} // namespace turnkit::test
