#include "turnkit/synth.hpp"

#include "turnkit/errors.hpp"
#include "turnkit/rng.hpp"
#include "turnkit/textmetrics.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>
#include <unordered_set>

namespace turnkit {

using nlohmann::json;

void validate_job(const SynthJob& job) {
    if (job.count < 1) throw ValidationError("synth job: count must be >= 1");
    if (job.generation_prompt.empty()) throw ValidationError("synth job: empty generation_prompt");
    if (job.pause_range_ms) {
        if (job.target_state != TurnState::Incomplete)
            throw ValidationError("synth job: pause_range_ms is only valid for target_state incomplete");
        const auto [lo, hi] = *job.pause_range_ms;
        if (lo < 0 || lo > hi || hi > 1000)
            throw ValidationError("synth job: pause_range_ms must satisfy 0 <= min <= max <= 1000");
    }
}

GenerateResult generate_texts(const SynthJob& job, ServiceClient& generator) {
    validate_job(job);
    GenerateResult result;
    std::unordered_set<std::string> seen;

    constexpr int kMaxRounds = 10;
    while (result.rounds < kMaxRounds &&
           result.texts.size() < static_cast<std::size_t>(job.count)) {
        ++result.rounds;
        const std::string response = generator.chat_complete("", job.generation_prompt);
        std::size_t pos = 0;
        while (pos <= response.size() &&
               result.texts.size() < static_cast<std::size_t>(job.count)) {
            const auto nl = response.find('\n', pos);
            std::string line = response.substr(pos, nl == std::string::npos ? nl : nl - pos);
            pos = nl == std::string::npos ? response.size() + 1 : nl + 1;
            const auto begin = line.find_first_not_of(" \t\r");
            if (begin == std::string::npos) continue;
            const auto end = line.find_last_not_of(" \t\r");
            line = line.substr(begin, end - begin + 1);
            if (seen.insert(line).second) result.texts.push_back(std::move(line));
        }
    }
    result.hit_round_cap = result.texts.size() < static_cast<std::size_t>(job.count);
    return result;
}

json SynthCounters::to_json() const {
    return json{{"generated", generated},
                {"rejected_annotation", rejected_annotation},
                {"kept_after_annotation", kept_after_annotation},
                {"dropped_tts", dropped_tts},
                {"dropped_asr", dropped_asr},
                {"dropped_wer", dropped_wer},
                {"survived", survived},
                {"generation_hit_cap", generation_hit_cap}};
}

namespace {

std::vector<std::filesystem::path> list_reference_wavs(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> refs;
    if (!std::filesystem::is_directory(dir))
        throw ValidationError("synth job: reference_dir '" + dir.string() + "' is not a directory");
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".wav")
            refs.push_back(entry.path());
    std::sort(refs.begin(), refs.end()); // directory iteration order is filesystem-dependent
    if (refs.empty())
        throw ValidationError("synth job: no .wav files in reference_dir '" + dir.string() + "'");
    return refs;
}

} // namespace

SynthResult synth_pipeline(const SynthJob& job, const SynthEndpoints& endpoints,
                           const std::filesystem::path& out_dir) {
    validate_job(job);
    if (!endpoints.generator || !endpoints.tts || !endpoints.asr || endpoints.annotators.empty())
        throw ValidationError("synth pipeline: generator, tts, asr and annotators must be configured");

    SynthResult result;

    const GenerateResult generated = generate_texts(job, *endpoints.generator);
    result.counters.generated = static_cast<int>(generated.texts.size());
    result.counters.generation_hit_cap = generated.hit_round_cap;

    // Candidate records for annotation. No audio yet, so no duration gate.
    std::vector<UtteranceRecord> candidates;
    const std::string id_prefix = "syn_" + std::string(to_string(job.target_state)) + "_";
    for (std::size_t i = 0; i < generated.texts.size(); ++i) {
        UtteranceRecord r;
        r.id = id_prefix + std::to_string(i);
        r.sample_rate = 1; // placeholder until synthesis; manifest validation needs > 0
        r.text = generated.texts[i];
        r.origin = Origin::Synthetic;
        candidates.push_back(std::move(r));
    }

    CrossAnnotationPolicy policy;
    for (const auto& a : endpoints.annotators) policy.required_annotators.push_back(a.id);
    policy.target_state = job.target_state;
    const CrossAnnotationResult annotated =
        cross_annotate(candidates, endpoints.annotators, policy);
    result.counters.rejected_annotation = static_cast<int>(annotated.rejected.size());
    result.counters.kept_after_annotation = static_cast<int>(annotated.kept.size());

    const std::vector<std::filesystem::path> refs = list_reference_wavs(job.reference_dir);

    // All random choices come from one seeded stream, drawn in item order
    // before any service call, so concurrency cannot perturb them.
    std::mt19937_64 rng(job.seed);
    struct ItemPlan {
        std::size_t ref_index;
        std::optional<std::int64_t> pause_ms;
    };
    std::vector<ItemPlan> plans(annotated.kept.size());
    for (auto& plan : plans) {
        plan.ref_index = static_cast<std::size_t>(uniform_u64(rng, refs.size()));
        if (job.pause_range_ms)
            plan.pause_ms = uniform_i64(rng, job.pause_range_ms->first, job.pause_range_ms->second);
    }

    // Reference clips load once per distinct file, before fan-out.
    std::map<std::size_t, AudioClip> ref_clips;
    for (const auto& plan : plans)
        if (!ref_clips.count(plan.ref_index))
            ref_clips.emplace(plan.ref_index, load_wav(refs[plan.ref_index]));

    std::filesystem::create_directories(out_dir);

    enum class Outcome { Survived, DroppedTts, DroppedAsr, DroppedWer };
    struct ItemResult {
        Outcome outcome = Outcome::DroppedTts;
        UtteranceRecord record;
        std::string drop_reason;
    };
    std::vector<ItemResult> items(annotated.kept.size());

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= annotated.kept.size()) return;
            try {
                const UtteranceRecord& kept = annotated.kept[i];
                ItemResult& item = items[i];
                AudioClip clip;
                try {
                    clip = endpoints.tts->synthesize_speech(kept.text,
                                                            &ref_clips.at(plans[i].ref_index));
                } catch (const TransientFailure& e) {
                    item.outcome = Outcome::DroppedTts;
                    item.drop_reason = kept.id + ": tts: " + e.what();
                    continue;
                } catch (const ProtocolError& e) {
                    item.outcome = Outcome::DroppedTts;
                    item.drop_reason = kept.id + ": tts: " + e.what();
                    continue;
                }
                if (plans[i].pause_ms) clip = append_silence(clip, *plans[i].pause_ms);

                std::string asr_text;
                try {
                    asr_text = endpoints.asr->transcribe(clip);
                } catch (const TransientFailure& e) {
                    item.outcome = Outcome::DroppedAsr;
                    item.drop_reason = kept.id + ": asr: " + e.what();
                    continue;
                } catch (const ProtocolError& e) {
                    item.outcome = Outcome::DroppedAsr;
                    item.drop_reason = kept.id + ": asr: " + e.what();
                    continue;
                }

                if (wer(normalize_tokenize(kept.text), normalize_tokenize(asr_text)) != Rational(0)) {
                    item.outcome = Outcome::DroppedWer;
                    item.drop_reason = kept.id + ": wer: transcription mismatch ('" + asr_text + "')";
                    continue;
                }

                UtteranceRecord record = kept;
                record.audio_path = record.id + ".wav";
                record.sample_rate = clip.sample_rate;
                record.duration_ms = clip.duration_ms();
                record.speaker = refs[plans[i].ref_index].stem().string();
                record.state = job.target_state;
                record.wer = 0.0;
                save_wav(clip, out_dir / record.audio_path);
                item.outcome = Outcome::Survived;
                item.record = std::move(record);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const std::size_t worker_count = std::min<std::size_t>(annotated.kept.size(), 8);
    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(worker_count);
        for (std::size_t t = 0; t < worker_count; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (auto& item : items) {
        switch (item.outcome) {
            case Outcome::Survived:
                ++result.counters.survived;
                result.records.push_back(std::move(item.record));
                break;
            case Outcome::DroppedTts:
                ++result.counters.dropped_tts;
                result.drop_log.push_back(item.drop_reason);
                break;
            case Outcome::DroppedAsr:
                ++result.counters.dropped_asr;
                result.drop_log.push_back(item.drop_reason);
                break;
            case Outcome::DroppedWer:
                ++result.counters.dropped_wer;
                result.drop_log.push_back(item.drop_reason);
                break;
        }
    }
    return result;
}

} // namespace turnkit
