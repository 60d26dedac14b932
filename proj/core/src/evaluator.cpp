#include "turnkit/evaluator.hpp"

#include "turnkit/audio.hpp"
#include "turnkit/errors.hpp"
#include "turnkit/textmetrics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

namespace turnkit {

using nlohmann::json;
using nlohmann::ordered_json;

bool DetectorCapabilities::supports(TurnState s) const {
    return std::find(supported_states.begin(), supported_states.end(), s) != supported_states.end();
}

std::optional<DetectorOutput> parse_detector_output(std::string_view raw) {
    std::string lower(raw);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });

    std::size_t best_pos = std::string::npos;
    std::optional<TurnState> best;
    for (TurnState s : kAllTurnStates) {
        const std::string tag = "<" + std::string(to_string(s)) + ">";
        const auto pos = lower.rfind(tag);
        if (pos != std::string::npos && (best_pos == std::string::npos || pos > best_pos)) {
            best_pos = pos;
            best = s;
        }
    }
    if (!best) return std::nullopt;

    std::string_view transcript = raw.substr(0, best_pos);
    while (!transcript.empty() && std::isspace(static_cast<unsigned char>(transcript.front())))
        transcript.remove_prefix(1);
    while (!transcript.empty() && std::isspace(static_cast<unsigned char>(transcript.back())))
        transcript.remove_suffix(1);
    return DetectorOutput{std::string(transcript), *best};
}

namespace {

enum class Outcome { NotRun, Correct, Incorrect, Malformed };

struct PerRecord {
    Outcome outcome = Outcome::NotRun;
    std::optional<double> latency_ms;
    std::optional<Rational> transcript_wer;
};

double nearest_rank(std::vector<double>& sorted, double q) {
    const std::size_t n = sorted.size();
    const std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    return sorted[std::max<std::size_t>(rank, 1) - 1];
}

} // namespace

EvalReport evaluate(const std::vector<UtteranceRecord>& testset, ServiceClient& detector,
                    const DetectorCapabilities& caps, const DetectorMeta& meta,
                    const EvalOptions& opts) {
    if (!caps.accepts_audio)
        throw ValidationError(
            "evaluate: detector does not accept audio; this harness drives audio-input detectors");
    for (const auto& r : testset)
        if (!r.state) throw ValidationError("evaluate: record '" + r.id + "' has no state");

    EvalReport report;
    report.meta = meta;
    report.total = static_cast<int>(testset.size());
    for (TurnState s : kAllTurnStates)
        report.per_state[turn_state_index(s)].supported = caps.supports(s);

    std::vector<PerRecord> results(testset.size());
    std::atomic<bool> stop{false};

    auto process = [&](std::size_t i) {
        const UtteranceRecord& r = testset[i];
        if (!caps.supports(*r.state)) return;

        AudioClip clip = load_wav(opts.audio_root / r.audio_path);
        if (std::llabs(clip.duration_ms() - r.duration_ms) > 1)
            throw ValidationError("evaluate: record '" + r.id + "' duration_ms " +
                                  std::to_string(r.duration_ms) + " does not match audio (" +
                                  std::to_string(clip.duration_ms()) + " ms)");

        PerRecord& out = results[i];
        const auto t0 = std::chrono::steady_clock::now();
        std::string raw;
        try {
            raw = detector.detect_turn(clip, opts.prompt);
        } catch (const TransientFailure&) {
            out.outcome = Outcome::Malformed;
            return;
        }
        const auto t1 = std::chrono::steady_clock::now();
        out.latency_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

        const auto parsed = parse_detector_output(raw);
        if (!parsed) {
            out.outcome = Outcome::Malformed;
            return;
        }
        out.transcript_wer = wer(normalize_tokenize(r.text), normalize_tokenize(parsed->transcript));
        out.outcome = parsed->state == *r.state ? Outcome::Correct : Outcome::Incorrect;
    };

    if (opts.serial) {
        for (std::size_t i = 0; i < testset.size(); ++i) {
            try {
                process(i);
            } catch (const PermanentFailure&) {
                report.partial = true;
                break;
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&] {
            while (!stop.load()) {
                const std::size_t i = next.fetch_add(1);
                if (i >= testset.size()) return;
                try {
                    process(i);
                } catch (const PermanentFailure&) {
                    report.partial = true;
                    stop.store(true);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    stop.store(true);
                }
            }
        };
        const std::size_t worker_count = std::min<std::size_t>(testset.size(), 8);
        std::vector<std::thread> threads;
        for (std::size_t t = 0; t < worker_count; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    std::vector<double> latencies;
    Rational wer_sum(0);
    int wer_count = 0;
    for (std::size_t i = 0; i < testset.size(); ++i) {
        const PerRecord& pr = results[i];
        if (pr.outcome == Outcome::NotRun) continue;
        StateScore& score = report.per_state[turn_state_index(*testset[i].state)];
        score.n += 1;
        ++report.evaluated;
        switch (pr.outcome) {
            case Outcome::Correct: score.correct += 1; break;
            case Outcome::Incorrect: score.incorrect += 1; break;
            case Outcome::Malformed: score.malformed += 1; break;
            case Outcome::NotRun: break;
        }
        if (pr.latency_ms) latencies.push_back(*pr.latency_ms);
        if (pr.transcript_wer) {
            wer_sum = wer_sum + *pr.transcript_wer;
            ++wer_count;
        }
    }

    Rational acc_sum(0);
    int acc_states = 0;
    for (auto& score : report.per_state) {
        if (score.supported && score.n > 0) {
            score.accuracy = Rational(score.correct, score.n);
            acc_sum = acc_sum + *score.accuracy;
            ++acc_states;
        }
    }
    if (acc_states > 0) report.acc_avg = acc_sum / Rational(acc_states);
    if (wer_count > 0) report.transcript_wer_mean = wer_sum / Rational(wer_count);

    if (!latencies.empty()) {
        std::sort(latencies.begin(), latencies.end());
        double sum = 0;
        for (double v : latencies) sum += v;
        report.latency.samples = static_cast<int>(latencies.size());
        report.latency.mean_ms = sum / static_cast<double>(latencies.size());
        report.latency.p50_ms = nearest_rank(latencies, 0.50);
        report.latency.p95_ms = nearest_rank(latencies, 0.95);
    }
    return report;
}

namespace {

// "%.2f" with trailing zeros (and a bare trailing dot) trimmed: 96.33, 91, 263.5
std::string format_trimmed(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    std::string s(buf);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

// Exact percentage with two decimals, rounded half-up, trailing zeros trimmed.
std::string format_percent(const Rational& r) {
    const __int128 scaled = (static_cast<__int128>(r.num()) * 20000 + r.den()) /
                            (static_cast<__int128>(r.den()) * 2);
    const auto v = static_cast<std::int64_t>(scaled); // value in 1/100 percent
    std::string s = std::to_string(v / 100);
    const std::int64_t frac = v % 100;
    if (frac != 0) {
        s += '.';
        s += static_cast<char>('0' + frac / 10);
        if (frac % 10 != 0) s += static_cast<char>('0' + frac % 10);
    }
    return s;
}

std::string rational_to_exact(const Rational& r) { return r.to_string(); }

Rational rational_from_exact(const std::string& s) {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return Rational(std::stoll(s));
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

const char* state_key(TurnState s) { return to_string(s).data(); }

} // namespace

std::string render_report(const EvalReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) return report_to_json(report).dump(2) + "\n";

    const std::array<std::string, 8> header = {"Model",  "Params(MB)", "Latency(ms)",
                                               "Memory(MB)", "ACC_cp", "ACC_incp",
                                               "ACC_bc", "ACC_wait"};
    std::array<std::string, 8> row;
    row[0] = report.meta.name;
    row[1] = report.meta.params_mb ? format_trimmed(*report.meta.params_mb) : "-";
    row[2] = format_trimmed(report.latency.mean_ms);
    row[3] = report.meta.memory_mb ? format_trimmed(*report.meta.memory_mb) : "-";
    for (TurnState s : kAllTurnStates) {
        const StateScore& score = report.per_state[turn_state_index(s)];
        row[4 + turn_state_index(s)] =
            score.supported && score.accuracy ? format_percent(*score.accuracy) : "-";
    }

    std::array<std::size_t, 8> width{};
    for (std::size_t c = 0; c < 8; ++c) width[c] = std::max(header[c].size(), row[c].size());

    std::string out;
    auto emit = [&](const std::array<std::string, 8>& cells) {
        for (std::size_t c = 0; c < 8; ++c) {
            std::string cell = cells[c];
            cell.resize(width[c], ' ');
            out += cell;
            if (c + 1 < 8) out += " | ";
        }
        out += '\n';
    };
    emit(header);
    emit(row);
    return out;
}

json report_to_json(const EvalReport& report) {
    ordered_json j;
    ordered_json meta;
    meta["name"] = report.meta.name;
    if (report.meta.params_mb) meta["params_mb"] = *report.meta.params_mb;
    if (report.meta.memory_mb) meta["memory_mb"] = *report.meta.memory_mb;
    j["detector"] = std::move(meta);

    ordered_json states;
    for (TurnState s : kAllTurnStates) {
        const StateScore& score = report.per_state[turn_state_index(s)];
        ordered_json entry;
        entry["supported"] = score.supported;
        entry["n"] = score.n;
        entry["correct"] = score.correct;
        entry["incorrect"] = score.incorrect;
        entry["malformed"] = score.malformed;
        if (score.accuracy) {
            entry["accuracy"] = score.accuracy->to_double();
            entry["accuracy_exact"] = rational_to_exact(*score.accuracy);
        }
        states[state_key(s)] = std::move(entry);
    }
    j["states"] = std::move(states);

    if (report.acc_avg) {
        j["acc_avg"] = report.acc_avg->to_double();
        j["acc_avg_exact"] = rational_to_exact(*report.acc_avg);
    }
    j["latency_ms"] = ordered_json{{"mean", report.latency.mean_ms},
                                   {"p50", report.latency.p50_ms},
                                   {"p95", report.latency.p95_ms},
                                   {"samples", report.latency.samples}};
    if (report.transcript_wer_mean) {
        j["transcript_wer_mean"] = report.transcript_wer_mean->to_double();
        j["transcript_wer_mean_exact"] = rational_to_exact(*report.transcript_wer_mean);
    }
    j["total"] = report.total;
    j["evaluated"] = report.evaluated;
    j["partial"] = report.partial;
    return j;
}

EvalReport report_from_json(const json& j) {
    EvalReport report;
    const auto& meta = j.at("detector");
    report.meta.name = meta.at("name").get<std::string>();
    if (meta.contains("params_mb")) report.meta.params_mb = meta["params_mb"].get<double>();
    if (meta.contains("memory_mb")) report.meta.memory_mb = meta["memory_mb"].get<double>();

    for (TurnState s : kAllTurnStates) {
        const auto& entry = j.at("states").at(state_key(s));
        StateScore& score = report.per_state[turn_state_index(s)];
        score.supported = entry.at("supported").get<bool>();
        score.n = entry.at("n").get<int>();
        score.correct = entry.at("correct").get<int>();
        score.incorrect = entry.at("incorrect").get<int>();
        score.malformed = entry.at("malformed").get<int>();
        if (entry.contains("accuracy_exact"))
            score.accuracy = rational_from_exact(entry["accuracy_exact"].get<std::string>());
    }
    if (j.contains("acc_avg_exact"))
        report.acc_avg = rational_from_exact(j["acc_avg_exact"].get<std::string>());
    const auto& lat = j.at("latency_ms");
    report.latency.mean_ms = lat.at("mean").get<double>();
    report.latency.p50_ms = lat.at("p50").get<double>();
    report.latency.p95_ms = lat.at("p95").get<double>();
    report.latency.samples = lat.at("samples").get<int>();
    if (j.contains("transcript_wer_mean_exact"))
        report.transcript_wer_mean =
            rational_from_exact(j["transcript_wer_mean_exact"].get<std::string>());
    report.total = j.at("total").get<int>();
    report.evaluated = j.at("evaluated").get<int>();
    report.partial = j.at("partial").get<bool>();
    return report;
}

} // namespace turnkit
