// turnkit CLI: corpus construction, test-set composition, detector
// evaluation, and turn-policy simulation as batch subcommands.
//
// Exit codes: 0 success, 1 validation/config error, 2 endpoint permanent
// failure, 3 --min-acc gate failure.

#include "turnkit/config.hpp"
#include "turnkit/errors.hpp"
#include "turnkit/manifest.hpp"
#include "turnkit/policy.hpp"
#include "turnkit/segmenter.hpp"
#include "turnkit/stats.hpp"
#include "turnkit/synth.hpp"
#include "turnkit/testset.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace turnkit;
using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitPermanentFailure = 2;
constexpr int kExitGateFailure = 3;

std::vector<std::string> split_csv(const std::string& csv) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const auto comma = csv.find(',', pos);
        const std::string item = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

// Audio paths are relative to their manifest's directory; when records move
// to a manifest in another directory the paths must be rewritten.
void rebase_audio_paths(std::vector<UtteranceRecord>& records,
                        const std::filesystem::path& old_dir,
                        const std::filesystem::path& new_dir) {
    namespace fs = std::filesystem;
    const fs::path from = fs::weakly_canonical(fs::absolute(old_dir));
    const fs::path to = fs::weakly_canonical(fs::absolute(new_dir));
    if (from == to) return;
    for (auto& r : records)
        r.audio_path = fs::relative(from / r.audio_path, to).string();
}

int cmd_segment(const std::string& audio_path, const std::string& transcript_path,
                const std::string& out_dir, std::int64_t merge_gap_ms,
                std::int64_t min_duration_ms) {
    const AudioClip audio = load_wav(audio_path);
    const auto lines = parse_transcript(transcript_path);
    SegmentOptions opts;
    opts.merge_gap_ms = merge_gap_ms;
    opts.min_duration_ms = min_duration_ms;
    const std::string conversation_id = std::filesystem::path(audio_path).stem().string();

    const SegmentResult result = segment(audio, lines, opts, out_dir, conversation_id);
    write_manifest(result.records, std::filesystem::path(out_dir) / "manifest.jsonl");
    std::cerr << "segment: " << result.records.size() << " records written, "
              << result.dropped_short << " dropped below " << min_duration_ms << " ms\n";
    return kExitOk;
}

int cmd_annotate(const std::string& manifest_path, const std::string& config_path,
                 const std::string& target_state, const std::string& annotators_csv,
                 std::optional<std::int64_t> max_duration_ms, const std::string& out_dir,
                 const std::string& template_id, std::optional<std::uint64_t> template_seed) {
    const Config cfg = load_config(config_path);
    auto records = read_manifest(manifest_path);

    CrossAnnotationPolicy policy;
    policy.required_annotators = split_csv(annotators_csv);
    policy.target_state = parse_turn_state(target_state);
    policy.max_duration_ms = max_duration_ms;

    const auto annotators = make_annotators(cfg, policy.required_annotators, template_id, template_seed);
    CrossAnnotationResult result = cross_annotate(records, annotators, policy);

    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    const auto manifest_dir = std::filesystem::path(manifest_path).parent_path();
    rebase_audio_paths(result.kept, manifest_dir, out);
    rebase_audio_paths(result.rejected, manifest_dir, out);
    write_manifest(result.kept, out / "kept.jsonl");
    write_manifest(result.rejected, out / "rejected.jsonl");
    std::cerr << "annotate: " << result.kept.size() << " kept, " << result.rejected.size()
              << " rejected\n";
    return kExitOk;
}

int cmd_synth(const std::string& job_path, const std::string& out_dir) {
    const Config cfg = load_config(job_path);
    SynthSetup setup = load_synth_setup(cfg);

    const SynthResult result = synth_pipeline(setup.job, setup.endpoints, out_dir);
    write_manifest(result.records, std::filesystem::path(out_dir) / "manifest.jsonl");
    for (const auto& line : result.drop_log) std::cerr << "synth: dropped " << line << "\n";
    if (result.counters.generation_hit_cap)
        std::cerr << "synth: warning: generation round cap reached with only "
                  << result.counters.generated << " texts\n";
    std::cout << result.counters.to_json().dump(2) << "\n";
    return kExitOk;
}

int cmd_compose(const std::string& pool_path, const std::string& out_path, std::uint64_t seed,
                int complete, int incomplete, int backchannel, int wait, const std::string& ratio) {
    const auto pool = read_manifest(pool_path);

    TestsetSpec spec;
    spec.per_state_counts[turn_state_index(TurnState::Complete)] = complete;
    spec.per_state_counts[turn_state_index(TurnState::Incomplete)] = incomplete;
    spec.per_state_counts[turn_state_index(TurnState::Backchannel)] = backchannel;
    spec.per_state_counts[turn_state_index(TurnState::Wait)] = wait;
    spec.seed = seed;
    const auto colon = ratio.find(':');
    if (colon == std::string::npos)
        throw ValidationError("--ratio must look like REAL:SYNTH, e.g. 1:1");
    try {
        spec.ratio_real = std::stoi(ratio.substr(0, colon));
        spec.ratio_synth = std::stoi(ratio.substr(colon + 1));
    } catch (const std::exception&) {
        throw ValidationError("--ratio must look like REAL:SYNTH, e.g. 1:1");
    }

    auto testset = compose(pool, spec);
    rebase_audio_paths(testset, std::filesystem::path(pool_path).parent_path(),
                       std::filesystem::path(out_path).parent_path());
    write_manifest(testset, out_path);
    std::cerr << "compose-testset: " << testset.size() << " records written\n";
    return kExitOk;
}

int cmd_stats(const std::string& manifest_path) {
    const auto records = read_manifest(manifest_path);
    std::cout << render_stats_table(compute_stats(records));
    return kExitOk;
}

int cmd_eval(const std::string& manifest_path, const std::string& detector_cfg_path, bool serial,
             std::optional<double> min_acc, const std::string& format,
             const std::string& out_path, const std::string& prompt_id,
             std::optional<std::uint64_t> prompt_seed, const std::string& audio_root) {
    const auto testset = read_manifest(manifest_path);
    const Config cfg = load_config(detector_cfg_path);
    DetectorSetup detector = load_detector_setup(cfg, prompt_id, prompt_seed);

    EvalOptions opts;
    opts.prompt = detector.prompt;
    opts.serial = serial;
    opts.audio_root = audio_root.empty()
                          ? std::filesystem::path(manifest_path).parent_path()
                          : std::filesystem::path(audio_root);

    const EvalReport report =
        evaluate(testset, *detector.client, detector.capabilities, detector.meta, opts);

    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + out_path + "' for writing");
        out << render_report(report, ReportFormat::Json);
    }
    std::cout << render_report(report,
                               format == "json" ? ReportFormat::Json : ReportFormat::Table);

    if (report.partial) {
        std::cerr << "eval: aborted by permanent endpoint failure; report is partial\n";
        return kExitPermanentFailure;
    }
    if (min_acc) {
        for (TurnState s : kAllTurnStates) {
            const StateScore& score = report.per_state[turn_state_index(s)];
            if (score.supported && score.accuracy &&
                *score.accuracy < Rational(static_cast<std::int64_t>(*min_acc * 1e9), 1'000'000'000)) {
                std::cerr << "eval: ACC_" << to_string(s) << " below --min-acc gate\n";
                return kExitGateFailure;
            }
        }
    }
    return kExitOk;
}

PolicyEvent policy_event_from_json(const json& obj, std::size_t line_no) {
    if (!obj.is_object())
        throw ValidationError("trace line " + std::to_string(line_no) + ": expected object");
    PolicyEvent event;
    const std::string kind = obj.value("kind", "");
    if (kind == "detection") {
        event.kind = PolicyEvent::Kind::Detection;
        const std::string state = obj.value("state", "");
        auto s = turn_state_from_string(state);
        if (!s)
            throw ValidationError("trace line " + std::to_string(line_no) +
                                  ": detection event needs a valid state");
        event.detected = *s;
    } else if (kind == "patience_timeout") {
        event.kind = PolicyEvent::Kind::PatienceTimeout;
    } else if (kind == "system_speech_ended") {
        event.kind = PolicyEvent::Kind::SystemSpeechEnded;
    } else if (kind == "reset") {
        event.kind = PolicyEvent::Kind::Reset;
    } else {
        throw ValidationError("trace line " + std::to_string(line_no) + ": unknown kind '" + kind +
                              "'");
    }
    if (!obj.contains("timestamp_ms") || !obj["timestamp_ms"].is_number_integer())
        throw ValidationError("trace line " + std::to_string(line_no) + ": missing timestamp_ms");
    event.timestamp_ms = obj["timestamp_ms"].get<std::int64_t>();
    return event;
}

int cmd_policy_simulate(const std::string& trace_path, std::int64_t patience_ms,
                        std::optional<std::int64_t> end_ms) {
    std::ifstream in(trace_path, std::ios::binary);
    if (!in) throw IoError("cannot open trace '" + trace_path + "' for reading");
    std::vector<PolicyEvent> trace;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json obj = json::parse(line, nullptr, false);
        if (obj.is_discarded())
            throw ValidationError("trace line " + std::to_string(line_no) + ": invalid JSON");
        trace.push_back(policy_event_from_json(obj, line_no));
    }

    PolicyConfig cfg;
    cfg.patience_ms = patience_ms;
    const SimResult result = simulate(trace, cfg, end_ms);
    for (const auto& entry : result.entries) {
        ordered_json out;
        out["timestamp_ms"] = entry.event.timestamp_ms;
        out["event"] = std::string(to_string(entry.event.kind));
        if (entry.event.detected) out["state"] = std::string(to_string(*entry.event.detected));
        out["phase"] = std::string(to_string(entry.phase));
        out["action"] = std::string(to_string(entry.action));
        out["then_respond"] = entry.then_respond;
        out["injected"] = entry.injected;
        std::cout << out.dump() << "\n";
    }
    std::cerr << "policy simulate: " << result.entries.size() << " steps, "
              << result.injected_positions.size() << " injected timeouts\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"turn-taking corpus construction and detector evaluation toolkit"};
    app.require_subcommand(1);

    // segment
    auto* segment_cmd = app.add_subcommand("segment", "Cut a long recording into utterance records");
    std::string seg_audio, seg_transcript, seg_out;
    std::int64_t seg_merge_gap = 300, seg_min_duration = 200;
    segment_cmd->add_option("--audio", seg_audio, "Input WAV (PCM16 mono)")->required();
    segment_cmd->add_option("--transcript", seg_transcript, "TSV transcript: start_ms, end_ms, speaker, text")->required();
    segment_cmd->add_option("--out", seg_out, "Output directory for WAVs + manifest.jsonl")->required();
    segment_cmd->add_option("--merge-gap-ms", seg_merge_gap, "Merge same-speaker lines with gaps up to this")
        ->capture_default_str();
    segment_cmd->add_option("--min-duration-ms", seg_min_duration, "Drop segments shorter than this")
        ->capture_default_str();

    // annotate
    auto* annotate_cmd = app.add_subcommand("annotate", "Cross-annotate a manifest with LLM labelers");
    std::string ann_manifest, ann_config, ann_state, ann_annotators, ann_out, ann_template;
    std::optional<std::int64_t> ann_max_duration;
    std::optional<std::uint64_t> ann_template_seed;
    annotate_cmd->add_option("--manifest", ann_manifest, "Input manifest (JSONL)")->required();
    annotate_cmd->add_option("--config", ann_config, "Config file with endpoints and templates")->required();
    annotate_cmd->add_option("--target-state", ann_state, "complete|incomplete|backchannel|wait")->required();
    annotate_cmd->add_option("--annotators", ann_annotators, "Comma-separated endpoint ids; all must agree")->required();
    annotate_cmd->add_option("--max-duration-ms", ann_max_duration,
                             "Reject records at or above this duration without calling any endpoint");
    annotate_cmd->add_option("--out", ann_out, "Output directory for kept.jsonl / rejected.jsonl")->required();
    annotate_cmd->add_option("--template", ann_template, "Template id used for every annotator");
    annotate_cmd->add_option("--template-seed", ann_template_seed,
                             "Sample a template per annotator from the config store");

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Run the synthetic data pipeline from a job config");
    std::string synth_job, synth_out;
    synth_cmd->add_option("--job", synth_job, "Config file with a synth section")->required();
    synth_cmd->add_option("--out", synth_out, "Output directory for WAVs + manifest.jsonl")->required();

    // compose-testset
    auto* compose_cmd = app.add_subcommand("compose-testset", "Draw a balanced testset from a labeled pool");
    std::string comp_pool, comp_out, comp_ratio = "1:1";
    std::uint64_t comp_seed = 0;
    int comp_complete = 300, comp_incomplete = 300, comp_backchannel = 100, comp_wait = 100;
    compose_cmd->add_option("--pool", comp_pool, "Labeled pool manifest (JSONL)")->required();
    compose_cmd->add_option("--out", comp_out, "Output manifest path")->required();
    compose_cmd->add_option("--seed", comp_seed, "Sampling seed")->capture_default_str();
    compose_cmd->add_option("--complete", comp_complete, "Records for state complete")->capture_default_str();
    compose_cmd->add_option("--incomplete", comp_incomplete, "Records for state incomplete")->capture_default_str();
    compose_cmd->add_option("--backchannel", comp_backchannel, "Records for state backchannel")->capture_default_str();
    compose_cmd->add_option("--wait", comp_wait, "Records for state wait")->capture_default_str();
    compose_cmd->add_option("--ratio", comp_ratio, "real:synthetic split per state")->capture_default_str();

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "Entries and speech hours per turn state");
    std::string stats_manifest;
    stats_cmd->add_option("--manifest", stats_manifest, "Manifest (JSONL), all records labeled")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Score a detector endpoint on a labeled testset");
    std::string eval_manifest, eval_detector, eval_format = "table", eval_out, eval_prompt_id,
                eval_audio_root;
    bool eval_serial = true;
    std::optional<double> eval_min_acc;
    std::optional<std::uint64_t> eval_prompt_seed;
    eval_cmd->add_option("--manifest", eval_manifest, "Testset manifest (JSONL)")->required();
    eval_cmd->add_option("--detector", eval_detector, "Config file with a detector section")->required();
    eval_cmd->add_flag("--serial,!--no-serial", eval_serial,
                       "One request at a time so latency is uncontaminated")
        ->capture_default_str();
    eval_cmd->add_option("--min-acc", eval_min_acc, "Exit 3 when any supported state scores below this");
    eval_cmd->add_option("--format", eval_format, "table|json")->capture_default_str()
        ->check(CLI::IsMember({"table", "json"}));
    eval_cmd->add_option("--out", eval_out, "Also write the JSON report to this file");
    eval_cmd->add_option("--prompt-id", eval_prompt_id, "Detector prompt id from the config store");
    eval_cmd->add_option("--prompt-seed", eval_prompt_seed, "Sample the detector prompt with this seed");
    eval_cmd->add_option("--audio-root", eval_audio_root,
                         "Directory audio paths resolve against (default: manifest directory)");

    // policy simulate
    auto* policy_cmd = app.add_subcommand("policy", "Turn-policy tools");
    policy_cmd->require_subcommand(1);
    auto* sim_cmd = policy_cmd->add_subcommand("simulate", "Run a policy trace offline");
    std::string sim_trace;
    std::int64_t sim_patience = 2000;
    std::optional<std::int64_t> sim_end;
    sim_cmd->add_option("--trace", sim_trace, "Trace file (JSONL of events)")->required();
    sim_cmd->add_option("--patience-ms", sim_patience, "Wait after an incomplete before responding")
        ->capture_default_str();
    sim_cmd->add_option("--end-ms", sim_end, "Observation window end (default: last event)");

    try {
        app.parse(argc, argv);

        if (*segment_cmd)
            return cmd_segment(seg_audio, seg_transcript, seg_out, seg_merge_gap, seg_min_duration);
        if (*annotate_cmd)
            return cmd_annotate(ann_manifest, ann_config, ann_state, ann_annotators,
                                ann_max_duration, ann_out, ann_template, ann_template_seed);
        if (*synth_cmd) return cmd_synth(synth_job, synth_out);
        if (*compose_cmd)
            return cmd_compose(comp_pool, comp_out, comp_seed, comp_complete, comp_incomplete,
                               comp_backchannel, comp_wait, comp_ratio);
        if (*stats_cmd) return cmd_stats(stats_manifest);
        if (*eval_cmd)
            return cmd_eval(eval_manifest, eval_detector, eval_serial, eval_min_acc, eval_format,
                            eval_out, eval_prompt_id, eval_prompt_seed, eval_audio_root);
        if (*policy_cmd && *sim_cmd) return cmd_policy_simulate(sim_trace, sim_patience, sim_end);
        std::cerr << app.help();
        return kExitValidation;
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kExitValidation;
    } catch (const PermanentFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPermanentFailure;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
