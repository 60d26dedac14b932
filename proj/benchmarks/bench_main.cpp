#include "turnkit/manifest.hpp"
#include "turnkit/policy.hpp"
#include "turnkit/rng.hpp"
#include "turnkit/textmetrics.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

namespace {

using namespace turnkit;

TokenSequence random_tokens(std::mt19937_64& rng, std::size_t n) {
    TokenSequence s;
    s.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        s.push_back(std::string(1, static_cast<char>('a' + uniform_u64(rng, 26))));
    return s;
}

void BM_normalize_tokenize(benchmark::State& state) {
    const std::string text =
        "OK，好的。I was wondering if you could maybe tell me a bit more about that？";
    for (auto _ : state) benchmark::DoNotOptimize(normalize_tokenize(text));
}
BENCHMARK(BM_normalize_tokenize);

void BM_wer(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto ref = random_tokens(rng, static_cast<std::size_t>(state.range(0)));
    auto hyp = ref;
    hyp[hyp.size() / 2] = "zz";
    for (auto _ : state) benchmark::DoNotOptimize(wer(ref, hyp));
}
BENCHMARK(BM_wer)->Arg(16)->Arg(64)->Arg(256);

void BM_record_serialize(benchmark::State& state) {
    UtteranceRecord r;
    r.id = "bench_0";
    r.audio_path = "bench_0.wav";
    r.sample_rate = 16'000;
    r.duration_ms = 1234;
    r.text = "so I was wondering if you could tell me more";
    r.speaker = "A";
    r.origin = Origin::Real;
    r.state = TurnState::Incomplete;
    for (auto _ : state) benchmark::DoNotOptimize(record_to_json_line(r));
}
BENCHMARK(BM_record_serialize);

void BM_record_parse(benchmark::State& state) {
    UtteranceRecord r;
    r.id = "bench_0";
    r.audio_path = "bench_0.wav";
    r.sample_rate = 16'000;
    r.duration_ms = 1234;
    r.text = "durations and labels ride along";
    r.speaker = "A";
    const std::string line = record_to_json_line(r);
    for (auto _ : state) benchmark::DoNotOptimize(record_from_json_line(line, 1));
}
BENCHMARK(BM_record_parse);

void BM_policy_simulate(benchmark::State& state) {
    std::mt19937_64 rng(7);
    std::vector<PolicyEvent> trace;
    std::int64_t t = 0;
    for (int i = 0; i < 1000; ++i) {
        t += static_cast<std::int64_t>(uniform_u64(rng, 2500));
        trace.push_back(PolicyEvent::detection(kAllTurnStates[uniform_u64(rng, 4)], t));
    }
    PolicyConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(simulate(trace, cfg, t));
}
BENCHMARK(BM_policy_simulate);

} // namespace

BENCHMARK_MAIN();
