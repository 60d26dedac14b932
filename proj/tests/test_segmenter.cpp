#include "turnkit/segmenter.hpp"

#include "turnkit/errors.hpp"
#include "turnkit/manifest.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

#include <doctest.h>

#include <fstream>

using namespace turnkit;
using turnkit::test::TempDir;

namespace {

std::filesystem::path write_tsv(const TempDir& dir, const std::string& content) {
    const auto path = dir / "t.tsv";
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

AudioClip tone(int rate, std::int64_t ms) {
    AudioClip clip;
    clip.sample_rate = rate;
    const auto n = static_cast<std::size_t>(ms_to_samples(ms, rate));
    clip.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        clip.samples.push_back(static_cast<std::int16_t>((i % 80) * 100 - 4000));
    return clip;
}

} // namespace

TEST_SUITE("segmenter") {

TEST_CASE("empty transcript parses to an empty list") {
    TempDir dir;
    CHECK(parse_transcript(write_tsv(dir, "")).empty());
}

TEST_CASE("five valid lines parse field-equal to the fixture") {
    TempDir dir;
    const auto path = write_tsv(dir,
                                "0\t800\tA\thello there\n"
                                "900\t1500\tB\t嗯\n"
                                "1500\t2400\tA\tso I was thinking\n"
                                "2500\t3300\tB\tright right\n"
                                "3400\t4000\tA\tokay\n");
    const auto lines = parse_transcript(path);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == TranscriptLine{0, 800, "A", "hello there"});
    CHECK(lines[1] == TranscriptLine{900, 1500, "B", "嗯"});
    CHECK(lines[2] == TranscriptLine{1500, 2400, "A", "so I was thinking"});
    CHECK(lines[3] == TranscriptLine{2500, 3300, "B", "right right"});
    CHECK(lines[4] == TranscriptLine{3400, 4000, "A", "okay"});
}

TEST_CASE("same-speaker overlap is rejected at the offending line") {
    TempDir dir;
    const auto path = write_tsv(dir, "0\t1000\tA\tone\n900\t2000\tA\ttwo\n");
    CHECK_THROWS_WITH_AS(parse_transcript(path),
                         "transcript line 2: overlaps previous line for speaker 'A'",
                         ValidationError);
}

TEST_CASE("different speakers may overlap") {
    TempDir dir;
    const auto path = write_tsv(dir, "0\t1000\tA\tone\n900\t2000\tB\ttwo\n");
    CHECK(parse_transcript(path).size() == 2);
}

TEST_CASE("malformed lines are rejected with line numbers") {
    TempDir dir;
    SUBCASE("wrong column count") {
        CHECK_THROWS_WITH_AS(parse_transcript(write_tsv(dir, "0\t100\tA\n")),
                             "transcript line 1: expected 4 tab-separated columns, got 3",
                             ValidationError);
    }
    SUBCASE("non-numeric time") {
        CHECK_THROWS_WITH_AS(parse_transcript(write_tsv(dir, "zero\t100\tA\thi\n")),
                             "transcript line 1: start_ms 'zero' is not an integer",
                             ValidationError);
    }
    SUBCASE("start at or after end") {
        CHECK_THROWS_AS(parse_transcript(write_tsv(dir, "100\t100\tA\thi\n")), ValidationError);
    }
    SUBCASE("unsorted lines") {
        CHECK_THROWS_WITH_AS(
            parse_transcript(write_tsv(dir, "500\t900\tA\thi\n0\t400\tB\tyo\n")),
            "transcript line 2: lines not sorted by start_ms", ValidationError);
    }
}

TEST_CASE("a single line yields one record with its text and duration") {
    TempDir dir;
    const AudioClip audio = tone(16'000, 5000);
    const SegmentResult result =
        segment(audio, {{0, 1000, "A", "hello"}}, {}, dir.path(), "conv");
    REQUIRE(result.records.size() == 1);
    const auto& r = result.records[0];
    CHECK(r.id == "conv_0");
    CHECK(r.audio_path == "conv_0.wav");
    CHECK(r.duration_ms == 1000);
    CHECK(r.text == "hello");
    CHECK(r.speaker == "A");
    CHECK(r.origin == Origin::Real);
    CHECK_FALSE(r.state.has_value());
    CHECK(load_wav(dir / "conv_0.wav") == slice(audio, 0, 1000));
}

TEST_CASE("same-speaker lines within the merge gap become one record") {
    TempDir dir;
    const AudioClip audio = tone(16'000, 5000);
    SegmentOptions opts;
    opts.merge_gap_ms = 300;
    const SegmentResult result = segment(
        audio, {{0, 1000, "A", "so I was"}, {1200, 2000, "A", "thinking"}}, opts, dir.path(), "c");
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].duration_ms == 2000);
    CHECK(result.records[0].text == "so I was thinking");
    CHECK(load_wav(dir / "c_0.wav") == slice(audio, 0, 2000)); // gap audio included
}

TEST_CASE("a gap beyond the merge threshold stays two records") {
    TempDir dir;
    const AudioClip audio = tone(16'000, 5000);
    SegmentOptions opts;
    opts.merge_gap_ms = 300;
    const SegmentResult result = segment(
        audio, {{0, 1000, "A", "one"}, {1400, 2000, "A", "two"}}, opts, dir.path(), "c");
    CHECK(result.records.size() == 2);
}

TEST_CASE("speaker changes break merges") {
    TempDir dir;
    const AudioClip audio = tone(16'000, 5000);
    const SegmentResult result = segment(
        audio, {{0, 1000, "A", "one"}, {1100, 2000, "B", "two"}}, {}, dir.path(), "c");
    CHECK(result.records.size() == 2);
}

TEST_CASE("segments below min duration are dropped and counted") {
    TempDir dir;
    const AudioClip audio = tone(16'000, 5000);
    SegmentOptions opts;
    opts.min_duration_ms = 200;
    const SegmentResult result = segment(audio, {{0, 150, "A", "uh"}}, opts, dir.path(), "c");
    CHECK(result.records.empty());
    CHECK(result.dropped_short == 1);
}

TEST_CASE("merging can rescue fragments that alone would be dropped") {
    TempDir dir;
    const AudioClip audio = tone(16'000, 5000);
    SegmentOptions opts; // merge 300, min 200
    const SegmentResult result = segment(
        audio, {{0, 150, "A", "so"}, {250, 400, "A", "yeah"}}, opts, dir.path(), "c");
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].duration_ms == 400);
    CHECK(result.dropped_short == 0);
}

TEST_CASE("timestamps beyond the audio end name the line") {
    TempDir dir;
    const AudioClip audio = tone(16'000, 1000);
    CHECK_THROWS_WITH_AS(
        segment(audio, {{0, 900, "A", "ok"}, {950, 1200, "A", "over"}}, {}, dir.path(), "c"),
        "transcript line 2: end_ms 1200 beyond audio end (1000 ms)", ValidationError);
}

TEST_CASE("with merging and filtering off, records mirror the lines exactly") {
    TempDir dir;
    const AudioClip audio = tone(16'000, 6000);
    const std::vector<TranscriptLine> lines = {
        {0, 100, "A", "a"}, {150, 900, "A", "b"}, {1000, 2000, "B", "c"}, {2100, 2200, "A", "d"}};
    SegmentOptions opts;
    opts.merge_gap_ms = 0;
    opts.min_duration_ms = 0;
    const SegmentResult result = segment(audio, lines, opts, dir.path(), "c");
    REQUIRE(result.records.size() == lines.size());
    std::int64_t total = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        CHECK(result.records[i].text == lines[i].text);
        CHECK(load_wav(dir.path() / result.records[i].audio_path) ==
              slice(audio, lines[i].start_ms, lines[i].end_ms));
        total += result.records[i].duration_ms;
    }
    CHECK(total <= audio.duration_ms());
}

TEST_CASE("adjacent same-speaker lines touching exactly (gap 0) merge") {
    TempDir dir;
    const AudioClip audio = tone(16'000, 5000);
    SegmentOptions opts;
    opts.merge_gap_ms = 0;
    const SegmentResult result = segment(
        audio, {{0, 1000, "A", "one"}, {1000, 2000, "A", "two"}}, opts, dir.path(), "c");
    CHECK(result.records.size() == 1);
}

TEST_CASE("identical inputs produce byte-identical outputs") {
    const AudioClip audio = tone(16'000, 5000);
    const std::vector<TranscriptLine> lines = {{0, 1000, "A", "one"}, {1500, 2800, "B", "two"}};

    TempDir dir1, dir2;
    const auto r1 = segment(audio, lines, {}, dir1.path(), "c");
    const auto r2 = segment(audio, lines, {}, dir2.path(), "c");
    write_manifest(r1.records, dir1 / "manifest.jsonl");
    write_manifest(r2.records, dir2 / "manifest.jsonl");

    CHECK(read_bytes(dir1 / "manifest.jsonl") == read_bytes(dir2 / "manifest.jsonl"));
    for (const auto& r : r1.records)
        CHECK(read_bytes(dir1.path() / r.audio_path) == read_bytes(dir2.path() / r.audio_path));
}

} // TEST_SUITE
