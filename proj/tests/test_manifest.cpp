#include "turnkit/manifest.hpp"

#include "turnkit/errors.hpp"
#include "support/fixtures.hpp"
#include "support/temp_dir.hpp"

#include <doctest.h>

#include <fstream>

using namespace turnkit;
using turnkit::test::TempDir;

namespace {

std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

} // namespace

TEST_SUITE("turn_core") {

TEST_CASE("turn state strings round-trip on the four canonical forms") {
    for (TurnState s : kAllTurnStates) {
        CHECK(turn_state_from_string(to_string(s)) == s);
        CHECK(parse_turn_state(to_string(s)) == s);
    }
}

TEST_CASE("turn state parsing rejects anything but the closed set") {
    CHECK_FALSE(turn_state_from_string("finished").has_value());
    CHECK_FALSE(turn_state_from_string("Complete").has_value());
    CHECK_FALSE(turn_state_from_string("").has_value());
    CHECK_FALSE(turn_state_from_string(" complete").has_value());
    CHECK_THROWS_AS(parse_turn_state("pause"), ValidationError);
}

TEST_CASE("record serialization has fixed key order and omits absent optionals") {
    UtteranceRecord r = test::make_record("u1", TurnState::Complete, Origin::Synthetic, 980, "ok");
    r.wer = 0.0;
    AnnotationVerdict v;
    v.annotator_id = "a";
    v.raw_response = "<complete>";
    v.parsed_label = TurnState::Complete;
    v.attempt_count = 2;
    r.annotations.push_back(v);

    CHECK(record_to_json_line(r) ==
          R"({"id":"u1","audio_path":"u1.wav","sample_rate":16000,"duration_ms":980,"text":"ok",)"
          R"("speaker":"spk","origin":"synthetic","state":"complete","annotations":[{"annotator_id":"a",)"
          R"("raw_response":"<complete>","parsed_label":"complete","attempt_count":2}],"wer":0.0})");

    UtteranceRecord bare = test::make_record("u2");
    const std::string line = record_to_json_line(bare);
    CHECK(line.find("\"state\"") == std::string::npos);
    CHECK(line.find("\"wer\"") == std::string::npos);
    CHECK(line.find("\"annotations\":[]") != std::string::npos);
}

TEST_CASE("empty manifest file reads as an empty list") {
    TempDir dir;
    write_bytes(dir / "m.jsonl", "");
    CHECK(read_manifest(dir / "m.jsonl").empty());
}

TEST_CASE("two valid lines read back in order, field by field") {
    TempDir dir;
    write_bytes(dir / "m.jsonl",
                R"({"id":"a","audio_path":"a.wav","sample_rate":16000,"duration_ms":1500,)"
                R"("text":"hi","speaker":"s1","origin":"real","annotations":[]})"
                "\n"
                R"({"id":"b","audio_path":"b.wav","sample_rate":8000,"duration_ms":250,)"
                R"("text":"嗯","speaker":"s2","origin":"synthetic","state":"backchannel",)"
                R"("annotations":[],"wer":0.0})"
                "\n");
    const auto records = read_manifest(dir / "m.jsonl");
    REQUIRE(records.size() == 2);
    CHECK(records[0].id == "a");
    CHECK(records[0].audio_path == "a.wav");
    CHECK(records[0].sample_rate == 16000);
    CHECK(records[0].duration_ms == 1500);
    CHECK(records[0].text == "hi");
    CHECK(records[0].speaker == "s1");
    CHECK(records[0].origin == Origin::Real);
    CHECK_FALSE(records[0].state.has_value());
    CHECK_FALSE(records[0].wer.has_value());
    CHECK(records[1].id == "b");
    CHECK(records[1].text == "嗯");
    CHECK(records[1].origin == Origin::Synthetic);
    CHECK(records[1].state == TurnState::Backchannel);
    CHECK(records[1].wer == 0.0);
}

TEST_CASE("duplicate ids are reported with both line numbers") {
    TempDir dir;
    const std::string rec_a = record_to_json_line(test::make_record("a"));
    const std::string rec_b = record_to_json_line(test::make_record("b"));
    write_bytes(dir / "m.jsonl", rec_a + "\n" + rec_b + "\n" + rec_a + "\n");
    CHECK_THROWS_WITH_AS(read_manifest(dir / "m.jsonl"),
                         "manifest: duplicate id 'a' on lines 1,3", ValidationError);
}

TEST_CASE("malformed lines name the line number and offending field") {
    TempDir dir;

    SUBCASE("bad sample_rate type") {
        write_bytes(dir / "m.jsonl",
                    record_to_json_line(test::make_record("a")) + "\n" +
                        R"({"id":"b","audio_path":"b.wav","sample_rate":"16k","duration_ms":1,)"
                        R"("text":"x","speaker":"s","origin":"real","annotations":[]})" +
                        "\n");
        CHECK_THROWS_WITH_AS(read_manifest(dir / "m.jsonl"),
                             "manifest line 2: field 'sample_rate': expected integer",
                             ValidationError);
    }
    SUBCASE("missing text") {
        write_bytes(dir / "m.jsonl",
                    R"({"id":"a","audio_path":"a.wav","sample_rate":1,"duration_ms":1,)"
                    R"("speaker":"s","origin":"real","annotations":[]})"
                    "\n");
        CHECK_THROWS_WITH_AS(read_manifest(dir / "m.jsonl"),
                             "manifest line 1: field 'text': missing", ValidationError);
    }
    SUBCASE("fifth state value") {
        write_bytes(dir / "m.jsonl",
                    R"({"id":"a","audio_path":"a.wav","sample_rate":1,"duration_ms":1,"text":"x",)"
                    R"("speaker":"s","origin":"real","state":"finished","annotations":[]})"
                    "\n");
        CHECK_THROWS_AS(read_manifest(dir / "m.jsonl"), ValidationError);
    }
    SUBCASE("invalid JSON") {
        write_bytes(dir / "m.jsonl", "{not json\n");
        CHECK_THROWS_AS(read_manifest(dir / "m.jsonl"), ValidationError);
    }
    SUBCASE("negative duration") {
        write_bytes(dir / "m.jsonl",
                    R"({"id":"a","audio_path":"a.wav","sample_rate":1,"duration_ms":-5,"text":"x",)"
                    R"("speaker":"s","origin":"real","annotations":[]})"
                    "\n");
        CHECK_THROWS_WITH_AS(read_manifest(dir / "m.jsonl"),
                             "manifest line 1: field 'duration_ms': expected non-negative integer",
                             ValidationError);
    }
}

TEST_CASE("writing an empty list produces a zero-byte file") {
    TempDir dir;
    write_manifest({}, dir / "m.jsonl");
    CHECK(read_bytes(dir / "m.jsonl").empty());
}

TEST_CASE("manifest round-trip is the identity on random record lists") {
    TempDir dir;
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<UtteranceRecord> records;
        const std::size_t n = uniform_u64(rng, 20);
        for (std::size_t i = 0; i < n; ++i)
            records.push_back(test::random_record(rng, "r" + std::to_string(i)));
        write_manifest(records, dir / "m.jsonl");
        CHECK(read_manifest(dir / "m.jsonl") == records);
    }
}

TEST_CASE("the same list written twice produces identical bytes") {
    TempDir dir;
    std::mt19937_64 rng(11);
    std::vector<UtteranceRecord> records;
    for (std::size_t i = 0; i < 12; ++i)
        records.push_back(test::random_record(rng, "r" + std::to_string(i)));
    write_manifest(records, dir / "a.jsonl");
    write_manifest(records, dir / "b.jsonl");
    const std::string bytes = read_bytes(dir / "a.jsonl");
    CHECK(bytes == read_bytes(dir / "b.jsonl"));
    CHECK(bytes.find("\r") == std::string::npos); // LF terminators only
}

TEST_CASE("write_manifest validates before touching the file") {
    TempDir dir;
    UtteranceRecord bad = test::make_record("x");
    bad.sample_rate = 0;
    CHECK_THROWS_AS(write_manifest(std::vector<UtteranceRecord>{bad}, dir / "m.jsonl"),
                    ValidationError);
    CHECK_FALSE(std::filesystem::exists(dir / "m.jsonl"));
}

TEST_CASE("unwritable path raises an I/O error") {
    CHECK_THROWS_AS(write_manifest({}, "/nonexistent-dir/m.jsonl"), IoError);
}

} // TEST_SUITE
