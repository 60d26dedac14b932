#include "turnkit/segmenter.hpp"

#include "turnkit/errors.hpp"

#include <charconv>
#include <fstream>
#include <map>

namespace turnkit {

namespace {

std::int64_t parse_time(std::string_view field, std::size_t line_no, const char* name) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ValidationError("transcript line " + std::to_string(line_no) + ": " + name +
                              " '" + std::string(field) + "' is not an integer");
    return value;
}

} // namespace

std::vector<TranscriptLine> parse_transcript(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open transcript '" + path.string() + "' for reading");

    std::vector<TranscriptLine> lines;
    std::map<std::string, std::int64_t> last_end_of_speaker;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();

        std::vector<std::string_view> cols;
        std::string_view rest = raw;
        while (true) {
            const auto tab = rest.find('\t');
            if (tab == std::string_view::npos) {
                cols.push_back(rest);
                break;
            }
            cols.push_back(rest.substr(0, tab));
            rest.remove_prefix(tab + 1);
        }
        if (cols.size() != 4)
            throw ValidationError("transcript line " + std::to_string(line_no) +
                                  ": expected 4 tab-separated columns, got " +
                                  std::to_string(cols.size()));

        TranscriptLine line;
        line.start_ms = parse_time(cols[0], line_no, "start_ms");
        line.end_ms = parse_time(cols[1], line_no, "end_ms");
        line.speaker = std::string(cols[2]);
        line.text = std::string(cols[3]);

        if (line.start_ms < 0)
            throw ValidationError("transcript line " + std::to_string(line_no) + ": negative start_ms");
        if (line.start_ms >= line.end_ms)
            throw ValidationError("transcript line " + std::to_string(line_no) +
                                  ": start_ms >= end_ms");
        if (!lines.empty() && line.start_ms < lines.back().start_ms)
            throw ValidationError("transcript line " + std::to_string(line_no) +
                                  ": lines not sorted by start_ms");
        if (auto it = last_end_of_speaker.find(line.speaker);
            it != last_end_of_speaker.end() && line.start_ms < it->second)
            throw ValidationError("transcript line " + std::to_string(line_no) +
                                  ": overlaps previous line for speaker '" + line.speaker + "'");
        last_end_of_speaker[line.speaker] = line.end_ms;
        lines.push_back(std::move(line));
    }
    return lines;
}

SegmentResult segment(const AudioClip& audio, const std::vector<TranscriptLine>& lines,
                      const SegmentOptions& opts, const std::filesystem::path& out_dir,
                      const std::string& conversation_id) {
    const std::int64_t audio_ms = audio.duration_ms();
    for (std::size_t i = 0; i < lines.size(); ++i)
        if (lines[i].end_ms > audio_ms)
            throw ValidationError("transcript line " + std::to_string(i + 1) + ": end_ms " +
                                  std::to_string(lines[i].end_ms) + " beyond audio end (" +
                                  std::to_string(audio_ms) + " ms)");

    // Merge pass: adjacent same-speaker lines with a small enough gap become
    // one segment spanning [first.start, last.end], gap audio included.
    struct Plan {
        std::int64_t start_ms, end_ms;
        std::string speaker, text;
    };
    std::vector<Plan> plans;
    for (const auto& line : lines) {
        if (!plans.empty() && plans.back().speaker == line.speaker &&
            line.start_ms - plans.back().end_ms <= opts.merge_gap_ms) {
            plans.back().end_ms = line.end_ms;
            plans.back().text += " " + line.text;
            continue;
        }
        plans.push_back({line.start_ms, line.end_ms, line.speaker, line.text});
    }

    SegmentResult result;
    std::filesystem::create_directories(out_dir);
    std::size_t index = 0;
    for (const auto& plan : plans) {
        if (plan.end_ms - plan.start_ms < opts.min_duration_ms) {
            ++result.dropped_short;
            continue;
        }
        const AudioClip piece = slice(audio, plan.start_ms, plan.end_ms);
        const std::string stem = conversation_id + "_" + std::to_string(index);
        save_wav(piece, out_dir / (stem + ".wav"));

        UtteranceRecord record;
        record.id = stem;
        record.audio_path = stem + ".wav";
        record.sample_rate = audio.sample_rate;
        record.duration_ms = piece.duration_ms();
        record.text = plan.text;
        record.speaker = plan.speaker;
        record.origin = Origin::Real;
        result.records.push_back(std::move(record));
        ++index;
    }
    return result;
}

} // namespace turnkit
