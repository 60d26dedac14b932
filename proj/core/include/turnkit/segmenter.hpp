#pragma once

#include "turnkit/audio.hpp"
#include "turnkit/record.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace turnkit {

/// One line of a timestamped transcript.
struct TranscriptLine {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    std::string speaker;
    std::string text;

    bool operator==(const TranscriptLine&) const = default;
};

/// Parse a UTF-8 TSV transcript: start_ms<TAB>end_ms<TAB>speaker<TAB>text,
/// sorted by start_ms. Throws ValidationError with the line number on wrong
/// column count, non-numeric times, start >= end, unsorted lines, or
/// same-speaker overlap.
std::vector<TranscriptLine> parse_transcript(const std::filesystem::path& path);

struct SegmentOptions {
    /// Consecutive same-speaker lines whose gap is <= this merge into one
    /// record; texts joined by a single space, audio spans the gap.
    std::int64_t merge_gap_ms = 300;
    /// Segments shorter than this are dropped (counted, not an error).
    std::int64_t min_duration_ms = 200;
};

struct SegmentResult {
    std::vector<UtteranceRecord> records;
    int dropped_short = 0;
};

/// Cut utterance-level records out of a long recording. Per (possibly merged)
/// line, writes <conversation_id>_<index>.wav into out_dir and emits a record
/// with origin=real and state unset. Merge happens before the min-duration
/// filter; indices number the surviving records from 0 in time order.
/// Throws ValidationError when a line's end_ms exceeds the audio length.
SegmentResult segment(const AudioClip& audio, const std::vector<TranscriptLine>& lines,
                      const SegmentOptions& opts, const std::filesystem::path& out_dir,
                      const std::string& conversation_id);

} // namespace turnkit
