#pragma once

#include "turnkit/record.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace turnkit {

/// Parse one manifest line. line_no is 1-based and used in error messages.
UtteranceRecord record_from_json_line(const std::string& line, std::size_t line_no);

/// Serialize one record as a single JSON object with fixed key order and no
/// trailing newline. Deterministic: equal records yield equal bytes.
std::string record_to_json_line(const UtteranceRecord& record);

/// Read a JSONL manifest. Records are returned in file order. Throws
/// ValidationError naming the line number and offending field on malformed
/// input, and both line numbers on duplicate ids. Empty lines are rejected
/// (every non-empty file line must be a record object).
std::vector<UtteranceRecord> read_manifest(const std::filesystem::path& path);

/// Write a JSONL manifest: one record per line, LF terminators, UTF-8.
/// Byte-deterministic. Validates record invariants (positive sample_rate,
/// unique ids, ...) before writing anything.
void write_manifest(std::span<const UtteranceRecord> records, const std::filesystem::path& path);

} // namespace turnkit
