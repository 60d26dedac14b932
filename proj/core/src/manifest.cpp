#include "turnkit/manifest.hpp"

#include "turnkit/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <unordered_map>

namespace turnkit {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Origin o) {
    return o == Origin::Real ? "real" : "synthetic";
}

std::optional<Origin> origin_from_string(std::string_view token) {
    if (token == "real") return Origin::Real;
    if (token == "synthetic") return Origin::Synthetic;
    return std::nullopt;
}

namespace {

[[noreturn]] void field_error(std::size_t line_no, const std::string& field, const std::string& what) {
    throw ValidationError("manifest line " + std::to_string(line_no) + ": field '" + field +
                          "': " + what);
}

std::string get_string(const json& obj, const char* field, std::size_t line_no) {
    auto it = obj.find(field);
    if (it == obj.end()) field_error(line_no, field, "missing");
    if (!it->is_string()) field_error(line_no, field, "expected string");
    return it->get<std::string>();
}

std::int64_t get_int(const json& obj, const char* field, std::size_t line_no) {
    auto it = obj.find(field);
    if (it == obj.end()) field_error(line_no, field, "missing");
    if (!it->is_number_integer()) field_error(line_no, field, "expected integer");
    return it->get<std::int64_t>();
}

AnnotationVerdict verdict_from_json(const json& obj, std::size_t line_no) {
    if (!obj.is_object()) field_error(line_no, "annotations", "expected object entries");
    AnnotationVerdict v;
    v.annotator_id = get_string(obj, "annotator_id", line_no);
    v.raw_response = get_string(obj, "raw_response", line_no);
    if (auto it = obj.find("parsed_label"); it != obj.end()) {
        if (!it->is_string()) field_error(line_no, "parsed_label", "expected string");
        auto s = turn_state_from_string(it->get<std::string>());
        if (!s) field_error(line_no, "parsed_label", "unknown turn state '" + it->get<std::string>() + "'");
        v.parsed_label = *s;
    }
    const std::int64_t attempts = get_int(obj, "attempt_count", line_no);
    if (attempts < 1) field_error(line_no, "attempt_count", "expected positive integer");
    v.attempt_count = static_cast<int>(attempts);
    return v;
}

ordered_json verdict_to_json(const AnnotationVerdict& v) {
    ordered_json obj;
    obj["annotator_id"] = v.annotator_id;
    obj["raw_response"] = v.raw_response;
    if (v.parsed_label) obj["parsed_label"] = std::string(to_string(*v.parsed_label));
    obj["attempt_count"] = v.attempt_count;
    return obj;
}

void validate_record(const UtteranceRecord& r, const std::string& context) {
    if (r.id.empty()) throw ValidationError(context + ": field 'id': must be non-empty");
    if (r.sample_rate <= 0) throw ValidationError(context + ": field 'sample_rate': expected positive integer");
    if (r.duration_ms < 0) throw ValidationError(context + ": field 'duration_ms': expected non-negative integer");
    if (r.wer && *r.wer < 0) throw ValidationError(context + ": field 'wer': expected non-negative number");
    for (const auto& v : r.annotations)
        if (v.attempt_count < 1)
            throw ValidationError(context + ": field 'attempt_count': expected positive integer");
}

} // namespace

UtteranceRecord record_from_json_line(const std::string& line, std::size_t line_no) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ValidationError("manifest line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    if (!obj.is_object())
        throw ValidationError("manifest line " + std::to_string(line_no) + ": expected a JSON object");

    UtteranceRecord r;
    r.id = get_string(obj, "id", line_no);
    r.audio_path = get_string(obj, "audio_path", line_no);
    const std::int64_t rate = get_int(obj, "sample_rate", line_no);
    if (rate <= 0 || rate > INT32_MAX) field_error(line_no, "sample_rate", "expected positive integer");
    r.sample_rate = static_cast<int>(rate);
    r.duration_ms = get_int(obj, "duration_ms", line_no);
    if (r.duration_ms < 0) field_error(line_no, "duration_ms", "expected non-negative integer");
    r.text = get_string(obj, "text", line_no);
    r.speaker = get_string(obj, "speaker", line_no);
    const std::string origin = get_string(obj, "origin", line_no);
    if (auto o = origin_from_string(origin))
        r.origin = *o;
    else
        field_error(line_no, "origin", "expected 'real' or 'synthetic', got '" + origin + "'");
    if (auto it = obj.find("state"); it != obj.end()) {
        if (!it->is_string()) field_error(line_no, "state", "expected string");
        auto s = turn_state_from_string(it->get<std::string>());
        if (!s) field_error(line_no, "state", "unknown turn state '" + it->get<std::string>() + "'");
        r.state = *s;
    }
    auto ann = obj.find("annotations");
    if (ann == obj.end()) field_error(line_no, "annotations", "missing");
    if (!ann->is_array()) field_error(line_no, "annotations", "expected array");
    for (const auto& entry : *ann) r.annotations.push_back(verdict_from_json(entry, line_no));
    if (auto it = obj.find("wer"); it != obj.end()) {
        if (!it->is_number()) field_error(line_no, "wer", "expected number");
        const double w = it->get<double>();
        if (w < 0) field_error(line_no, "wer", "expected non-negative number");
        r.wer = w;
    }
    return r;
}

std::string record_to_json_line(const UtteranceRecord& r) {
    ordered_json obj;
    obj["id"] = r.id;
    obj["audio_path"] = r.audio_path;
    obj["sample_rate"] = r.sample_rate;
    obj["duration_ms"] = r.duration_ms;
    obj["text"] = r.text;
    obj["speaker"] = r.speaker;
    obj["origin"] = std::string(to_string(r.origin));
    if (r.state) obj["state"] = std::string(to_string(*r.state));
    obj["annotations"] = ordered_json::array();
    for (const auto& v : r.annotations) obj["annotations"].push_back(verdict_to_json(v));
    if (r.wer) obj["wer"] = *r.wer;
    return obj.dump();
}

std::vector<UtteranceRecord> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest '" + path.string() + "' for reading");

    std::vector<UtteranceRecord> records;
    std::unordered_map<std::string, std::size_t> first_line_of_id;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty())
            throw ValidationError("manifest line " + std::to_string(line_no) + ": empty line");
        UtteranceRecord r = record_from_json_line(line, line_no);
        auto [it, inserted] = first_line_of_id.emplace(r.id, line_no);
        if (!inserted)
            throw ValidationError("manifest: duplicate id '" + r.id + "' on lines " +
                                  std::to_string(it->second) + "," + std::to_string(line_no));
        records.push_back(std::move(r));
    }
    return records;
}

void write_manifest(std::span<const UtteranceRecord> records, const std::filesystem::path& path) {
    std::unordered_map<std::string, std::size_t> first_line_of_id;
    std::ostringstream out;
    std::size_t line_no = 0;
    for (const auto& r : records) {
        ++line_no;
        validate_record(r, "manifest line " + std::to_string(line_no));
        auto [it, inserted] = first_line_of_id.emplace(r.id, line_no);
        if (!inserted)
            throw ValidationError("manifest: duplicate id '" + r.id + "' on lines " +
                                  std::to_string(it->second) + "," + std::to_string(line_no));
        out << record_to_json_line(r) << '\n';
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open manifest '" + path.string() + "' for writing");
    const std::string bytes = out.str();
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("failed writing manifest '" + path.string() + "'");
}

} // namespace turnkit
