#include "turnkit/annotator.hpp"

#include "turnkit/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <thread>

namespace turnkit {

namespace {

constexpr std::string_view kPlaceholder = "{utterance}";
constexpr std::string_view kClarification =
    "Answer with exactly one of these tags and nothing else: "
    "<complete>, <incomplete>, <backchannel>, <wait>.";

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

} // namespace

void validate_template(const PromptTemplate& tmpl) {
    const auto first = tmpl.text.find(kPlaceholder);
    if (first == std::string::npos)
        throw ValidationError("template '" + tmpl.id + "': missing {utterance} placeholder");
    if (tmpl.text.find(kPlaceholder, first + 1) != std::string::npos)
        throw ValidationError("template '" + tmpl.id + "': {utterance} must appear exactly once");
}

std::string render_prompt(const PromptTemplate& tmpl, std::string_view utterance) {
    validate_template(tmpl);
    std::string out = tmpl.text;
    out.replace(out.find(kPlaceholder), kPlaceholder.size(), utterance);
    return out;
}

std::optional<TurnState> label_parse(std::string_view raw) {
    const std::string lower = to_lower_ascii(raw);

    // Rule 1: earliest bracketed canonical tag. "incomplete" is checked before
    // "complete" so substring scans cannot mistake one for the other.
    const std::array<TurnState, 4> scan_order = {TurnState::Incomplete, TurnState::Complete,
                                                 TurnState::Backchannel, TurnState::Wait};
    std::size_t best_pos = std::string::npos;
    std::optional<TurnState> best;
    for (TurnState s : scan_order) {
        const std::string tag = "<" + std::string(to_string(s)) + ">";
        const auto pos = lower.find(tag);
        if (pos != std::string::npos && pos < best_pos) {
            best_pos = pos;
            best = s;
        }
    }
    if (best) return best;

    // Rule 2: bare canonical word.
    return turn_state_from_string(trim(lower));
}

AnnotationVerdict annotate_one(const PromptTemplate& tmpl, const UtteranceRecord& record,
                               const std::string& annotator_id, ServiceClient& client) {
    if (record.text.empty())
        throw ValidationError("annotate_one: record '" + record.id + "' has empty text");

    const std::string rendered = render_prompt(tmpl, record.text);
    AnnotationVerdict verdict;
    verdict.annotator_id = annotator_id;

    for (int ask = 1; ask <= 3; ++ask) {
        verdict.attempt_count = ask;
        const std::string content =
            ask == 1 ? rendered : rendered + "\n\n" + std::string(kClarification);
        try {
            verdict.raw_response = client.chat_complete("", content);
        } catch (const TransientFailure& e) {
            verdict.raw_response = std::string("[transient failure] ") + e.what();
            verdict.parsed_label.reset();
            return verdict;
        }
        verdict.parsed_label = label_parse(verdict.raw_response);
        if (verdict.parsed_label) return verdict;
    }
    return verdict;
}

CrossAnnotationResult cross_annotate(const std::vector<UtteranceRecord>& records,
                                     const std::vector<AnnotatorEndpoint>& annotators,
                                     const CrossAnnotationPolicy& policy) {
    if (policy.required_annotators.empty())
        throw ValidationError("cross_annotate: policy requires at least one annotator");

    std::vector<const AnnotatorEndpoint*> required;
    for (const auto& id : policy.required_annotators) {
        const auto it = std::find_if(annotators.begin(), annotators.end(),
                                     [&](const AnnotatorEndpoint& a) { return a.id == id; });
        if (it == annotators.end())
            throw ValidationError("cross_annotate: no endpoint for annotator '" + id + "'");
        required.push_back(&*it);
    }

    std::vector<UtteranceRecord> annotated(records.begin(), records.end());
    std::vector<char> keep(records.size(), 0);

    // Indices that pass the duration gate; only those reach any endpoint.
    std::vector<std::size_t> work;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (policy.max_duration_ms && records[i].duration_ms >= *policy.max_duration_ms) continue;
        work.push_back(i);
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t w = next.fetch_add(1);
            if (w >= work.size()) return;
            const std::size_t i = work[w];
            try {
                UtteranceRecord& record = annotated[i];
                bool all_agree = true;
                for (const AnnotatorEndpoint* a : required) {
                    AnnotationVerdict v = annotate_one(a->prompt, record, a->id, *a->client);
                    all_agree = all_agree && v.parsed_label == policy.target_state;
                    record.annotations.push_back(std::move(v));
                }
                keep[i] = all_agree ? 1 : 0;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    const std::size_t worker_count = std::min<std::size_t>(work.size(), 8);
    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(worker_count);
        for (std::size_t t = 0; t < worker_count; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    CrossAnnotationResult result;
    for (std::size_t i = 0; i < annotated.size(); ++i) {
        if (keep[i]) {
            annotated[i].state = policy.target_state;
            result.kept.push_back(std::move(annotated[i]));
        } else {
            annotated[i].state.reset();
            result.rejected.push_back(std::move(annotated[i]));
        }
    }
    return result;
}

} // namespace turnkit
