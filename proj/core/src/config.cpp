#include "turnkit/config.hpp"

#include "turnkit/errors.hpp"
#include "turnkit/fakes.hpp"
#include "turnkit/rng.hpp"

#include <cstdlib>
#include <fstream>

namespace turnkit {

using nlohmann::json;

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config '" + path.string() + "' for reading");
    json raw;
    try {
        raw = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("config '" + path.string() + "': invalid JSON: " + e.what());
    }
    if (!raw.is_object()) throw ValidationError("config '" + path.string() + "': expected a JSON object");

    Config cfg;
    cfg.raw = raw;
    cfg.base_dir = path.parent_path();

    const json endpoints = raw.value("endpoints", json::object());
    for (const auto& [id, spec] : endpoints.items()) {
        EndpointSpec e;
        e.transport = spec.value("transport", "http");
        if (e.transport != "http" && e.transport != "fake")
            throw ValidationError("config endpoint '" + id + "': transport must be http or fake");
        e.config.base_url = spec.value("base_url", "");
        if (e.transport == "http" && e.config.base_url.empty())
            throw ValidationError("config endpoint '" + id + "': base_url required for http transport");
        e.config.model = spec.value("model", "default");
        e.config.timeout_ms = spec.value("timeout_ms", 30'000);
        e.config.max_retries = spec.value("max_retries", 3);
        e.config.backoff_base_ms = spec.value("backoff_base_ms", 500);
        e.config.max_inflight = spec.value("max_inflight", 8);
        if (e.config.timeout_ms <= 0 || e.config.backoff_base_ms <= 0 || e.config.max_inflight <= 0 ||
            e.config.max_retries < 0)
            throw ValidationError("config endpoint '" + id + "': out-of-range limits");
        e.api_key_env = spec.value("api_key_env", "");
        if (spec.contains("fake")) e.fake = spec["fake"];
        cfg.endpoints.emplace(id, std::move(e));
    }

    const json templates = raw.value("templates", json::object());
    for (const auto& [id, spec] : templates.items()) {
        PromptTemplate t;
        t.id = id;
        if (!spec.contains("text") || !spec["text"].is_string())
            throw ValidationError("config template '" + id + "': missing text");
        t.text = spec["text"].get<std::string>();
        for (const auto& label : spec.value("target_labels", json::array())) {
            auto s = turn_state_from_string(label.get<std::string>());
            if (!s) throw ValidationError("config template '" + id + "': unknown target label");
            t.target_labels.push_back(*s);
        }
        validate_template(t);
        cfg.templates.emplace(id, std::move(t));
    }

    const json prompts = raw.value("detector_prompts", json::object());
    for (const auto& [id, text] : prompts.items()) {
        if (!text.is_string())
            throw ValidationError("config detector_prompts '" + id + "': expected string");
        cfg.detector_prompts.emplace(id, text.get<std::string>());
    }

    const json annotator_templates = raw.value("annotator_templates", json::object());
    for (const auto& [endpoint, tmpl] : annotator_templates.items())
        cfg.annotator_templates.emplace(endpoint, tmpl.get<std::string>());

    return cfg;
}

std::shared_ptr<ServiceClient> make_client(const Config& cfg, const std::string& endpoint_id) {
    const auto it = cfg.endpoints.find(endpoint_id);
    if (it == cfg.endpoints.end())
        throw ValidationError("config: no endpoint named '" + endpoint_id + "'");
    const EndpointSpec& spec = it->second;

    EndpointConfig ec = spec.config;
    if (!spec.api_key_env.empty()) {
        const char* key = std::getenv(spec.api_key_env.c_str());
        if (!key)
            throw ValidationError("config endpoint '" + endpoint_id + "': environment variable " +
                                  spec.api_key_env + " is not set");
        ec.api_key = key;
    }

    std::unique_ptr<Transport> transport;
    if (spec.transport == "fake") {
        transport = make_fake_transport(spec.fake);
    } else {
        transport = std::make_unique<HttplibTransport>(ec.base_url, ec.timeout_ms);
    }
    return std::make_shared<ServiceClient>(std::move(ec), std::move(transport));
}

const PromptTemplate& get_template(const Config& cfg, const std::string& template_id) {
    const auto it = cfg.templates.find(template_id);
    if (it == cfg.templates.end())
        throw ValidationError("config: no template named '" + template_id + "'");
    return it->second;
}

std::vector<AnnotatorEndpoint> make_annotators(const Config& cfg,
                                               const std::vector<std::string>& endpoint_ids,
                                               const std::string& template_id,
                                               std::optional<std::uint64_t> template_seed) {
    if (endpoint_ids.empty()) throw ValidationError("annotators: at least one endpoint id required");

    std::vector<std::string> template_pool;
    for (const auto& [id, _] : cfg.templates) template_pool.push_back(id);
    std::mt19937_64 rng(template_seed.value_or(0));

    std::vector<AnnotatorEndpoint> annotators;
    for (const auto& id : endpoint_ids) {
        AnnotatorEndpoint a;
        a.id = id;
        a.client = make_client(cfg, id);
        if (!template_id.empty()) {
            a.prompt = get_template(cfg, template_id);
        } else if (template_seed) {
            if (template_pool.empty())
                throw ValidationError("annotators: --template-seed given but config has no templates");
            a.prompt = get_template(
                cfg, template_pool[static_cast<std::size_t>(uniform_u64(rng, template_pool.size()))]);
        } else if (auto it = cfg.annotator_templates.find(id); it != cfg.annotator_templates.end()) {
            a.prompt = get_template(cfg, it->second);
        } else {
            throw ValidationError("annotators: no template for endpoint '" + id +
                                  "' (use --template, --template-seed, or annotator_templates)");
        }
        annotators.push_back(std::move(a));
    }
    return annotators;
}

SynthSetup load_synth_setup(const Config& cfg) {
    if (!cfg.raw.contains("synth")) throw ValidationError("config: missing synth section");
    const json& section = cfg.raw["synth"];
    const json& job = section.value("job", json::object());

    SynthSetup setup;
    auto state = turn_state_from_string(job.value("target_state", ""));
    if (!state) throw ValidationError("synth job: missing or invalid target_state");
    setup.job.target_state = *state;
    setup.job.generation_prompt = job.value("generation_prompt", "");
    setup.job.count = job.value("count", 0);
    const std::string ref_dir = job.value("reference_dir", "");
    if (ref_dir.empty()) throw ValidationError("synth job: missing reference_dir");
    std::filesystem::path ref_path(ref_dir);
    setup.job.reference_dir = ref_path.is_absolute() ? ref_path : cfg.base_dir / ref_path;
    if (job.contains("pause_range_ms")) {
        const json& range = job["pause_range_ms"];
        if (!range.is_array() || range.size() != 2)
            throw ValidationError("synth job: pause_range_ms must be [min, max]");
        setup.job.pause_range_ms = {range[0].get<int>(), range[1].get<int>()};
    }
    setup.job.seed = job.value("seed", 0ULL);
    validate_job(setup.job);

    const std::string generator = section.value("generator", "");
    const std::string tts = section.value("tts", "");
    const std::string asr = section.value("asr", "");
    if (generator.empty() || tts.empty() || asr.empty())
        throw ValidationError("config synth: generator, tts and asr endpoint ids are required");
    setup.endpoints.generator = make_client(cfg, generator);
    setup.endpoints.tts = make_client(cfg, tts);
    setup.endpoints.asr = make_client(cfg, asr);

    if (!section.contains("annotators") || !section["annotators"].is_array() ||
        section["annotators"].empty())
        throw ValidationError("config synth: annotators list is required");
    for (const auto& entry : section["annotators"]) {
        AnnotatorEndpoint a;
        a.id = entry.value("endpoint", "");
        const std::string tmpl = entry.value("template", "");
        if (a.id.empty() || tmpl.empty())
            throw ValidationError("config synth: each annotator needs endpoint and template ids");
        a.client = make_client(cfg, a.id);
        a.prompt = get_template(cfg, tmpl);
        setup.endpoints.annotators.push_back(std::move(a));
    }
    return setup;
}

DetectorSetup load_detector_setup(const Config& cfg, const std::string& prompt_id_override,
                                  std::optional<std::uint64_t> prompt_seed_override) {
    if (!cfg.raw.contains("detector")) throw ValidationError("config: missing detector section");
    const json& section = cfg.raw["detector"];

    DetectorSetup setup;
    const std::string endpoint = section.value("endpoint", "");
    if (endpoint.empty()) throw ValidationError("config detector: missing endpoint id");
    setup.client = make_client(cfg, endpoint);

    setup.meta.name = section.value("name", endpoint);
    if (section.contains("params_mb")) setup.meta.params_mb = section["params_mb"].get<double>();
    if (section.contains("memory_mb")) setup.meta.memory_mb = section["memory_mb"].get<double>();

    if (section.contains("supported_states")) {
        setup.capabilities.supported_states.clear();
        for (const auto& name : section["supported_states"]) {
            auto s = turn_state_from_string(name.get<std::string>());
            if (!s) throw ValidationError("config detector: unknown supported state");
            setup.capabilities.supported_states.push_back(*s);
        }
    }
    setup.capabilities.accepts_audio = section.value("accepts_audio", true);

    auto prompt_by_id = [&](const std::string& id) {
        const auto it = cfg.detector_prompts.find(id);
        if (it == cfg.detector_prompts.end())
            throw ValidationError("config: no detector prompt named '" + id + "'");
        return it->second;
    };

    if (!prompt_id_override.empty()) {
        setup.prompt = prompt_by_id(prompt_id_override);
    } else if (prompt_seed_override) {
        if (cfg.detector_prompts.empty())
            throw ValidationError("eval: --prompt-seed given but config has no detector prompts");
        std::vector<std::string> ids;
        for (const auto& [id, _] : cfg.detector_prompts) ids.push_back(id);
        std::mt19937_64 rng(*prompt_seed_override);
        setup.prompt = prompt_by_id(ids[static_cast<std::size_t>(uniform_u64(rng, ids.size()))]);
    } else if (section.contains("prompt")) {
        setup.prompt = section["prompt"].get<std::string>();
    } else if (section.contains("prompt_id")) {
        setup.prompt = prompt_by_id(section["prompt_id"].get<std::string>());
    } else if (section.contains("prompt_seed")) {
        std::vector<std::string> ids;
        for (const auto& [id, _] : cfg.detector_prompts) ids.push_back(id);
        if (ids.empty()) throw ValidationError("config detector: prompt_seed needs detector_prompts");
        std::mt19937_64 rng(section["prompt_seed"].get<std::uint64_t>());
        setup.prompt = prompt_by_id(ids[static_cast<std::size_t>(uniform_u64(rng, ids.size()))]);
    } else {
        throw ValidationError("config detector: one of prompt, prompt_id, prompt_seed is required");
    }
    return setup;
}

} // namespace turnkit
