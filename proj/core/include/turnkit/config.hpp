#pragma once

#include "turnkit/annotator.hpp"
#include "turnkit/evaluator.hpp"
#include "turnkit/service_client.hpp"
#include "turnkit/synth.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <string>

namespace turnkit {

/// One endpoint entry: a real HTTP endpoint or a deterministic in-process
/// fake (see fakes.hpp). API keys are referenced by environment variable
/// name only; they never appear in config files or manifests.
struct EndpointSpec {
    std::string transport = "http"; // "http" | "fake"
    EndpointConfig config;
    std::string api_key_env;   // resolved at client construction
    nlohmann::json fake;       // fake transport parameters
};

/// Parsed config tree shared by all subcommands: endpoints, prompt templates,
/// detector prompts, and tool sections (kept raw for the callers that need
/// them).
struct Config {
    std::map<std::string, EndpointSpec> endpoints;
    std::map<std::string, PromptTemplate> templates;
    std::map<std::string, std::string> detector_prompts;
    std::map<std::string, std::string> annotator_templates; // endpoint id -> template id
    std::filesystem::path base_dir; // directory of the config file; relative paths resolve here
    nlohmann::json raw;
};

Config load_config(const std::filesystem::path& path);

/// Build a client for a configured endpoint (http or fake transport).
std::shared_ptr<ServiceClient> make_client(const Config& cfg, const std::string& endpoint_id);

/// Look up a prompt template by id.
const PromptTemplate& get_template(const Config& cfg, const std::string& template_id);

/// Resolve annotator endpoints for cross-annotation. template_id, when
/// non-empty, applies to all annotators; template_seed samples one template
/// per annotator from the store; otherwise the config's annotator_templates
/// mapping decides.
std::vector<AnnotatorEndpoint> make_annotators(const Config& cfg,
                                               const std::vector<std::string>& endpoint_ids,
                                               const std::string& template_id,
                                               std::optional<std::uint64_t> template_seed);

/// Parse the "synth" section into a job plus its service clients.
struct SynthSetup {
    SynthJob job;
    SynthEndpoints endpoints;
};
SynthSetup load_synth_setup(const Config& cfg);

/// Parse the "detector" section: client, capabilities, metadata, and the
/// evaluation prompt (by id, inline, or sampled from detector_prompts with a
/// seed).
struct DetectorSetup {
    std::shared_ptr<ServiceClient> client;
    DetectorCapabilities capabilities;
    DetectorMeta meta;
    std::string prompt;
};
DetectorSetup load_detector_setup(const Config& cfg, const std::string& prompt_id_override,
                                  std::optional<std::uint64_t> prompt_seed_override);

} // namespace turnkit
