#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "apf/backend.hpp"
#include "apf/http_backend.hpp"
#include "apf/judge.hpp"
#include "apf/prefill.hpp"
#include "apf/rewrite.hpp"

namespace apf {

// Minimal TOML-style key-value tree: [table] / [table.sub] headers,
// key = value lines with strings, integers, floats, booleans, and
// single-line arrays of those. Enough for campaign configs; anything
// fancier is rejected with a line number.
class ConfigTree {
  public:
    using Value = std::variant<std::string, std::int64_t, double, bool,
                               std::vector<std::string>>;

    static ConfigTree parse(const std::string& body);
    static ConfigTree load(const std::string& path);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback = "") const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback = 0) const;
    double get_double(const std::string& key, double fallback = 0.0) const;
    bool get_bool(const std::string& key, bool fallback = false) const;
    std::vector<std::string> get_string_array(
        const std::string& key, const std::vector<std::string>& fallback = {}) const;

    // Distinct second-level names under "<prefix>." (e.g. backend ids).
    std::set<std::string> subtable_names(const std::string& prefix) const;

  private:
    std::map<std::string, Value> values_;
};

// One configured backend instance.
struct BackendSpec {
    std::string id;
    std::string kind = "sim-target";  // sim-target | sim-compliant | http
    std::string template_name = "generic";
    HttpBackendConfig http;
};

struct CampaignConfig {
    // dataset
    std::string dataset_kind = "fixture";  // fixture | advbench | beavertails
    std::string dataset_path;

    // rewrite stage
    bool rewrite_enabled = true;
    RewriteConfig rewrite = RewriteConfig::shipped();

    // filler assets
    FillerConfig filler = FillerConfig::shipped();
    bool use_safe_model_in_combos = false;

    GenerationParams generation;
    SimTargetConfig sim = SimTargetConfig::shipped();

    // attack grid
    std::vector<std::string> targets{"sim"};
    std::string generator = "sim-gen";
    std::vector<CombinationKind> combinations{kAllCombinations,
                                              kAllCombinations + 6};
    std::vector<XSource> x_sources{XSource::Original, XSource::Rewritten};

    // judging
    bool heuristic_judge_enabled = true;
    JudgeRules judge_rules = JudgeRules::shipped();
    std::vector<JudgeClientConfig> judges;  // external providers in use
    MergePolicy merge_policy = MergePolicy::Any;

    // ablation
    std::vector<std::string> arms{"unfilled", "generic", "adaptive", "safe_termination",
                                  "hybrid"};
    std::string generic_fill;  // empty -> shipped text

    // run control
    unsigned workers = 1;
    std::uint64_t seed = 0;
    bool shuffle = false;
    std::string out_dir = "out";
    bool no_network = false;  // set by the CLI, not the file

    std::vector<BackendSpec> backends;  // defaults to sim + sim-gen

    const BackendSpec* find_backend(const std::string& id) const;
};

CampaignConfig load_campaign_config(const std::string& path);
CampaignConfig campaign_config_from_tree(const ConfigTree& tree);

// Throws ConfigError on inconsistent settings; with no_network set, any
// HTTP backend in use or external judge is rejected before any work runs.
void validate(const CampaignConfig& config);

// Instantiate a backend from its spec (shared sim config comes from the
// campaign).
std::unique_ptr<ChatBackend> make_backend(const BackendSpec& spec,
                                          const CampaignConfig& config);

}  // namespace apf
