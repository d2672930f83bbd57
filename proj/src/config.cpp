#include "apf/config.hpp"

#include <fstream>
#include <sstream>

#include "apf/defaults.hpp"
#include "apf/errors.hpp"
#include "apf/text.hpp"

namespace apf {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
    throw ConfigError("config line " + std::to_string(line) + ": " + what);
}

bool valid_key_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-' || c == '.';
}

std::string parse_basic_string(const std::string& raw, std::size_t line, std::size_t* end) {
    std::string out;
    std::size_t i = 1;  // past opening quote
    while (i < raw.size() && raw[i] != '"') {
        if (raw[i] == '\\') {
            if (i + 1 >= raw.size()) fail(line, "dangling escape");
            char c = raw[++i];
            switch (c) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                default: fail(line, std::string("unsupported escape \\") + c);
            }
            ++i;
        } else {
            out.push_back(raw[i++]);
        }
    }
    if (i >= raw.size()) fail(line, "unterminated string");
    *end = i + 1;
    return out;
}

ConfigTree::Value parse_scalar(const std::string& raw, std::size_t line) {
    std::string t = text::trim(raw);
    if (t.empty()) fail(line, "missing value");
    if (t.front() == '"') {
        std::size_t end = 0;
        std::string s = parse_basic_string(t, line, &end);
        if (!text::trim(t.substr(end)).empty()) fail(line, "trailing content after string");
        return s;
    }
    if (t == "true") return true;
    if (t == "false") return false;
    bool is_float = t.find('.') != std::string::npos || t.find('e') != std::string::npos ||
                    t.find('E') != std::string::npos;
    try {
        std::size_t used = 0;
        if (is_float) {
            double d = std::stod(t, &used);
            if (used != t.size()) fail(line, "malformed number: " + t);
            return d;
        }
        long long v = std::stoll(t, &used);
        if (used != t.size()) fail(line, "malformed number: " + t);
        return static_cast<std::int64_t>(v);
    } catch (const std::exception&) {
        fail(line, "unrecognized value: " + t);
    }
}

}  // namespace

ConfigTree ConfigTree::parse(const std::string& body) {
    ConfigTree tree;
    std::istringstream in(body);
    std::string line;
    std::size_t line_no = 0;
    std::string table;

    while (std::getline(in, line)) {
        ++line_no;

        // strip comments outside strings
        bool in_string = false;
        bool escaped = false;
        std::string code;
        for (char c : line) {
            if (in_string) {
                if (escaped) {
                    escaped = false;
                } else if (c == '\\') {
                    escaped = true;
                } else if (c == '"') {
                    in_string = false;
                }
            } else if (c == '"') {
                in_string = true;
            } else if (c == '#') {
                break;
            }
            code.push_back(c);
        }
        std::string trimmed = text::trim(code);
        if (trimmed.empty()) continue;

        if (trimmed.front() == '[') {
            if (trimmed.back() != ']') fail(line_no, "malformed table header");
            std::string name = text::trim(trimmed.substr(1, trimmed.size() - 2));
            if (name.empty()) fail(line_no, "empty table name");
            for (char c : name) {
                if (!valid_key_char(c)) fail(line_no, "bad table name: " + name);
            }
            table = name;
            continue;
        }

        auto eq = trimmed.find('=');
        if (eq == std::string::npos) fail(line_no, "expected key = value");
        std::string key = text::trim(trimmed.substr(0, eq));
        if (key.empty()) fail(line_no, "empty key");
        for (char c : key) {
            if (!valid_key_char(c)) fail(line_no, "bad key: " + key);
        }
        std::string value = text::trim(trimmed.substr(eq + 1));
        std::string full_key = table.empty() ? key : table + "." + key;

        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']') fail(line_no, "arrays must close on the same line");
            std::string inner = value.substr(1, value.size() - 2);
            std::vector<std::string> items;
            std::string current;
            bool in_str = false;
            bool esc = false;
            for (char c : inner) {
                if (in_str) {
                    current.push_back(c);
                    if (esc) {
                        esc = false;
                    } else if (c == '\\') {
                        esc = true;
                    } else if (c == '"') {
                        in_str = false;
                    }
                } else if (c == '"') {
                    current.push_back(c);
                    in_str = true;
                } else if (c == ',') {
                    if (!text::trim(current).empty()) items.push_back(text::trim(current));
                    current.clear();
                } else {
                    current.push_back(c);
                }
            }
            if (!text::trim(current).empty()) items.push_back(text::trim(current));

            std::vector<std::string> parsed;
            for (const std::string& item : items) {
                Value v = parse_scalar(item, line_no);
                if (auto* s = std::get_if<std::string>(&v)) {
                    parsed.push_back(*s);
                } else if (auto* i = std::get_if<std::int64_t>(&v)) {
                    parsed.push_back(std::to_string(*i));
                } else {
                    fail(line_no, "only string/integer arrays are supported");
                }
            }
            tree.values_[full_key] = parsed;
        } else {
            tree.values_[full_key] = parse_scalar(value, line_no);
        }
    }
    return tree;
}

ConfigTree ConfigTree::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

bool ConfigTree::has(const std::string& key) const { return values_.count(key) > 0; }

std::string ConfigTree::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto* s = std::get_if<std::string>(&it->second)) return *s;
    throw ConfigError("config key '" + key + "' is not a string");
}

std::int64_t ConfigTree::get_int(const std::string& key, std::int64_t fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
    throw ConfigError("config key '" + key + "' is not an integer");
}

double ConfigTree::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto* v = std::get_if<double>(&it->second)) return *v;
    if (auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
    throw ConfigError("config key '" + key + "' is not a number");
}

bool ConfigTree::get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto* v = std::get_if<bool>(&it->second)) return *v;
    throw ConfigError("config key '" + key + "' is not a boolean");
}

std::vector<std::string> ConfigTree::get_string_array(
    const std::string& key, const std::vector<std::string>& fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (auto* v = std::get_if<std::vector<std::string>>(&it->second)) return *v;
    throw ConfigError("config key '" + key + "' is not an array");
}

std::set<std::string> ConfigTree::subtable_names(const std::string& prefix) const {
    std::set<std::string> names;
    const std::string full = prefix + ".";
    for (const auto& [key, value] : values_) {
        if (!text::starts_with(key, full)) continue;
        std::string rest = key.substr(full.size());
        auto dot = rest.find('.');
        if (dot != std::string::npos) names.insert(rest.substr(0, dot));
    }
    return names;
}

const BackendSpec* CampaignConfig::find_backend(const std::string& id) const {
    for (const BackendSpec& spec : backends) {
        if (spec.id == id) return &spec;
    }
    return nullptr;
}

namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

CampaignConfig campaign_config_from_tree(const ConfigTree& tree) {
    CampaignConfig cfg;

    cfg.dataset_kind = tree.get_string("dataset.kind", cfg.dataset_kind);
    cfg.dataset_path = tree.get_string("dataset.path", cfg.dataset_path);

    cfg.rewrite_enabled = tree.get_bool("rewrite.enabled", cfg.rewrite_enabled);
    cfg.rewrite.threshold = tree.get_double("rewrite.threshold", cfg.rewrite.threshold);
    cfg.rewrite.attempts = static_cast<std::size_t>(
        tree.get_int("rewrite.attempts", static_cast<std::int64_t>(cfg.rewrite.attempts)));
    if (tree.has("rewrite.prompt_template_path")) {
        cfg.rewrite.prompt_template =
            read_text_file(tree.get_string("rewrite.prompt_template_path"));
    }

    cfg.filler.safe_generic = tree.get_string("filler.safe_generic", cfg.filler.safe_generic);
    cfg.filler.harm_pre = tree.get_string("filler.harm_pre", cfg.filler.harm_pre);
    cfg.filler.transition = tree.get_string("filler.transition", cfg.filler.transition);
    cfg.filler.generate_safe_model =
        tree.get_bool("filler.generate_safe_model", cfg.filler.generate_safe_model);
    cfg.use_safe_model_in_combos =
        tree.get_bool("filler.use_safe_model_in_combos", cfg.use_safe_model_in_combos);

    cfg.generation.sampling = tree.get_bool("generation.sampling", cfg.generation.sampling);
    cfg.generation.temperature =
        tree.get_double("generation.temperature", cfg.generation.temperature);
    cfg.generation.max_new_tokens = static_cast<std::uint32_t>(tree.get_int(
        "generation.max_new_tokens", static_cast<std::int64_t>(cfg.generation.max_new_tokens)));

    cfg.sim.defense_depth_words = static_cast<std::size_t>(tree.get_int(
        "sim.defense_depth_words", static_cast<std::int64_t>(cfg.sim.defense_depth_words)));
    cfg.sim.refusal_text = tree.get_string("sim.refusal_text", cfg.sim.refusal_text);
    cfg.sim.compliance_text = tree.get_string("sim.compliance_text", cfg.sim.compliance_text);
    cfg.sim.harmful_markers =
        tree.get_string_array("sim.harmful_markers", cfg.sim.harmful_markers);
    cfg.sim.safe_markers = tree.get_string_array("sim.safe_markers", cfg.sim.safe_markers);

    cfg.targets = tree.get_string_array("attack.targets", cfg.targets);
    cfg.generator = tree.get_string("attack.generator", cfg.generator);
    if (tree.has("attack.combinations")) {
        cfg.combinations.clear();
        for (const std::string& name : tree.get_string_array("attack.combinations")) {
            cfg.combinations.push_back(combination_from_string(name));
        }
    }
    if (tree.has("attack.x_sources")) {
        cfg.x_sources.clear();
        for (const std::string& name : tree.get_string_array("attack.x_sources")) {
            cfg.x_sources.push_back(x_source_from_string(name));
        }
    }

    cfg.heuristic_judge_enabled = tree.get_bool("judge.heuristic", cfg.heuristic_judge_enabled);
    cfg.judge_rules.compliance_markers = tree.get_string_array(
        "judge.compliance_markers", cfg.judge_rules.compliance_markers);
    cfg.judge_rules.refusal_markers =
        tree.get_string_array("judge.refusal_markers", cfg.judge_rules.refusal_markers);
    cfg.judge_rules.safe_markers =
        tree.get_string_array("judge.safe_markers", cfg.judge_rules.safe_markers);
    cfg.judge_rules.tail_window = static_cast<std::size_t>(tree.get_int(
        "judge.tail_window", static_cast<std::int64_t>(cfg.judge_rules.tail_window)));
    cfg.merge_policy =
        merge_policy_from_string(tree.get_string("judge.merge_policy", "any"));

    for (const std::string& judge_id : tree.get_string_array("judge.external")) {
        const std::string prefix = "judges." + judge_id + ".";
        JudgeClientConfig jc;
        jc.id = judge_id;
        jc.base_url = tree.get_string(prefix + "base_url");
        if (jc.base_url.empty()) {
            throw ConfigError("judge '" + judge_id + "': base_url is required");
        }
        jc.path = tree.get_string(prefix + "path", jc.path);
        jc.protocol = tree.get_string(prefix + "protocol", jc.protocol);
        jc.model = tree.get_string(prefix + "model", jc.model);
        jc.api_key_env = tree.get_string(prefix + "api_key_env", jc.api_key_env);
        jc.flag_categories = tree.get_string_array(prefix + "flag_categories");
        jc.timeout_ms =
            static_cast<int>(tree.get_int(prefix + "timeout_ms", jc.timeout_ms));
        cfg.judges.push_back(std::move(jc));
    }

    cfg.arms = tree.get_string_array("ablation.arms", cfg.arms);
    cfg.generic_fill = tree.get_string("ablation.generic_fill", cfg.generic_fill);

    cfg.workers = static_cast<unsigned>(
        tree.get_int("campaign.workers", static_cast<std::int64_t>(cfg.workers)));
    cfg.seed = static_cast<std::uint64_t>(
        tree.get_int("campaign.seed", static_cast<std::int64_t>(cfg.seed)));
    cfg.shuffle = tree.get_bool("campaign.shuffle", cfg.shuffle);
    cfg.out_dir = tree.get_string("campaign.out_dir", cfg.out_dir);

    for (const std::string& backend_id : tree.subtable_names("backends")) {
        const std::string prefix = "backends." + backend_id + ".";
        BackendSpec spec;
        spec.id = backend_id;
        spec.kind = tree.get_string(prefix + "kind", spec.kind);
        spec.template_name = tree.get_string(prefix + "template", spec.template_name);
        if (spec.kind == "http") {
            spec.http.id = backend_id;
            spec.http.base_url = tree.get_string(prefix + "base_url");
            if (spec.http.base_url.empty()) {
                throw ConfigError("backend '" + backend_id + "': base_url is required");
            }
            spec.http.path = tree.get_string(prefix + "path", spec.http.path);
            spec.http.model = tree.get_string(prefix + "model", spec.http.model);
            spec.http.api_key_env =
                tree.get_string(prefix + "api_key_env", spec.http.api_key_env);
            spec.http.prefill_via_assistant_message =
                tree.get_bool(prefix + "prefill_via_assistant_message",
                              spec.http.prefill_via_assistant_message);
            spec.http.completion_style =
                tree.get_bool(prefix + "completion_style", spec.http.completion_style);
            spec.http.template_name = spec.template_name;
            spec.http.timeout_ms =
                static_cast<int>(tree.get_int(prefix + "timeout_ms", spec.http.timeout_ms));
            spec.http.max_concurrency = static_cast<int>(
                tree.get_int(prefix + "max_concurrency", spec.http.max_concurrency));
        } else if (spec.kind != "sim-target" && spec.kind != "sim-compliant") {
            throw ConfigError("backend '" + backend_id + "': unknown kind " + spec.kind);
        }
        cfg.backends.push_back(std::move(spec));
    }
    if (cfg.backends.empty()) {
        BackendSpec target;
        target.id = "sim";
        target.kind = "sim-target";
        BackendSpec generator;
        generator.id = "sim-gen";
        generator.kind = "sim-compliant";
        cfg.backends.push_back(std::move(target));
        cfg.backends.push_back(std::move(generator));
    }

    return cfg;
}

CampaignConfig load_campaign_config(const std::string& path) {
    return campaign_config_from_tree(ConfigTree::load(path));
}

void validate(const CampaignConfig& config) {
    if (config.rewrite.threshold < 0.0 || config.rewrite.threshold > 1.0) {
        throw ConfigError("rewrite.threshold must be within [0,1]");
    }
    if (config.rewrite_enabled && config.rewrite.attempts == 0) {
        throw ConfigError("rewrite.attempts must be >= 1");
    }
    if (config.targets.empty()) throw ConfigError("attack.targets must name a backend");
    if (config.combinations.empty()) throw ConfigError("attack.combinations is empty");
    if (config.x_sources.empty()) throw ConfigError("attack.x_sources is empty");
    if (text::trim(config.filler.safe_generic).empty()) {
        throw ConfigError("filler.safe_generic must not be empty");
    }
    if (text::trim(config.filler.transition).empty()) {
        throw ConfigError("filler.transition must not be empty");
    }
    if (text::trim(config.filler.harm_pre).empty()) {
        throw ConfigError("filler.harm_pre must not be empty");
    }
    if (config.sim.harmful_markers.empty() || config.sim.safe_markers.empty()) {
        throw ConfigError("simulator marker lists must not be empty");
    }
    if (!config.heuristic_judge_enabled && config.judges.empty()) {
        throw ConfigError("no judge enabled");
    }
    if (config.dataset_kind != "fixture" && config.dataset_path.empty()) {
        throw ConfigError("dataset.path is required for dataset.kind=" + config.dataset_kind);
    }

    auto require_backend = [&](const std::string& id, const char* role) {
        const BackendSpec* spec = config.find_backend(id);
        if (!spec) {
            throw ConfigError(std::string(role) + " backend '" + id +
                              "' is not configured");
        }
        if (config.no_network && spec->kind == "http") {
            throw ConfigError("--no-network forbids HTTP backend '" + id + "'");
        }
    };
    for (const std::string& target : config.targets) require_backend(target, "target");
    require_backend(config.generator, "generator");
    if (config.no_network && !config.judges.empty()) {
        throw ConfigError("--no-network forbids external judges");
    }
}

std::unique_ptr<ChatBackend> make_backend(const BackendSpec& spec,
                                          const CampaignConfig& config) {
    if (spec.kind == "sim-target") {
        return std::make_unique<SimBackend>(spec.id, config.sim, SimBackend::Mode::Target);
    }
    if (spec.kind == "sim-compliant") {
        return std::make_unique<SimBackend>(spec.id, config.sim, SimBackend::Mode::Compliant);
    }
    if (spec.kind == "http") {
        return std::make_unique<HttpBackend>(spec.http);
    }
    throw ConfigError("backend '" + spec.id + "': unknown kind " + spec.kind);
}

}  // namespace apf
