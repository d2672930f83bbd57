#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "apf/campaign.hpp"
#include "apf/combine.hpp"
#include "apf/config.hpp"
#include "apf/dataset.hpp"
#include "apf/errors.hpp"
#include "apf/judge.hpp"
#include "apf/prefill.hpp"
#include "apf/records.hpp"
#include "apf/rewrite.hpp"
#include "apf/text.hpp"

namespace {

using namespace apf;
using nlohmann::json;

struct GlobalOptions {
    std::string config_path;
    bool no_network = false;
    std::string backend;  // restrict targets to this backend id
    std::int64_t seed = -1;
    std::string out_dir;
};

CampaignConfig resolve_config(const GlobalOptions& opts) {
    CampaignConfig cfg = opts.config_path.empty()
                             ? campaign_config_from_tree(ConfigTree::parse(""))
                             : load_campaign_config(opts.config_path);
    cfg.no_network = opts.no_network;
    if (!opts.backend.empty()) cfg.targets = {opts.backend};
    if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    return cfg;
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << bytes;
}

void write_reports(const CampaignConfig& cfg, const CampaignReport& report) {
    std::filesystem::create_directories(cfg.out_dir);
    write_file(cfg.out_dir + "/report.txt", emit_report(report, ReportFormat::Text));
    write_file(cfg.out_dir + "/report.json", emit_report(report, ReportFormat::Json));
    write_file(cfg.out_dir + "/report.csv", emit_report(report, ReportFormat::Csv));
}

int cmd_rewrite(const GlobalOptions& opts) {
    CampaignConfig cfg = resolve_config(opts);
    validate(cfg);
    auto questions = load_campaign_questions(cfg);
    auto backend = make_backend(*cfg.find_backend(cfg.generator), cfg);
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(cfg.out_dir + "/rewrites.jsonl", std::ios::trunc | std::ios::binary);
    std::size_t accepted = 0;
    std::size_t total = 0;
    for (const Question& q : questions) {
        RewriteOutcome outcome = rewrite_question(q, *backend, cfg.rewrite, cfg.generation);
        for (const Rewrite& r : outcome.rewrites) {
            json j;
            j["source_id"] = r.source_id;
            j["text"] = r.text;
            j["similarity"] = r.similarity;
            j["accepted"] = r.accepted;
            out << j.dump() << "\n";
            ++total;
            if (r.accepted) ++accepted;
        }
        for (const std::string& err : outcome.errors) {
            std::cerr << q.id << ": " << err << "\n";
        }
    }
    std::cout << accepted << "/" << total << " candidates accepted; rewrites written to "
              << cfg.out_dir << "/rewrites.jsonl\n";
    return 0;
}

int cmd_prefill(const GlobalOptions& opts) {
    CampaignConfig cfg = resolve_config(opts);
    validate(cfg);
    auto questions = load_campaign_questions(cfg);
    auto backend = make_backend(*cfg.find_backend(cfg.generator), cfg);
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(cfg.out_dir + "/fillers.jsonl", std::ios::trunc | std::ios::binary);
    for (const Question& q : questions) {
        FillerSet set = build_filler_set(q, *backend, cfg.filler, cfg.generation);
        json j;
        j["question_id"] = set.question_id;
        j["safe_generic"] = set.safe_generic;
        if (set.safe_model) j["safe_model"] = *set.safe_model;
        j["harm_pre"] = set.harm_pre;
        j["harm_model"] = set.harm_model;
        j["transition"] = set.transition;
        out << j.dump() << "\n";
    }
    std::cout << "filler sets written to " << cfg.out_dir << "/fillers.jsonl\n";
    return 0;
}

int cmd_combine(const GlobalOptions& opts) {
    CampaignConfig cfg = resolve_config(opts);
    validate(cfg);
    auto questions = load_campaign_questions(cfg);
    auto backend = make_backend(*cfg.find_backend(cfg.generator), cfg);
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream out(cfg.out_dir + "/prompts.jsonl", std::ios::trunc | std::ios::binary);
    AssembleOptions options;
    options.use_safe_model = cfg.use_safe_model_in_combos;
    for (const Question& q : questions) {
        std::vector<Rewrite> rewrites;
        if (cfg.rewrite_enabled) {
            rewrites = rewrite_question(q, *backend, cfg.rewrite, cfg.generation).rewrites;
        }
        FillerSet fillers = build_filler_set(q, *backend, cfg.filler, cfg.generation);
        for (const AttackPrompt& p : enumerate_prompts(q, rewrites, fillers, options)) {
            json j;
            j["question_id"] = p.question_id;
            j["x_source"] = to_string(p.x_source);
            j["combination"] = to_string(p.combination);
            j["user_text"] = p.user_text;
            j["prefill_text"] = p.prefill_text;
            out << j.dump() << "\n";
        }
    }
    std::cout << "attack prompts written to " << cfg.out_dir << "/prompts.jsonl\n";
    return 0;
}

int cmd_attack(const GlobalOptions& opts) {
    CampaignConfig cfg = resolve_config(opts);
    CampaignReport report = run_campaign(cfg);
    write_reports(cfg, report);
    std::cout << emit_report(report, ReportFormat::Text);
    std::cout << "records: " << cfg.out_dir << "/records.jsonl\n";
    return 0;
}

int cmd_ablate(const GlobalOptions& opts, const std::vector<std::string>& arm_args) {
    CampaignConfig cfg = resolve_config(opts);
    const std::vector<std::string>& arms = arm_args.empty() ? cfg.arms : arm_args;
    CampaignReport report = run_ablation(cfg, arms);
    write_reports(cfg, report);
    std::cout << emit_report(report, ReportFormat::Text);
    std::cout << "records: " << cfg.out_dir << "/ablation_records.jsonl\n";
    return 0;
}

std::string records_path(const CampaignConfig& cfg, bool ablation) {
    return cfg.out_dir + (ablation ? "/ablation_records.jsonl" : "/records.jsonl");
}

int cmd_judge(const GlobalOptions& opts, bool ablation) {
    CampaignConfig cfg = resolve_config(opts);
    validate(cfg);
    const std::string path = records_path(cfg, ablation);
    RecordStore store(path);
    std::vector<AttackRecord> records = store.load_all();
    if (records.empty()) {
        std::cerr << "no records found at " << path << "\n";
        return 1;
    }
    std::map<std::string, Question> questions;
    for (const Question& q : load_campaign_questions(cfg)) questions[q.id] = q;
    for (AttackRecord& r : records) {
        if (r.error) continue;
        r.verdicts.clear();
        r.judge_errors.clear();
        if (cfg.heuristic_judge_enabled) {
            r.verdicts.push_back(heuristic_judge(r.response, r.prefill_text, cfg.judge_rules));
        }
        for (const JudgeClientConfig& jc : cfg.judges) {
            try {
                JudgeClient client(jc);
                auto it = questions.find(r.question_id);
                r.verdicts.push_back(
                    client.judge(it != questions.end() ? it->second.text : r.user_text,
                                 r.response));
            } catch (const BackendError& e) {
                r.judge_errors.push_back(jc.id + ": " + e.what());
            }
        }
        r.recompute_final(cfg.merge_policy);
    }
    RecordStore::save_all(path, records);
    CampaignReport report = report_from_records(records);
    write_reports(cfg, report);
    std::cout << "re-judged " << records.size() << " records\n";
    std::cout << emit_report(report, ReportFormat::Text);
    return 0;
}

int cmd_review(const GlobalOptions& opts, const std::vector<std::string>& sets,
               const std::string& overrides_file, bool ablation) {
    CampaignConfig cfg = resolve_config(opts);
    const std::string path = records_path(cfg, ablation);
    RecordStore store(path);
    std::vector<AttackRecord> records = store.load_all();
    if (records.empty()) {
        std::cerr << "no records found at " << path << "\n";
        return 1;
    }

    std::vector<ManualOverride> overrides;
    for (const std::string& set : sets) {
        auto eq = set.rfind('=');
        if (eq == std::string::npos) {
            std::cerr << "expected KEY=true|false, got: " << set << "\n";
            return 2;
        }
        ManualOverride o;
        o.record_key = set.substr(0, eq);
        std::string value = text::to_lower_ascii(set.substr(eq + 1));
        if (value != "true" && value != "false") {
            std::cerr << "expected KEY=true|false, got: " << set << "\n";
            return 2;
        }
        o.jailbroken = value == "true";
        overrides.push_back(std::move(o));
    }
    if (!overrides_file.empty()) {
        std::ifstream in(overrides_file, std::ios::binary);
        if (!in) {
            std::cerr << "cannot open overrides file: " << overrides_file << "\n";
            return 1;
        }
        std::string line;
        while (std::getline(in, line)) {
            if (text::trim(line).empty()) continue;
            json j = json::parse(line);
            overrides.push_back(
                {j.at("record_key").get<std::string>(), j.at("jailbroken").get<bool>()});
        }
    }
    if (overrides.empty()) {
        std::cerr << "no overrides given; use --set KEY=true|false or --file\n";
        return 2;
    }

    ManualReviewResult result = apply_manual_review(records, overrides, cfg.merge_policy,
                                                    cfg.out_dir + "/audit.jsonl");
    RecordStore::save_all(path, records);
    write_reports(cfg, report_from_records(records));
    std::cout << "applied " << result.applied << " override(s), " << result.unchanged
              << " unchanged\n";
    return 0;
}

int cmd_report(const GlobalOptions& opts, const std::string& format, bool ablation) {
    CampaignConfig cfg = resolve_config(opts);
    const std::string path = records_path(cfg, ablation);
    RecordStore store(path);
    std::vector<AttackRecord> records = store.load_all();
    if (records.empty()) {
        std::cerr << "no records found at " << path << "\n";
        return 1;
    }
    CampaignReport report = report_from_records(records);
    ReportFormat fmt = ReportFormat::Text;
    if (format == "csv") {
        fmt = ReportFormat::Csv;
    } else if (format == "json") {
        fmt = ReportFormat::Json;
    } else if (format != "text" && format != "table") {
        std::cerr << "unknown format: " << format << "\n";
        return 2;
    }
    std::cout << emit_report(report, fmt);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"apf: adaptive pre-fill red-team harness for chat models"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "Campaign config file (TOML-style)");
    app.add_flag("--no-network", opts.no_network,
                 "Forbid HTTP backends and external judges");
    app.add_option("--backend", opts.backend, "Restrict attack targets to one backend id");
    app.add_option("--seed", opts.seed, "Override the campaign seed");
    app.add_option("--out", opts.out_dir, "Output directory for records and reports");

    auto* rewrite_cmd = app.add_subcommand("rewrite", "Emit similarity-gated rewrites");
    auto* prefill_cmd = app.add_subcommand("prefill", "Emit filler sets");
    auto* combine_cmd = app.add_subcommand("combine", "Emit assembled attack prompts");
    auto* attack_cmd = app.add_subcommand("attack", "Run the full attack campaign");

    auto* ablate_cmd = app.add_subcommand("ablate", "Run per-arm fill ablations");
    std::vector<std::string> arms;
    ablate_cmd->add_option("--arms", arms, "Arm names (default from config)")->delimiter(',');

    auto* judge_cmd = app.add_subcommand("judge", "Re-judge stored records");
    bool judge_ablation = false;
    judge_cmd->add_flag("--ablation", judge_ablation, "Use the ablation record file");

    auto* review_cmd = app.add_subcommand("review", "Apply manual review overrides");
    std::vector<std::string> review_sets;
    std::string review_file;
    bool review_ablation = false;
    review_cmd->add_option("--set", review_sets, "RECORD_KEY=true|false (repeatable)");
    review_cmd->add_option("--file", review_file, "JSONL file of overrides");
    review_cmd->add_flag("--ablation", review_ablation, "Use the ablation record file");

    auto* report_cmd = app.add_subcommand("report", "Emit a report from stored records");
    std::string report_format = "text";
    bool report_ablation = false;
    report_cmd->add_option("--format", report_format, "text | csv | json");
    report_cmd->add_flag("--ablation", report_ablation, "Use the ablation record file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2; --help exits 0
    }

    try {
        if (rewrite_cmd->parsed()) return cmd_rewrite(opts);
        if (prefill_cmd->parsed()) return cmd_prefill(opts);
        if (combine_cmd->parsed()) return cmd_combine(opts);
        if (attack_cmd->parsed()) return cmd_attack(opts);
        if (ablate_cmd->parsed()) return cmd_ablate(opts, arms);
        if (judge_cmd->parsed()) return cmd_judge(opts, judge_ablation);
        if (review_cmd->parsed()) {
            return cmd_review(opts, review_sets, review_file, review_ablation);
        }
        if (report_cmd->parsed()) return cmd_report(opts, report_format, report_ablation);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
