#include "apf/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "apf/combine.hpp"
#include "apf/dataset.hpp"
#include "apf/defaults.hpp"
#include "apf/errors.hpp"
#include "apf/judge.hpp"
#include "apf/prefill.hpp"
#include "apf/rewrite.hpp"
#include "apf/text.hpp"

namespace apf {

using nlohmann::json;

std::string render_asr(std::size_t successes, std::size_t total) {
    if (total == 0) return "—";
    // round half-up at the third decimal, in integers
    const std::size_t scaled = (successes * 2000 + total) / (2 * total);
    std::string digits = std::to_string(scaled);
    while (digits.size() < 4) digits.insert(digits.begin(), '0');
    std::string out = digits.substr(0, digits.size() - 3) + "." +
                      digits.substr(digits.size() - 3);
    while (out.back() == '0' && out[out.size() - 2] != '.') out.pop_back();
    return out;
}

std::string AsrCell::rendered() const { return render_asr(successes, total); }

namespace {

// question-level success aggregation within one group
struct QuestionTally {
    std::set<std::string> questions;
    std::set<std::string> successes;
};

std::map<std::string, AsrCell> question_level(
    const std::vector<AttackRecord>& records,
    const std::function<std::optional<std::string>(const AttackRecord&)>& group_of) {
    std::map<std::string, QuestionTally> tallies;
    for (const AttackRecord& r : records) {
        if (!r.question_harmful) continue;
        auto group = group_of(r);
        if (!group) continue;
        QuestionTally& tally = tallies[*group];
        tally.questions.insert(r.question_id);
        if (r.final_jailbroken) tally.successes.insert(r.question_id);
    }
    std::map<std::string, AsrCell> out;
    for (const auto& [group, tally] : tallies) {
        out[group] = AsrCell{tally.successes.size(), tally.questions.size()};
    }
    return out;
}

}  // namespace

std::map<std::string, AsrCell> compute_asr(const std::vector<AttackRecord>& records,
                                           AsrGrouping grouping) {
    switch (grouping) {
        case AsrGrouping::Overall:
            return question_level(records, [](const AttackRecord&) {
                return std::optional<std::string>("overall");
            });
        case AsrGrouping::PerBackend:
            return question_level(records, [](const AttackRecord& r) {
                return std::optional<std::string>(r.backend_id);
            });
        case AsrGrouping::PerArm:
            return question_level(records, [](const AttackRecord& r) {
                return r.arm ? std::optional<std::string>(*r.arm) : std::nullopt;
            });
        case AsrGrouping::PerCombination: {
            std::map<std::string, AsrCell> out;
            for (const AttackRecord& r : records) {
                if (!r.question_harmful || !r.combination) continue;
                AsrCell& cell = out[combo_label(*r.combination, r.x_source)];
                ++cell.total;
                if (r.final_jailbroken) ++cell.successes;
            }
            return out;
        }
    }
    throw Error("unknown ASR grouping");
}

CampaignReport report_from_records(const std::vector<AttackRecord>& records) {
    CampaignReport report;
    report.record_count = records.size();
    report.per_backend = compute_asr(records, AsrGrouping::PerBackend);
    report.matrix = compute_asr(records, AsrGrouping::PerCombination);
    report.per_arm = compute_asr(records, AsrGrouping::PerArm);
    auto overall = compute_asr(records, AsrGrouping::Overall);
    if (auto it = overall.find("overall"); it != overall.end()) report.overall = it->second;
    for (const AttackRecord& r : records) {
        if (r.error) ++report.failure_counts[r.backend_id];
    }
    return report;
}

namespace {

// One unit of work: everything the pipeline does for a single question.
struct QuestionPlan {
    Question question;
    std::vector<std::string> arms;  // empty -> plain combination campaign
};

struct Engine {
    const CampaignConfig& config;
    std::map<std::string, std::unique_ptr<ChatBackend>> backends;
    std::map<std::string, ChatTemplate> templates;
    RecordStore store;
    SuccessCorpus corpus;
    std::mutex write_mutex;
    std::map<std::string, std::size_t> failures;
    std::vector<std::string> notes;

    Engine(const CampaignConfig& cfg, const std::string& records_path,
           const std::string& corpus_path)
        : config(cfg), store(records_path), corpus(corpus_path) {
        for (const BackendSpec& spec : cfg.backends) {
            backends[spec.id] = make_backend(spec, cfg);
            templates.emplace(spec.id, ChatTemplate::builtin(spec.template_name));
        }
    }

    ChatBackend& backend(const std::string& id) {
        auto it = backends.find(id);
        if (it == backends.end()) throw ConfigError("backend '" + id + "' is not configured");
        return *it->second;
    }

    const ChatTemplate& template_of(const std::string& id) { return templates.at(id); }

    void note_failure(const std::string& backend_id) {
        std::lock_guard lock(write_mutex);
        ++failures[backend_id];
    }

    // Persist one finished record; success corpus rides along. Error
    // records are tallied later from the store itself.
    void commit(const AttackRecord& record, const std::string& question_text) {
        std::lock_guard lock(write_mutex);
        if (!store.append(record)) return;
        if (record.final_jailbroken) corpus.record_success(record, question_text);
    }

    bool already_done(const std::string& key) {
        std::lock_guard lock(write_mutex);
        return store.contains(key);
    }
};

std::vector<JudgeVerdict> run_judges(Engine& engine, const Question& q,
                                     const AttackRecord& record,
                                     std::vector<std::string>& judge_errors) {
    std::vector<JudgeVerdict> verdicts;
    if (engine.config.heuristic_judge_enabled) {
        verdicts.push_back(
            heuristic_judge(record.response, record.prefill_text, engine.config.judge_rules));
    }
    for (const JudgeClientConfig& jc : engine.config.judges) {
        try {
            JudgeClient client(jc);
            verdicts.push_back(client.judge(q.text, record.response));
        } catch (const BackendError& e) {
            // Outage: the verdict is absent, never false.
            judge_errors.push_back(jc.id + ": " + e.what());
        }
    }
    return verdicts;
}

void attack_one(Engine& engine, const Question& q, const AttackPrompt& prompt,
                const std::optional<std::string>& arm, const std::string& backend_id,
                bool schema_combination = true) {
    AttackRecord record;
    record.question_id = q.id;
    record.question_harmful = !q.is_benign();
    record.x_source = prompt.x_source;
    if (schema_combination) record.combination = prompt.combination;
    record.arm = arm;
    record.user_text = prompt.user_text;
    record.prefill_text = prompt.prefill_text;
    record.backend_id = backend_id;

    if (engine.already_done(record.key())) return;
    record.started_at = now_utc_iso8601();

    ChatTranscript transcript = ChatTranscript::single_user(
        prompt.user_text, prompt.prefill_text.empty()
                              ? std::nullopt
                              : std::optional<std::string>(prompt.prefill_text));
    record.rendered_prompt = render(engine.template_of(backend_id), transcript);

    try {
        ChatBackend& target = engine.backend(backend_id);
        std::string continuation = target.generate(transcript, engine.config.generation);
        record.response = prompt.prefill_text + continuation;
        record.verdicts = run_judges(engine, q, record, record.judge_errors);
        record.recompute_final(engine.config.merge_policy);
    } catch (const BackendError& e) {
        record.error = e.what();
        record.final_jailbroken = false;
    }
    record.finished_at = now_utc_iso8601();
    engine.commit(record, q.text);
}

// Error record emitted when the pipeline could not even build prompts.
void record_pipeline_failure(Engine& engine, const Question& q, const std::string& backend_id,
                             const std::optional<std::string>& arm, const std::string& what) {
    AttackRecord record;
    record.question_id = q.id;
    record.question_harmful = !q.is_benign();
    record.backend_id = backend_id;
    record.arm = arm;
    record.error = what;
    record.started_at = now_utc_iso8601();
    record.finished_at = record.started_at;
    if (engine.already_done(record.key())) return;
    engine.commit(record, q.text);
}

std::vector<Rewrite> gather_rewrites(Engine& engine, const Question& q) {
    if (!engine.config.rewrite_enabled) return {};
    auto outcome =
        rewrite_question(q, engine.backend(engine.config.generator), engine.config.rewrite,
                         engine.config.generation);
    for (const std::string& err : outcome.errors) {
        engine.note_failure(engine.config.generator);
        std::lock_guard lock(engine.write_mutex);
        engine.notes.push_back("rewrite " + q.id + ": " + err);
    }
    return outcome.rewrites;
}

void run_plain_attacks(Engine& engine, const Question& q) {
    std::vector<Rewrite> rewrites;
    FillerSet fillers;
    try {
        rewrites = gather_rewrites(engine, q);
        fillers = build_filler_set(q, engine.backend(engine.config.generator),
                                   engine.config.filler, engine.config.generation);
    } catch (const Error& e) {
        for (const std::string& target : engine.config.targets) {
            record_pipeline_failure(engine, q, target, std::nullopt, e.what());
        }
        return;
    }

    AssembleOptions options;
    options.use_safe_model = engine.config.use_safe_model_in_combos;
    std::vector<AttackPrompt> prompts = enumerate_prompts(q, rewrites, fillers, options);

    const std::set<CombinationKind> wanted_kinds(engine.config.combinations.begin(),
                                                 engine.config.combinations.end());
    const std::set<XSource> wanted_sources(engine.config.x_sources.begin(),
                                           engine.config.x_sources.end());
    for (const std::string& target : engine.config.targets) {
        for (const AttackPrompt& prompt : prompts) {
            if (!wanted_kinds.count(prompt.combination)) continue;
            if (!wanted_sources.count(prompt.x_source)) continue;
            attack_one(engine, q, prompt, std::nullopt, target);
        }
    }
}

void run_arm_attacks(Engine& engine, const Question& q, const std::vector<std::string>& arms) {
    // Arms share one rewrite set and one filler set per question.
    std::vector<Rewrite> rewrites;
    FillerSet fillers;
    std::optional<std::string> pipeline_error;
    try {
        rewrites = gather_rewrites(engine, q);
        fillers = build_filler_set(q, engine.backend(engine.config.generator),
                                   engine.config.filler, engine.config.generation);
    } catch (const Error& e) {
        pipeline_error = e.what();
    }

    const std::string& generic_fill =
        engine.config.generic_fill.empty() ? defaults::generic_fill()
                                           : engine.config.generic_fill;

    for (const std::string& arm : arms) {
        // unfilled/generic/safe_termination need no generated fillers
        const bool needs_fillers =
            arm != "unfilled" && arm != "generic" && arm != "safe_termination";
        for (const std::string& target : engine.config.targets) {
            if (pipeline_error && needs_fillers) {
                record_pipeline_failure(engine, q, target, arm, *pipeline_error);
                continue;
            }
            AttackPrompt prompt;
            prompt.question_id = q.id;
            prompt.user_text = q.text;
            bool schema = false;
            try {
                if (arm == "unfilled") {
                    prompt.prefill_text.clear();
                } else if (arm == "generic") {
                    prompt.prefill_text = generic_fill;
                } else if (arm == "adaptive") {
                    prompt = assemble(q.text, fillers, CombinationKind::HarmFull);
                    schema = true;
                } else if (arm == "safe_termination") {
                    prompt.prefill_text = engine.config.filler.safe_generic + "\n" +
                                          engine.config.filler.transition;
                } else if (arm == "hybrid") {
                    prompt = assemble(q.text, fillers, CombinationKind::SafeTransHarmFull);
                    schema = true;
                } else {
                    // "<combination>@<x_source>" arm
                    auto [kind, source] = parse_combo_label(arm);
                    std::string x = q.text;
                    if (source == XSource::Rewritten) {
                        auto it = std::find_if(rewrites.begin(), rewrites.end(),
                                               [](const Rewrite& r) { return r.accepted; });
                        if (it == rewrites.end()) {
                            throw Error("no accepted rewrite for question " + q.id);
                        }
                        x = it->text;
                    }
                    AssembleOptions options;
                    options.use_safe_model = engine.config.use_safe_model_in_combos;
                    prompt = assemble(x, fillers, kind, options);
                    prompt.x_source = source;
                    schema = true;
                }
            } catch (const Error& e) {
                record_pipeline_failure(engine, q, target, arm, e.what());
                continue;
            }
            attack_one(engine, q, prompt, arm, target, schema);
        }
    }
}

void run_question_tasks(Engine& engine, std::vector<QuestionPlan> plans) {
    const unsigned workers = std::max(1u, engine.config.workers);
    if (workers == 1) {
        for (const QuestionPlan& plan : plans) {
            if (plan.arms.empty()) {
                run_plain_attacks(engine, plan.question);
            } else {
                run_arm_attacks(engine, plan.question, plan.arms);
            }
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= plans.size()) return;
            const QuestionPlan& plan = plans[i];
            try {
                if (plan.arms.empty()) {
                    run_plain_attacks(engine, plan.question);
                } else {
                    run_arm_attacks(engine, plan.question, plan.arms);
                }
            } catch (const std::exception& e) {
                std::lock_guard lock(engine.write_mutex);
                engine.notes.push_back("question " + plan.question.id + ": " + e.what());
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
}

std::vector<QuestionPlan> plan_questions(const CampaignConfig& config,
                                         const std::vector<std::string>& arms) {
    std::vector<Question> questions = load_campaign_questions(config);
    if (config.shuffle) {
        std::mt19937_64 rng(config.seed);
        std::shuffle(questions.begin(), questions.end(), rng);
    }
    std::vector<QuestionPlan> plans;
    plans.reserve(questions.size());
    for (Question& q : questions) plans.push_back({std::move(q), arms});
    return plans;
}

CampaignReport finish(Engine& engine) {
    CampaignReport report = report_from_records(engine.store.load_all());
    // rewrite-attempt failures are recoverable and leave no error record;
    // tally them on top of the record-derived counts
    for (const auto& [backend_id, count] : engine.failures) {
        report.failure_counts[backend_id] += count;
    }
    report.notes = engine.notes;
    return report;
}

}  // namespace

std::vector<Question> load_campaign_questions(const CampaignConfig& config) {
    if (config.dataset_kind == "fixture") return load_fixture();
    if (config.dataset_kind == "advbench") return load_advbench(config.dataset_path).questions;
    if (config.dataset_kind == "beavertails") {
        return load_beavertails(config.dataset_path).questions;
    }
    throw ConfigError("unknown dataset.kind: " + config.dataset_kind);
}

CampaignReport run_campaign(const CampaignConfig& config) {
    validate(config);
    std::filesystem::create_directories(config.out_dir);
    Engine engine(config, config.out_dir + "/records.jsonl",
                  config.out_dir + "/corpus.jsonl");
    run_question_tasks(engine, plan_questions(config, {}));
    return finish(engine);
}

CampaignReport run_ablation(const CampaignConfig& config,
                            const std::vector<std::string>& arms) {
    validate(config);
    if (arms.empty()) throw ConfigError("no ablation arms given");
    for (const std::string& arm : arms) {
        if (arm == "unfilled" || arm == "generic" || arm == "adaptive" ||
            arm == "safe_termination" || arm == "hybrid") {
            continue;
        }
        parse_combo_label(arm);  // throws on anything unrecognized
    }
    std::filesystem::create_directories(config.out_dir);
    Engine engine(config, config.out_dir + "/ablation_records.jsonl",
                  config.out_dir + "/corpus.jsonl");
    run_question_tasks(engine, plan_questions(config, arms));
    return finish(engine);
}

namespace {

const char* kMatrixHeaders[] = {"X+1/3H", "X+2/3H", "X+H", "X+S+1/3H", "X+S+2/3H", "X+S+H"};

std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

void emit_matrix_text(std::ostringstream& out, const CampaignReport& report) {
    out << "Prompt-level ASR by combination\n";
    out << pad("", 6);
    for (const char* header : kMatrixHeaders) out << pad(header, 11);
    out << "\n";
    const struct {
        const char* label;
        XSource source;
    } rows[] = {{"X=Q", XSource::Original}, {"X=R", XSource::Rewritten}};
    for (const auto& row : rows) {
        out << pad(row.label, 6);
        for (CombinationKind kind : kAllCombinations) {
            auto it = report.matrix.find(combo_label(kind, row.source));
            out << pad(it == report.matrix.end() ? "—" : it->second.rendered(), 11);
        }
        out << "\n";
    }
}

}  // namespace

std::string emit_report(const CampaignReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) {
        json j;
        auto cells = [](const std::map<std::string, AsrCell>& m) {
            json out = json::object();
            for (const auto& [key, cell] : m) {
                out[key] = {{"successes", cell.successes},
                            {"total", cell.total},
                            {"asr", cell.rendered()}};
            }
            return out;
        };
        j["overall"] = {{"successes", report.overall.successes},
                        {"total", report.overall.total},
                        {"asr", report.overall.rendered()}};
        j["per_backend"] = cells(report.per_backend);
        j["matrix"] = cells(report.matrix);
        j["per_arm"] = cells(report.per_arm);
        j["record_count"] = report.record_count;
        j["failure_counts"] = report.failure_counts;
        if (!report.notes.empty()) j["notes"] = report.notes;
        return j.dump(2) + "\n";
    }

    if (format == ReportFormat::Csv) {
        std::ostringstream out;
        out << "section,key,successes,total,asr\n";
        auto emit = [&](const std::string& section, const std::map<std::string, AsrCell>& m) {
            for (const auto& [key, cell] : m) {
                out << section << "," << key << "," << cell.successes << "," << cell.total
                    << "," << cell.rendered() << "\n";
            }
        };
        out << "overall,overall," << report.overall.successes << "," << report.overall.total
            << "," << report.overall.rendered() << "\n";
        emit("backend", report.per_backend);
        emit("combination", report.matrix);
        emit("arm", report.per_arm);
        for (const auto& [backend_id, count] : report.failure_counts) {
            out << "failures," << backend_id << "," << count << ",,\n";
        }
        return out.str();
    }

    std::ostringstream out;
    out << "Question-level ASR by backend\n";
    out << pad("backend", 16) << pad("successes", 11) << pad("total", 7) << "ASR\n";
    for (const auto& [backend_id, cell] : report.per_backend) {
        out << pad(backend_id, 16) << pad(std::to_string(cell.successes), 11)
            << pad(std::to_string(cell.total), 7) << cell.rendered() << "\n";
    }
    out << "\n";
    if (!report.matrix.empty()) {
        emit_matrix_text(out, report);
        out << "\n";
    }
    if (!report.per_arm.empty()) {
        out << "Question-level ASR by arm\n";
        out << pad("arm", 28) << pad("successes", 11) << pad("total", 7) << "ASR\n";
        for (const auto& [arm, cell] : report.per_arm) {
            out << pad(arm, 28) << pad(std::to_string(cell.successes), 11)
                << pad(std::to_string(cell.total), 7) << cell.rendered() << "\n";
        }
        out << "\n";
    }
    out << "records: " << report.record_count << "\n";
    if (!report.failure_counts.empty()) {
        out << "failures:";
        for (const auto& [backend_id, count] : report.failure_counts) {
            out << " " << backend_id << "=" << count;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace apf
