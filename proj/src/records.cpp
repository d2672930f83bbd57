#include "apf/records.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "json.hpp"

#include "apf/errors.hpp"

namespace apf {

using nlohmann::json;

std::string record_to_json_line(const AttackRecord& r) {
    json j;
    j["question_id"] = r.question_id;
    j["question_harmful"] = r.question_harmful;
    j["x_source"] = to_string(r.x_source);
    if (r.combination) j["combination"] = to_string(*r.combination);
    if (r.arm) j["arm"] = *r.arm;
    j["user_text"] = r.user_text;
    j["prefill_text"] = r.prefill_text;
    j["rendered_prompt"] = r.rendered_prompt;
    j["backend_id"] = r.backend_id;
    j["response"] = r.response;
    json verdicts = json::array();
    for (const JudgeVerdict& v : r.verdicts) {
        json jv;
        jv["judge_id"] = v.judge_id;
        jv["jailbroken"] = v.jailbroken;
        if (v.score) jv["score"] = *v.score;
        if (v.raw) jv["raw"] = *v.raw;
        verdicts.push_back(std::move(jv));
    }
    j["verdicts"] = std::move(verdicts);
    if (!r.judge_errors.empty()) j["judge_errors"] = r.judge_errors;
    j["final_jailbroken"] = r.final_jailbroken;
    if (r.manual_override) j["manual_override"] = *r.manual_override;
    if (r.error) j["error"] = *r.error;
    j["started_at"] = r.started_at;
    j["finished_at"] = r.finished_at;
    return j.dump();
}

AttackRecord record_from_json_line(const std::string& line, std::size_t line_number) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw DatasetParseError(line_number,
                                "records line " + std::to_string(line_number) + ": " + e.what());
    }
    AttackRecord r;
    try {
        r.question_id = j.at("question_id").get<std::string>();
        r.question_harmful = j.value("question_harmful", true);
        r.x_source = x_source_from_string(j.at("x_source").get<std::string>());
        if (j.contains("combination")) {
            r.combination = combination_from_string(j.at("combination").get<std::string>());
        }
        if (j.contains("arm")) r.arm = j.at("arm").get<std::string>();
        r.user_text = j.value("user_text", "");
        r.prefill_text = j.value("prefill_text", "");
        r.rendered_prompt = j.value("rendered_prompt", "");
        r.backend_id = j.at("backend_id").get<std::string>();
        r.response = j.value("response", "");
        if (j.contains("verdicts")) {
            for (const json& jv : j.at("verdicts")) {
                JudgeVerdict v;
                v.judge_id = jv.at("judge_id").get<std::string>();
                v.jailbroken = jv.at("jailbroken").get<bool>();
                if (jv.contains("score")) v.score = jv.at("score").get<double>();
                if (jv.contains("raw")) v.raw = jv.at("raw").get<std::string>();
                r.verdicts.push_back(std::move(v));
            }
        }
        if (j.contains("judge_errors")) {
            r.judge_errors = j.at("judge_errors").get<std::vector<std::string>>();
        }
        r.final_jailbroken = j.value("final_jailbroken", false);
        if (j.contains("manual_override")) {
            r.manual_override = j.at("manual_override").get<bool>();
        }
        if (j.contains("error")) r.error = j.at("error").get<std::string>();
        r.started_at = j.value("started_at", "");
        r.finished_at = j.value("finished_at", "");
    } catch (const json::exception& e) {
        throw DatasetParseError(line_number,
                                "records line " + std::to_string(line_number) + ": " + e.what());
    }
    return r;
}

RecordStore::RecordStore(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        keys_.insert(record_from_json_line(line, line_number).key());
    }
}

bool RecordStore::append(const AttackRecord& record) {
    if (!keys_.insert(record.key()).second) return false;
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw Error("cannot open record store for append: " + path_);
    out << record_to_json_line(record) << "\n";
    return true;
}

std::vector<AttackRecord> RecordStore::load_all() const {
    std::vector<AttackRecord> records;
    std::ifstream in(path_, std::ios::binary);
    if (!in) return records;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        records.push_back(record_from_json_line(line, line_number));
    }
    return records;
}

void RecordStore::save_all(const std::string& path, const std::vector<AttackRecord>& records) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        if (!out) throw Error("cannot write record store: " + tmp);
        for (const AttackRecord& r : records) out << record_to_json_line(r) << "\n";
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw Error("cannot replace record store: " + path);
    }
}

std::string now_utc_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t seconds = std::chrono::system_clock::to_time_t(now);
    std::tm utc{};
    gmtime_r(&seconds, &utc);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

}  // namespace apf
