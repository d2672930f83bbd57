#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "apf/types.hpp"

namespace apf {

std::string record_to_json_line(const AttackRecord& record);
AttackRecord record_from_json_line(const std::string& line, std::size_t line_number);

// Append-only JSON-lines store for attack records. Loading an existing file
// seeds the key index, which is how campaigns resume without duplicating
// (question_id, combination, x_source, backend_id) work. Appends must be
// funneled through one writer.
class RecordStore {
  public:
    explicit RecordStore(std::string path);

    // True when the key was new and the record was written.
    bool append(const AttackRecord& record);

    bool contains(const std::string& key) const { return keys_.count(key) > 0; }
    std::size_t size() const { return keys_.size(); }
    const std::string& path() const { return path_; }

    std::vector<AttackRecord> load_all() const;

    // Rewrites the whole file (manual review and re-judging flows).
    static void save_all(const std::string& path, const std::vector<AttackRecord>& records);

  private:
    std::string path_;
    std::set<std::string> keys_;
};

// ISO-8601 UTC timestamp for record provenance.
std::string now_utc_iso8601();

}  // namespace apf
