#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "apf/types.hpp"

namespace apf {

struct DatasetLoad {
    std::vector<Question> questions;
    std::vector<std::string> warnings;  // skipped rows etc.
};

// AdvBench-style CSV: RFC-4180 quoting, header row, questions from the
// "goal" column ("prompt" accepted as an alias across releases). Ids are
// 0-based data-row indices. Rows with an empty goal are skipped with a
// warning. Throws EmptyDatasetError / DatasetSchemaError / DatasetParseError.
DatasetLoad load_advbench(const std::string& path);

// BeaverTails-style JSON lines: one object per line with a "prompt" field,
// optional "is_safe" boolean and "category" (string, or object of booleans
// whose first true key becomes the label). The filter keeps harmful-labeled
// rows by default. Malformed lines raise DatasetParseError with the line
// number.
DatasetLoad load_beavertails(
    const std::string& path,
    const std::function<bool(const Question&, bool is_safe)>& keep = {});

// The bundled desk-scale set: 30 synthetic questions, 20 marked harmful
// (each containing a simulator harmful marker), 10 benign. Stable across
// builds; fixture_hash() is pinned in tests.
std::vector<Question> load_fixture();

// FNV-1a over "id\ttext\tcategory\n" for every fixture row.
std::uint64_t fixture_hash();

}  // namespace apf
