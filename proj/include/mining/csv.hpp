#pragma once

#include <string>
#include <vector>

#include "mining/frame.hpp"

namespace mining {

struct SchemaField {
  std::string name;
  ColumnKind kind;
};

using Schema = std::vector<SchemaField>;

struct CsvOptions {
  char token_separator = '|';  // splits text cells into tokens
  std::string key;             // optional key column name recorded on the Frame
};

// UTF-8 CSV with a header row. Empty cells are missing, dates are
// YYYY-MM-DD, text cells split on the token separator. Doubles are written
// with 17 significant digits so read_csv(write_csv(f)) is value-exact.
Frame read_csv(const std::string& path, const Schema& schema, const CsvOptions& options = {});
void write_csv(const Frame& frame, const std::string& path, const CsvOptions& options = {});

Schema schema_of(const Frame& frame);

}  // namespace mining
