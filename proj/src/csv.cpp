#include "mining/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace mining {

namespace {

// One logical CSV record; quoted fields may span lines.
bool read_record(std::istream& in, std::vector<std::string>& fields) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int ch;
  while ((ch = in.get()) != EOF) {
    any = true;
    char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\r') {
      // swallow; newline handling below
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(c);
    }
  }
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

bool needs_quoting(const std::string& s) {
  return s.find_first_of(",\"\n\r") != std::string::npos;
}

void write_field(std::ostream& out, const std::string& s) {
  if (!needs_quoting(s)) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << "\"\"";
    else out << c;
  }
  out << '"';
}

double parse_numeric(const std::string& cell, std::size_t row, const std::string& column) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0' || errno == ERANGE)
    throw DataError("row " + std::to_string(row) + ", column " + column +
                    ": unparseable numeric cell '" + cell + "'");
  return v;
}

DateValue parse_date(const std::string& cell, std::size_t row, const std::string& column) {
  int y = 0, m = 0, d = 0;
  char extra = 0;
  if (std::sscanf(cell.c_str(), "%d-%d-%d%c", &y, &m, &d, &extra) != 3 || m < 1 || m > 12 ||
      d < 1 || d > 31)
    throw DataError("row " + std::to_string(row) + ", column " + column +
                    ": unparseable date cell '" + cell + "' (expected YYYY-MM-DD)");
  DateValue days = days_from_civil(CivilDate{y, m, d});
  CivilDate back = civil_from_days(days);
  if (back.year != y || back.month != m || back.day != d)
    throw DataError("row " + std::to_string(row) + ", column " + column +
                    ": invalid calendar day '" + cell + "'");
  return days;
}

std::vector<std::string> split_tokens(const std::string& cell, char sep) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : cell) {
    if (c == sep) {
      tokens.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  tokens.push_back(current);
  return tokens;
}

std::string format_date(DateValue days) {
  CivilDate d = civil_from_days(days);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

std::string format_numeric(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Frame read_csv(const std::string& path, const Schema& schema, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);

  {
    std::unordered_set<std::string> names;
    for (const auto& f : schema)
      if (!names.insert(f.name).second)
        throw ConfigError("duplicate column name in schema: " + f.name);
  }

  std::vector<std::string> header;
  if (!read_record(in, header)) throw DataError("empty CSV file: " + path);
  if (header.size() != schema.size())
    throw DataError(path + ": header has " + std::to_string(header.size()) +
                    " columns, schema has " + std::to_string(schema.size()));
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (header[i] != schema[i].name)
      throw DataError(path + ": header column " + std::to_string(i) + " is '" + header[i] +
                      "', schema says '" + schema[i].name + "'");

  Frame frame;
  frame.name = path;
  frame.key = options.key;
  std::vector<Column> cols(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    cols[i].name = schema[i].name;
    cols[i].kind = schema[i].kind;
  }

  std::vector<std::string> fields;
  std::size_t row = 0;
  while (read_record(in, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
    ++row;
    if (fields.size() != schema.size())
      throw DataError(path + ": row " + std::to_string(row) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(schema.size()));
    for (std::size_t i = 0; i < schema.size(); ++i) {
      Column& c = cols[i];
      const std::string& cell = fields[i];
      bool miss = cell.empty();
      c.missing.push_back(miss);
      switch (c.kind) {
        case ColumnKind::Numeric:
          c.nums.push_back(miss ? 0.0 : parse_numeric(cell, row, c.name));
          break;
        case ColumnKind::Categorical:
          c.cats.push_back(cell);
          break;
        case ColumnKind::Date:
          c.dates.push_back(miss ? 0 : parse_date(cell, row, c.name));
          break;
        case ColumnKind::Text:
          c.texts.push_back(miss ? std::vector<std::string>{}
                                 : split_tokens(cell, options.token_separator));
          break;
      }
    }
  }
  frame.n_rows = row;
  for (auto& c : cols) frame.columns.push_back(std::move(c));
  frame.check();
  return frame;
}

void write_csv(const Frame& frame, const std::string& path, const CsvOptions& options) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  for (std::size_t i = 0; i < frame.columns.size(); ++i) {
    if (i) out << ',';
    write_field(out, frame.columns[i].name);
  }
  out << '\n';
  for (std::size_t row = 0; row < frame.n_rows; ++row) {
    for (std::size_t i = 0; i < frame.columns.size(); ++i) {
      if (i) out << ',';
      const Column& c = frame.columns[i];
      if (c.missing[row]) continue;
      switch (c.kind) {
        case ColumnKind::Numeric: out << format_numeric(c.nums[row]); break;
        case ColumnKind::Categorical: write_field(out, c.cats[row]); break;
        case ColumnKind::Date: out << format_date(c.dates[row]); break;
        case ColumnKind::Text: {
          std::string joined;
          for (std::size_t t = 0; t < c.texts[row].size(); ++t) {
            if (t) joined.push_back(options.token_separator);
            joined += c.texts[row][t];
          }
          write_field(out, joined);
          break;
        }
      }
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

Schema schema_of(const Frame& frame) {
  Schema s;
  for (const auto& c : frame.columns) s.push_back({c.name, c.kind});
  return s;
}

}  // namespace mining
