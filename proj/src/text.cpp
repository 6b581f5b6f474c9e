#include "mining/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace mining {

DesignMatrix DesignMatrix::zeros(std::size_t rows, std::size_t cols) {
  DesignMatrix m;
  m.n_rows = rows;
  m.n_cols = cols;
  m.values.assign(rows * cols, 0.0);
  m.names.resize(cols);
  for (std::size_t c = 0; c < cols; ++c) m.names[c] = "f" + std::to_string(c);
  return m;
}

int DesignMatrix::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < n_cols; ++c)
    if (names[c] == name) return static_cast<int>(c);
  return -1;
}

DesignMatrix DesignMatrix::select_columns(const std::vector<std::size_t>& cols) const {
  DesignMatrix out;
  out.n_rows = n_rows;
  out.n_cols = cols.size();
  out.values.resize(n_rows * cols.size());
  for (std::size_t c : cols) out.names.push_back(names[c]);
  for (std::size_t r = 0; r < n_rows; ++r)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out.values[r * cols.size() + j] = at(r, cols[j]);
  return out;
}

DesignMatrix DesignMatrix::drop_column(std::size_t col) const {
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < n_cols; ++c)
    if (c != col) keep.push_back(c);
  return select_columns(keep);
}

DesignMatrix DesignMatrix::select_rows(const std::vector<std::size_t>& rows) const {
  DesignMatrix out;
  out.n_rows = rows.size();
  out.n_cols = n_cols;
  out.names = names;
  out.values.resize(rows.size() * n_cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(row(rows[i]), row(rows[i]) + n_cols, out.values.begin() + i * n_cols);
  return out;
}

DesignMatrix DesignMatrix::vstack(const DesignMatrix& a, const DesignMatrix& b) {
  if (a.n_cols != b.n_cols) throw DataError("vstack: column count mismatch");
  DesignMatrix out = a;
  out.n_rows = a.n_rows + b.n_rows;
  out.values.insert(out.values.end(), b.values.begin(), b.values.end());
  return out;
}

std::uint32_t fnv1a32(const std::string& bytes) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

SparseVector hashing_tf(const std::vector<std::string>& tokens, std::uint32_t dim) {
  if (dim == 0) throw ConfigError("hashing_tf dim must be positive");
  std::map<std::uint32_t, double> buckets;
  for (const auto& token : tokens) buckets[fnv1a32(token) % dim] += 1.0;
  SparseVector v;
  v.dim = dim;
  v.entries.assign(buckets.begin(), buckets.end());
  return v;
}

IdfModel idf_fit(const std::vector<SparseVector>& corpus, std::uint32_t dim) {
  std::vector<std::size_t> df(dim, 0);
  for (const auto& doc : corpus) {
    if (doc.dim != dim) throw DataError("idf_fit: vector dim mismatch");
    for (const auto& [index, value] : doc.entries) {
      (void)value;
      ++df[index];
    }
  }
  IdfModel model;
  model.dim = dim;
  model.doc_count = corpus.size();
  model.idf.resize(dim);
  double n = static_cast<double>(corpus.size());
  for (std::uint32_t b = 0; b < dim; ++b)
    model.idf[b] = std::log((n + 1.0) / (static_cast<double>(df[b]) + 1.0));
  return model;
}

SparseVector idf_transform(const IdfModel& model, const SparseVector& v) {
  if (v.dim != model.dim) throw DataError("idf_transform: vector dim mismatch");
  SparseVector out;
  out.dim = v.dim;
  for (const auto& [index, value] : v.entries) {
    double w = value * model.idf[index];
    if (w != 0.0) out.entries.emplace_back(index, w);
  }
  return out;
}

DesignMatrix assemble(const Frame& frame, const std::vector<std::string>& numeric_cols,
                      const std::vector<SparseBlock>& sparse_blocks) {
  std::size_t width = numeric_cols.size();
  for (const auto& block : sparse_blocks) {
    if (block.rows.size() != frame.n_rows)
      throw DataError("assemble: sparse block " + block.prefix + " row count mismatch");
    width += block.dim;
  }
  DesignMatrix m;
  m.n_rows = frame.n_rows;
  m.n_cols = width;
  m.values.assign(frame.n_rows * width, 0.0);
  m.names.reserve(width);

  std::size_t offset = 0;
  for (const auto& name : numeric_cols) {
    const Column& c = frame.at(name);
    if (c.kind != ColumnKind::Numeric) throw DataError("assemble: column not numeric: " + name);
    m.names.push_back(name);
    for (std::size_t r = 0; r < frame.n_rows; ++r)
      m.values[r * width + offset] = c.missing[r] ? DesignMatrix::missing_marker() : c.nums[r];
    ++offset;
  }
  for (const auto& block : sparse_blocks) {
    for (std::uint32_t b = 0; b < block.dim; ++b)
      m.names.push_back(block.prefix + "[" + std::to_string(b) + "]");
    for (std::size_t r = 0; r < frame.n_rows; ++r) {
      if (block.rows[r].dim != block.dim)
        throw DataError("assemble: sparse block " + block.prefix + " dim mismatch");
      for (const auto& [index, value] : block.rows[r].entries)
        m.values[r * width + offset + index] = value;
    }
    offset += block.dim;
  }
  return m;
}

}  // namespace mining
