#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mining/frame.hpp"
#include "mining/matrix.hpp"

namespace mining {

struct SparseVector {
  std::uint32_t dim = 0;
  // Strictly increasing indices in [0, dim), finite non-zero values.
  std::vector<std::pair<std::uint32_t, double>> entries;
};

std::uint32_t fnv1a32(const std::string& bytes);

// Token counts bucketed by FNV-1a hash modulo dim.
SparseVector hashing_tf(const std::vector<std::string>& tokens, std::uint32_t dim);

struct IdfModel {
  std::uint32_t dim = 0;
  std::size_t doc_count = 0;
  std::vector<double> idf;  // ln((N+1)/(df+1)) per bucket
};

IdfModel idf_fit(const std::vector<SparseVector>& corpus, std::uint32_t dim);
SparseVector idf_transform(const IdfModel& model, const SparseVector& v);

struct SparseBlock {
  std::string prefix;               // output columns named <prefix>[i]
  std::uint32_t dim = 0;
  std::vector<SparseVector> rows;   // one per frame row
};

// Numeric columns in the given order, then sparse blocks in the given
// order, into one dense design matrix with named columns.
DesignMatrix assemble(const Frame& frame, const std::vector<std::string>& numeric_cols,
                      const std::vector<SparseBlock>& sparse_blocks);

}  // namespace mining
