#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tablerag/chunker.hpp"
#include "tablerag/embed.hpp"

namespace tablerag {

struct SearchHit {
  std::string chunk_id;
  double score = 0.0;  // cosine, computed as a double-precision dot product
  std::size_t rank = 0;  // 1-based
  friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

// Exact (brute-force) cosine index over unit vectors. Build it with add(),
// then treat it as read-only: concurrent topk() calls are safe once no more
// add() calls happen.
class VectorIndex {
 public:
  explicit VectorIndex(std::size_t dim);

  // Throws DuplicateChunkId or DimensionMismatch.
  void add(const std::string& chunk_id, const EmbeddingVector& v,
           const Provenance& prov, std::string text = {});

  // min(k, size()) hits, score descending, ties by ascending chunk_id.
  // Throws EmptyIndex, InvalidArgument (k == 0) or DimensionMismatch.
  std::vector<SearchHit> topk(const EmbeddingVector& query, std::size_t k) const;

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  const std::string& chunk_id(std::size_t i) const { return ids_.at(i); }
  const std::string& text(std::size_t i) const { return texts_.at(i); }
  const Provenance& provenance(std::size_t i) const { return provenance_.at(i); }
  std::span<const float> vector(std::size_t i) const;

  // nullptr when the id is unknown.
  const Provenance* find(const std::string& chunk_id) const;
  std::size_t position(const std::string& chunk_id) const;  // throws UnknownChunkId
  bool has_table(const std::string& table_id) const;

  // Binary format documented in docs/index_format.md.
  void save(std::ostream& out) const;
  static VectorIndex load(std::istream& in);

  friend bool operator==(const VectorIndex& a, const VectorIndex& b);

 private:
  std::size_t dim_;
  std::vector<std::string> ids_;
  std::vector<std::string> texts_;
  std::vector<Provenance> provenance_;
  std::vector<float> data_;  // row-major, size() x dim_
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_set<std::string> tables_;
};

}  // namespace tablerag
