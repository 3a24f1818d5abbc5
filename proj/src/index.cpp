#include "tablerag/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <string>
#include <numeric>

#include "tablerag/detail/binary_io.hpp"
#include "tablerag/errors.hpp"

namespace tablerag {

namespace {

constexpr char kMagic[8] = {'T', 'R', 'A', 'G', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kNone = 0;
constexpr std::uint8_t kSome = 1;

std::uint8_t kind_code(ChunkKind k) { return static_cast<std::uint8_t>(k); }

}  // namespace

VectorIndex::VectorIndex(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw InvalidArgument("index dim must be > 0");
}

void VectorIndex::add(const std::string& chunk_id, const EmbeddingVector& v,
                      const Provenance& prov, std::string text) {
  if (v.dim() != dim_) throw DimensionMismatch(dim_, v.dim());
  if (by_id_.contains(chunk_id)) throw DuplicateChunkId("duplicate chunk id " + chunk_id);
  by_id_.emplace(chunk_id, ids_.size());
  ids_.push_back(chunk_id);
  texts_.push_back(std::move(text));
  provenance_.push_back(prov);
  if (prov.table_id) tables_.insert(*prov.table_id);
  const auto values = v.values();
  data_.insert(data_.end(), values.begin(), values.end());
}

std::span<const float> VectorIndex::vector(std::size_t i) const {
  if (i >= size()) throw IndexOutOfRange("index entry " + std::to_string(i));
  return std::span<const float>(data_).subspan(i * dim_, dim_);
}

const Provenance* VectorIndex::find(const std::string& chunk_id) const {
  const auto it = by_id_.find(chunk_id);
  return it == by_id_.end() ? nullptr : &provenance_[it->second];
}

std::size_t VectorIndex::position(const std::string& chunk_id) const {
  const auto it = by_id_.find(chunk_id);
  if (it == by_id_.end()) throw UnknownChunkId("unknown chunk id " + chunk_id);
  return it->second;
}

bool VectorIndex::has_table(const std::string& table_id) const {
  return tables_.contains(table_id);
}

std::vector<SearchHit> VectorIndex::topk(const EmbeddingVector& query, std::size_t k) const {
  if (empty()) throw EmptyIndex("topk on an empty index");
  if (k == 0) throw InvalidArgument("k must be >= 1");
  if (query.dim() != dim_) throw DimensionMismatch(dim_, query.dim());

  const auto q = query.values();
  std::vector<double> scores(size());
  for (std::size_t i = 0; i < size(); ++i) {
    const float* row = data_.data() + i * dim_;
    double s = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      s += static_cast<double>(row[d]) * static_cast<double>(q[d]);
    }
    scores[i] = s;
  }

  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids_[a] < ids_[b];
  };
  const std::size_t n = std::min(k, size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n),
                    order.end(), better);

  std::vector<SearchHit> hits;
  hits.reserve(n);
  for (std::size_t r = 0; r < n; ++r) {
    hits.push_back({ids_[order[r]], scores[order[r]], r + 1});
  }
  return hits;
}

void VectorIndex::save(std::ostream& out) const {
  out.write(kMagic, sizeof kMagic);
  detail::write_le(out, kVersion);
  detail::write_le(out, static_cast<std::uint32_t>(dim_));
  detail::write_le(out, static_cast<std::uint64_t>(size()));
  for (float x : data_) detail::write_f32(out, x);
  for (std::size_t i = 0; i < size(); ++i) {
    const Provenance& p = provenance_[i];
    detail::write_string(out, ids_[i]);
    detail::write_string(out, texts_[i]);
    detail::write_string(out, p.doc_id);
    detail::write_le(out, kind_code(p.kind));
    detail::write_le(out, p.table_id ? kSome : kNone);
    if (p.table_id) detail::write_string(out, *p.table_id);
    detail::write_le(out, p.row_index ? kSome : kNone);
    if (p.row_index) detail::write_le(out, static_cast<std::uint64_t>(*p.row_index));
  }
  if (!out) throw Error("failed writing index");
}

VectorIndex VectorIndex::load(std::istream& in) {
  detail::Reader<CorruptIndexFile> r(in);
  char magic[sizeof kMagic];
  r.bytes(magic, sizeof magic, "header magic");
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw CorruptIndexFile("header: bad magic bytes");
  }
  const auto version = r.le<std::uint32_t>("header version");
  if (version != kVersion) {
    throw CorruptIndexFile("header: unsupported version " + std::to_string(version) +
                           " (expected " + std::to_string(kVersion) + ")");
  }
  const auto dim = r.le<std::uint32_t>("header dim");
  const auto count = r.le<std::uint64_t>("header count");
  if (dim == 0 || dim > (1u << 20)) {
    throw CorruptIndexFile("header: implausible dim " + std::to_string(dim));
  }
  if (count > (std::uint64_t{1} << 40) / dim) {
    throw CorruptIndexFile("header: implausible count " + std::to_string(count));
  }

  std::vector<float> data;
  data.reserve(std::min<std::uint64_t>(count * dim, std::uint64_t{1} << 24));
  for (std::uint64_t i = 0; i < count * dim; ++i) data.push_back(r.f32("vectors"));

  VectorIndex index(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::string id = r.string("provenance chunk_id");
    std::string text = r.string("provenance text");
    Provenance p;
    p.doc_id = r.string("provenance doc_id");
    const auto kind = r.le<std::uint8_t>("provenance kind");
    if (kind > kind_code(ChunkKind::sentence)) {
      throw CorruptIndexFile("provenance: bad chunk kind " + std::to_string(kind) +
                             " at offset " + std::to_string(r.offset()));
    }
    p.kind = static_cast<ChunkKind>(kind);
    if (r.le<std::uint8_t>("provenance table flag") == kSome) {
      p.table_id = r.string("provenance table_id");
    }
    if (r.le<std::uint8_t>("provenance row flag") == kSome) {
      p.row_index = static_cast<std::size_t>(r.le<std::uint64_t>("provenance row_index"));
    }
    std::vector<float> values(data.begin() + static_cast<std::ptrdiff_t>(i * dim),
                              data.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim));
    try {
      index.add(id, EmbeddingVector::from_unit(std::move(values)), p, std::move(text));
    } catch (const InvalidArgument& e) {
      throw CorruptIndexFile("vectors: entry " + std::to_string(i) + " " + e.what());
    } catch (const DuplicateChunkId& e) {
      throw CorruptIndexFile(std::string("provenance: ") + e.what());
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw CorruptIndexFile("trailing bytes after offset " + std::to_string(r.offset()));
  }
  return index;
}

bool operator==(const VectorIndex& a, const VectorIndex& b) {
  if (a.dim_ != b.dim_ || a.ids_ != b.ids_ || a.texts_ != b.texts_ ||
      a.provenance_ != b.provenance_ || a.data_.size() != b.data_.size()) {
    return false;
  }
  return std::memcmp(a.data_.data(), b.data_.data(), a.data_.size() * sizeof(float)) == 0;
}

}  // namespace tablerag
