#pragma once

#include <atomic>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "potlab/hodge.hpp"

namespace potlab {

inline constexpr std::uint64_t kCacheFormatVersion = 1;

/// `<dir>/ops_v<version>_<N>x<m_1>-..-<m_N>.bin`
inline std::filesystem::path cache_file_path(const std::filesystem::path& dir, const GameShape& shape) {
  std::string name = "ops_v" + std::to_string(kCacheFormatVersion) + "_" + std::to_string(shape.num_players()) + "x";
  for (std::size_t i = 0; i < shape.num_players(); ++i) {
    if (i) name += '-';
    name += std::to_string(shape.actions(i));
  }
  return dir / (name + ".bin");
}

namespace cache_detail {

inline constexpr char kMagic[8] = {'P', 'O', 'T', 'L', 'A', 'B', 'O', 'P'};

enum class Storage : std::uint64_t { dense = 0, csr = 1 };

// Little-endian byte buffer.
class Writer {
 public:
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) bytes_.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class Reader {
 public:
  Reader(const char* data, std::size_t size) : data_(data), size_(size) {}
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + k])) << (8 * k);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  const char* take(std::size_t n) {
    need(n);
    const char* p = data_ + pos_;
    pos_ += n;
    return p;
  }
  std::size_t remaining() const { return size_ - pos_; }

 private:
  void need(std::size_t n) const {
    if (n > size_ - pos_) throw std::runtime_error("truncated cache file");
  }
  const char* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

inline std::uint64_t checksum(const char* p, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t k = 0; k < n; ++k) {
    h ^= static_cast<unsigned char>(p[k]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline void write_header(Writer& w, const GameShape& shape, const std::string& name, std::uint64_t rows,
                         std::uint64_t cols, Storage storage, const std::vector<char>& payload) {
  w.u64(kCacheFormatVersion);
  w.u64(shape.num_players());
  for (std::size_t m : shape.action_counts()) w.u64(m);
  w.u64(name.size());
  w.raw(name.data(), name.size());
  w.u64(rows);
  w.u64(cols);
  w.u64(static_cast<std::uint64_t>(storage));
  w.u64(payload.size());
  w.u64(checksum(payload.data(), payload.size()));
  w.raw(payload.data(), payload.size());
}

inline void write_dense(Writer& w, const GameShape& shape, const std::string& name, const Eigen::MatrixXd& m) {
  Writer payload;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) payload.f64(m(r, c));
  write_header(w, shape, name, static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols()),
               Storage::dense, payload.bytes());
}

inline void write_csr(Writer& w, const GameShape& shape, const std::string& name, const SparseMatrix& m) {
  SparseMatrix c = m;
  c.makeCompressed();
  Writer payload;
  payload.u64(static_cast<std::uint64_t>(c.nonZeros()));
  for (Eigen::Index r = 0; r <= c.rows(); ++r) payload.u64(static_cast<std::uint64_t>(c.outerIndexPtr()[r]));
  for (Eigen::Index k = 0; k < c.nonZeros(); ++k) payload.u64(static_cast<std::uint64_t>(c.innerIndexPtr()[k]));
  for (Eigen::Index k = 0; k < c.nonZeros(); ++k) payload.f64(c.valuePtr()[k]);
  write_header(w, shape, name, static_cast<std::uint64_t>(c.rows()), static_cast<std::uint64_t>(c.cols()),
               Storage::csr, payload.bytes());
}

struct Record {
  std::string name;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  Storage storage = Storage::dense;
  Eigen::MatrixXd dense;
  SparseMatrix sparse;
};

inline Record read_record(Reader& r, const GameShape& shape) {
  if (r.u64() != kCacheFormatVersion) throw std::runtime_error("cache format version mismatch");
  const std::uint64_t n = r.u64();
  if (n != shape.num_players()) throw std::runtime_error("cache shape mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (r.u64() != shape.actions(i)) throw std::runtime_error("cache shape mismatch");
  Record rec;
  const std::uint64_t name_len = r.u64();
  if (name_len > 64) throw std::runtime_error("bad matrix name");
  rec.name.assign(r.take(name_len), name_len);
  rec.rows = r.u64();
  rec.cols = r.u64();
  const std::uint64_t storage = r.u64();
  if (storage > 1) throw std::runtime_error("bad storage tag");
  rec.storage = static_cast<Storage>(storage);
  const std::uint64_t size = r.u64();
  const std::uint64_t sum = r.u64();
  const char* payload = r.take(size);
  if (checksum(payload, size) != sum) throw std::runtime_error("checksum mismatch in " + rec.name);
  Reader p(payload, size);
  const auto rows = static_cast<Eigen::Index>(rec.rows);
  const auto cols = static_cast<Eigen::Index>(rec.cols);
  if (rec.storage == Storage::dense) {
    if (size != rec.rows * rec.cols * 8) throw std::runtime_error("dense payload size mismatch");
    rec.dense.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) rec.dense(i, j) = p.f64();
  } else {
    const std::uint64_t nnz = p.u64();
    std::vector<std::uint64_t> outer(rec.rows + 1);
    for (auto& o : outer) o = p.u64();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(nnz);
    std::vector<std::uint64_t> inner(nnz);
    for (auto& x : inner) x = p.u64();
    for (std::uint64_t row = 0; row < rec.rows; ++row) {
      if (outer[row] > outer[row + 1] || outer[row + 1] > nnz) throw std::runtime_error("bad csr offsets");
      for (std::uint64_t k = outer[row]; k < outer[row + 1]; ++k) {
        if (inner[k] >= rec.cols) throw std::runtime_error("bad csr column");
        t.emplace_back(static_cast<int>(row), static_cast<int>(inner[k]), 0.0);
      }
    }
    for (auto& trip : t) trip = Eigen::Triplet<double>(trip.row(), trip.col(), p.f64());
    rec.sparse.resize(rows, cols);
    rec.sparse.setFromTriplets(t.begin(), t.end());
  }
  if (p.remaining() != 0) throw std::runtime_error("trailing bytes in " + rec.name);
  return rec;
}

}  // namespace cache_detail

/// Serializes operators to the cache container format.
inline std::vector<char> serialize_operators(const DecompositionOperators& ops) {
  using namespace cache_detail;
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u64(ops.has_projection_matrix() ? 4 : 3);
  write_csr(w, ops.shape(), "deviation", ops.deviation_map());
  write_csr(w, ops.shape(), "gradient", ops.gradient_map());
  write_dense(w, ops.shape(), "laplacian_pinv", ops.laplacian_pinv());
  if (ops.has_projection_matrix()) write_dense(w, ops.shape(), "projection", ops.projection());
  return w.bytes();
}

/// Throws std::runtime_error on any structural or checksum problem.
inline DecompositionOperators deserialize_operators(const std::vector<char>& bytes, const GameShape& shape,
                                                    const ShapeLimits& limits = {}) {
  using namespace cache_detail;
  Reader r(bytes.data(), bytes.size());
  if (std::string(r.take(8), 8) != std::string(kMagic, 8)) throw std::runtime_error("not an operator cache file");
  const std::uint64_t count = r.u64();
  if (count < 3 || count > 4) throw std::runtime_error("bad record count");
  std::map<std::string, Record> records;
  for (std::uint64_t k = 0; k < count; ++k) {
    Record rec = read_record(r, shape);
    records[rec.name] = std::move(rec);
  }
  if (r.remaining() != 0) throw std::runtime_error("trailing bytes in cache file");
  auto fetch = [&](const std::string& name, Storage storage) -> Record& {
    auto it = records.find(name);
    if (it == records.end() || it->second.storage != storage) throw std::runtime_error("missing record " + name);
    return it->second;
  };
  std::optional<Eigen::MatrixXd> projection;
  if (limits.materialize_projection(shape)) {
    if (auto it = records.find("projection"); it != records.end() && it->second.storage == Storage::dense) {
      projection = std::move(it->second.dense);
    }
  }
  auto ops = DecompositionOperators::from_parts(shape, std::move(fetch("deviation", Storage::csr).sparse),
                                                std::move(fetch("gradient", Storage::csr).sparse),
                                                std::move(fetch("laplacian_pinv", Storage::dense).dense),
                                                std::move(projection));
  if (!ops.has_projection_matrix() && limits.materialize_projection(shape)) {
    return DecompositionOperators::from_parts(shape, ops.deviation_map(), ops.gradient_map(), ops.laplacian_pinv(),
                                              ops.materialize_projection());
  }
  return ops;
}

/// Shape-keyed operator store backed by an optional directory. Thread-safe.
///
/// Files are written to a temporary name and renamed into place; readers
/// validate checksums and rebuild on any mismatch.
class OperatorCache {
 public:
  explicit OperatorCache(std::optional<std::filesystem::path> dir = std::nullopt, ShapeLimits limits = {})
      : dir_(std::move(dir)), limits_(limits) {}

  std::shared_ptr<const DecompositionOperators> get(const GameShape& shape) {
    const std::string key = shape.label();
    std::lock_guard lock(mutex_);
    if (auto it = memory_.find(key); it != memory_.end()) {
      ++memory_hits_;
      return it->second;
    }
    auto ops = std::make_shared<const DecompositionOperators>(load_or_build(shape));
    memory_.emplace(key, ops);
    return ops;
  }

  const ShapeLimits& limits() const { return limits_; }
  const std::optional<std::filesystem::path>& directory() const { return dir_; }
  std::size_t builds() const { return builds_; }
  std::size_t disk_hits() const { return disk_hits_; }
  std::size_t memory_hits() const { return memory_hits_; }

 private:
  DecompositionOperators load_or_build(const GameShape& shape) {
    limits_.check(shape);
    if (dir_) {
      const auto path = cache_file_path(*dir_, shape);
      if (std::filesystem::exists(path)) {
        try {
          std::ifstream in(path, std::ios::binary);
          std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
          auto ops = deserialize_operators(bytes, shape, limits_);
          ++disk_hits_;
          return ops;
        } catch (const std::exception& e) {
          std::cerr << "warning: discarding corrupt operator cache " << path.string() << ": " << e.what() << '\n';
        }
      }
    }
    auto ops = DecompositionOperators::build(shape, limits_);
    ++builds_;
    if (dir_) persist(ops, cache_file_path(*dir_, shape));
    return ops;
  }

  static void persist(const DecompositionOperators& ops, const std::filesystem::path& path) {
    std::filesystem::create_directories(path.parent_path());
    static std::atomic<std::uint64_t> counter{0};
    auto tmp = path;
    tmp += ".tmp." + std::to_string(std::random_device{}()) + "." + std::to_string(counter++);
    {
      const auto bytes = serialize_operators(ops);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!out) throw std::runtime_error("failed to write operator cache " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
  }

  std::optional<std::filesystem::path> dir_;
  ShapeLimits limits_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const DecompositionOperators>> memory_;
  std::size_t builds_ = 0;
  std::size_t disk_hits_ = 0;
  std::size_t memory_hits_ = 0;
};

/// Loads operators for `shape` from `cache_dir`, building and persisting
/// them on a miss or a corrupt file.
inline DecompositionOperators operator_cache_get(const GameShape& shape, const std::filesystem::path& cache_dir,
                                                 const ShapeLimits& limits = {}) {
  OperatorCache cache(cache_dir, limits);
  return *cache.get(shape);
}

}  // namespace potlab
