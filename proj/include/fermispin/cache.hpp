#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "fermispin/rational_matrix.hpp"
#include "fermispin/rho.hpp"

namespace fermispin {

enum class Builder { pairing, slater, singlet_projector };

inline std::string builder_name(Builder b) {
  switch (b) {
    case Builder::pairing:
      return "pairing";
    case Builder::slater:
      return "slater";
    case Builder::singlet_projector:
      return "projector";
  }
  return "unknown";
}

inline std::optional<Builder> builder_from_name(const std::string& s) {
  if (s == "pairing") return Builder::pairing;
  if (s == "slater") return Builder::slater;
  if (s == "projector") return Builder::singlet_projector;
  return std::nullopt;
}

inline RationalMatrix run_builder(Builder b, int n, int max_n = kDefaultMaxParticles) {
  switch (b) {
    case Builder::pairing:
      return build_rho_pairing(n, max_n);
    case Builder::slater:
      return build_rho_slater_oracle(n);
    case Builder::singlet_projector:
      return build_singlet_projector(n, max_n).projector;
  }
  throw std::invalid_argument("unknown builder");
}

namespace detail {

inline constexpr int kCacheFormatVersion = 1;

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string payload_text(const RationalMatrix& m) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < m.dim(); ++i) {
    for (Eigen::Index j = 0; j < m.dim(); ++j) {
      if (j) out << ' ';
      out << m.num(i, j);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace detail

inline std::filesystem::path cache_file_path(const std::filesystem::path& dir, Builder b, int n) {
  return dir / (builder_name(b) + "_n" + std::to_string(n) + ".fspn");
}

/// Writes the matrix as a self-describing text file, atomically
/// (temp file + rename). Returns false (after warning) if the directory is
/// not writable; caching is best-effort.
inline bool store_cached_matrix(const std::filesystem::path& path, const RationalMatrix& m, Builder b,
                                std::ostream* warn = nullptr) {
  const std::string payload = detail::payload_text(m);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) {
      if (warn) *warn << "warning: cache directory not writable, proceeding without cache: " << path << '\n';
      return false;
    }
    out << "fermispin-matrix v" << detail::kCacheFormatVersion << '\n';
    out << "builder " << builder_name(b) << '\n';
    out << "n " << m.n << '\n';
    out << "dim " << m.dim() << '\n';
    out << "den " << m.den << '\n';
    out << "checksum " << std::hex << detail::fnv1a64(payload) << std::dec << '\n';
    out << "data\n" << payload;
    if (!out) {
      if (warn) *warn << "warning: cache write failed, proceeding without cache: " << path << '\n';
      return false;
    }
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    if (warn) *warn << "warning: cache rename failed, proceeding without cache: " << path << '\n';
    std::filesystem::remove(tmp, ec);
    return false;
  }
  return true;
}

/// Reads a cached matrix back; any header mismatch, version skew or
/// checksum failure yields nullopt so the caller rebuilds from scratch.
inline std::optional<RationalMatrix> load_cached_matrix(const std::filesystem::path& path, Builder b, int n) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string magic, builder_tag, builder_value, key;
  int version = 0;
  if (!(in >> magic >> key) || magic != "fermispin-matrix" || key.size() < 2 || key[0] != 'v') return std::nullopt;
  version = std::atoi(key.c_str() + 1);
  if (version != detail::kCacheFormatVersion) return std::nullopt;
  if (!(in >> builder_tag >> builder_value) || builder_tag != "builder" || builder_value != builder_name(b))
    return std::nullopt;
  int file_n = 0;
  Eigen::Index dim = 0;
  std::int64_t den = 0;
  std::uint64_t checksum = 0;
  if (!(in >> key >> file_n) || key != "n" || file_n != n) return std::nullopt;
  if (!(in >> key >> dim) || key != "dim" || dim != static_cast<Eigen::Index>(dimension(n))) return std::nullopt;
  if (!(in >> key >> den) || key != "den" || den <= 0) return std::nullopt;
  if (!(in >> key >> std::hex >> checksum >> std::dec) || key != "checksum") return std::nullopt;
  if (!(in >> key) || key != "data") return std::nullopt;

  RationalMatrix m = make_zero_matrix(n, den);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      if (!(in >> m.num(i, j))) return std::nullopt;
  if (detail::fnv1a64(detail::payload_text(m)) != checksum) return std::nullopt;
  return m;
}

/// Serves the matrix from the cache directory when an intact file exists,
/// otherwise builds it and stores the result. Without a directory every
/// call is a fresh build. Cached reads are entrywise identical to a fresh
/// build because both sides are canonical exact integers.
inline RationalMatrix cache_get_or_build(Builder b, int n, const std::optional<std::filesystem::path>& dir,
                                         int max_n = kDefaultMaxParticles, std::ostream* warn = nullptr) {
  if (!dir) return run_builder(b, n, max_n);
  const auto path = cache_file_path(*dir, b, n);
  if (auto cached = load_cached_matrix(path, b, n)) return std::move(*cached);
  RationalMatrix fresh = run_builder(b, n, max_n);
  store_cached_matrix(path, fresh, b, warn);
  return fresh;
}

}  // namespace fermispin
