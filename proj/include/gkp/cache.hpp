#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include "gkp/error.hpp"
#include "gkp/fock.hpp"

namespace gkp::cache {

namespace fs = std::filesystem;

// On-disk entry, all integers little-endian:
//   magic "GKPOPC\0\1" (8 bytes) | u32 version | u32 precision bits (64 or 128)
//   | u64 rows | u64 cols | 32-byte SHA-256 of the key | u32 key length | key bytes
//   | rows*cols complex entries, row-major, as float pairs (64) or double pairs (128).
inline constexpr char kMagic[8] = {'G', 'K', 'P', 'O', 'P', 'C', '\0', '\1'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr const char* kSuffix = ".gkpop";

enum class Precision : std::uint32_t { c64 = 64, c128 = 128 };

inline std::string sha256_hex(const std::string& s) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(s.data(), s.size(), md, &len, EVP_sha256(), nullptr) != 1) throw NumericFailure("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

inline std::string hex_to_bytes(const std::string& h) {
  std::string out;
  for (std::size_t i = 0; i + 1 < h.size(); i += 2) out += static_cast<char>(std::stoi(h.substr(i, 2), nullptr, 16));
  return out;
}

inline std::string bytes_to_hex(const std::string& b) {
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : b) {
    out += hex[c >> 4];
    out += hex[c & 15];
  }
  return out;
}

// Canonical key of a Pauli readout operator.
inline std::string pauli_key(fock::Pauli which, double lam, double delta, std::size_t d, std::size_t n_cut, bool smeared,
                             std::size_t expand_factor) {
  std::ostringstream os;
  os.precision(17);
  os << "kind=pauli-" << "XYZ"[static_cast<int>(which)] << ";lam=" << lam << ";delta=" << delta << ";d=" << d
     << ";ncut=" << n_cut << ";smear=" << (smeared ? "biased-tanh" : "none") << ";expand=" << expand_factor;
  return os.str();
}

struct EntryInfo {
  fs::path path;
  std::string key;
  std::string digest_hex;
  std::uint64_t rows = 0, cols = 0;
  Precision precision = Precision::c128;
  bool digest_ok = false;  // header digest matches both the key and the file name
};

namespace detail {
template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw NumericFailure("cache: truncated entry");
  return v;
}

inline EntryInfo read_header(std::istream& is, const fs::path& p) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kMagic, 8) != 0) throw NumericFailure("cache: bad magic in " + p.string());
  if (get<std::uint32_t>(is) != kVersion) throw NumericFailure("cache: unsupported version in " + p.string());
  EntryInfo e;
  e.path = p;
  const auto prec = get<std::uint32_t>(is);
  if (prec != 64 && prec != 128) throw NumericFailure("cache: bad precision in " + p.string());
  e.precision = static_cast<Precision>(prec);
  e.rows = get<std::uint64_t>(is);
  e.cols = get<std::uint64_t>(is);
  std::string digest(32, '\0');
  is.read(digest.data(), 32);
  e.digest_hex = bytes_to_hex(digest);
  const auto klen = get<std::uint32_t>(is);
  e.key.resize(klen);
  is.read(e.key.data(), klen);
  if (!is) throw NumericFailure("cache: truncated key in " + p.string());
  e.digest_ok = sha256_hex(e.key) == e.digest_hex && p.stem().string() == e.digest_hex;
  return e;
}
}  // namespace detail

// In-memory operator cache with optional disk backing; concurrent readers,
// exclusive insertion. Disk writes go through a temp file and a rename.
class OperatorCache {
 public:
  explicit OperatorCache(fs::path dir = {}, Precision prec = Precision::c128) : dir_(std::move(dir)), prec_(prec) {}

  const fs::path& dir() const { return dir_; }
  Precision precision() const { return prec_; }

  std::shared_ptr<const fock::CMat> find(const std::string& key) {
    {
      std::shared_lock lk(mu_);
      auto it = mem_.find(key);
      if (it != mem_.end()) return it->second;
    }
    if (dir_.empty()) return nullptr;
    const fs::path p = path_for(key);
    if (!fs::exists(p)) return nullptr;
    auto m = std::make_shared<const fock::CMat>(load(p, key));
    std::unique_lock lk(mu_);
    return mem_.emplace(key, m).first->second;
  }

  template <class Builder>
  std::shared_ptr<const fock::CMat> get_or_build(const std::string& key, Builder build) {
    if (auto hit = find(key)) return hit;
    auto m = std::make_shared<const fock::CMat>(build());
    std::unique_lock lk(mu_);
    auto [it, fresh] = mem_.emplace(key, m);
    if (fresh && !dir_.empty()) store(key, *m);
    return it->second;
  }

  std::vector<EntryInfo> list() const {
    std::vector<EntryInfo> out;
    if (dir_.empty() || !fs::exists(dir_)) return out;
    for (const auto& de : fs::directory_iterator(dir_)) {
      if (de.path().extension() != kSuffix) continue;
      std::ifstream is(de.path(), std::ios::binary);
      out.push_back(detail::read_header(is, de.path()));
    }
    std::sort(out.begin(), out.end(), [](const EntryInfo& a, const EntryInfo& b) { return a.path < b.path; });
    return out;
  }

  std::size_t purge() {
    std::unique_lock lk(mu_);
    mem_.clear();
    std::size_t n = 0;
    if (dir_.empty() || !fs::exists(dir_)) return 0;
    for (const auto& de : fs::directory_iterator(dir_))
      if (de.path().extension() == kSuffix) n += fs::remove(de.path()) ? 1 : 0;
    return n;
  }

  fs::path path_for(const std::string& key) const { return dir_ / (sha256_hex(key) + kSuffix); }

 private:
  void store(const std::string& key, const fock::CMat& m) const {
    fs::create_directories(dir_);
    const fs::path final_path = path_for(key);
    const fs::path tmp = final_path.string() + ".tmp";
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) throw NumericFailure("cache: cannot write " + tmp.string());
      os.write(kMagic, 8);
      detail::put<std::uint32_t>(os, kVersion);
      detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(prec_));
      detail::put<std::uint64_t>(os, static_cast<std::uint64_t>(m.rows()));
      detail::put<std::uint64_t>(os, static_cast<std::uint64_t>(m.cols()));
      os.write(hex_to_bytes(sha256_hex(key)).data(), 32);
      detail::put<std::uint32_t>(os, static_cast<std::uint32_t>(key.size()));
      os.write(key.data(), static_cast<std::streamsize>(key.size()));
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          if (prec_ == Precision::c128) {
            detail::put<double>(os, m(r, c).real());
            detail::put<double>(os, m(r, c).imag());
          } else {
            detail::put<float>(os, static_cast<float>(m(r, c).real()));
            detail::put<float>(os, static_cast<float>(m(r, c).imag()));
          }
        }
      if (!os) throw NumericFailure("cache: write failed for " + tmp.string());
    }
    fs::rename(tmp, final_path);
  }

  static fock::CMat load(const fs::path& p, const std::string& key) {
    std::ifstream is(p, std::ios::binary);
    const EntryInfo e = detail::read_header(is, p);
    if (e.key != key || !e.digest_ok) throw NumericFailure("cache: key mismatch in " + p.string());
    fock::CMat m(static_cast<Eigen::Index>(e.rows), static_cast<Eigen::Index>(e.cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (e.precision == Precision::c128) {
          const double re = detail::get<double>(is), im = detail::get<double>(is);
          m(r, c) = {re, im};
        } else {
          const float re = detail::get<float>(is), im = detail::get<float>(is);
          m(r, c) = {re, im};
        }
      }
    return m;
  }

  fs::path dir_;
  Precision prec_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<const fock::CMat>> mem_;
};

}  // namespace gkp::cache
