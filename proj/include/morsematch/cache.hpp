#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <stdexcept>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace morsematch {

/// Bumped whenever cached results could change meaning.
inline constexpr std::string_view kCacheVersionTag = "morsematch-cache-1";

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char hex[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[std::size_t(i)] = hex[v & 15];
  return s;
}

/// Key over the canonical inputs. `version` defaults to the current tag.
inline std::string cache_key(std::string_view spec, std::string_view variant, std::string_view operation,
                             std::string_view version = kCacheVersionTag) {
  std::string material;
  for (auto part : {version, spec, variant, operation}) {
    material += part;
    material += '\x1f';
  }
  return hex64(fnv1a64(material));
}

/// Content-addressed result store. Each entry is one file:
///
///   morsematch-cache v1 <fnv1a64 of payload> <created unix seconds> <payload bytes>\n
///   <payload>
///
/// Entries failing the size or checksum test are ignored and listed in problems().
class ResultCache {
 public:
  explicit ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  /// MORSEMATCH_CACHE, else $HOME/.cache/morsematch, else ./.morsematch-cache.
  static std::filesystem::path default_dir() {
    if (const char* env = std::getenv("MORSEMATCH_CACHE"); env && *env) return env;
    if (const char* home = std::getenv("HOME"); home && *home) return std::filesystem::path(home) / ".cache" / "morsematch";
    return ".morsematch-cache";
  }

  const std::filesystem::path& dir() const noexcept { return dir_; }
  const std::vector<std::string>& problems() const noexcept { return problems_; }

  std::optional<std::string> get(const std::string& key) {
    const auto path = entry_path(key);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::string header;
    if (!std::getline(in, header)) return reject(path, "missing header");
    std::istringstream hs(header);
    std::string magic, version, checksum;
    std::uint64_t created = 0, size = 0;
    if (!(hs >> magic >> version >> checksum >> created >> size) || magic != "morsematch-cache" || version != "v1")
      return reject(path, "bad header");
    std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (payload.size() != size) return reject(path, "payload size mismatch");
    if (hex64(fnv1a64(payload)) != checksum) return reject(path, "checksum mismatch");
    return payload;
  }

  /// Atomic: the entry is written to a temporary file and renamed into place.
  void put(const std::string& key, const std::string& payload) {
    std::filesystem::create_directories(dir_);
    const auto created = std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count();
    static std::atomic<unsigned> counter{0};
    const auto tmp = dir_ / (key + ".tmp." + std::to_string(counter++) + "." +
                             std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write cache entry in " + dir_.string());
      out << "morsematch-cache v1 " << hex64(fnv1a64(payload)) << ' ' << created << ' ' << payload.size() << '\n'
          << payload;
      out.flush();
      if (!out) throw std::runtime_error("failed writing cache entry " + tmp.string());
    }
    std::filesystem::rename(tmp, entry_path(key));
  }

  std::filesystem::path entry_path(const std::string& key) const { return dir_ / (key + ".entry"); }

 private:
  std::optional<std::string> reject(const std::filesystem::path& path, const std::string& why) {
    problems_.push_back(path.string() + ": " + why + "; entry ignored");
    return std::nullopt;
  }

  std::filesystem::path dir_;
  std::vector<std::string> problems_;
};

}  // namespace morsematch
