#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace cpg {

using State = uint32_t;
using LetterId = uint32_t;
using Color = int;

constexpr uint32_t kNoId = UINT32_MAX;

/// Bad arguments, malformed input, contract violations by the caller.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A configured cap was exceeded; carries the cap name for reporting.
struct ResourceError : std::runtime_error {
  std::string cap;
  explicit ResourceError(std::string cap_name, const std::string& what)
      : std::runtime_error(what), cap(std::move(cap_name)) {}
};

inline void hash_mix(size_t& seed, size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

/// Deterministic splitmix64 generator; identical streams on every platform,
/// unlike the std distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }
  int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<uint64_t>(hi - lo + 1))); }
  bool chance(double p) { return static_cast<double>(next() >> 11) * 0x1.0p-53 < p; }

 private:
  uint64_t state_;
};

/// Append-only value interner with dense stable ids.
template <typename Key, typename Hash = std::hash<Key>>
class Interner {
 public:
  uint32_t intern(const Key& k) {
    auto it = ids_.find(k);
    if (it != ids_.end()) return it->second;
    uint32_t id = static_cast<uint32_t>(keys_.size());
    keys_.push_back(k);
    ids_.emplace(k, id);
    return id;
  }
  const Key& at(uint32_t id) const { return keys_.at(id); }
  uint32_t find(const Key& k) const {
    auto it = ids_.find(k);
    return it == ids_.end() ? kNoId : it->second;
  }
  size_t size() const { return keys_.size(); }

 private:
  std::vector<Key> keys_;
  std::unordered_map<Key, uint32_t, Hash> ids_;
};

}  // namespace cpg
