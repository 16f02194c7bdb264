#pragma once

#include <cstdint>
#include <random>

namespace kpzlab {

// splitmix64 finalizer, used to derive per-sample keys
std::uint64_t mix64(std::uint64_t x);

// Derived key for stream `index` under master seed `seed`.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index);

// Gaussian source owned by one simulation instance. polar-method normals on
// mt19937_64 so draws do not depend on the standard library's distribution.
class Stream {
public:
  explicit Stream(std::uint64_t key = 0);
  Stream(std::uint64_t seed, std::uint64_t index) : Stream(stream_key(seed, index)) {}

  double uniform();   // (0, 1)
  double gaussian();

  std::uint64_t key() const { return key_; }

private:
  std::uint64_t key_;
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace kpzlab
