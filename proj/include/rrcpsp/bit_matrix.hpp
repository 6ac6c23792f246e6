#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace rrcpsp {

/// Square boolean matrix stored as packed 64-bit rows. Used for reachability
/// (transitive closure) where row i holds every node reachable from i.
class BitMatrix {
 public:
  BitMatrix() = default;
  explicit BitMatrix(std::size_t n)
      : n_(n), words_((n + 63) / 64), bits_(n * ((n + 63) / 64), 0) {}

  std::size_t size() const noexcept { return n_; }

  bool test(std::size_t i, std::size_t j) const {
    return (bits_[i * words_ + j / 64] >> (j % 64)) & 1U;
  }
  void set(std::size_t i, std::size_t j) {
    bits_[i * words_ + j / 64] |= std::uint64_t{1} << (j % 64);
  }
  void reset(std::size_t i, std::size_t j) {
    bits_[i * words_ + j / 64] &= ~(std::uint64_t{1} << (j % 64));
  }

  // row(dst) |= row(src)
  void or_row(std::size_t dst, std::size_t src) {
    for (std::size_t w = 0; w < words_; ++w) bits_[dst * words_ + w] |= bits_[src * words_ + w];
  }

  // True when every bit of row(i) of *this is also set in row(i) of other, for all i.
  bool subset_of(const BitMatrix& other) const {
    for (std::size_t w = 0; w < bits_.size(); ++w)
      if ((bits_[w] & ~other.bits_[w]) != 0) return false;
    return true;
  }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : bits_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  std::size_t hash() const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (auto w : bits_) {
      h ^= std::hash<std::uint64_t>{}(w);
      h *= 1099511628211ULL;
    }
    return h;
  }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

struct BitMatrixHash {
  std::size_t operator()(const BitMatrix& m) const noexcept { return m.hash(); }
};

}  // namespace rrcpsp
