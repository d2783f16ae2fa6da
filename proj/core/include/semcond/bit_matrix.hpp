#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace semcond {

/// Square boolean matrix with bit-packed rows.
class BitMatrix {
 public:
  BitMatrix() = default;
  explicit BitMatrix(std::size_t n) : n_(n), words_((n + 63) / 64), data_(n * words_, 0) {}

  std::size_t size() const noexcept { return n_; }

  bool test(std::size_t i, std::size_t j) const {
    return (data_[i * words_ + j / 64] >> (j % 64)) & 1u;
  }
  void set(std::size_t i, std::size_t j, bool v = true) {
    auto& w = data_[i * words_ + j / 64];
    const std::uint64_t bit = std::uint64_t{1} << (j % 64);
    w = v ? (w | bit) : (w & ~bit);
  }

  /// row(dst) |= row(src) of another (or the same) matrix.
  void or_row(std::size_t dst, const BitMatrix& other, std::size_t src) {
    for (std::size_t w = 0; w < words_; ++w) data_[dst * words_ + w] |= other.data_[src * words_ + w];
  }
  bool rows_intersect(std::size_t i, const BitMatrix& other, std::size_t j) const {
    for (std::size_t w = 0; w < words_; ++w) {
      if (data_[i * words_ + w] & other.data_[j * words_ + w]) return true;
    }
    return false;
  }
  std::size_t row_count(std::size_t i) const;

  const std::uint64_t* row_words(std::size_t i) const { return &data_[i * words_]; }
  std::uint64_t* row_words(std::size_t i) { return &data_[i * words_]; }
  std::size_t words_per_row() const noexcept { return words_; }

  friend bool operator==(const BitMatrix&, const BitMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> data_;
};

inline std::size_t BitMatrix::row_count(std::size_t i) const {
  std::size_t c = 0;
  for (std::size_t w = 0; w < words_; ++w) c += static_cast<std::size_t>(__builtin_popcountll(data_[i * words_ + w]));
  return c;
}

}  // namespace semcond
