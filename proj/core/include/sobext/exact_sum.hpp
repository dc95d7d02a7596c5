#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace sobext {

namespace detail {
__extension__ using u128 = unsigned __int128;
__extension__ using i128 = __int128;
}  // namespace detail

/// Exact accumulator for sums of doubles and of products of two doubles.
///
/// The value is held as a fixed-point integer spread over 32-bit digits stored
/// in signed 64-bit limbs (carry-save), so additions never round. `value()`
/// returns the correctly rounded (nearest-even) double of the exact sum, which
/// makes the result independent of summation order.
///
/// Only limbs inside [lo_, hi_] are meaningful; the rest of the array is left
/// uninitialised so that clearing and copying cost O(active range).
class ExactSum {
 public:
  ExactSum() = default;
  ExactSum(const ExactSum& other) { copy_from(other); }
  ExactSum& operator=(const ExactSum& other) {
    if (this != &other) copy_from(other);
    return *this;
  }

  void clear() {
    lo_ = 1;
    hi_ = 0;
    adds_ = 0;
  }

  bool is_zero() const;

  void add(double x) {
    Parts p = split(x);
    add_magnitude(p.mantissa, p.exponent, p.negative);
  }
  void sub(double x) { add(-x); }

  /// += a * b, exactly.
  void add_product(double a, double b, bool negate = false) {
    Parts pa = split(a);
    Parts pb = split(b);
    if (pa.mantissa == 0 || pb.mantissa == 0) return;
    detail::u128 prod = static_cast<detail::u128>(pa.mantissa) * pb.mantissa;
    bool neg = (pa.negative != pb.negative) != negate;
    int e = pa.exponent + pb.exponent;
    add_magnitude(static_cast<std::uint64_t>(prod), e, neg);
    add_magnitude(static_cast<std::uint64_t>(prod >> 64), e + 64, neg);
  }
  void sub_product(double a, double b) { add_product(a, b, true); }

  void add(const ExactSum& other) { merge(other, false); }
  void sub(const ExactSum& other) { merge(other, true); }

  /// += s * other, exactly.
  void add_scaled(const ExactSum& other, double s);

  /// Correctly rounded value of the exact sum.
  double value() const;

 private:
  static constexpr int kLimbs = 144;
  // Bit position p (value 2^p) lives at offset p + kBias; covers every bit of a
  // product of two finite doubles with room for carries.
  static constexpr int kBias = 2240;
  static constexpr std::int64_t kNormalizeAfter = std::int64_t{1} << 29;

  struct Parts {
    std::uint64_t mantissa;
    int exponent;
    bool negative;
  };

  static Parts split(double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    const bool neg = (bits >> 63) != 0;
    const int biased = static_cast<int>((bits >> 52) & 0x7ff);
    const std::uint64_t frac = bits & ((std::uint64_t{1} << 52) - 1);
    if (biased == 0x7ff) throw std::domain_error("ExactSum: non-finite input");
    if (biased == 0) return {frac, -1074, neg};
    return {frac | (std::uint64_t{1} << 52), biased - 1075, neg};
  }

  void ensure(int a, int b) {
    if (lo_ > hi_) {
      for (int k = a; k <= b; ++k) limb_[k] = 0;
      lo_ = a;
      hi_ = b;
      return;
    }
    if (a < lo_) {
      for (int k = a; k < lo_; ++k) limb_[k] = 0;
      lo_ = a;
    }
    if (b > hi_) {
      for (int k = hi_ + 1; k <= b; ++k) limb_[k] = 0;
      hi_ = b;
    }
  }

  void add_magnitude(std::uint64_t mag, int bit_pos, bool negative) {
    if (mag == 0) return;
    const int q = bit_pos + kBias;
    if (q < 0 || (q >> 5) + 3 >= kLimbs) throw std::range_error("ExactSum: exponent out of range");
    const int k = q >> 5;
    const detail::u128 v = static_cast<detail::u128>(mag) << (q & 31);
    const auto d0 = static_cast<std::int64_t>(static_cast<std::uint64_t>(v) & 0xffffffffu);
    const auto d1 = static_cast<std::int64_t>(static_cast<std::uint64_t>(v >> 32) & 0xffffffffu);
    const auto d2 = static_cast<std::int64_t>(static_cast<std::uint64_t>(v >> 64));
    const int top = d2 != 0 ? k + 2 : (d1 != 0 ? k + 1 : k);
    ensure(k, top);
    if (negative) {
      limb_[k] -= d0;
      if (top >= k + 1) limb_[k + 1] -= d1;
      if (top == k + 2) limb_[k + 2] -= d2;
    } else {
      limb_[k] += d0;
      if (top >= k + 1) limb_[k + 1] += d1;
      if (top == k + 2) limb_[k + 2] += d2;
    }
    if (++adds_ >= kNormalizeAfter) normalize();
  }

  void merge(const ExactSum& other, bool negate) {
    if (other.lo_ > other.hi_) return;
    ensure(other.lo_, other.hi_);
    if (negate) {
      for (int k = other.lo_; k <= other.hi_; ++k) limb_[k] -= other.limb_[k];
    } else {
      for (int k = other.lo_; k <= other.hi_; ++k) limb_[k] += other.limb_[k];
    }
    adds_ += other.adds_;
    if (adds_ >= kNormalizeAfter) normalize();
  }

  void copy_from(const ExactSum& other) {
    lo_ = other.lo_;
    hi_ = other.hi_;
    adds_ = other.adds_;
    for (int k = lo_; k <= hi_; ++k) limb_[k] = other.limb_[k];
  }

  void normalize();

  std::array<std::int64_t, kLimbs> limb_;
  int lo_ = 1;
  int hi_ = 0;
  std::int64_t adds_ = 0;
};

}  // namespace sobext
