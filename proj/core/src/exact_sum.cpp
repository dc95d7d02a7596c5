#include "sobext/exact_sum.hpp"

#include <algorithm>

namespace sobext {

namespace {

constexpr std::int64_t kRadix = std::int64_t{1} << 32;

// Carry-propagates digits[0, len) so that every digit except the last lies in
// [0, 2^32). Returns the new length (may grow while the top carries out).
int propagate(std::int64_t* digits, int len, int capacity) {
  for (int k = 0; k + 1 < len; ++k) {
    const std::int64_t carry = digits[k] >> 32;  // floor division
    digits[k] -= carry * kRadix;
    digits[k + 1] += carry;
  }
  while (len < capacity && (digits[len - 1] >= kRadix || digits[len - 1] < -(kRadix >> 1))) {
    const std::int64_t carry = digits[len - 1] >> 32;
    digits[len - 1] -= carry * kRadix;
    digits[len] = carry;
    ++len;
  }
  return len;
}

}  // namespace

void ExactSum::normalize() {
  if (lo_ > hi_) {
    adds_ = 0;
    return;
  }
  const int len = propagate(limb_.data() + lo_, hi_ - lo_ + 1, kLimbs - lo_);
  hi_ = lo_ + len - 1;
  adds_ = 1;
}

bool ExactSum::is_zero() const { return value() == 0.0; }

void ExactSum::add_scaled(const ExactSum& other, double s) {
  if (other.lo_ > other.hi_) return;
  const Parts ps = split(s);
  if (ps.mantissa == 0) return;
  // Snapshot the range first: other may alias *this.
  const int lo = other.lo_;
  const int hi = other.hi_;
  std::array<std::int64_t, kLimbs> src;
  std::copy(other.limb_.begin() + lo, other.limb_.begin() + hi + 1, src.begin() + lo);
  for (int k = lo; k <= hi; ++k) {
    const std::int64_t v = src[k];
    if (v == 0) continue;
    const detail::i128 prod = static_cast<detail::i128>(v) * static_cast<detail::i128>(ps.mantissa);
    const bool neg = (prod < 0) != ps.negative;
    const auto mag = static_cast<detail::u128>(prod < 0 ? -prod : prod);
    const int pos = 32 * k - kBias + ps.exponent;
    add_magnitude(static_cast<std::uint64_t>(mag), pos, neg);
    add_magnitude(static_cast<std::uint64_t>(mag >> 64), pos + 64, neg);
  }
}

double ExactSum::value() const {
  if (lo_ > hi_) return 0.0;
  // Two zero guard digits below, room for carries above.
  std::array<std::int64_t, kLimbs + 4> d{};
  int len = hi_ - lo_ + 1;
  std::copy(limb_.begin() + lo_, limb_.begin() + hi_ + 1, d.begin() + 2);
  len = propagate(d.data() + 2, len, kLimbs + 2 - lo_) + 2;

  bool negative = false;
  int top = len - 1;
  while (top >= 2 && d[top] == 0) --top;
  if (top < 2) return 0.0;
  if (d[top] < 0) {
    negative = true;
    for (int k = 2; k < len; ++k) d[k] = -d[k];
    len = propagate(d.data() + 2, len - 2, kLimbs + 2 - lo_) + 2;
    top = len - 1;
    while (top >= 2 && d[top] == 0) --top;
  }

  const detail::u128 v = (static_cast<detail::u128>(d[top]) << 64) |
                              (static_cast<detail::u128>(d[top - 1]) << 32) |
                              static_cast<detail::u128>(d[top - 2]);
  bool sticky = false;
  for (int k = 2; k < top - 2; ++k) sticky = sticky || d[k] != 0;

  const auto high = static_cast<std::uint64_t>(v >> 64);
  const int lead = 64 + (63 - std::countl_zero(high));  // index of leading bit, in [64, 95]
  const int shift = lead - 63;
  std::uint64_t u = static_cast<std::uint64_t>(v >> shift);
  sticky = sticky || (v & ((static_cast<detail::u128>(1) << shift) - 1)) != 0;
  // Round-to-odd at 64 bits followed by round-to-nearest at 53 bits is a
  // correct rounding of the exact value.
  if (sticky) u |= 1u;
  const double mag = static_cast<double>(u);
  // d[2] carries weight 2^(32*lo_ - kBias); d[top-2] is (top-4) digits higher.
  const int exponent = 32 * (lo_ + top - 4) - kBias + shift;
  const double out = std::ldexp(mag, exponent);
  return negative ? -out : out;
}

}  // namespace sobext
