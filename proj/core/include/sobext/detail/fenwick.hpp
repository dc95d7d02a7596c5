#pragma once

#include <cstddef>
#include <vector>

#include "sobext/exact_sum.hpp"

namespace sobext::detail {

/// Fenwick tree over value ranks holding exact sums of f*w and of w.
class ExactFenwick {
 public:
  explicit ExactFenwick(std::size_t n = 0) : fw_(n + 1), w_(n + 1) { reset(); }

  std::size_t size() const { return fw_.size() - 1; }

  void reset() {
    for (auto& s : fw_) s.clear();
    for (auto& s : w_) s.clear();
  }

  void add_point(std::size_t pos, double f, double w) {
    for (std::size_t i = pos + 1; i < fw_.size(); i += i & (~i + 1)) {
      fw_[i].add_product(f, w);
      w_[i].add(w);
    }
  }

  /// Accumulates the first `count` ranks into fw and w.
  void prefix(std::size_t count, ExactSum& fw, ExactSum& w) const {
    for (std::size_t i = count; i > 0; i -= i & (~i + 1)) {
      fw.add(fw_[i]);
      w.add(w_[i]);
    }
  }

 private:
  std::vector<ExactSum> fw_;
  std::vector<ExactSum> w_;
};

}  // namespace sobext::detail
