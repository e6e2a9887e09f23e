#pragma once

// Order-fixed parallel evaluation.
//
// Index ranges are cut into fixed chunks of kChunkSize. Chunks may run on
// any worker, but every chunk's partial result is stored in its own slot
// and the slots are folded in ascending chunk order. The chunk layout does
// not depend on the worker count, so neither does any floating-point sum.

#include <cstddef>
#include <span>
#include <vector>

namespace serconv {

inline constexpr std::size_t kChunkSize = 4096;

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if ((sum_ >= 0 ? sum_ : -sum_) >= (x >= 0 ? x : -x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class Executor {
 public:
  explicit Executor(int workers = 1);

  int workers() const noexcept { return workers_; }

  /// Calls fn(begin, end, chunk) for every kChunkSize-wide chunk of [0, n).
  template <class Fn>
  void for_chunks(std::size_t n, Fn&& fn) const {
    const std::ptrdiff_t chunks = static_cast<std::ptrdiff_t>((n + kChunkSize - 1) / kChunkSize);
#pragma omp parallel for num_threads(workers_) schedule(static) if (workers_ > 1 && chunks > 1)
    for (std::ptrdiff_t c = 0; c < chunks; ++c) {
      const std::size_t begin = static_cast<std::size_t>(c) * kChunkSize;
      const std::size_t end = begin + kChunkSize < n ? begin + kChunkSize : n;
      fn(begin, end, static_cast<std::size_t>(c));
    }
  }

  /// Sum of term(k) for k in [0, n), reduced chunk by chunk in fixed order.
  template <class Term>
  double ordered_sum(std::size_t n, Term&& term) const {
    std::vector<double> partial((n + kChunkSize - 1) / kChunkSize, 0.0);
    for_chunks(n, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
      CompensatedSum acc;
      for (std::size_t k = begin; k < end; ++k) acc.add(term(k));
      partial[chunk] = acc.value();
    });
    CompensatedSum total;
    for (double p : partial) total.add(p);
    return total.value();
  }

  double ordered_sum(std::span<const double> values) const {
    return ordered_sum(values.size(), [values](std::size_t k) { return values[k]; });
  }

 private:
  int workers_;
};

}  // namespace serconv
