#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wcp {

// Fenwick (binary indexed) tree over n slots supporting point updates,
// prefix sums and weighted selection, all in O(log n).
template <class T>
class Fenwick {
  public:
    Fenwick() = default;
    explicit Fenwick(std::size_t n) : n_(n), tree_(n + 1, T{}) {
        mask_ = 1;
        while ((mask_ << 1) <= n_) mask_ <<= 1;
    }

    std::size_t size() const { return n_; }

    void add(std::size_t i, T delta) {
        for (std::size_t k = i + 1; k <= n_; k += k & (~k + 1)) tree_[k] += delta;
    }

    // sum of slots [0, i)
    T prefix(std::size_t i) const {
        T s{};
        for (std::size_t k = i; k > 0; k -= k & (~k + 1)) s += tree_[k];
        return s;
    }

    T total() const { return prefix(n_); }

    // O(n) rebuild from raw slot values
    void assign(std::span<const T> values) {
        n_ = values.size();
        tree_.assign(n_ + 1, T{});
        for (std::size_t i = 0; i < n_; ++i) {
            tree_[i + 1] += values[i];
            const std::size_t parent = (i + 1) + ((i + 1) & (~(i + 1) + 1));
            if (parent <= n_) tree_[parent] += tree_[i + 1];
        }
        mask_ = 1;
        while ((mask_ << 1) <= n_) mask_ <<= 1;
    }

    // Smallest index i with prefix(i+1) > u, i.e. the slot containing
    // cumulative coordinate u. Requires 0 <= u < total(); with floating T a
    // roundoff edge can return n_ or a zero slot, callers guard for that.
    std::size_t select(T u) const {
        std::size_t pos = 0;
        T rem = u;
        for (std::size_t step = mask_; step > 0; step >>= 1) {
            const std::size_t next = pos + step;
            if (next <= n_ && tree_[next] <= rem) {
                pos = next;
                rem -= tree_[next];
            }
        }
        return pos;  // 0-based slot index; == n_ only on roundoff overflow
    }

  private:
    std::size_t n_ = 0;
    std::size_t mask_ = 1;
    std::vector<T> tree_;
};

}  // namespace wcp
