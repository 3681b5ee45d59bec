#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace percospec {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) { reset(n); }

  void reset(std::size_t n) {
    parent_.resize(n);
    std::iota(parent_.begin(), parent_.end(), 0u);
    size_.assign(n, 1u);
  }
  std::size_t add() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    size_.push_back(1u);
    return parent_.size() - 1;
  }
  [[nodiscard]] std::size_t size() const { return parent_.size(); }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }
  bool same(std::uint32_t a, std::uint32_t b) { return find(a) == find(b); }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

/*
 * Union-find with an integer potential on each node: pot(a) - pot(b) is known for a, b in the
 * same set. Uniting two nodes already joined with an inconsistent difference marks the set as
 * carrying a cycle of nonzero total weight (used for winding around an annulus hole).
 */
class WeightedUnionFind {
 public:
  explicit WeightedUnionFind(std::size_t n = 0) { reset(n); }

  void reset(std::size_t n) {
    parent_.resize(n);
    std::iota(parent_.begin(), parent_.end(), 0u);
    rank_.assign(n, 0);
    diff_.assign(n, 0);
    cycle_.assign(n, 0);
  }

  // Returns root; `pot` receives pot(x) - pot(root).
  std::uint32_t find(std::uint32_t x, int& pot) {
    int acc = 0;
    std::uint32_t r = x;
    while (parent_[r] != r) {
      acc += diff_[r];
      r = parent_[r];
    }
    // compress
    int rem = acc;
    while (parent_[x] != x) {
      const std::uint32_t next = parent_[x];
      const int d = diff_[x];
      parent_[x] = r;
      diff_[x] = rem;
      rem -= d;
      x = next;
    }
    pot = acc;
    return r;
  }
  std::uint32_t find(std::uint32_t x) {
    int p;
    return find(x, p);
  }

  // Records pot(b) - pot(a) = w.
  void unite(std::uint32_t a, std::uint32_t b, int w) {
    int pa, pb;
    std::uint32_t ra = find(a, pa), rb = find(b, pb);
    if (ra == rb) {
      if (pb - pa != w) cycle_[ra] = 1;
      return;
    }
    // pot(rb) - pot(ra) = w + pa - pb
    int d = w + pa - pb;
    if (rank_[ra] < rank_[rb]) {
      std::swap(ra, rb);
      d = -d;
    }
    parent_[rb] = ra;
    diff_[rb] = d;
    cycle_[ra] = static_cast<char>(cycle_[ra] | cycle_[rb]);
    if (rank_[ra] == rank_[rb]) ++rank_[ra];
  }

  bool has_cycle(std::uint32_t x) { return cycle_[find(x)] != 0; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<int> rank_;
  std::vector<int> diff_;
  std::vector<char> cycle_;
};

}  // namespace percospec
