#pragma once

/*! \file
 *  \brief Incremental acyclicity guard for arc insertions.
 *
 *  Two structures are maintained as arcs are inserted:
 *  - a disjoint-set forest over weakly connected components (path
 *    compression + union by rank);
 *  - a topological numbering `order(v)` with order(a) < order(b) for every
 *    inserted arc a -> b.
 *
 *  A candidate a -> b cannot close a cycle when a and b lie in different
 *  components or order(a) < order(b); both tests are O(alpha(n)). Otherwise
 *  the answer is decided exactly by a forward search from b restricted to
 *  nodes numbered at most order(a).
 *
 *  Insertions that invert the numbering repair it with the two-way bounded
 *  search of Pearce and Kelly: a forward search from b over nodes numbered
 *  below order(a), a backward search from a over nodes numbered above
 *  order(b), then the numbers of both visited sets are pooled and handed back
 *  with the backward set first. Each repair costs O(|R| log |R| + E(R)) where
 *  R is the affected region (visited nodes) and E(R) the arcs they touch;
 *  nodes outside [order(b), order(a)] are never visited.
 */

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdp/graph.hpp"

namespace sdp {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) const {
    std::size_t root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
      const std::size_t next = parent_[x];
      parent_[x] = root;
      x = next;
    }
    return root;
  }

  /// Returns false when already joined.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

  std::size_t size() const { return parent_.size(); }

 private:
  mutable std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

class CycleGuard {
 public:
  using Node = std::size_t;

  explicit CycleGuard(std::size_t num_nodes)
      : components_(num_nodes),
        order_(num_nodes),
        node_at_(num_nodes),
        out_(num_nodes),
        in_(num_nodes),
        mark_(num_nodes, 0) {
    if (num_nodes == 0) throw ContractViolation("CycleGuard needs at least one node");
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::iota(node_at_.begin(), node_at_.end(), Node{0});
  }

  std::size_t num_nodes() const { return order_.size(); }

  /// Topological number of a node (a permutation of 0..n-1).
  std::size_t order(Node v) const {
    check(v);
    return order_[v];
  }

  Node component(Node v) const {
    check(v);
    return components_.find(v);
  }

  bool same_component(Node a, Node b) const { return component(a) == component(b); }

  std::size_t arc_count() const { return arcs_; }

  /// Nodes visited by searches so far; a machine-independent cost measure.
  std::uint64_t work() const { return work_; }

  /// True iff inserting a -> b would close a directed cycle (b reaches a).
  bool would_create_cycle(Node a, Node b) const {
    check(a);
    check(b);
    if (a == b) throw ContractViolation("would_create_cycle on a self loop");
    if (order_[a] < order_[b]) return false;
    if (!same_component(a, b)) return false;
    const bool reached = forward_search(b, a, order_[a]);
    clear_marks(forward_);
    return reached;
  }

  /// Records a -> b. The caller guarantees it closes no cycle.
  void insert_arc(Node a, Node b) {
    check(a);
    check(b);
    if (a == b) throw ContractViolation("self loop " + std::to_string(a));
    if (std::find(out_[a].begin(), out_[a].end(), b) != out_[a].end()) return;

    if (order_[a] > order_[b]) {
      const std::size_t lower = order_[b];
      const std::size_t upper = order_[a];
      if (forward_search(b, a, upper)) {
        clear_marks(forward_);
        throw ContractViolation("arc " + std::to_string(a) + "->" + std::to_string(b) +
                                " closes a cycle");
      }
      backward_search(a, lower);
      reorder();
    }
    out_[a].push_back(b);
    in_[b].push_back(a);
    components_.unite(a, b);
    ++arcs_;
  }

 private:
  void check(Node v) const {
    if (v >= order_.size()) {
      throw std::out_of_range("node " + std::to_string(v) + " outside guard of size " +
                              std::to_string(order_.size()));
    }
  }

  // Collects nodes reachable from `start` whose number is <= `upper` into
  // forward_. Returns true as soon as `target` is reached.
  bool forward_search(Node start, Node target, std::size_t upper) const {
    forward_.clear();
    stack_.clear();
    stack_.push_back(start);
    mark_[start] = 1;
    forward_.push_back(start);
    while (!stack_.empty()) {
      const Node v = stack_.back();
      stack_.pop_back();
      ++work_;
      for (Node w : out_[v]) {
        if (w == target) return true;
        if (mark_[w] == 0 && order_[w] < upper) {
          mark_[w] = 1;
          forward_.push_back(w);
          stack_.push_back(w);
        }
      }
    }
    return false;
  }

  // Collects nodes reaching `start` whose number is > `lower` into backward_.
  void backward_search(Node start, std::size_t lower) {
    backward_.clear();
    stack_.clear();
    stack_.push_back(start);
    mark_[start] = 2;
    backward_.push_back(start);
    while (!stack_.empty()) {
      const Node v = stack_.back();
      stack_.pop_back();
      ++work_;
      for (Node w : in_[v]) {
        if (mark_[w] == 0 && order_[w] > lower) {
          mark_[w] = 2;
          backward_.push_back(w);
          stack_.push_back(w);
        }
      }
    }
  }

  void clear_marks(const std::vector<Node>& nodes) const {
    for (Node v : nodes) mark_[v] = 0;
  }

  // Backward set takes the lowest pooled numbers, forward set the rest; each
  // set keeps its internal relative order.
  void reorder() {
    auto by_order = [this](Node x, Node y) { return order_[x] < order_[y]; };
    std::sort(backward_.begin(), backward_.end(), by_order);
    std::sort(forward_.begin(), forward_.end(), by_order);
    pool_.clear();
    for (Node v : backward_) pool_.push_back(order_[v]);
    for (Node v : forward_) pool_.push_back(order_[v]);
    std::sort(pool_.begin(), pool_.end());
    std::size_t k = 0;
    for (Node v : backward_) assign(v, pool_[k++]);
    for (Node v : forward_) assign(v, pool_[k++]);
    clear_marks(backward_);
    clear_marks(forward_);
  }

  void assign(Node v, std::size_t number) {
    order_[v] = number;
    node_at_[number] = v;
  }

  DisjointSets components_;
  std::vector<std::size_t> order_;
  std::vector<Node> node_at_;
  std::vector<std::vector<Node>> out_;
  std::vector<std::vector<Node>> in_;
  std::size_t arcs_ = 0;

  // Search scratch space, reused across calls.
  mutable std::vector<std::uint8_t> mark_;
  mutable std::vector<Node> forward_;
  mutable std::vector<Node> stack_;
  std::vector<Node> backward_;
  std::vector<std::size_t> pool_;
  mutable std::uint64_t work_ = 0;
};

}  // namespace sdp
