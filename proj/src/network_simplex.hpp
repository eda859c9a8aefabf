// Copyright 2026 The otdensity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace otd::detail {

/// Primal network simplex for the uncapacitated transportation problem on the
/// complete bipartite graph sources x targets.
///
/// Uses an artificial root connected to every node, a strongly feasible spanning
/// tree (thread/succession lists) and block-search pricing. Termination does not
/// depend on non-degeneracy. Pivoting is fully deterministic.
class NetworkSimplex {
 public:
  using CostFn = std::function<double(std::size_t, std::size_t)>;

  struct Flow {
    std::size_t source;
    std::size_t target;
    double amount;
  };

  /// supply and demand must be positive with equal sums (up to rounding).
  NetworkSimplex(std::span<const double> supply, std::span<const double> demand, CostFn cost);

  void run();

  /// Positive flows on real arcs, sorted by (source, target).
  std::vector<Flow> flows() const;

  /// Node potentials pi with reduced cost c_ij + pi_i - pi_j >= 0 at optimum.
  double source_potential(std::size_t i) const { return pi_[i]; }
  double target_potential(std::size_t j) const { return pi_[m_ + j]; }

  std::uint64_t iterations() const { return iterations_; }
  double arc_cost(std::size_t i, std::size_t j) const;

 private:
  using Node = std::int64_t;
  using Arc = std::int64_t;

  static constexpr std::int8_t kLower = 1;
  static constexpr std::int8_t kTree = 0;

  Node arc_source(Arc a) const { return a < real_arcs_ ? a / static_cast<Arc>(n_) : art_source_[a - real_arcs_]; }
  Node arc_target(Arc a) const {
    return a < real_arcs_ ? static_cast<Node>(m_) + a % static_cast<Arc>(n_) : art_target_[a - real_arcs_];
  }
  double cost(Arc a) const;
  double reduced_cost(Arc a) const { return cost(a) + pi_[arc_source(a)] - pi_[arc_target(a)]; }

  void init();
  void initial_pivots();
  bool find_entering_arc();
  bool pricing_accepts(double rc, Arc a) const;
  void find_join_node();
  bool find_leaving_arc();
  void change_flow(bool change);
  void update_tree_structure();
  void update_potential();
  void pivot();

  std::size_t m_;
  std::size_t n_;
  Arc real_arcs_;
  Arc all_arcs_;
  Node node_count_;  // excluding root
  CostFn cost_fn_;
  bool cached_;
  double art_cost_ = 0.0;

  std::vector<double> supply_;
  std::vector<double> cost_cache_;
  std::vector<double> flow_;
  std::vector<std::int8_t> state_;
  std::vector<Node> art_source_;
  std::vector<Node> art_target_;
  std::vector<double> art_arc_cost_;

  std::vector<double> pi_;
  std::vector<Node> parent_;
  std::vector<Arc> pred_;
  std::vector<Node> thread_;
  std::vector<Node> rev_thread_;
  std::vector<Node> succ_num_;
  std::vector<Node> last_succ_;
  std::vector<std::int8_t> forward_;
  std::vector<Node> dirty_revs_;

  Arc next_arc_ = 0;
  Arc block_size_ = 0;
  std::uint64_t iterations_ = 0;

  // current pivot
  Arc in_arc_ = -1;
  Node join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0;
  double delta_ = 0.0;
};

}  // namespace otd::detail
