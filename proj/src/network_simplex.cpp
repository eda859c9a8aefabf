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

#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"

namespace otd::detail {

namespace {

// Cost matrices up to this many arcs are cached; larger ones are recomputed on demand.
constexpr std::int64_t kCostCacheLimit = std::int64_t{1} << 24;
constexpr double kPricingTolerance = 1e-14;
constexpr std::uint64_t kMaxIterations = std::uint64_t{1} << 40;
constexpr std::int64_t kMinBlockSize = 10;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

NetworkSimplex::NetworkSimplex(std::span<const double> supply, std::span<const double> demand, CostFn cost)
    : m_(supply.size()), n_(demand.size()), cost_fn_(std::move(cost)) {
  require(m_ > 0 && n_ > 0, ErrorCode::kEmptyMeasure, "transportation problem needs nonempty sides");
  real_arcs_ = static_cast<Arc>(m_) * static_cast<Arc>(n_);
  node_count_ = static_cast<Node>(m_ + n_);
  all_arcs_ = real_arcs_ + node_count_;
  cached_ = real_arcs_ <= kCostCacheLimit;

  supply_.assign(static_cast<std::size_t>(node_count_) + 1, 0.0);
  for (std::size_t i = 0; i < m_; ++i) supply_[i] = supply[i];
  for (std::size_t j = 0; j < n_; ++j) supply_[m_ + j] = -demand[j];
}

double NetworkSimplex::arc_cost(std::size_t i, std::size_t j) const {
  if (cached_) return cost_cache_[i * n_ + j];
  return cost_fn_(i, j);
}

double NetworkSimplex::cost(Arc a) const {
  if (a >= real_arcs_) return art_arc_cost_[static_cast<std::size_t>(a - real_arcs_)];
  if (cached_) return cost_cache_[static_cast<std::size_t>(a)];
  return cost_fn_(static_cast<std::size_t>(a) / n_, static_cast<std::size_t>(a) % n_);
}

void NetworkSimplex::init() {
  const auto nodes = static_cast<std::size_t>(node_count_) + 1;
  const auto arcs = static_cast<std::size_t>(all_arcs_);
  const auto art = static_cast<std::size_t>(node_count_);

  double max_cost = 0.0;
  if (cached_) {
    cost_cache_.resize(static_cast<std::size_t>(real_arcs_));
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) cost_cache_[i * n_ + j] = cost_fn_(i, j);
    for (double c : cost_cache_) max_cost = std::max(max_cost, c);
  } else {
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) max_cost = std::max(max_cost, cost_fn_(i, j));
  }
  require(std::isfinite(max_cost), ErrorCode::kInvalidArgument, "transport costs must be finite");
  art_cost_ = (max_cost + 1.0) * static_cast<double>(node_count_);

  flow_.assign(arcs, 0.0);
  state_.assign(arcs, kLower);
  art_source_.assign(art, 0);
  art_target_.assign(art, 0);
  art_arc_cost_.assign(art, 0.0);
  pi_.assign(nodes, 0.0);
  parent_.assign(nodes, -1);
  pred_.assign(nodes, -1);
  thread_.assign(nodes, 0);
  rev_thread_.assign(nodes, 0);
  succ_num_.assign(nodes, 0);
  last_succ_.assign(nodes, 0);
  forward_.assign(nodes, 0);

  double sum = 0.0;
  for (Node u = 0; u < node_count_; ++u) sum += supply_[static_cast<std::size_t>(u)];

  const Node root = node_count_;
  parent_[root] = -1;
  pred_[root] = -1;
  thread_[root] = 0;
  rev_thread_[0] = root;
  succ_num_[root] = node_count_ + 1;
  last_succ_[root] = root - 1;
  supply_[root] = -sum;
  pi_[root] = 0.0;

  for (Node u = 0; u < node_count_; ++u) {
    const Arc e = real_arcs_ + u;
    const auto k = static_cast<std::size_t>(u);
    parent_[k] = root;
    pred_[k] = e;
    thread_[k] = u + 1;
    rev_thread_[static_cast<std::size_t>(u + 1)] = u;
    succ_num_[k] = 1;
    last_succ_[k] = u;
    state_[static_cast<std::size_t>(e)] = kTree;
    if (supply_[k] >= 0.0) {
      forward_[k] = 1;
      pi_[k] = 0.0;
      art_source_[k] = u;
      art_target_[k] = root;
      flow_[static_cast<std::size_t>(e)] = supply_[k];
      art_arc_cost_[k] = 0.0;
    } else {
      forward_[k] = 0;
      pi_[k] = art_cost_;
      art_source_[k] = root;
      art_target_[k] = u;
      flow_[static_cast<std::size_t>(e)] = -supply_[k];
      art_arc_cost_[k] = art_cost_;
    }
  }

  next_arc_ = 0;
  block_size_ = std::max(static_cast<Arc>(std::sqrt(static_cast<double>(real_arcs_))), kMinBlockSize);
}

bool NetworkSimplex::pricing_accepts(double rc, Arc a) const {
  const double scale = std::max({std::fabs(pi_[arc_source(a)]), std::fabs(pi_[arc_target(a)]), std::fabs(cost(a))});
  return rc < -kPricingTolerance * scale;
}

void NetworkSimplex::initial_pivots() {
  // cheapest incoming arc of every target
  for (std::size_t j = 0; j < n_; ++j) {
    Arc best = -1;
    double best_cost = kInf;
    for (std::size_t i = 0; i < m_; ++i) {
      const Arc a = static_cast<Arc>(i * n_ + j);
      const double c = cost(a);
      if (c < best_cost) {
        best_cost = c;
        best = a;
      }
    }
    if (best < 0) continue;
    const double rc = reduced_cost(best);
    if (!(rc < 0.0)) continue;
    in_arc_ = best;
    pivot();
  }
}

bool NetworkSimplex::find_entering_arc() {
  double best = 0.0;
  Arc e = next_arc_;
  Arc count = block_size_;
  Arc candidate = -1;
  for (Arc scanned = 0; scanned < real_arcs_; ++scanned, ++e) {
    if (e == real_arcs_) e = 0;
    const double rc = state_[static_cast<std::size_t>(e)] * reduced_cost(e);
    if (rc < best) {
      best = rc;
      candidate = e;
    }
    if (--count == 0) {
      if (candidate >= 0 && pricing_accepts(best, candidate)) {
        in_arc_ = candidate;
        next_arc_ = e;
        return true;
      }
      count = block_size_;
    }
  }
  if (candidate >= 0 && pricing_accepts(best, candidate)) {
    in_arc_ = candidate;
    next_arc_ = e;
    return true;
  }
  return false;
}

void NetworkSimplex::find_join_node() {
  Node u = arc_source(in_arc_);
  Node v = arc_target(in_arc_);
  while (u != v) {
    if (succ_num_[static_cast<std::size_t>(u)] < succ_num_[static_cast<std::size_t>(v)])
      u = parent_[static_cast<std::size_t>(u)];
    else
      v = parent_[static_cast<std::size_t>(v)];
  }
  join_ = u;
}

bool NetworkSimplex::find_leaving_arc() {
  Node first, second;
  if (state_[static_cast<std::size_t>(in_arc_)] == kLower) {
    first = arc_source(in_arc_);
    second = arc_target(in_arc_);
  } else {
    first = arc_target(in_arc_);
    second = arc_source(in_arc_);
  }
  delta_ = kInf;
  int result = 0;
  // strict on the first path, non-strict on the second: keeps the tree strongly feasible
  for (Node u = first; u != join_; u = parent_[static_cast<std::size_t>(u)]) {
    const auto k = static_cast<std::size_t>(u);
    const double d = forward_[k] ? flow_[static_cast<std::size_t>(pred_[k])] : kInf;
    if (d < delta_) {
      delta_ = d;
      u_out_ = u;
      result = 1;
    }
  }
  for (Node u = second; u != join_; u = parent_[static_cast<std::size_t>(u)]) {
    const auto k = static_cast<std::size_t>(u);
    const double d = forward_[k] ? kInf : flow_[static_cast<std::size_t>(pred_[k])];
    if (d <= delta_) {
      delta_ = d;
      u_out_ = u;
      result = 2;
    }
  }
  if (result == 1) {
    u_in_ = first;
    v_in_ = second;
  } else {
    u_in_ = second;
    v_in_ = first;
  }
  return result != 0;
}

void NetworkSimplex::change_flow(bool change) {
  if (delta_ > 0.0) {
    const double val = state_[static_cast<std::size_t>(in_arc_)] * delta_;
    flow_[static_cast<std::size_t>(in_arc_)] += val;
    for (Node u = arc_source(in_arc_); u != join_; u = parent_[static_cast<std::size_t>(u)]) {
      const auto k = static_cast<std::size_t>(u);
      flow_[static_cast<std::size_t>(pred_[k])] += forward_[k] ? -val : val;
    }
    for (Node u = arc_target(in_arc_); u != join_; u = parent_[static_cast<std::size_t>(u)]) {
      const auto k = static_cast<std::size_t>(u);
      flow_[static_cast<std::size_t>(pred_[k])] += forward_[k] ? val : -val;
    }
  }
  if (change) {
    state_[static_cast<std::size_t>(in_arc_)] = kTree;
    const auto leaving = static_cast<std::size_t>(pred_[static_cast<std::size_t>(u_out_)]);
    state_[leaving] = kLower;
    flow_[leaving] = 0.0;
  } else {
    state_[static_cast<std::size_t>(in_arc_)] = static_cast<std::int8_t>(-state_[static_cast<std::size_t>(in_arc_)]);
  }
}

void NetworkSimplex::update_tree_structure() {
  auto at = [](auto& v, Node i) -> auto& { return v[static_cast<std::size_t>(i)]; };

  Node u = at(last_succ_, u_in_);
  const Node old_rev_thread = at(rev_thread_, u_out_);
  const Node old_succ_num = at(succ_num_, u_out_);
  const Node old_last_succ = at(last_succ_, u_out_);
  const Node v_out = at(parent_, u_out_);
  Node right = at(thread_, u);

  // when old_rev_thread == v_in, join and v_out coincide
  Node last = old_rev_thread == v_in_ ? at(thread_, at(last_succ_, u_out_)) : at(thread_, v_in_);

  // re-hang the stem nodes between u_in and u_out
  Node stem = u_in_;
  at(thread_, v_in_) = stem;
  dirty_revs_.clear();
  dirty_revs_.push_back(v_in_);
  Node par_stem = v_in_;
  while (stem != u_out_) {
    const Node new_stem = at(parent_, stem);
    at(thread_, u) = new_stem;
    dirty_revs_.push_back(u);

    const Node w = at(rev_thread_, stem);
    at(thread_, w) = right;
    at(rev_thread_, right) = w;

    at(parent_, stem) = par_stem;
    par_stem = stem;
    stem = new_stem;

    u = at(last_succ_, stem) == at(last_succ_, par_stem) ? at(rev_thread_, par_stem) : at(last_succ_, stem);
    right = at(thread_, u);
  }
  at(parent_, u_out_) = par_stem;
  at(thread_, u) = last;
  at(rev_thread_, last) = u;
  at(last_succ_, u_out_) = u;

  if (old_rev_thread != v_in_) {
    at(thread_, old_rev_thread) = right;
    at(rev_thread_, right) = old_rev_thread;
  }
  for (Node d : dirty_revs_) at(rev_thread_, at(thread_, d)) = d;

  // preds, directions, successor counts along the reversed stem
  Node tmp_sc = 0;
  const Node tmp_ls = at(last_succ_, u_out_);
  u = u_out_;
  while (u != u_in_) {
    const Node w = at(parent_, u);
    at(pred_, u) = at(pred_, w);
    at(forward_, u) = static_cast<std::int8_t>(!at(forward_, w));
    tmp_sc += at(succ_num_, u) - at(succ_num_, w);
    at(succ_num_, u) = tmp_sc;
    at(last_succ_, w) = tmp_ls;
    u = w;
  }
  at(pred_, u_in_) = in_arc_;
  at(forward_, u_in_) = static_cast<std::int8_t>(u_in_ == arc_source(in_arc_));
  at(succ_num_, u_in_) = old_succ_num;

  Node up_limit_in = -1;
  Node up_limit_out = -1;
  if (at(last_succ_, join_) == v_in_)
    up_limit_out = join_;
  else
    up_limit_in = join_;

  for (u = v_in_; u != up_limit_in && at(last_succ_, u) == v_in_; u = at(parent_, u))
    at(last_succ_, u) = at(last_succ_, u_out_);

  if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
    for (u = v_out; u != up_limit_out && at(last_succ_, u) == old_last_succ; u = at(parent_, u))
      at(last_succ_, u) = old_rev_thread;
  } else {
    for (u = v_out; u != up_limit_out && at(last_succ_, u) == old_last_succ; u = at(parent_, u))
      at(last_succ_, u) = at(last_succ_, u_out_);
  }

  for (u = v_in_; u != join_; u = at(parent_, u)) at(succ_num_, u) += old_succ_num;
  for (u = v_out; u != join_; u = at(parent_, u)) at(succ_num_, u) -= old_succ_num;
}

void NetworkSimplex::update_potential() {
  const auto k = static_cast<std::size_t>(u_in_);
  const double c = cost(pred_[k]);
  const double shift = forward_[k] ? pi_[static_cast<std::size_t>(v_in_)] - pi_[k] - c
                                   : pi_[static_cast<std::size_t>(v_in_)] - pi_[k] + c;
  const Node end = thread_[static_cast<std::size_t>(last_succ_[k])];
  for (Node u = u_in_; u != end; u = thread_[static_cast<std::size_t>(u)]) pi_[static_cast<std::size_t>(u)] += shift;
}

void NetworkSimplex::pivot() {
  find_join_node();
  const bool change = find_leaving_arc();
  require(delta_ < kInf, ErrorCode::kInternal, "network simplex: unbounded pivot");
  change_flow(change);
  if (change) {
    update_tree_structure();
    update_potential();
  }
}

void NetworkSimplex::run() {
  init();
  initial_pivots();
  iterations_ = 0;
  while (find_entering_arc()) {
    require(++iterations_ < kMaxIterations, ErrorCode::kInternal, "network simplex: iteration limit reached");
    pivot();
  }

  double total = 0.0;
  for (std::size_t i = 0; i < m_; ++i) total += supply_[i];
  for (Arc e = real_arcs_; e < all_arcs_; ++e) {
    double& f = flow_[static_cast<std::size_t>(e)];
    require(std::fabs(f) <= 1e-9 * total, ErrorCode::kInternal, "network simplex: artificial flow remains");
    f = 0.0;
  }
}

std::vector<NetworkSimplex::Flow> NetworkSimplex::flows() const {
  std::vector<Flow> out;
  for (Node u = 0; u < node_count_; ++u) {
    const Arc a = pred_[static_cast<std::size_t>(u)];
    if (a < 0 || a >= real_arcs_) continue;
    const double f = flow_[static_cast<std::size_t>(a)];
    if (f > 0.0)
      out.push_back(Flow{static_cast<std::size_t>(a) / n_, static_cast<std::size_t>(a) % n_, f});
  }
  std::sort(out.begin(), out.end(), [](const Flow& a, const Flow& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  return out;
}

}  // namespace otd::detail
