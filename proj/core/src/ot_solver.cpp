#include "krdist/ot_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace krdist {

CostMatrix::CostMatrix(std::size_t n, std::size_t m, std::vector<double> values)
    : rows(n), cols(m), data(std::move(values)) {
  if (data.size() != n * m) throw std::invalid_argument("cost matrix has wrong size");
}

namespace {

// Network simplex on the complete bipartite graph sources x targets. Arc
// e < n*m runs from source e / m to target n + e % m; arc n*m + u is the
// artificial arc joining node u to the root. Arcs are uncapacitated, so a
// non-tree arc always carries zero flow and the flow of a tree arc is stored
// on the child node it connects to its parent.
class BipartiteSimplex {
 public:
  using Arc = std::int64_t;

  BipartiteSimplex(std::vector<double> supply, std::vector<double> demand, std::vector<double> cost,
                   std::size_t max_pivots)
      : n_(static_cast<long>(supply.size())),
        m_(static_cast<long>(demand.size())),
        nodes_(n_ + m_),
        root_(nodes_),
        arcs_(static_cast<Arc>(n_) * m_),
        max_pivots_(max_pivots) {
    cost_ = std::move(cost);
    double max_cost = 0.0;
    for (double c : cost_) max_cost = std::max(max_cost, c);
    cost_.resize(arcs_ + nodes_);
    state_.assign(arcs_ + nodes_, kLower);
    art_cost_ = (max_cost + 1.0) * static_cast<double>(nodes_ + 1);
    tol_ = 1e-12 * std::max(1.0, max_cost);
    block_ = std::max<Arc>(10, static_cast<Arc>(std::sqrt(static_cast<double>(arcs_))));

    const long N = nodes_ + 1;
    parent_.assign(N, -1);
    pred_.assign(N, -1);
    thread_.assign(N, 0);
    rev_thread_.assign(N, 0);
    succ_num_.assign(N, 1);
    last_succ_.assign(N, 0);
    forward_.assign(N, 0);
    flow_.assign(N, 0.0);
    pi_.assign(N, 0.0);

    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = nodes_ + 1;
    last_succ_[root_] = root_ - 1;
    pi_[root_] = 0.0;
    for (long u = 0; u < nodes_; ++u) {
      Arc e = arcs_ + u;
      parent_[u] = root_;
      pred_[u] = e;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      state_[e] = kTree;
      if (u < n_) {
        forward_[u] = 1;
        pi_[u] = 0.0;
        flow_[u] = supply[u];
        cost_[e] = 0.0;
      } else {
        forward_[u] = 0;
        pi_[u] = art_cost_;
        flow_[u] = demand[u - n_];
        cost_[e] = art_cost_;
      }
    }
  }

  void run() {
    const std::size_t refresh = static_cast<std::size_t>(nodes_) + 16;
    while (find_entering()) {
      find_join();
      find_leaving();
      change_flow();
      update_tree();
      update_potential();
      ++pivots_;
      if (pivots_ % refresh == 0) recompute_potentials();
      if (max_pivots_ && pivots_ >= max_pivots_)
        throw std::runtime_error("network simplex pivot limit reached");
    }
    recompute_potentials();
  }

  std::size_t pivots() const { return pivots_; }
  double pi(long u) const { return pi_[u]; }

  template <class F>
  void for_each_tree_flow(F&& f) const {
    for (long u = 0; u < nodes_; ++u) {
      Arc e = pred_[u];
      if (e < arcs_) f(static_cast<std::size_t>(e / m_), static_cast<std::size_t>(e % m_), flow_[u]);
    }
  }

 private:
  static constexpr std::int8_t kTree = 0;
  static constexpr std::int8_t kLower = 1;

  long source(Arc e) const {
    if (e < arcs_) return static_cast<long>(e / m_);
    long u = static_cast<long>(e - arcs_);
    return u < n_ ? u : root_;
  }
  long target(Arc e) const {
    if (e < arcs_) return n_ + static_cast<long>(e % m_);
    long u = static_cast<long>(e - arcs_);
    return u < n_ ? root_ : u;
  }

  // Block search over the real arcs, scanned row by row from where the last
  // search stopped; the first arc with the most negative reduced cost in the
  // block enters.
  bool find_entering() {
    double best = -tol_;
    Arc best_arc = -1;
    Arc cnt = block_;
    Arc e = next_arc_;
    long i = static_cast<long>(e / m_);
    long j = static_cast<long>(e % m_);
    for (Arc k = 0; k < arcs_; ++k) {
      if (state_[e] == kLower) {
        double c = cost_[e] + pi_[i] - pi_[n_ + j];
        if (c < best) {
          best = c;
          best_arc = e;
        }
      }
      ++e;
      if (++j == m_) {
        j = 0;
        ++i;
        if (e == arcs_) {
          e = 0;
          i = 0;
        }
      }
      if (--cnt == 0) {
        if (best_arc >= 0) break;
        cnt = block_;
      }
    }
    if (best_arc < 0) return false;
    in_arc_ = best_arc;
    next_arc_ = e;
    return true;
  }

  void find_join() {
    long u = source(in_arc_), v = target(in_arc_);
    while (u != v) {
      if (succ_num_[u] < succ_num_[v])
        u = parent_[u];
      else
        v = parent_[v];
    }
    join_ = u;
  }

  void find_leaving() {
    const long first = source(in_arc_);
    const long second = target(in_arc_);
    delta_ = std::numeric_limits<double>::infinity();
    int result = 0;
    for (long u = first; u != join_; u = parent_[u]) {
      if (forward_[u] && flow_[u] < delta_) {
        delta_ = flow_[u];
        u_out_ = u;
        result = 1;
      }
    }
    for (long u = second; u != join_; u = parent_[u]) {
      if (!forward_[u] && flow_[u] <= delta_) {
        delta_ = flow_[u];
        u_out_ = u;
        result = 2;
      }
    }
    if (result == 0) throw std::runtime_error("network simplex found an unbounded cycle");
    if (result == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }
    if (delta_ < 0.0) delta_ = 0.0;
  }

  void change_flow() {
    if (delta_ > 0.0) {
      const double val = delta_;
      for (long u = source(in_arc_); u != join_; u = parent_[u]) flow_[u] += forward_[u] ? -val : val;
      for (long u = target(in_arc_); u != join_; u = parent_[u]) flow_[u] += forward_[u] ? val : -val;
    }
    state_[in_arc_] = kTree;
    state_[pred_[u_out_]] = kLower;
    flow_[u_out_] = 0.0;
  }

  void update_tree() {
    long u, w;
    const long old_rev_thread = rev_thread_[u_out_];
    const long old_succ_num = succ_num_[u_out_];
    const long old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];

    u = last_succ_[u_in_];
    long right = thread_[u];
    long last = old_rev_thread == v_in_ ? thread_[last_succ_[u_out_]] : thread_[v_in_];

    long stem = u_in_;
    long par_stem = v_in_;
    thread_[v_in_] = stem;
    dirty_revs_.clear();
    dirty_revs_.push_back(v_in_);
    while (stem != u_out_) {
      long new_stem = parent_[stem];
      thread_[u] = new_stem;
      dirty_revs_.push_back(u);

      w = rev_thread_[stem];
      thread_[w] = right;
      rev_thread_[right] = w;

      parent_[stem] = par_stem;
      par_stem = stem;
      stem = new_stem;

      u = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
      right = thread_[u];
    }
    parent_[u_out_] = par_stem;
    thread_[u] = last;
    rev_thread_[last] = u;
    last_succ_[u_out_] = u;

    if (old_rev_thread != v_in_) {
      thread_[old_rev_thread] = right;
      rev_thread_[right] = old_rev_thread;
    }
    for (long x : dirty_revs_) rev_thread_[thread_[x]] = x;

    long tmp_sc = 0;
    const long tmp_ls = last_succ_[u_out_];
    for (u = u_out_; u != u_in_; u = w) {
      w = parent_[u];
      pred_[u] = pred_[w];
      forward_[u] = !forward_[w];
      flow_[u] = flow_[w];
      tmp_sc += succ_num_[u] - succ_num_[w];
      succ_num_[u] = tmp_sc;
      last_succ_[w] = tmp_ls;
    }
    pred_[u_in_] = in_arc_;
    forward_[u_in_] = u_in_ == source(in_arc_);
    flow_[u_in_] = delta_;
    succ_num_[u_in_] = old_succ_num;

    long up_limit_in = -1, up_limit_out = -1;
    if (last_succ_[join_] == v_in_)
      up_limit_out = join_;
    else
      up_limit_in = join_;

    for (u = v_in_; u != up_limit_in && last_succ_[u] == v_in_; u = parent_[u])
      last_succ_[u] = last_succ_[u_out_];
    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = old_rev_thread;
    } else {
      for (u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u])
        last_succ_[u] = last_succ_[u_out_];
    }

    for (u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potential() {
    const double c = cost_[pred_[u_in_]];
    const double sigma = forward_[u_in_] ? pi_[v_in_] - pi_[u_in_] - c : pi_[v_in_] - pi_[u_in_] + c;
    const long end = thread_[last_succ_[u_in_]];
    for (long u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  // Rebuilds potentials from the tree in thread (preorder) order so that
  // rounding drift from incremental updates does not accumulate.
  void recompute_potentials() {
    pi_[root_] = 0.0;
    for (long u = thread_[root_]; u != root_; u = thread_[u]) {
      const double c = cost_[pred_[u]];
      pi_[u] = forward_[u] ? pi_[parent_[u]] - c : pi_[parent_[u]] + c;
    }
  }

  long n_, m_, nodes_, root_;
  Arc arcs_;
  std::size_t max_pivots_;
  std::vector<double> cost_;
  std::vector<std::int8_t> state_;
  double art_cost_ = 0.0;
  double tol_ = 0.0;
  Arc block_ = 10;
  Arc next_arc_ = 0;

  std::vector<long> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_;
  std::vector<char> forward_;
  std::vector<double> flow_, pi_;
  std::vector<long> dirty_revs_;

  Arc in_arc_ = -1;
  long join_ = 0, u_in_ = 0, v_in_ = 0, u_out_ = 0, v_out_ = 0;
  double delta_ = 0.0;
  std::size_t pivots_ = 0;
};

void check_inputs(std::span<const double> supply, std::span<const double> demand,
                  const CostMatrix& cost) {
  if (cost.rows != supply.size() || cost.cols != demand.size() ||
      cost.data.size() != supply.size() * demand.size())
    throw std::invalid_argument("cost matrix shape does not match the marginals");
  for (double a : supply)
    if (!(a >= 0.0) || !std::isfinite(a)) throw std::invalid_argument("supply must be finite and nonnegative");
  for (double b : demand)
    if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("demand must be finite and nonnegative");
}

}  // namespace

TransportPlan solve_balanced(std::span<const double> supply, std::span<const double> demand,
                             const CostMatrix& cost, const SolverOptions& opts) {
  check_inputs(supply, demand, cost);
  for (double c : cost.data)
    if (std::isnan(c) || c < 0.0 || !std::isfinite(c))
      throw std::invalid_argument("cost entries must be finite and nonnegative");

  const double sa = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double sb = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (std::abs(sa - sb) > opts.balance_tolerance * std::max({sa, sb, 1e-300}))
    throw std::invalid_argument("unbalanced input");

  std::vector<std::size_t> rows, cols;
  for (std::size_t i = 0; i < supply.size(); ++i)
    if (supply[i] > 0.0) rows.push_back(i);
  for (std::size_t j = 0; j < demand.size(); ++j)
    if (demand[j] > 0.0) cols.push_back(j);

  TransportPlan plan;
  plan.u.assign(supply.size(), 0.0);
  plan.v.assign(demand.size(), 0.0);

  if (!rows.empty() && !cols.empty()) {
    std::vector<double> a(rows.size()), b(cols.size());
    for (std::size_t k = 0; k < rows.size(); ++k) a[k] = supply[rows[k]];
    for (std::size_t k = 0; k < cols.size(); ++k) b[k] = demand[cols[k]];
    std::vector<double> c(rows.size() * cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t s = 0; s < cols.size(); ++s) c[r * cols.size() + s] = cost(rows[r], cols[s]);

    BipartiteSimplex ns(std::move(a), std::move(b), std::move(c), opts.max_pivots);
    ns.run();
    plan.pivots = ns.pivots();
    ns.for_each_tree_flow([&](std::size_t r, std::size_t s, double f) {
      if (f > 0.0) plan.entries.push_back({rows[r], cols[s], f});
    });
    const long n = static_cast<long>(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) plan.u[rows[r]] = -ns.pi(static_cast<long>(r));
    for (std::size_t s = 0; s < cols.size(); ++s) plan.v[cols[s]] = ns.pi(n + static_cast<long>(s));
  }

  // Potentials of nodes without mass come from the c-transform so that the
  // dual is feasible on the whole matrix.
  if (!rows.empty()) {
    std::vector<bool> active(supply.size(), false);
    for (std::size_t i : rows) active[i] = true;
    for (std::size_t j = 0; j < demand.size(); ++j) {
      if (demand[j] > 0.0) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i : rows) best = std::min(best, cost(i, j) - plan.u[i]);
      plan.v[j] = best;
    }
    for (std::size_t i = 0; i < supply.size(); ++i) {
      if (active[i]) continue;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < demand.size(); ++j) best = std::min(best, cost(i, j) - plan.v[j]);
      plan.u[i] = demand.empty() ? 0.0 : best;
    }
  }

  std::sort(plan.entries.begin(), plan.entries.end(), [](const auto& x, const auto& y) {
    return x.src != y.src ? x.src < y.src : x.dst < y.dst;
  });
  for (const auto& t : plan.entries) plan.objective += t.mass * cost(t.src, t.dst);
  return plan;
}

DualityReport verify_duality(const TransportPlan& plan, std::span<const double> supply,
                             std::span<const double> demand, const CostMatrix& cost,
                             double feasibility_tolerance) {
  check_inputs(supply, demand, cost);
  const std::size_t n = supply.size(), m = demand.size();
  std::vector<double> row(n, 0.0), col(m, 0.0);
  DualityReport rep;
  for (const auto& t : plan.entries) {
    if (t.src >= n || t.dst >= m) throw std::invalid_argument("infeasible plan: index out of range");
    if (!(t.mass >= 0.0)) throw std::invalid_argument("infeasible plan: negative mass");
    row[t.src] += t.mass;
    col[t.dst] += t.mass;
    rep.primal += t.mass * cost(t.src, t.dst);
  }
  const double mass = std::max(std::accumulate(supply.begin(), supply.end(), 0.0),
                               std::accumulate(demand.begin(), demand.end(), 0.0));
  const double tol = feasibility_tolerance * std::max(mass, 1e-300);
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(row[i] - supply[i]) > tol) throw std::invalid_argument("infeasible plan: row marginal");
  for (std::size_t j = 0; j < m; ++j)
    if (std::abs(col[j] - demand[j]) > tol) throw std::invalid_argument("infeasible plan: column marginal");

  std::vector<double> u(n, 0.0), v(m, 0.0);
  if (plan.u.size() == n && plan.v.size() == m) {
    u = plan.u;
    v = plan.v;
  } else {
    // Complementary slackness on the support: u_i + v_j = c_ij along a
    // spanning forest of the support graph.
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n + m);
    for (const auto& t : plan.entries) {
      if (t.mass <= 0.0) continue;
      adj[t.src].push_back({n + t.dst, cost(t.src, t.dst)});
      adj[n + t.dst].push_back({t.src, cost(t.src, t.dst)});
    }
    std::vector<double> pot(n + m, 0.0);
    std::vector<bool> seen(n + m, false);
    for (std::size_t s = 0; s < n + m; ++s) {
      if (seen[s]) continue;
      seen[s] = true;
      std::queue<std::size_t> q;
      q.push(s);
      while (!q.empty()) {
        std::size_t x = q.front();
        q.pop();
        for (auto [y, c] : adj[x]) {
          if (seen[y]) continue;
          seen[y] = true;
          pot[y] = c - pot[x];
          q.push(y);
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) u[i] = pot[i];
    for (std::size_t j = 0; j < m; ++j) v[j] = pot[n + j];
  }
  // Double c-transform: v_j = min_i c_ij - u_i, then u_i = min_j c_ij - v_j.
  for (std::size_t j = 0; j < m && n > 0; ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) best = std::min(best, cost(i, j) - u[i]);
    v[j] = best;
  }
  for (std::size_t i = 0; i < n && m > 0; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) best = std::min(best, cost(i, j) - v[j]);
    u[i] = best;
  }
  for (std::size_t i = 0; i < n; ++i) rep.dual += supply[i] * u[i];
  for (std::size_t j = 0; j < m; ++j) rep.dual += demand[j] * v[j];
  rep.gap = rep.primal - rep.dual;
  return rep;
}

}  // namespace krdist
