/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "core/transform.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace edgecache {

double auto_big_m(const Scenario& s) {
  double max_link_time = 0.0;
  for (int n = 0; n < s.node_count(); ++n)
    for (int m : s.neighbors(n))
      for (int i = 0; i < s.content_count(); ++i)
        max_link_time = std::max(max_link_time,
                                 s.contents[i].size_mbit / s.topology.link_bandwidth(n, m));
  double max_delta = 0.0;
  const int bs = s.bs_index();
  for (int n = 0; n < s.node_count(); ++n) {
    for (int i = 0; i < s.content_count(); ++i) {
      const double c = s.contents[i].size_mbit;
      const double b = s.nodes[n].user_bandwidth_mbps;
      const double d = (n == bs)
                           ? delay_case3(c, b, 0.0, s.topology.backhaul_mbps(), true)
                           : delay_case3(c, b, s.topology.link_bandwidth(n, bs),
                                         s.topology.backhaul_mbps(), false);
      max_delta = std::max(max_delta, d);
    }
  }
  return 10.0 * max_link_time + max_delta;
}

MinlpProblem transform(const Scenario& s, double big_m) {
  s.validate();
  MinlpProblem p;
  p.scenario = s;
  p.big_m = big_m > 0.0 ? big_m : auto_big_m(s);

  const int N = s.node_count();
  const int I = s.content_count();
  p.x_count = N * I;
  p.z_count = N * I;
  p.y_base.resize(N);
  int y_total = 0;
  for (int n = 0; n < N; ++n) {
    p.y_base[n] = y_total;
    y_total += static_cast<int>(s.neighbors(n).size()) * I;
  }
  p.y_count = y_total;

  p.weight.resize(static_cast<size_t>(N) * I);
  p.d_alpha.resize(static_cast<size_t>(N) * I);
  p.d_delta.resize(static_cast<size_t>(N) * I);
  const int bs = s.bs_index();
  for (int n = 0; n < N; ++n) {
    for (int i = 0; i < I; ++i) {
      const size_t at = static_cast<size_t>(n) * I + i;
      const double c = s.contents[i].size_mbit;
      const double b = s.nodes[n].user_bandwidth_mbps;
      p.weight[at] = s.foa_at(n, i) * s.nodes[n].user_count;
      p.d_alpha[at] = delay_case1(c, b);
      p.d_delta[at] = (n == bs) ? delay_case3(c, b, 0.0, s.topology.backhaul_mbps(), true)
                                : delay_case3(c, b, s.topology.link_bandwidth(n, bs),
                                              s.topology.backhaul_mbps(), false);
    }
  }
  return p;
}

double evaluate_objective(const MinlpProblem& p, const Assignment& a) {
  if (a.x.size() != p.x_count || a.y.size() != p.y_count || a.z.size() != p.z_count)
    throw ScenarioError("assignment dimensions do not match the problem");
  const int N = p.nodes();
  const int I = p.contents();
  double total = 0.0;
  for (int n = 0; n < N; ++n) {
    const auto& nb = p.scenario.neighbors(n);
    for (int i = 0; i < I; ++i) {
      const size_t at = static_cast<size_t>(n) * I + i;
      double prod = 1.0;  // (1 - x_m) over all neighbors
      for (int m : nb) prod *= 1.0 - a.x[p.x_index(m, i)];
      const double xn = a.x[p.x_index(n, i)];
      const double z = a.z[p.z_index(n, i)];
      const double omega_phi = xn * p.d_alpha[at] +
                               (1.0 - xn) * ((1.0 - prod) * (p.d_alpha[at] + z) +
                                             prod * p.d_delta[at]);
      total += p.weight[at] * omega_phi;
    }
  }
  return total;
}

void objective_gradient(const MinlpProblem& p, const Assignment& a, Eigen::VectorXd& grad_x,
                        Eigen::VectorXd& grad_z) {
  const int N = p.nodes();
  const int I = p.contents();
  grad_x.setZero(p.x_count);
  grad_z.setZero(p.z_count);
  std::vector<double> q, pre, suf;
  for (int n = 0; n < N; ++n) {
    const auto& nb = p.scenario.neighbors(n);
    const int k = static_cast<int>(nb.size());
    q.resize(k);
    pre.assign(k + 1, 1.0);
    suf.assign(k + 1, 1.0);
    for (int i = 0; i < I; ++i) {
      const size_t at = static_cast<size_t>(n) * I + i;
      for (int t = 0; t < k; ++t) q[t] = 1.0 - a.x[p.x_index(nb[t], i)];
      for (int t = 0; t < k; ++t) pre[t + 1] = pre[t] * q[t];
      for (int t = k - 1; t >= 0; --t) suf[t] = suf[t + 1] * q[t];
      const double prod = pre[k];
      const double xn = a.x[p.x_index(n, i)];
      const double z = a.z[p.z_index(n, i)];
      const double big_b = p.d_delta[at] - p.d_alpha[at] - z;
      const double big_a = 1.0 - xn;
      const double w = p.weight[at];
      grad_x[p.x_index(n, i)] += w * (-z - big_b * prod);
      grad_z[p.z_index(n, i)] += w * big_a * (1.0 - prod);
      for (int t = 0; t < k; ++t) {
        const double excl = pre[t] * suf[t + 1];
        grad_x[p.x_index(nb[t], i)] += -w * big_a * big_b * excl;
      }
    }
  }
}

void objective_hvp(const MinlpProblem& p, const Assignment& a, const Eigen::VectorXd& vx,
                   const Eigen::VectorXd& vz, Eigen::VectorXd& out_x, Eigen::VectorXd& out_z) {
  const int N = p.nodes();
  const int I = p.contents();
  out_x.setZero(p.x_count);
  out_z.setZero(p.z_count);
  std::vector<double> q, pre, suf, excl, pair_sum;
  for (int n = 0; n < N; ++n) {
    const auto& nb = p.scenario.neighbors(n);
    const int k = static_cast<int>(nb.size());
    q.resize(k);
    pre.assign(k + 1, 1.0);
    suf.assign(k + 1, 1.0);
    excl.resize(k);
    pair_sum.resize(k);
    for (int i = 0; i < I; ++i) {
      const size_t at = static_cast<size_t>(n) * I + i;
      for (int t = 0; t < k; ++t) q[t] = 1.0 - a.x[p.x_index(nb[t], i)];
      for (int t = 0; t < k; ++t) pre[t + 1] = pre[t] * q[t];
      for (int t = k - 1; t >= 0; --t) suf[t] = suf[t + 1] * q[t];
      const double prod = pre[k];
      for (int t = 0; t < k; ++t) excl[t] = pre[t] * suf[t + 1];

      // pair_sum[t] = sum over t' != t of v[x_m(t')] * prod over q excluding t, t'
      for (int t = 0; t < k; ++t) {
        double left = 1.0;
        double acc = 0.0;
        for (int u = 0; u < k; ++u) {
          if (u == t) continue;
          // product excluding t and u = left * (suffix of remaining after u)
          double right = 1.0;
          for (int r = u + 1; r < k; ++r)
            if (r != t) right *= q[r];
          acc += vx[p.x_index(nb[u], i)] * left * right;
          left *= q[u];
        }
        pair_sum[t] = acc;
      }

      const double xn = a.x[p.x_index(n, i)];
      const double z = a.z[p.z_index(n, i)];
      const double big_b = p.d_delta[at] - p.d_alpha[at] - z;
      const double big_a = 1.0 - xn;
      const double w = p.weight[at];
      const int xi = p.x_index(n, i);
      const int zi = p.z_index(n, i);

      double sum_bv = 0.0;  // sum of excl[t] * v[x_m]
      for (int t = 0; t < k; ++t) sum_bv += excl[t] * vx[p.x_index(nb[t], i)];

      out_x[xi] += w * ((-1.0 + prod) * vz[zi] + big_b * sum_bv);
      out_z[zi] += w * ((-1.0 + prod) * vx[xi] + big_a * sum_bv);
      for (int t = 0; t < k; ++t) {
        out_x[p.x_index(nb[t], i)] +=
            w * (big_b * excl[t] * vx[xi] + big_a * excl[t] * vz[zi] + big_a * big_b * pair_sum[t]);
      }
    }
  }
}

std::vector<Violation> check_feasibility(const MinlpProblem& p, const Assignment& a, double tol) {
  std::vector<Violation> out;
  if (a.x.size() != p.x_count || a.y.size() != p.y_count || a.z.size() != p.z_count) {
    out.push_back({Violation::Kind::dimensions, -1, -1, -1, 0.0,
                   "assignment dimensions do not match the problem"});
    return out;
  }
  const int N = p.nodes();
  const int I = p.contents();
  const Scenario& s = p.scenario;

  for (int n = 0; n < N; ++n) {
    double used = 0.0;
    for (int i = 0; i < I; ++i) used += a.x[p.x_index(n, i)] * s.contents[i].size_mbit;
    const double excess = used - s.nodes[n].capacity_mbit;
    if (excess > tol)
      out.push_back({Violation::Kind::capacity, n, -1, -1, excess,
                     "capacity exceeded at node " + std::to_string(n + 1) + " by " +
                         std::to_string(excess) + " Mbit"});
  }
  for (int n = 0; n < N; ++n) {
    const auto& nb = s.neighbors(n);
    for (int i = 0; i < I; ++i) {
      for (int t = 0; t < static_cast<int>(nb.size()); ++t) {
        const int m = nb[t];
        const double lhs = p.q_value(n, m, i, a.x[p.x_index(m, i)]) -
                           p.deactivation(n, m, i) * a.y[p.y_index(n, t, i)] -
                           a.z[p.z_index(n, i)];
        if (lhs > tol)
          out.push_back({Violation::Kind::selection, n, i, m, lhs,
                         "selection constraint violated at (n=" + std::to_string(n + 1) +
                             ", m=" + std::to_string(m + 1) + ", i=" + std::to_string(i + 1) +
                             ") by " + std::to_string(lhs)});
      }
      double ysum = 0.0;
      for (int t = 0; t < static_cast<int>(nb.size()); ++t) ysum += a.y[p.y_index(n, t, i)];
      const double gap = ysum - (static_cast<double>(nb.size()) - 1.0);
      if (std::abs(gap) > tol)
        out.push_back({Violation::Kind::equality, n, i, -1, gap,
                       "selection count at (n=" + std::to_string(n + 1) +
                           ", i=" + std::to_string(i + 1) + ") off by " + std::to_string(gap)});
    }
  }
  for (int j = 0; j < p.x_count; ++j)
    if (a.x[j] < -tol || a.x[j] > 1.0 + tol)
      out.push_back({Violation::Kind::bounds, j / I, j % I, -1, a.x[j],
                     "x out of [0,1] at index " + std::to_string(j)});
  for (int j = 0; j < p.y_count; ++j)
    if (a.y[j] < -tol || a.y[j] > 1.0 + tol)
      out.push_back({Violation::Kind::bounds, -1, -1, -1, a.y[j],
                     "y out of [0,1] at index " + std::to_string(j)});
  for (int j = 0; j < p.z_count; ++j)
    if (a.z[j] < -tol)
      out.push_back({Violation::Kind::bounds, j / I, j % I, -1, a.z[j],
                     "z negative at index " + std::to_string(j)});
  return out;
}

void dump_problem(const MinlpProblem& p, std::ostream& os) {
  const int N = p.nodes();
  const int I = p.contents();
  os << "minlp nodes=" << N << " contents=" << I << " V=" << p.big_m << "\n";
  os << "vars x=" << p.x_count << " y=" << p.y_count << " z=" << p.z_count << "\n";
  for (int n = 0; n < N; ++n)
    os << "capacity node=" << (n + 1) << " limit_mbit=" << p.scenario.nodes[n].capacity_mbit
       << "\n";
  for (int n = 0; n < N; ++n) {
    const auto& nb = p.scenario.neighbors(n);
    for (int i = 0; i < I; ++i) {
      os << "select n=" << (n + 1) << " i=" << (i + 1) << " y_sum=" << (nb.size() - 1) << " rows";
      for (int t = 0; t < static_cast<int>(nb.size()); ++t)
        os << " (m=" << (nb[t] + 1) << ",q0=" << p.q_value(n, nb[t], i, 0.0)
           << ",q1=" << p.q_value(n, nb[t], i, 1.0) << ")";
      os << "\n";
    }
  }
}

Assignment complete_binary_assignment(const MinlpProblem& p, const Eigen::VectorXd& x) {
  Assignment a;
  a.x = x;
  a.y.setZero(p.y_count);
  a.z.setZero(p.z_count);
  const int N = p.nodes();
  const int I = p.contents();
  for (int n = 0; n < N; ++n) {
    const auto& nb = p.scenario.neighbors(n);
    for (int i = 0; i < I; ++i) {
      int best_t = 0;
      double best_q = std::numeric_limits<double>::infinity();
      for (int t = 0; t < static_cast<int>(nb.size()); ++t) {
        const double q = p.q_value(n, nb[t], i, x[p.x_index(nb[t], i)]);
        if (q < best_q) {  // neighbors ascend by id, ties keep the lowest
          best_q = q;
          best_t = t;
        }
        a.y[p.y_index(n, t, i)] = 1.0;
      }
      a.y[p.y_index(n, best_t, i)] = 0.0;
      a.z[p.z_index(n, i)] = best_q;
    }
  }
  return a;
}

}  // namespace edgecache
