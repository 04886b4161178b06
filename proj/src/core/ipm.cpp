/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 edgecache contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#include "core/ipm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "core/rng.hpp"

namespace edgecache {

namespace {

constexpr double kPhase1Infeasible = 1e-6;
constexpr double kGammaMin = 1e-9;
constexpr double kInteriorMargin = 0.02;
constexpr int kInnerMax = 60;

double inf() { return std::numeric_limits<double>::infinity(); }

// Presolved view of the relaxation: fixed binaries folded into constants,
// capacity rows with no freedom dropped, selection-count groups with a forced
// outcome resolved. All constraints are linear; the objective carries every
// nonlinearity.
struct Workspace {
  const MinlpProblem* p = nullptr;
  IpmParams params;
  Fixings fixed;  // size Jx + Jy, -1 free
  double phase1 = 0.0;

  struct CapRow {
    int node;
    double headroom;  // capacity minus the load fixed at 1
    std::vector<int> x_ids;
    std::vector<double> sizes;
  };
  std::vector<CapRow> cap_rows;

  // sigma2 = z + coef_y*y + coef_x*x + constant; ids -1 when folded
  struct SelRow {
    int z_id;
    int y_id;
    int x_id;
    double coef_y;
    double coef_x;
    double constant;
  };
  std::vector<SelRow> sel_rows;

  struct Group {
    std::vector<int> y_ids;  // free members, indices into the y block
    double rhs;
  };
  std::vector<Group> groups;

  // per-(n,i) view for the exact inner solves: the (y, z) block of one
  // content at one node, which is convex for fixed x
  struct GroupSolve {
    int z_id;
    double rhs;                    // required sum of the free y members
    std::vector<int> free_rows;    // indices into sel_rows with a free y
    std::vector<int> fixed_rows;   // remaining rows of this (n, i)
  };
  std::vector<GroupSolve> group_solves;  // one per (n, i)

  std::vector<double> z_upper;
  std::vector<int> free_x;  // x block indices
  std::vector<int> free_y;  // y block indices

  int Jx() const { return p->x_count; }
  int Jy() const { return p->y_count; }
  int Jz() const { return p->z_count; }
  bool no_free_binaries() const { return free_x.empty() && free_y.empty(); }

  void build(const MinlpProblem& problem, const Fixings& fixings, const IpmParams& prm) {
    p = &problem;
    params = prm;
    const int jx = p->x_count, jy = p->y_count;
    fixed.assign(static_cast<size_t>(jx) + jy, int8_t{-1});
    if (!fixings.empty()) {
      if (static_cast<int>(fixings.size()) != jx + jy)
        throw ScenarioError("fixings size does not match the binary count");
      fixed = fixings;
    }
    phase1 = 0.0;
    const Scenario& s = p->scenario;
    const int N = s.node_count();
    const int I = s.content_count();

    // capacity rows: drop decided rows, force frees to zero when no headroom
    for (int n = 0; n < N; ++n) {
      double fixed_load = 0.0;
      std::vector<int> free_ids;
      std::vector<double> sizes;
      for (int i = 0; i < I; ++i) {
        const int j = p->x_index(n, i);
        if (fixed[j] == 1) fixed_load += s.contents[i].size_mbit;
        if (fixed[j] < 0) {
          free_ids.push_back(j);
          sizes.push_back(s.contents[i].size_mbit);
        }
      }
      const double headroom = s.nodes[n].capacity_mbit - fixed_load;
      if (headroom < 0.0) phase1 += -headroom;
      if (free_ids.empty()) continue;
      if (headroom <= 0.0) {
        for (int j : free_ids) fixed[j] = 0;
      } else {
        cap_rows.push_back({n, headroom, std::move(free_ids), std::move(sizes)});
      }
    }

    // selection-count groups: rhs is integral, so forced outcomes are exact
    for (int n = 0; n < N; ++n) {
      const int deg = p->degree(n);
      if (deg == 0) continue;  // isolated BS: no selection rows at all
      for (int i = 0; i < I; ++i) {
        int rhs = deg - 1;
        std::vector<int> free_ids;
        for (int t = 0; t < deg; ++t) {
          const int yj = p->y_index(n, t, i);
          const int8_t f = fixed[jx + yj];
          if (f < 0)
            free_ids.push_back(yj);
          else
            rhs -= f;
        }
        if (free_ids.empty()) {
          phase1 += std::abs(rhs);
          continue;
        }
        const int k = static_cast<int>(free_ids.size());
        if (rhs <= 0) {
          phase1 += std::max(0, -rhs);
          for (int yj : free_ids) fixed[jx + yj] = 0;
        } else if (rhs >= k) {
          phase1 += std::max(0, rhs - k);
          for (int yj : free_ids) fixed[jx + yj] = 1;
        } else {
          groups.push_back({std::move(free_ids), static_cast<double>(rhs)});
        }
      }
    }

    // selection rows with fixed variables folded into the constant
    sel_rows.reserve(jy);
    z_upper.assign(p->z_count, 2.0);
    for (int n = 0; n < N; ++n) {
      const auto& nb = s.neighbors(n);
      for (int i = 0; i < I; ++i) {
        double max_q0 = 0.0;
        for (int t = 0; t < static_cast<int>(nb.size()); ++t) {
          const int m = nb[t];
          const double per_link =
              s.contents[i].size_mbit / s.topology.link_bandwidth(n, m);
          SelRow row;
          row.z_id = p->z_index(n, i);
          row.coef_y = p->deactivation(n, m, i);
          row.coef_x = -(1.0 - p->big_m) * per_link;  // -dQ/dx
          row.constant = -p->big_m * per_link;        // -Q(0)
          const int yj = p->y_index(n, t, i);
          if (fixed[jx + yj] < 0) {
            row.y_id = yj;
          } else {
            row.y_id = -1;
            row.constant += row.coef_y * fixed[jx + yj];
          }
          const int xj = p->x_index(m, i);
          if (fixed[xj] < 0) {
            row.x_id = xj;
          } else {
            row.x_id = -1;
            row.constant += row.coef_x * fixed[xj];
          }
          sel_rows.push_back(row);
          max_q0 = std::max(max_q0, p->big_m * per_link);
        }
        z_upper[p->z_index(n, i)] = 1.1 * max_q0 + 2.0;

        GroupSolve gs;
        gs.z_id = p->z_index(n, i);
        double rhs = static_cast<double>(nb.size()) - 1.0;
        const int base = static_cast<int>(sel_rows.size()) - static_cast<int>(nb.size());
        for (int t = 0; t < static_cast<int>(nb.size()); ++t) {
          if (sel_rows[base + t].y_id >= 0) {
            gs.free_rows.push_back(base + t);
          } else {
            gs.fixed_rows.push_back(base + t);
            rhs -= fixed[jx + p->y_index(n, t, i)];
          }
        }
        gs.rhs = rhs;
        group_solves.push_back(std::move(gs));
      }
    }

    for (int j = 0; j < jx; ++j)
      if (fixed[j] < 0) free_x.push_back(j);
    for (int j = 0; j < jy; ++j)
      if (fixed[jx + j] < 0) free_y.push_back(j);
  }

  double sigma1(const Assignment& a, const CapRow& row) const {
    double sigma = row.headroom;
    for (size_t k = 0; k < row.x_ids.size(); ++k) sigma -= row.sizes[k] * a.x[row.x_ids[k]];
    return sigma;
  }

  double sigma2(const Assignment& a, const SelRow& row) const {
    double sigma = a.z[row.z_id] + row.constant;
    if (row.y_id >= 0) sigma += row.coef_y * a.y[row.y_id];
    if (row.x_id >= 0) sigma += row.coef_x * a.x[row.x_id];
    return sigma;
  }

  void mask_fixed(Assignment& v) const {
    for (int j = 0; j < Jx(); ++j)
      if (fixed[j] >= 0) v.x[j] = 0.0;
    for (int j = 0; j < Jy(); ++j)
      if (fixed[Jx() + j] >= 0) v.y[j] = 0.0;
  }

  void project_groups(Assignment& v) const {
    for (const Group& g : groups) {
      double mean = 0.0;
      for (int yj : g.y_ids) mean += v.y[yj];
      mean /= static_cast<double>(g.y_ids.size());
      for (int yj : g.y_ids) v.y[yj] -= mean;
    }
  }

  double barrier_value(const Assignment& a, double gamma) const {
    double logs = 0.0;
    for (const CapRow& row : cap_rows) {
      const double sigma = sigma1(a, row);
      if (sigma <= 0.0) return inf();
      logs += std::log(sigma);
    }
    for (const SelRow& row : sel_rows) {
      const double sigma = sigma2(a, row);
      if (sigma <= 0.0) return inf();
      logs += std::log(sigma);
    }
    for (int j : free_x) {
      const double v = a.x[j];
      if (v <= 0.0 || v >= 1.0) return inf();
      logs += std::log(v) + std::log(1.0 - v);
    }
    for (int j : free_y) {
      const double v = a.y[j];
      if (v <= 0.0 || v >= 1.0) return inf();
      logs += std::log(v) + std::log(1.0 - v);
    }
    for (int j = 0; j < Jz(); ++j) {
      const double v = a.z[j];
      if (v <= 0.0 || v >= z_upper[j]) return inf();
      logs += std::log(v) + std::log(z_upper[j] - v);
    }
    return evaluate_objective(*p, a) - gamma * logs;
  }

  void barrier_gradient(const Assignment& a, double gamma, Assignment& g) const {
    objective_gradient(*p, a, g.x, g.z);
    g.y.setZero(Jy());
    for (const CapRow& row : cap_rows) {
      const double scale = gamma / sigma1(a, row);
      for (size_t k = 0; k < row.x_ids.size(); ++k) g.x[row.x_ids[k]] += scale * row.sizes[k];
    }
    for (const SelRow& row : sel_rows) {
      const double scale = gamma / sigma2(a, row);
      g.z[row.z_id] -= scale;
      if (row.y_id >= 0) g.y[row.y_id] -= scale * row.coef_y;
      if (row.x_id >= 0) g.x[row.x_id] -= scale * row.coef_x;
    }
    for (int j : free_x) g.x[j] += gamma * (1.0 / (1.0 - a.x[j]) - 1.0 / a.x[j]);
    for (int j : free_y) g.y[j] += gamma * (1.0 / (1.0 - a.y[j]) - 1.0 / a.y[j]);
    for (int j = 0; j < Jz(); ++j)
      g.z[j] += gamma * (1.0 / (z_upper[j] - a.z[j]) - 1.0 / a.z[j]);
    mask_fixed(g);
    project_groups(g);
  }

  void barrier_hvp(const Assignment& a, const Assignment& v, double gamma, Assignment& out) const {
    objective_hvp(*p, a, v.x, v.z, out.x, out.z);
    out.y.setZero(Jy());
    for (const CapRow& row : cap_rows) {
      const double sigma = sigma1(a, row);
      double av = 0.0;
      for (size_t k = 0; k < row.x_ids.size(); ++k) av += row.sizes[k] * v.x[row.x_ids[k]];
      const double scale = gamma / (sigma * sigma) * av;
      for (size_t k = 0; k < row.x_ids.size(); ++k) out.x[row.x_ids[k]] += scale * row.sizes[k];
    }
    for (const SelRow& row : sel_rows) {
      const double sigma = sigma2(a, row);
      double av = v.z[row.z_id];
      if (row.y_id >= 0) av += row.coef_y * v.y[row.y_id];
      if (row.x_id >= 0) av += row.coef_x * v.x[row.x_id];
      const double scale = gamma / (sigma * sigma) * av;
      out.z[row.z_id] += scale;
      if (row.y_id >= 0) out.y[row.y_id] += scale * row.coef_y;
      if (row.x_id >= 0) out.x[row.x_id] += scale * row.coef_x;
    }
    for (int j : free_x) {
      const double lo = a.x[j], hi = 1.0 - a.x[j];
      out.x[j] += gamma * (1.0 / (lo * lo) + 1.0 / (hi * hi)) * v.x[j];
    }
    for (int j : free_y) {
      const double lo = a.y[j], hi = 1.0 - a.y[j];
      out.y[j] += gamma * (1.0 / (lo * lo) + 1.0 / (hi * hi)) * v.y[j];
    }
    for (int j = 0; j < Jz(); ++j) {
      const double lo = a.z[j], hi = z_upper[j] - a.z[j];
      out.z[j] += gamma * (1.0 / (lo * lo) + 1.0 / (hi * hi)) * v.z[j];
    }
    mask_fixed(out);
    project_groups(out);
  }

  // Diagonal of the barrier Hessian: the objective is multilinear (zero
  // diagonal), so only constraint rows and bound terms contribute. Used as a
  // Jacobi preconditioner; the W-scaled selection rows make the system far
  // too ill-conditioned for plain CG.
  void hessian_diag(const Assignment& a, double gamma, Assignment& diag) const {
    diag.x.setConstant(Jx(), 1e-12);
    diag.y.setConstant(Jy(), 1e-12);
    diag.z.setConstant(Jz(), 1e-12);
    for (const CapRow& row : cap_rows) {
      const double sigma = sigma1(a, row);
      const double scale = gamma / (sigma * sigma);
      for (size_t k = 0; k < row.x_ids.size(); ++k)
        diag.x[row.x_ids[k]] += scale * row.sizes[k] * row.sizes[k];
    }
    for (const SelRow& row : sel_rows) {
      const double sigma = sigma2(a, row);
      const double scale = gamma / (sigma * sigma);
      diag.z[row.z_id] += scale;
      if (row.y_id >= 0) diag.y[row.y_id] += scale * row.coef_y * row.coef_y;
      if (row.x_id >= 0) diag.x[row.x_id] += scale * row.coef_x * row.coef_x;
    }
    for (int j : free_x) {
      const double lo = a.x[j], hi = 1.0 - a.x[j];
      diag.x[j] += gamma * (1.0 / (lo * lo) + 1.0 / (hi * hi));
    }
    for (int j : free_y) {
      const double lo = a.y[j], hi = 1.0 - a.y[j];
      diag.y[j] += gamma * (1.0 / (lo * lo) + 1.0 / (hi * hi));
    }
    for (int j = 0; j < Jz(); ++j) {
      const double lo = a.z[j], hi = z_upper[j] - a.z[j];
      diag.z[j] += gamma * (1.0 / (lo * lo) + 1.0 / (hi * hi));
    }
  }

  double fraction_to_boundary(const Assignment& a, const Assignment& d) const {
    const double tau = params.fraction_to_boundary;
    double alpha = 1.0;
    auto cap = [&](double value, double delta) {
      if (delta < 0.0) alpha = std::min(alpha, -tau * value / delta);
    };
    for (int j : free_x) {
      cap(a.x[j], d.x[j]);
      cap(1.0 - a.x[j], -d.x[j]);
    }
    for (int j : free_y) {
      cap(a.y[j], d.y[j]);
      cap(1.0 - a.y[j], -d.y[j]);
    }
    for (int j = 0; j < Jz(); ++j) {
      cap(a.z[j], d.z[j]);
      cap(z_upper[j] - a.z[j], -d.z[j]);
    }
    for (const CapRow& row : cap_rows) {
      double delta = 0.0;
      for (size_t k = 0; k < row.x_ids.size(); ++k) delta -= row.sizes[k] * d.x[row.x_ids[k]];
      cap(sigma1(a, row), delta);
    }
    for (const SelRow& row : sel_rows) {
      double delta = d.z[row.z_id];
      if (row.y_id >= 0) delta += row.coef_y * d.y[row.y_id];
      if (row.x_id >= 0) delta += row.coef_x * d.x[row.x_id];
      cap(sigma2(a, row), delta);
    }
    return alpha;
  }

  // z at its row-determined lower bound (clamped at zero)
  void analytic_z(Assignment& a) const {
    a.z.setZero(Jz());
    for (const SelRow& row : sel_rows) {
      double bound = -row.constant;
      if (row.y_id >= 0) bound -= row.coef_y * a.y[row.y_id];
      if (row.x_id >= 0) bound -= row.coef_x * a.x[row.x_id];
      a.z[row.z_id] = std::max(a.z[row.z_id], bound);
    }
    for (int j = 0; j < Jz(); ++j) a.z[j] = std::max(a.z[j], 0.0);
  }

  // objective coefficient of z_{n,i}: weight * (1-x_n) * (1-prod(1-x_m))
  double z_coefficient(const Assignment& a, int n, int i) const {
    double prod = 1.0;
    for (int m : p->scenario.neighbors(n)) prod *= 1.0 - a.x[p->x_index(m, i)];
    const size_t at = static_cast<size_t>(n) * p->contents() + i;
    return p->weight[at] * (1.0 - a.x[p->x_index(n, i)]) * (1.0 - prod);
  }

  // Exact solve of one (y, z) group for fixed x: the block is convex (linear
  // cost, log barriers over affine slacks, one linear equality), so a damped
  // Newton on the KKT system converges fast. Updates a in place.
  void solve_group(const GroupSolve& g, Assignment& a, double c_z, double gamma) const {
    const int k = static_cast<int>(g.free_rows.size());
    const double zu = z_upper[g.z_id];

    // row thresholds: sigma2 = z + W*y - q for free rows, z - q for fixed
    std::vector<double> q_free(k), w_free(k);
    for (int t = 0; t < k; ++t) {
      const SelRow& row = sel_rows[g.free_rows[t]];
      double q = -row.constant;
      if (row.x_id >= 0) q -= row.coef_x * a.x[row.x_id];
      q_free[t] = q;
      w_free[t] = row.coef_y;
    }
    std::vector<double> q_fixed;
    q_fixed.reserve(g.fixed_rows.size());
    for (int idx : g.fixed_rows) {
      const SelRow& row = sel_rows[idx];
      double q = -row.constant;
      if (row.x_id >= 0) q -= row.coef_x * a.x[row.x_id];
      q_fixed.push_back(q);
    }

    // strictly feasible start: keep the warm point when possible
    Eigen::VectorXd y(k);
    bool warm_ok = k > 0;
    double ysum = 0.0;
    for (int t = 0; t < k; ++t) {
      y[t] = a.y[sel_rows[g.free_rows[t]].y_id];
      ysum += y[t];
      if (y[t] < 1e-12 || y[t] > 1.0 - 1e-12) warm_ok = false;
    }
    if (k > 0 && (!warm_ok || std::abs(ysum - g.rhs) > 1e-9)) y.setConstant(g.rhs / k);
    double z_lb = 0.0;
    for (double q : q_fixed) z_lb = std::max(z_lb, q);
    for (int t = 0; t < k; ++t) z_lb = std::max(z_lb, q_free[t] - w_free[t] * y[t]);
    double z = a.z[g.z_id];
    if (!(z > z_lb + 1e-12 && z < zu - 1e-12))
      z = std::min(std::max(z_lb, 0.0) + 1.0, 0.5 * (std::max(z_lb, 0.0) + zu));

    const double tol = 1e-13 * (1.0 + std::abs(c_z) + gamma);
    auto value = [&](const Eigen::VectorXd& yy, double zz) {
      if (zz <= 0.0 || zz >= zu) return inf();
      double logs = std::log(zz) + std::log(zu - zz);
      for (double q : q_fixed) {
        const double s = zz - q;
        if (s <= 0.0) return inf();
        logs += std::log(s);
      }
      for (int t = 0; t < k; ++t) {
        if (yy[t] <= 0.0 || yy[t] >= 1.0) return inf();
        const double s = zz + w_free[t] * yy[t] - q_free[t];
        if (s <= 0.0) return inf();
        logs += std::log(s) + std::log(yy[t]) + std::log(1.0 - yy[t]);
      }
      return c_z * zz - gamma * logs;
    };

    Eigen::VectorXd grad(k + 1);
    Eigen::MatrixXd kkt(k + 2, k + 2);
    Eigen::VectorXd rhs_vec(k + 2);
    for (int iter = 0; iter < 120; ++iter) {
      grad.setZero();
      kkt.setZero();
      double gz = c_z - gamma * (1.0 / z - 1.0 / (zu - z));
      double hzz = gamma * (1.0 / (z * z) + 1.0 / ((zu - z) * (zu - z)));
      for (double q : q_fixed) {
        const double s = z - q;
        gz -= gamma / s;
        hzz += gamma / (s * s);
      }
      for (int t = 0; t < k; ++t) {
        const double s = z + w_free[t] * y[t] - q_free[t];
        const double lam = gamma / s;
        const double curv = gamma / (s * s);
        gz -= lam;
        hzz += curv;
        grad[t] = -lam * w_free[t] - gamma * (1.0 / y[t] - 1.0 / (1.0 - y[t]));
        kkt(t, t) = curv * w_free[t] * w_free[t] +
                    gamma * (1.0 / (y[t] * y[t]) + 1.0 / ((1.0 - y[t]) * (1.0 - y[t])));
        kkt(t, k) = kkt(k, t) = curv * w_free[t];
      }
      grad[k] = gz;
      kkt(k, k) = hzz;
      for (int t = 0; t < k; ++t) kkt(t, k + 1) = kkt(k + 1, t) = 1.0;

      // projected gradient: subtract the equality multiplier from the y part
      double mean = 0.0;
      for (int t = 0; t < k; ++t) mean += grad[t];
      if (k > 0) mean /= k;
      double gnorm = std::abs(grad[k]);
      for (int t = 0; t < k; ++t) gnorm = std::max(gnorm, std::abs(grad[t] - mean));
      if (gnorm <= tol) break;

      rhs_vec.setZero();
      rhs_vec.head(k + 1) = -grad;
      Eigen::VectorXd sol = kkt.partialPivLu().solve(rhs_vec);
      Eigen::VectorXd dy = sol.head(k);
      const double dz = sol[k];

      double alpha = 1.0;
      auto cap = [&alpha](double v, double dv) {
        if (dv < 0.0) alpha = std::min(alpha, -0.995 * v / dv);
      };
      for (int t = 0; t < k; ++t) {
        cap(y[t], dy[t]);
        cap(1.0 - y[t], -dy[t]);
        cap(z + w_free[t] * y[t] - q_free[t], dz + w_free[t] * dy[t]);
      }
      cap(z, dz);
      cap(zu - z, -dz);
      for (double q : q_fixed) cap(z - q, dz);

      const double f0 = value(y, z);
      double slope = grad[k] * dz;
      for (int t = 0; t < k; ++t) slope += grad[t] * dy[t];
      bool accepted = false;
      for (int ls = 0; ls < 40 && alpha > 1e-16; ++ls) {
        Eigen::VectorXd yt = y + alpha * dy;
        const double zt = z + alpha * dz;
        if (value(yt, zt) <= f0 + 1e-4 * alpha * slope) {
          y = std::move(yt);
          z = zt;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
    }
    for (int t = 0; t < k; ++t) a.y[sel_rows[g.free_rows[t]].y_id] = y[t];
    a.z[g.z_id] = z;
  }

  void solve_groups(Assignment& a, double gamma) const {
    const int I = p->contents();
    for (int n = 0; n < p->nodes(); ++n) {
      for (int i = 0; i < I; ++i) {
        const GroupSolve& g = group_solves[static_cast<size_t>(n) * I + i];
        solve_group(g, a, z_coefficient(a, n, i), gamma);
      }
    }
  }

  // Exact reduced Hessian of the x problem with (y, z) eliminated: per group
  // the correction is C^T K^-1 C with K the group's KKT matrix, computable
  // exactly because the (y, z) blocks are tiny and independent.
  struct ReducedSystem {
    struct GroupFactor {
      int k = 0;  // free y count
      Eigen::PartialPivLU<Eigen::MatrixXd> lu;
      double hzz = 0.0;  // used when k == 0
      // coupling entries (x index, position in (y..., z), value)
      std::vector<std::tuple<int, int, double>> cross;
    };
    std::vector<GroupFactor> factors;
  };

  void prepare_reduced(const Assignment& a, double gamma, ReducedSystem& rs) const {
    const int I = p->contents();
    rs.factors.clear();
    rs.factors.resize(group_solves.size());
    std::vector<double> q, pre, suf;
    for (int n = 0; n < p->nodes(); ++n) {
      const auto& nb = p->scenario.neighbors(n);
      const int deg = static_cast<int>(nb.size());
      q.resize(deg);
      pre.assign(deg + 1, 1.0);
      suf.assign(deg + 1, 1.0);
      for (int i = 0; i < I; ++i) {
        const size_t gi = static_cast<size_t>(n) * I + i;
        const GroupSolve& g = group_solves[gi];
        ReducedSystem::GroupFactor& f = rs.factors[gi];
        const int k = static_cast<int>(g.free_rows.size());
        f.k = k;

        const double z = a.z[g.z_id];
        const double zu = z_upper[g.z_id];
        double hzz = gamma * (1.0 / (z * z) + 1.0 / ((zu - z) * (zu - z)));
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 2, k + 2);
        for (int t = 0; t < k; ++t) {
          const SelRow& row = sel_rows[g.free_rows[t]];
          const double s = sigma2(a, row);
          const double curv = gamma / (s * s);
          const double yv = a.y[row.y_id];
          hzz += curv;
          kkt(t, t) = curv * row.coef_y * row.coef_y +
                      gamma * (1.0 / (yv * yv) + 1.0 / ((1.0 - yv) * (1.0 - yv)));
          kkt(t, k) = kkt(k, t) = curv * row.coef_y;
          if (row.x_id >= 0 && fixed[row.x_id] < 0) {
            const double c = curv * row.coef_x;
            f.cross.emplace_back(row.x_id, t, c * row.coef_y);
            f.cross.emplace_back(row.x_id, k, c);
          }
        }
        for (int idx : g.fixed_rows) {
          const SelRow& row = sel_rows[idx];
          const double s = sigma2(a, row);
          hzz += gamma / (s * s);
          if (row.x_id >= 0 && fixed[row.x_id] < 0)
            f.cross.emplace_back(row.x_id, k, gamma / (s * s) * row.coef_x);
        }
        // objective cross terms d2F/dz dx
        const size_t at = static_cast<size_t>(n) * I + i;
        for (int t = 0; t < deg; ++t) q[t] = 1.0 - a.x[p->x_index(nb[t], i)];
        for (int t = 0; t < deg; ++t) pre[t + 1] = pre[t] * q[t];
        for (int t = deg - 1; t >= 0; --t) suf[t] = suf[t + 1] * q[t];
        const double prod = pre[deg];
        const double big_a = 1.0 - a.x[p->x_index(n, i)];
        const double w0 = p->weight[at];
        const int xn = p->x_index(n, i);
        if (fixed[xn] < 0) f.cross.emplace_back(xn, k, w0 * (prod - 1.0));
        for (int t = 0; t < deg; ++t) {
          const int xm = p->x_index(nb[t], i);
          if (fixed[xm] < 0) f.cross.emplace_back(xm, k, w0 * big_a * pre[t] * suf[t + 1]);
        }

        kkt(k, k) = hzz;
        f.hzz = hzz;
        if (k > 0) {
          for (int t = 0; t < k; ++t) kkt(t, k + 1) = kkt(k + 1, t) = 1.0;
          f.lu.compute(kkt);
        }
      }
    }
  }

  void reduced_hvp(const Assignment& a, const Eigen::VectorXd& vx, double gamma,
                   const ReducedSystem& rs, Assignment& scratch_in, Assignment& scratch_out,
                   Eigen::VectorXd& out) const {
    scratch_in.x = vx;
    scratch_in.y.setZero(Jy());
    scratch_in.z.setZero(Jz());
    barrier_hvp(a, scratch_in, gamma, scratch_out);
    out = scratch_out.x;
    Eigen::VectorXd rhs, sol;
    for (const auto& f : rs.factors) {
      if (f.cross.empty()) continue;
      if (f.k == 0) {
        double r = 0.0;
        for (const auto& [xj, pos, val] : f.cross) r += val * vx[xj];
        const double wz = r / f.hzz;
        for (const auto& [xj, pos, val] : f.cross) out[xj] -= val * wz;
      } else {
        rhs.setZero(f.k + 2);
        for (const auto& [xj, pos, val] : f.cross) rhs[pos] += val * vx[xj];
        sol = f.lu.solve(rhs);
        for (const auto& [xj, pos, val] : f.cross) out[xj] -= val * sol[pos];
      }
    }
    for (int j = 0; j < Jx(); ++j)
      if (fixed[j] >= 0) out[j] = 0.0;
  }

  // Jacobi preconditioner for the reduced system: bound and capacity
  // curvature only (the selection-row x curvature mostly cancels against the
  // Schur correction).
  void reduced_diag(const Assignment& a, double gamma, Eigen::VectorXd& diag) const {
    diag.setConstant(Jx(), 1e-12);
    for (const CapRow& row : cap_rows) {
      const double sigma = sigma1(a, row);
      const double scale = gamma / (sigma * sigma);
      for (size_t t = 0; t < row.x_ids.size(); ++t)
        diag[row.x_ids[t]] += scale * row.sizes[t] * row.sizes[t];
    }
    for (int j : free_x) {
      const double lo = a.x[j], hi = 1.0 - a.x[j];
      diag[j] += gamma * (1.0 / (lo * lo) + 1.0 / (hi * hi));
    }
  }

  // boundary cap for a move in x only; the (y, z) blocks are re-solved after
  // the step, so only x bounds and capacity slacks restrict it
  double fraction_to_boundary_x(const Assignment& a, const Eigen::VectorXd& dx,
                                int* blocking = nullptr) const {
    const double tau = params.fraction_to_boundary;
    double alpha = 1.0;
    int who = -1;
    auto cap = [&](double value, double delta, int id) {
      if (delta < 0.0 && -tau * value / delta < alpha) {
        alpha = -tau * value / delta;
        who = id;
      }
    };
    for (int j : free_x) {
      cap(a.x[j], dx[j], j);
      cap(1.0 - a.x[j], -dx[j], j);
    }
    for (const CapRow& row : cap_rows) {
      double delta = 0.0;
      for (size_t k = 0; k < row.x_ids.size(); ++k) delta -= row.sizes[k] * dx[row.x_ids[k]];
      cap(sigma1(a, row), delta, -row.node - 2);
    }
    if (blocking) *blocking = who;
    return alpha;
  }
};

double dot(const Assignment& a, const Assignment& b) {
  return a.x.dot(b.x) + a.y.dot(b.y) + a.z.dot(b.z);
}

void axpy(double alpha, const Assignment& v, Assignment& out) {
  out.x += alpha * v.x;
  out.y += alpha * v.y;
  out.z += alpha * v.z;
}

double max_norm(const Assignment& a) {
  double m = 0.0;
  if (a.x.size()) m = std::max(m, a.x.cwiseAbs().maxCoeff());
  if (a.y.size()) m = std::max(m, a.y.cwiseAbs().maxCoeff());
  if (a.z.size()) m = std::max(m, a.z.cwiseAbs().maxCoeff());
  return m;
}

Assignment zeros_like(const Workspace& w) {
  Assignment v;
  v.x.setZero(w.Jx());
  v.y.setZero(w.Jy());
  v.z.setZero(w.Jz());
  return v;
}

struct CgResult {
  Assignment direction;
  bool negative_curvature = false;
  int iterations = 0;
};

// Projected Steihaug-style CG on the barrier quadratic model; truncates on
// indefinite curvature, steepest descent when that happens immediately.
CgResult cg_solve(const Workspace& w, const Assignment& a, const Assignment& grad, double gamma) {
  CgResult res;
  res.direction = zeros_like(w);
  Assignment diag = zeros_like(w);
  w.hessian_diag(a, gamma, diag);
  auto precondition = [&](const Assignment& v) {
    Assignment out;
    out.x = v.x.cwiseQuotient(diag.x);
    out.y = v.y.cwiseQuotient(diag.y);
    out.z = v.z.cwiseQuotient(diag.z);
    w.mask_fixed(out);
    w.project_groups(out);
    return out;
  };

  Assignment r;
  r.x = -grad.x;
  r.y = -grad.y;
  r.z = -grad.z;
  const double res0 = std::sqrt(dot(r, r));
  if (res0 == 0.0) return res;
  Assignment pz = precondition(r);
  Assignment d = pz;
  Assignment hd = zeros_like(w);
  double rho = dot(r, pz);
  for (int it = 0; it < w.params.max_cg; ++it) {
    w.barrier_hvp(a, d, gamma, hd);
    const double curv = dot(d, hd);
    if (curv <= 1e-14 * dot(d, d)) {
      res.negative_curvature = true;
      if (it == 0) res.direction = pz;  // preconditioned steepest descent
      return res;
    }
    const double alpha = rho / curv;
    axpy(alpha, d, res.direction);
    axpy(-alpha, hd, r);
    res.iterations = it + 1;
    if (std::sqrt(dot(r, r)) <= 1e-10 * res0) return res;
    pz = precondition(r);
    const double rho_next = dot(r, pz);
    if (rho_next <= 0.0) return res;  // projection/rounding noise: stop here
    const double beta = rho_next / rho;
    d.x = pz.x + beta * d.x;
    d.y = pz.y + beta * d.y;
    d.z = pz.z + beta * d.z;
    rho = rho_next;
  }
  return res;
}

// Preconditioned CG over the x block alone; the (y, z) block is handled by
// the exact group solves, so the outer quadratic model never sees the big-M
// coefficients.
struct CgXResult {
  Eigen::VectorXd dx;
  bool negative_curvature = false;
  int iterations = 0;
};

CgXResult cg_solve_x(const Workspace& w, const Assignment& a, const Eigen::VectorXd& gx,
                     double gamma, const Workspace::ReducedSystem& rs) {
  CgXResult res;
  res.dx.setZero(w.Jx());
  Eigen::VectorXd diag;
  w.reduced_diag(a, gamma, diag);
  Assignment vin = zeros_like(w);
  Assignment vout = zeros_like(w);
  Eigen::VectorXd hout;
  auto hvp_x = [&](const Eigen::VectorXd& v) {
    w.reduced_hvp(a, v, gamma, rs, vin, vout, hout);
    return hout;
  };
  auto precondition = [&](const Eigen::VectorXd& r) {
    Eigen::VectorXd out = r.cwiseQuotient(diag);
    for (int j = 0; j < w.Jx(); ++j)
      if (w.fixed[j] >= 0) out[j] = 0.0;
    return out;
  };

  Eigen::VectorXd r = -gx;
  const double res0 = r.norm();
  if (res0 == 0.0) return res;
  Eigen::VectorXd pz = precondition(r);
  Eigen::VectorXd d = pz;
  double rho = r.dot(pz);
  for (int it = 0; it < w.params.max_cg; ++it) {
    const Eigen::VectorXd hd = hvp_x(d);
    const double curv = d.dot(hd);
    if (curv <= 1e-14 * d.squaredNorm()) {
      res.negative_curvature = true;
      if (it == 0) res.dx = pz;
      return res;
    }
    const double alpha = rho / curv;
    res.dx += alpha * d;
    r -= alpha * hd;
    res.iterations = it + 1;
    if (r.norm() <= 1e-10 * res0) return res;
    pz = precondition(r);
    const double rho_next = r.dot(pz);
    if (rho_next <= 0.0) return res;
    d = pz + (rho_next / rho) * d;
    rho = rho_next;
  }
  return res;
}

// Strictly interior start honoring fixings, group sums and capacity slacks.
// kind 0: center, kind 1: rounded parent, kind 2: random.
Assignment make_start(const Workspace& w, int kind, uint64_t seed, const Assignment* parent) {
  Assignment a = zeros_like(w);
  for (int j = 0; j < w.Jx(); ++j)
    if (w.fixed[j] >= 0) a.x[j] = w.fixed[j];
  for (int j = 0; j < w.Jy(); ++j)
    if (w.fixed[w.Jx() + j] >= 0) a.y[j] = w.fixed[w.Jx() + j];

  Rng rng(seed);
  for (const auto& row : w.cap_rows) {
    double load = 0.0;
    std::vector<double> vals(row.x_ids.size());
    for (size_t k = 0; k < row.x_ids.size(); ++k) {
      double v = 0.5;
      if (kind == 1 && parent) v = std::clamp(std::round((*parent).x[row.x_ids[k]]), 0.05, 0.95);
      if (kind == 2) v = rng.uniform(0.1, 0.9);
      vals[k] = v;
      load += v * row.sizes[k];
    }
    double scale = 1.0;
    if (load > 0.9 * row.headroom) scale = 0.9 * row.headroom / load;
    for (size_t k = 0; k < row.x_ids.size(); ++k)
      a.x[row.x_ids[k]] = std::clamp(vals[k] * scale, 1e-4, 0.999);
  }

  for (const auto& g : w.groups) {
    const int k = static_cast<int>(g.y_ids.size());
    const double center = g.rhs / k;
    std::vector<double> vals(g.y_ids.size(), center);
    if (kind == 1 && parent) {
      for (int t = 0; t < k; ++t) vals[t] = std::clamp((*parent).y[g.y_ids[t]], 0.05, 0.95);
    } else if (kind == 2) {
      for (int t = 0; t < k; ++t) vals[t] = rng.uniform(0.1, 0.9);
    }
    // shift to the exact group sum, retreat to the center if clamping fights
    bool ok = false;
    for (int rounds = 0; rounds < 8 && !ok; ++rounds) {
      double sum = 0.0;
      for (double v : vals) sum += v;
      const double shift = (g.rhs - sum) / k;
      bool clamped = false;
      for (double& v : vals) {
        v += shift;
        if (v < kInteriorMargin || v > 1.0 - kInteriorMargin) {
          v = std::clamp(v, kInteriorMargin, 1.0 - kInteriorMargin);
          clamped = true;
        }
      }
      ok = !clamped;
    }
    double sum = 0.0;
    for (double v : vals) sum += v;
    if (std::abs(sum - g.rhs) > 1e-9)
      for (double& v : vals) v = center;
    for (int t = 0; t < k; ++t) a.y[g.y_ids[t]] = vals[t];
  }

  w.analytic_z(a);
  for (int j = 0; j < w.Jz(); ++j) {
    double v = a.z[j] + 1.0;
    if (kind == 1 && parent && parent->z.size() == w.Jz())
      v = std::max(v, std::min(parent->z[j], w.z_upper[j] - 1.0));
    a.z[j] = std::clamp(v, 1e-6, w.z_upper[j] - 1.0);
  }
  return a;
}

Multipliers extract_multipliers(const Workspace& w, const Assignment& a, double gamma) {
  const MinlpProblem& p = *w.p;
  Multipliers m;
  m.capacity.setZero(p.nodes());
  m.selection.setZero(static_cast<int>(w.sel_rows.size()));
  m.lower.setZero(p.x_count + p.y_count + p.z_count);
  m.upper.setZero(p.x_count + p.y_count);
  m.equality.setZero(p.nodes() * p.contents());
  if (gamma == 0.0) return m;  // leaf path: sigma can sit exactly on a bound
  for (const auto& row : w.cap_rows) m.capacity[row.node] = gamma / w.sigma1(a, row);
  for (size_t r = 0; r < w.sel_rows.size(); ++r)
    m.selection[static_cast<int>(r)] = gamma / w.sigma2(a, w.sel_rows[r]);
  for (int j : w.free_x) {
    m.lower[j] = gamma / a.x[j];
    m.upper[j] = gamma / (1.0 - a.x[j]);
  }
  for (int j : w.free_y) {
    m.lower[p.x_count + j] = gamma / a.y[j];
    m.upper[p.x_count + j] = gamma / (1.0 - a.y[j]);
  }
  for (int j = 0; j < p.z_count; ++j)
    m.lower[p.x_count + p.y_count + j] = gamma / std::max(a.z[j], 1e-300);

  // equality multipliers: the group means of the unprojected y gradient
  Eigen::VectorXd gy = Eigen::VectorXd::Zero(p.y_count);
  for (size_t r = 0; r < w.sel_rows.size(); ++r) {
    const auto& row = w.sel_rows[r];
    if (row.y_id >= 0) gy[row.y_id] -= m.selection[static_cast<int>(r)] * row.coef_y;
  }
  for (int j : w.free_y) gy[j] += gamma * (1.0 / (1.0 - a.y[j]) - 1.0 / a.y[j]);
  for (const auto& g : w.groups) {
    double mean = 0.0;
    for (int yj : g.y_ids) mean += gy[yj];
    mean /= static_cast<double>(g.y_ids.size());
    const int yj = g.y_ids.front();
    int n = 0;
    while (n + 1 < p.nodes() && p.y_base[n + 1] <= yj) ++n;
    const int i = (yj - p.y_base[n]) % p.contents();
    m.equality[n * p.contents() + i] = -mean;
  }
  return m;
}

}  // namespace

double phase1_violation(const MinlpProblem& p, const Fixings& fixings) {
  Workspace w;
  w.build(p, fixings, IpmParams{});
  return w.phase1;
}

RelaxedSolution solve_relaxation(const MinlpProblem& p, const Fixings& fixings,
                                 const IpmParams& params, const Assignment* warm_start) {
  Workspace w;
  w.build(p, fixings, params);

  RelaxedSolution best;
  best.status = RelaxStatus::infeasible;
  if (w.phase1 > kPhase1Infeasible) return best;

  // full leaf: every binary decided, z drops to its constraint lower bound
  if (w.no_free_binaries()) {
    Assignment a = zeros_like(w);
    for (int j = 0; j < p.x_count; ++j) a.x[j] = w.fixed[j] > 0 ? 1.0 : 0.0;
    for (int j = 0; j < p.y_count; ++j) a.y[j] = w.fixed[p.x_count + j] > 0 ? 1.0 : 0.0;
    w.analytic_z(a);
    best.assignment = std::move(a);
    best.objective = evaluate_objective(p, best.assignment);
    best.kkt_residual = 0.0;
    best.status = RelaxStatus::optimal;
    best.multipliers = extract_multipliers(w, best.assignment, 0.0);
    return best;
  }

  auto better = [](const RelaxedSolution& lhs, const RelaxedSolution& rhs) {
    const bool lo = lhs.status == RelaxStatus::optimal;
    const bool ro = rhs.status == RelaxStatus::optimal;
    if (lo != ro) return lo;
    return lhs.objective < rhs.objective;
  };

  bool have_best = false;
  const int starts = std::max(1, params.multistarts);
  for (int si = 0; si < starts; ++si) {
    int kind = 2;
    if (si == 0) kind = 0;
    if (si == 1 && warm_start) kind = 1;
    Assignment a =
        make_start(w, kind, Rng::mix(params.seed, 1000 + static_cast<uint64_t>(si)), warm_start);

    RelaxedSolution sol;
    sol.status = RelaxStatus::iteration_limit;
    // gamma0 is relative to the objective force scale at the start; a flat
    // 0.1 would be invisible next to the V-scale gradients and the iterate
    // would slam into the bounds immediately
    double gamma = params.gamma0;
    {
      Eigen::VectorXd gx, gz;
      objective_gradient(p, a, gx, gz);
      double scale = 0.0;
      for (int j : w.free_x) scale = std::max(scale, std::abs(gx[j]));
      scale = std::max(scale, gz.cwiseAbs().maxCoeff());
      gamma *= std::max(1.0, scale);
    }
    Assignment grad = zeros_like(w);
    const bool trace = std::getenv("EDGECACHE_IPM_TRACE") != nullptr;
    bool stalled = false;
    bool done = false;
    for (int stage = 0; stage < params.max_outer && !done; ++stage) {
      ++sol.stages;
      const double stage_tol = std::max(0.1 * gamma, 0.1 * params.kkt_tolerance);
      w.solve_groups(a, gamma);
      Workspace::ReducedSystem rs;
      int flat_steps = 0;
      for (int it = 0; it < kInnerMax; ++it) {
        w.barrier_gradient(a, gamma, grad);
        if (grad.x.size() == 0 || grad.x.cwiseAbs().maxCoeff() <= stage_tol) break;
        if (flat_steps >= 3) break;  // progress stalled at this stage's noise floor
        w.prepare_reduced(a, gamma, rs);
        CgXResult cg = cg_solve_x(w, a, grad.x, gamma, rs);
        const double slope = grad.x.dot(cg.dx);
        if (slope >= 0.0) {
          stalled = true;
          break;
        }
        int blocking = -1;
        const double alpha_fb = w.fraction_to_boundary_x(a, cg.dx, &blocking);
        double alpha = std::min(1.0, alpha_fb);
        const double f0 = w.barrier_value(a, gamma);
        bool accepted = false;
        for (int ls = 0; ls < 50 && alpha > 1e-16; ++ls) {
          Assignment trial = a;
          trial.x += alpha * cg.dx;
          w.solve_groups(trial, gamma);
          const double f = w.barrier_value(trial, gamma);
          if (f <= f0 + 1e-4 * alpha * slope) {
            flat_steps = (f0 - f <= 1e-11 * (1.0 + std::abs(f0))) ? flat_steps + 1 : 0;
            a = std::move(trial);
            accepted = true;
            break;
          }
          alpha *= 0.5;
        }
        ++sol.newton_iterations;
        if (trace)
          std::fprintf(stderr,
                       "ipm stage=%d it=%d gamma=%.2e f=%.6e |gx|=%.2e |dx|=%.2e cg=%d neg=%d "
                       "afb=%.2e blk=%d alpha=%.2e%s\n",
                       stage, it, gamma, f0, grad.x.cwiseAbs().maxCoeff(), cg.dx.norm(),
                       cg.iterations, cg.negative_curvature ? 1 : 0, alpha_fb, blocking, alpha,
                       accepted ? "" : " reject");
        if (!accepted) {
          stalled = true;
          break;
        }
      }
      w.barrier_gradient(a, gamma, grad);
      const double resid = std::max(max_norm(grad), gamma);
      if (resid <= params.kkt_tolerance || gamma <= kGammaMin || stalled) {
        sol.kkt_residual = resid;
        sol.status = resid <= params.kkt_tolerance ? RelaxStatus::optimal
                                                   : RelaxStatus::iteration_limit;
        done = true;
      } else {
        gamma *= params.gamma_factor;
      }
    }
    if (!done) {
      w.barrier_gradient(a, gamma, grad);
      sol.kkt_residual = std::max(max_norm(grad), gamma);
      sol.status = sol.kkt_residual <= params.kkt_tolerance ? RelaxStatus::optimal
                                                            : RelaxStatus::iteration_limit;
    }
    sol.gamma_final = gamma;
    sol.objective = evaluate_objective(p, a);
    sol.multipliers = extract_multipliers(w, a, gamma);
    sol.assignment = std::move(a);

    if (!have_best || better(sol, best)) {
      best = std::move(sol);
      have_best = true;
    }
  }
  return best;
}

double kkt_residual(const MinlpProblem& p, const Assignment& a, const Multipliers& m,
                    double gamma) {
  const Scenario& s = p.scenario;
  const int N = p.nodes();
  const int I = p.contents();
  double worst = 0.0;
  auto track = [&worst](double v) { worst = std::max(worst, std::abs(v)); };

  Eigen::VectorXd rx, rz;
  objective_gradient(p, a, rx, rz);
  Eigen::VectorXd ry = Eigen::VectorXd::Zero(p.y_count);

  for (int n = 0; n < N; ++n) {
    double used = 0.0;
    for (int i = 0; i < I; ++i) used += a.x[p.x_index(n, i)] * s.contents[i].size_mbit;
    const double sigma = s.nodes[n].capacity_mbit - used;
    track(std::max(0.0, -sigma));
    if (m.capacity.size() == N) {
      track(m.capacity[n] * sigma - gamma);
      for (int i = 0; i < I; ++i) rx[p.x_index(n, i)] += m.capacity[n] * s.contents[i].size_mbit;
    }
  }
  int r = 0;
  for (int n = 0; n < N; ++n) {
    const auto& nb = s.neighbors(n);
    for (int i = 0; i < I; ++i) {
      for (int t = 0; t < static_cast<int>(nb.size()); ++t, ++r) {
        const int m_node = nb[t];
        const double q = p.q_value(n, m_node, i, a.x[p.x_index(m_node, i)]);
        const double lhs =
            q - p.deactivation(n, m_node, i) * a.y[p.y_index(n, t, i)] - a.z[p.z_index(n, i)];
        track(std::max(0.0, lhs));
        if (m.selection.size() > r) {
          const double lam = m.selection[r];
          track(lam * (-lhs) - gamma);
          rx[p.x_index(m_node, i)] += lam * p.q_slope(n, m_node, i);
          ry[p.y_index(n, t, i)] -= lam * p.deactivation(n, m_node, i);
          rz[p.z_index(n, i)] -= lam;
        }
      }
      double ysum = 0.0;
      for (int t = 0; t < static_cast<int>(nb.size()); ++t) ysum += a.y[p.y_index(n, t, i)];
      track(ysum - (static_cast<double>(nb.size()) - 1.0));
      if (m.equality.size() == static_cast<Eigen::Index>(N) * I) {
        const double lam = m.equality[n * I + i];
        for (int t = 0; t < static_cast<int>(nb.size()); ++t) ry[p.y_index(n, t, i)] += lam;
      }
    }
  }
  for (int j = 0; j < p.x_count; ++j) {
    track(std::max(0.0, -a.x[j]));
    track(std::max(0.0, a.x[j] - 1.0));
    if (m.lower.size() > j) {
      rx[j] -= m.lower[j];
      track(m.lower[j] * a.x[j] - gamma);
    }
    if (m.upper.size() > j) {
      rx[j] += m.upper[j];
      track(m.upper[j] * (1.0 - a.x[j]) - gamma);
    }
  }
  for (int j = 0; j < p.y_count; ++j) {
    const int jj = p.x_count + j;
    track(std::max(0.0, -a.y[j]));
    track(std::max(0.0, a.y[j] - 1.0));
    if (m.lower.size() > jj) {
      ry[j] -= m.lower[jj];
      track(m.lower[jj] * a.y[j] - gamma);
    }
    if (m.upper.size() > jj) {
      ry[j] += m.upper[jj];
      track(m.upper[jj] * (1.0 - a.y[j]) - gamma);
    }
  }
  for (int j = 0; j < p.z_count; ++j) {
    const int jj = p.x_count + p.y_count + j;
    track(std::max(0.0, -a.z[j]));
    if (m.lower.size() > jj) {
      rz[j] -= m.lower[jj];
      track(m.lower[jj] * a.z[j] - gamma);
    }
  }
  if (p.x_count > 0) track(rx.cwiseAbs().maxCoeff());
  if (p.y_count > 0) track(ry.cwiseAbs().maxCoeff());
  if (p.z_count > 0) track(rz.cwiseAbs().maxCoeff());
  return worst;
}

QuadStep quadratic_step(const MinlpProblem& p, const Fixings& fixings, const Assignment& iterate,
                        double gamma, const IpmParams& params) {
  Workspace w;
  w.build(p, fixings, params);
  Assignment grad = zeros_like(w);
  w.barrier_gradient(iterate, gamma, grad);
  CgResult cg = cg_solve(w, iterate, grad, gamma);

  QuadStep step;
  step.dp = cg.direction;
  step.negative_curvature = cg.negative_curvature;
  step.step_length = std::min(1.0, w.fraction_to_boundary(iterate, cg.direction));
  step.dsigma1.setZero(static_cast<int>(w.cap_rows.size()));
  for (size_t rr = 0; rr < w.cap_rows.size(); ++rr) {
    const auto& row = w.cap_rows[rr];
    double delta = 0.0;
    for (size_t k = 0; k < row.x_ids.size(); ++k) delta -= row.sizes[k] * step.dp.x[row.x_ids[k]];
    step.dsigma1[static_cast<int>(rr)] = delta;
  }
  step.dsigma2.setZero(static_cast<int>(w.sel_rows.size()));
  for (size_t rr = 0; rr < w.sel_rows.size(); ++rr) {
    const auto& row = w.sel_rows[rr];
    double delta = step.dp.z[row.z_id];
    if (row.y_id >= 0) delta += row.coef_y * step.dp.y[row.y_id];
    if (row.x_id >= 0) delta += row.coef_x * step.dp.x[row.x_id];
    step.dsigma2[static_cast<int>(rr)] = delta;
  }
  return step;
}

}  // namespace edgecache
