#include "teamform/linopt.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <climits>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <utility>

namespace teamform {

int LinearProgram::add_var(double lb, double ub, double obj_coef) {
  obj.push_back(obj_coef);
  lower.push_back(lb);
  upper.push_back(ub);
  return (int)obj.size() - 1;
}

int LinearProgram::add_row(char sense, double rhs) {
  rows.push_back(Row{{}, sense, rhs});
  return (int)rows.size() - 1;
}

void LinearProgram::add_term(int row, int var, double coef) {
  rows[row].terms.push_back(LinTerm{var, coef});
}

namespace {

enum VarState : std::uint8_t { kBasic = 0, kAtLower, kAtUpper, kFree };

constexpr double kTolPiv = 1e-9;   // smallest acceptable pivot magnitude
constexpr double kTolRc = 1e-7;    // reduced-cost dual feasibility slack
constexpr double kPivStab = 1e-7;  // dual pivot stability floor

// vid encoding: structural j -> 2j, logical of row r -> 2r+1.
inline int svid(int j) { return j << 1; }
inline int lvid(int r) { return (r << 1) | 1; }
inline bool is_logical(int vid) { return vid & 1; }
inline int vindex(int vid) { return vid >> 1; }

}  // namespace

// Bounded-variable revised simplex, dense LU basis with product-form eta
// updates. One logical column per row (Ax + s = b); sense lives in the
// logical's bounds, so every row is an equation internally. Maximization
// internally; a minimizing program is mirrored by negating its objective.
struct SimplexEngine::Impl {
  LinearProgram prog;  // external mirror, kept in sync for program()
  bool maximize = true;

  int nstruct = 0;
  int nrows = 0;

  // structural columns and data
  std::vector<std::vector<LinTerm>> cols;
  std::vector<double> c;  // internal (max) objective
  std::vector<double> slb, sub, sval;
  std::vector<std::uint8_t> sstate;
  std::vector<int> spos;  // position in basis, -1 if nonbasic

  // per-row data and logical variables
  std::vector<double> rhs, llb, lub, lval;
  std::vector<std::uint8_t> lstate;
  std::vector<int> lpos;

  std::vector<int> basis;  // vids, one per row
  Eigen::VectorXd beta;    // basic values, aligned with basis
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  std::vector<std::pair<int, Eigen::VectorXd>> etas;
  bool basis_ready = false;
  bool factor_dirty = true;

  std::int64_t iters_total = 0;
  std::int64_t it_used = 0;
  std::int64_t it_budget = 0;
  int degen_streak = 0;
  bool bland = false;

  // pricing state: rc_cache mirrors phase-2 reduced costs per vid, maintained
  // across pivots from the pivot row and resynced whenever the factorization
  // changes; devex_w holds approximate reference weights (per vid in the
  // primal, per row in the dual), reset on every loop entry
  std::vector<double> rc_cache;
  std::vector<double> devex_w;
  std::uint64_t factor_serial = 0;

  Eigen::VectorXd y_cache;  // phase-2 duals at the last optimum
  double obj_cache = 0.0;   // internal sense

  // ---- variable accessors by vid ----

  double vlb(int vid) const { return is_logical(vid) ? llb[vindex(vid)] : slb[vindex(vid)]; }
  double vub(int vid) const { return is_logical(vid) ? lub[vindex(vid)] : sub[vindex(vid)]; }
  double vcost(int vid) const { return is_logical(vid) ? 0.0 : c[vindex(vid)]; }

  std::uint8_t state(int vid) const {
    return is_logical(vid) ? lstate[vindex(vid)] : sstate[vindex(vid)];
  }
  void set_state(int vid, std::uint8_t st) {
    (is_logical(vid) ? lstate[vindex(vid)] : sstate[vindex(vid)]) = st;
  }
  double nb_value(int vid) const {
    return is_logical(vid) ? lval[vindex(vid)] : sval[vindex(vid)];
  }
  void set_nb_value(int vid, double v) {
    (is_logical(vid) ? lval[vindex(vid)] : sval[vindex(vid)]) = v;
  }
  int pos(int vid) const { return is_logical(vid) ? lpos[vindex(vid)] : spos[vindex(vid)]; }
  void set_pos(int vid, int p) {
    (is_logical(vid) ? lpos[vindex(vid)] : spos[vindex(vid)]) = p;
  }

  double col_dot(const Eigen::VectorXd& y, int vid) const {
    if (is_logical(vid)) return y(vindex(vid));
    double acc = 0.0;
    for (const auto& t : cols[vindex(vid)]) acc += t.coef * y(t.var);
    return acc;
  }

  void scatter_col(int vid, Eigen::VectorXd& out) const {
    out.setZero(nrows);
    if (is_logical(vid)) {
      out(vindex(vid)) = 1.0;
    } else {
      for (const auto& t : cols[vindex(vid)]) out(t.var) += t.coef;
    }
  }

  // ---- factorization ----

  bool refactor() {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(nrows, nrows);
    for (int p = 0; p < nrows; ++p) {
      int vid = basis[p];
      if (is_logical(vid)) {
        B(vindex(vid), p) = 1.0;
      } else {
        for (const auto& t : cols[vindex(vid)]) B(t.var, p) += t.coef;
      }
    }
    lu.compute(B);
    etas.clear();
    factor_dirty = false;
    ++factor_serial;
    if (nrows == 0) return true;
    const auto& LU = lu.matrixLU();
    double dmax = 0.0, dmin = kInfinity;
    for (int i = 0; i < nrows; ++i) {
      double d = std::abs(LU(i, i));
      dmax = std::max(dmax, d);
      dmin = std::min(dmin, d);
    }
    return dmin > 1e-12 * std::max(1.0, dmax);
  }

  // Resets to the all-logical basis; last resort after a singular refactor.
  void reset_basis() {
    basis.resize(nrows);
    for (int r = 0; r < nrows; ++r) {
      basis[r] = lvid(r);
      lstate[r] = kBasic;
      lpos[r] = r;
    }
    for (int j = 0; j < nstruct; ++j) {
      spos[j] = -1;
      if (sstate[j] == kBasic) sstate[j] = kAtLower;
    }
    for (int j = 0; j < nstruct; ++j) snap_nonbasic(svid(j));
    factor_dirty = true;
    basis_ready = true;
  }

  Eigen::VectorXd ftran(Eigen::VectorXd v) const {
    v = lu.solve(v);
    for (const auto& [r, d] : etas) {
      double t = v(r) / d(r);
      v.noalias() -= t * d;
      v(r) = t;
    }
    return v;
  }

  Eigen::VectorXd btran(Eigen::VectorXd v) const {
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      const auto& [r, d] = *it;
      double dot = d.dot(v) - d(r) * v(r);
      v(r) = (v(r) - dot) / d(r);
    }
    return lu.transpose().solve(v);
  }

  // ---- state maintenance ----

  void snap_nonbasic(int vid) {
    if (state(vid) == kBasic) return;
    double lb = vlb(vid), ub = vub(vid);
    std::uint8_t st = state(vid);
    if (st == kAtLower && !std::isfinite(lb)) st = std::isfinite(ub) ? kAtUpper : kFree;
    if (st == kAtUpper && !std::isfinite(ub)) st = std::isfinite(lb) ? kAtLower : kFree;
    if (st == kFree && std::isfinite(lb)) st = kAtLower;
    set_state(vid, st);
    set_nb_value(vid, st == kAtLower ? lb : st == kAtUpper ? ub : 0.0);
  }

  void init_basis() {
    basis.assign(nrows, 0);
    for (int r = 0; r < nrows; ++r) {
      basis[r] = lvid(r);
      lstate[r] = kBasic;
      lpos[r] = r;
    }
    for (int j = 0; j < nstruct; ++j) {
      sstate[j] = kAtLower;
      spos[j] = -1;
      snap_nonbasic(svid(j));
    }
    basis_ready = true;
    factor_dirty = true;
  }

  // res = bt - B*beta, the raw defect of the factored solve
  Eigen::VectorXd beta_residual(const Eigen::VectorXd& bt) const {
    Eigen::VectorXd res = bt;
    for (int p = 0; p < nrows; ++p) {
      if (beta(p) == 0.0) continue;
      int vid = basis[p];
      if (is_logical(vid)) {
        res(vindex(vid)) -= beta(p);
      } else {
        for (const auto& t : cols[vindex(vid)]) res(t.var) -= t.coef * beta(p);
      }
    }
    return res;
  }

  void compute_beta() {
    if (nrows == 0) {
      beta.resize(0);
      return;
    }
    // Escalation ladder: refine once, then refactor, then restart from the
    // all-logical basis (its identity factor solves exactly, so the ladder
    // terminates). Without the gate an ill-conditioned factor can hand back a
    // beta that satisfies the factored image while the raw basis equations
    // are off by orders of magnitude, and every feasibility question
    // downstream then lies.
    for (int attempt = 0;; ++attempt) {
      Eigen::VectorXd bt = Eigen::Map<const Eigen::VectorXd>(rhs.data(), nrows);
      for (int j = 0; j < nstruct; ++j) {
        if (sstate[j] == kBasic || sval[j] == 0.0) continue;
        for (const auto& t : cols[j]) bt(t.var) -= t.coef * sval[j];
      }
      for (int r = 0; r < nrows; ++r) {
        if (lstate[r] != kBasic && lval[r] != 0.0) bt(r) -= lval[r];
      }
      const double scale = 1.0 + bt.lpNorm<Eigen::Infinity>();
      beta = ftran(bt);
      Eigen::VectorXd res = beta_residual(bt);
      if (res.lpNorm<Eigen::Infinity>() > 1e-12 * scale) {
        beta += ftran(std::move(res));
        res = beta_residual(bt);
        if (res.lpNorm<Eigen::Infinity>() > 1e-8 * scale) {
          if (attempt == 0) {
            if (!refactor()) {
              reset_basis();
              if (!refactor()) throw std::runtime_error("linopt: singular basis after reset");
            }
            continue;
          }
          if (attempt == 1) {
            reset_basis();
            if (!refactor()) throw std::runtime_error("linopt: singular basis after reset");
            continue;
          }
          // identity factor past this point: arriving here is unreachable,
          // but never spin
        }
      }
      return;
    }
  }

  double primal_infeas() const {
    double worst = 0.0;
    for (int p = 0; p < nrows; ++p) {
      double lb = vlb(basis[p]), ub = vub(basis[p]);
      worst = std::max(worst, std::max(lb - beta(p), beta(p) - ub));
    }
    return std::max(worst, 0.0);
  }

  Eigen::VectorXd basic_costs(bool phase1) const {
    Eigen::VectorXd cb(nrows);
    for (int p = 0; p < nrows; ++p) {
      if (phase1) {
        double lb = vlb(basis[p]), ub = vub(basis[p]);
        cb(p) = beta(p) < lb - kTolFeas ? 1.0 : beta(p) > ub + kTolFeas ? -1.0 : 0.0;
      } else {
        cb(p) = vcost(basis[p]);
      }
    }
    return cb;
  }

  bool fixed(int vid) const {
    return vlb(vid) == vub(vid);
  }

  int total_vids() const { return 2 * std::max(nstruct, nrows) + 2; }

  bool valid_vid(int vid) const {
    return is_logical(vid) ? vindex(vid) < nrows : vindex(vid) < nstruct;
  }

  // Exact phase-2 reduced costs for every live vid; basic entries stay zero.
  // Optimality and infeasibility are only ever claimed against a fresh copy.
  void refresh_rc() {
    Eigen::VectorXd y = btran(basic_costs(false));
    rc_cache.assign(total_vids(), 0.0);
    for (int vid = 0; vid < (int)rc_cache.size(); ++vid) {
      if (!valid_vid(vid) || state(vid) == kBasic) continue;
      rc_cache[vid] = vcost(vid) - col_dot(y, vid);
    }
  }

  void ensure_factor() {
    // Eta applies cost O(rows) each against an O(rows^2) factored solve, so
    // letting the file grow with the basis keeps the amortized refactor cost
    // near one extra ftran per pivot even on wide masters.
    if (!factor_dirty && (int)etas.size() < 64 + nrows / 4) return;
    if (!refactor()) {
      reset_basis();
      if (!refactor()) throw std::runtime_error("linopt: singular basis after reset");
    }
    compute_beta();
  }

  // ---- primal simplex (shared by phase 1 and phase 2) ----

  enum class LoopResult { Done, Infeasible, Unbounded, IterLimit };

  LoopResult primal_loop(bool phase1) {
    Eigen::VectorXd acol(nrows), d, er(nrows), y;
    const int nvid = total_vids();
    std::uint64_t rc_serial = ~0ull;
    devex_w.assign(nvid, 1.0);
    while (true) {
      if (it_used >= it_budget) return LoopResult::IterLimit;
      ensure_factor();

      if (phase1 && primal_infeas() <= kTolFeas) return LoopResult::Done;

      // phase 1 prices exactly every iteration (its costs move with
      // feasibility) and Bland's termination argument needs exact reduced
      // costs; otherwise phase 2 prices off the cache with devex weights
      const bool exact = phase1 || bland;
      if (exact) {
        y = btran(basic_costs(phase1));
      } else if (rc_serial != factor_serial) {
        refresh_rc();
        rc_serial = factor_serial;
      }

      auto reduced = [&](int vid) {
        return exact ? (phase1 ? 0.0 : vcost(vid)) - col_dot(y, vid) : rc_cache[vid];
      };
      auto pick = [&]() {
        int e = -1;
        double best = bland ? kInfinity : 0.0;
        for (int vid = 0; vid < nvid; ++vid) {
          if (!valid_vid(vid)) continue;
          std::uint8_t st = state(vid);
          if (st == kBasic || fixed(vid)) continue;
          double rc = reduced(vid);
          double viol = st == kAtLower ? rc : st == kAtUpper ? -rc : std::abs(rc);
          if (viol <= kTolRc) continue;
          if (bland) {
            if (vid < best) {
              best = vid;
              e = vid;
            }
          } else {
            double score = viol * viol / devex_w[vid];
            if (score > best) {
              best = score;
              e = vid;
            }
          }
        }
        return e;
      };
      int enter = pick();
      if (enter < 0 && !exact) {
        // never declare optimality on drifted cache entries
        refresh_rc();
        rc_serial = factor_serial;
        enter = pick();
      }
      if (enter < 0) {
        if (!phase1) return LoopResult::Done;
        if (primal_infeas() <= kTolFeas) return LoopResult::Done;
        // infeasibility verdicts only from a clean factor
        if (!etas.empty() || factor_dirty) {
          if (!refactor()) reset_basis();
          compute_beta();
          continue;
        }
        if (std::getenv("TEAMFORM_LINOPT_DEBUG"))
          std::fprintf(stderr, "[linopt] phase1 infeasible: pinf=%.3e it=%lld bland=%d\n",
                       primal_infeas(), (long long)it_used, (int)bland);
        return LoopResult::Infeasible;
      }

      double rc_e = reduced(enter);
      double dir = state(enter) == kAtUpper ? -1.0
                   : state(enter) == kAtLower ? 1.0
                                              : (rc_e > 0 ? 1.0 : -1.0);

      scatter_col(enter, acol);
      d = ftran(acol);

      // ratio test; basic values move at rate -dir*d per unit of theta
      double theta = kInfinity;
      int leave_pos = -1;
      std::uint8_t leave_side = kAtLower;
      double leave_absd = 0.0;
      for (int p = 0; p < nrows; ++p) {
        if (std::abs(d(p)) <= kTolPiv) continue;
        double rate = -dir * d(p);
        int bvid = basis[p];
        double lb = vlb(bvid), ub = vub(bvid);
        double cand = kInfinity;
        std::uint8_t side = kAtLower;
        if (phase1 && beta(p) < lb - kTolFeas) {
          if (rate > 0) {  // infeasible below, stops on reaching its lower bound
            cand = (lb - beta(p)) / rate;
            side = kAtLower;
          }
        } else if (phase1 && beta(p) > ub + kTolFeas) {
          if (rate < 0) {
            cand = (beta(p) - ub) / (-rate);
            side = kAtUpper;
          }
        } else if (rate > 0) {
          if (std::isfinite(ub)) {
            cand = (ub - beta(p)) / rate;
            side = kAtUpper;
          }
        } else {
          if (std::isfinite(lb)) {
            cand = (beta(p) - lb) / (-rate);
            side = kAtLower;
          }
        }
        if (cand == kInfinity) continue;
        cand = std::max(cand, 0.0);
        bool take = cand < theta - 1e-12 ||
                    (cand < theta + 1e-12 &&
                     (std::abs(d(p)) > leave_absd + 1e-12 ||
                      (std::abs(d(p)) > leave_absd - 1e-12 && leave_pos >= 0 &&
                       basis[p] < basis[leave_pos])));
        if (take) {
          theta = cand;
          leave_pos = p;
          leave_side = side;
          leave_absd = std::abs(d(p));
        }
      }
      double flip_range = vub(enter) - vlb(enter);
      bool do_flip = std::isfinite(flip_range) && state(enter) != kFree && flip_range < theta;
      if (!do_flip && leave_pos < 0) {
        if (!phase1 && etas.empty() && !factor_dirty) return LoopResult::Unbounded;
        // verify on a clean factor before trusting an unbounded ray; for
        // phase 1 the objective is bounded, so a missing blocker is noise
        if (!refactor()) reset_basis();
        compute_beta();
        if (phase1) continue;
        Eigen::VectorXd y2 = btran(basic_costs(false));
        double rc2 = vcost(enter) - col_dot(y2, enter);
        double viol2 = state(enter) == kAtLower ? rc2 : state(enter) == kAtUpper ? -rc2 : std::abs(rc2);
        if (viol2 <= kTolRc) continue;  // stale reduced cost, not a ray
        scatter_col(enter, acol);
        d = ftran(acol);
        bool blocked = false;
        for (int p = 0; p < nrows && !blocked; ++p) {
          if (std::abs(d(p)) <= kTolPiv) continue;
          double rate = -dir * d(p);
          if (rate > 0 ? std::isfinite(vub(basis[p])) : std::isfinite(vlb(basis[p]))) blocked = true;
        }
        if (!blocked) return LoopResult::Unbounded;
        continue;
      }

      ++it_used;
      ++iters_total;
      double step = do_flip ? flip_range : theta;
      if (it_used % 5000 == 0 && std::getenv("TEAMFORM_LINOPT_DEBUG"))
        std::fprintf(stderr,
                     "[linopt] primal it=%lld phase1=%d bland=%d streak=%d step=%.3e enter=%d rc=%.3e flip=%d\n",
                     (long long)it_used, (int)phase1, (int)bland, degen_streak, step, enter, rc_e,
                     (int)do_flip);
      if (step > 0.0) beta.noalias() -= (dir * step) * d;

      if (do_flip) {
        // bound flip: basis unchanged, reduced costs and weights stay valid
        set_state(enter, state(enter) == kAtLower ? kAtUpper : kAtLower);
        set_nb_value(enter, state(enter) == kAtLower ? vlb(enter) : vub(enter));
      } else {
        int lv = basis[leave_pos];
        double arq = d(leave_pos);
        // pivot row in nonbasic coordinates: feeds the devex weights in both
        // phases, and in phase 2 the rc cache (one BTRAN replacing the
        // per-iteration dual solve it made redundant)
        er.setZero(nrows);
        er(leave_pos) = 1.0;
        Eigen::VectorXd rho = btran(er);
        double ratio = rc_e / arq;
        double wq = devex_w[enter];
        if (wq > 1e7) {  // degraded reference framework: restart the weights
          devex_w.assign(nvid, 1.0);
          wq = 1.0;
        }
        for (int vid = 0; vid < nvid; ++vid) {
          if (!valid_vid(vid) || state(vid) == kBasic || fixed(vid)) continue;
          double arj = col_dot(rho, vid);
          if (arj == 0.0) continue;
          if (!phase1) rc_cache[vid] -= ratio * arj;
          double t = arj / arq;
          devex_w[vid] = std::max(devex_w[vid], t * t * wq);
        }
        if (!phase1) {
          rc_cache[enter] = 0.0;
          rc_cache[lv] = -ratio;
        }
        devex_w[lv] = std::max(wq / (arq * arq), 1.0);
        double entering_val = nb_value(enter) + dir * step;
        set_state(lv, leave_side);
        set_nb_value(lv, leave_side == kAtLower ? vlb(lv) : vub(lv));
        set_pos(lv, -1);
        basis[leave_pos] = enter;
        set_state(enter, kBasic);
        set_pos(enter, leave_pos);
        beta(leave_pos) = entering_val;
        etas.emplace_back(leave_pos, d);
      }

      if (step <= 1e-10) {
        if (++degen_streak > 1000 + 5 * (nrows + nstruct)) bland = true;
      } else {
        degen_streak = 0;
        if (step > kTolRc) bland = false;
      }
    }
  }

  // ---- dual simplex ----

  // Requires dual-feasible reduced costs on entry; bound changes and new rows
  // preserve them, which is the MIP warm-start path.
  LoopResult dual_loop() {
    Eigen::VectorXd er(nrows), acol(nrows);
    const int nvid = total_vids();
    devex_w.assign(nrows, 1.0);
    std::vector<double> alphas((std::size_t)nvid, 0.0);
    std::uint64_t rc_serial = ~0ull;
    // leave half the budget for the primal fallback in solve()
    // a warm restart repairs in O(rows) pivots; anything longer is a stall
    // better served by phase 1, so yield early instead of crawling in Bland
    const std::int64_t dual_budget =
        std::min(it_budget / 2, (std::int64_t)(4 * nrows + 256) + it_used);
    while (true) {
      if (it_used >= dual_budget) return LoopResult::IterLimit;
      ensure_factor();
      // Bland rechecks reduced costs exactly every iteration; otherwise the
      // cache is resynced whenever the factorization changed under us
      if (bland || rc_serial != factor_serial) {
        refresh_rc();
        rc_serial = factor_serial;
      }

      int r = -1;
      bool below = true;
      if (bland) {
        // anti-cycling: smallest basis variable index among the infeasible rows
        int low = INT_MAX;
        for (int p = 0; p < nrows; ++p) {
          double lb = vlb(basis[p]), ub = vub(basis[p]);
          if (basis[p] >= low) continue;
          if (lb - beta(p) > kTolFeas) {
            low = basis[p];
            r = p;
            below = true;
          } else if (beta(p) - ub > kTolFeas) {
            low = basis[p];
            r = p;
            below = false;
          }
        }
      } else {
        double best = 0.0;
        for (int p = 0; p < nrows; ++p) {
          double lb = vlb(basis[p]), ub = vub(basis[p]);
          double v1 = lb - beta(p), v2 = beta(p) - ub;
          double viol = std::max(v1, v2);
          if (viol <= kTolFeas) continue;
          double score = viol * viol / devex_w[p];
          if (score > best) {
            best = score;
            r = p;
            below = v1 >= v2;
          }
        }
      }
      if (r < 0) return LoopResult::Done;

      er.setZero(nrows);
      er(r) = 1.0;
      Eigen::VectorXd rho = btran(er);

      double delta = below ? 1.0 : -1.0;
      int enter = -1;
      double best_ratio = kInfinity, best_alpha = 0.0;
      for (int vid = 0; vid < nvid; ++vid) {
        if (!valid_vid(vid)) continue;
        std::uint8_t st = state(vid);
        if (st == kBasic || fixed(vid)) {
          alphas[vid] = 0.0;
          continue;
        }
        double alpha = col_dot(rho, vid);
        alphas[vid] = alpha;
        // stability floor: a near-zero pivot poisons the eta stack
        bool ok = st == kAtLower   ? delta * alpha < -kPivStab
                  : st == kAtUpper ? delta * alpha > kPivStab
                                   : std::abs(alpha) > kPivStab;
        if (!ok) continue;
        double ratio = std::max(rc_cache[vid] / (delta * alpha), 0.0);
        bool take;
        if (bland)
          take = ratio < best_ratio - 1e-12 || (ratio < best_ratio + 1e-12 && (enter < 0 || vid < enter));
        else
          take = ratio < best_ratio - 1e-12 ||
                 (ratio < best_ratio + 1e-12 &&
                  (std::abs(alpha) > best_alpha + 1e-12 ||
                   (std::abs(alpha) > best_alpha - 1e-12 && enter >= 0 && vid < enter)));
        if (take) {
          best_ratio = ratio;
          enter = vid;
          best_alpha = std::abs(alpha);
        }
      }
      if (enter < 0) {
        if (!etas.empty() || factor_dirty) {
          if (!refactor()) reset_basis();
          compute_beta();
          continue;
        }
        if (std::getenv("TEAMFORM_LINOPT_DEBUG"))
          std::fprintf(stderr, "[linopt] dual ray: row=%d bvid=%d pinf=%.3e it=%lld bland=%d\n",
                       r, basis[r], primal_infeas(), (long long)it_used, (int)bland);
        return LoopResult::Infeasible;  // apparent dual ray: let phase 1 decide
      }

      double alpha_e = alphas[enter];
      double target = below ? vlb(basis[r]) : vub(basis[r]);
      double step = (beta(r) - target) / alpha_e;

      scatter_col(enter, acol);
      Eigen::VectorXd d = ftran(acol);

      ++it_used;
      ++iters_total;
      beta.noalias() -= step * d;

      // rc update off the stored pivot row, weight update off the ftran'd
      // column (Forrest-Goldfarb style, clamped from below)
      double ratio_rc = rc_cache[enter] / alpha_e;
      for (int vid = 0; vid < nvid; ++vid) {
        if (!valid_vid(vid) || state(vid) == kBasic || fixed(vid)) continue;
        if (alphas[vid] != 0.0) rc_cache[vid] -= ratio_rc * alphas[vid];
      }
      double wr = devex_w[r];
      if (wr > 1e7) {  // degraded reference framework: restart the weights
        devex_w.assign(nrows, 1.0);
        wr = 1.0;
      }
      double dr = d(r);
      for (int p = 0; p < nrows; ++p) {
        if (p == r) continue;
        double t = d(p) / dr;
        devex_w[p] = std::max(devex_w[p], t * t * wr);
      }
      devex_w[r] = std::max(wr / (dr * dr), 1.0);

      int lv = basis[r];
      set_state(lv, below ? kAtLower : kAtUpper);
      set_nb_value(lv, target);
      set_pos(lv, -1);
      double entering_val = nb_value(enter) + step;
      basis[r] = enter;
      set_state(enter, kBasic);
      set_pos(enter, r);
      beta(r) = entering_val;
      rc_cache[enter] = 0.0;
      rc_cache[lv] = -ratio_rc;
      etas.emplace_back(r, d);

      // dual-degenerate pivot: zero dual step, objective unchanged. A long
      // streak means the repair is stuck on a plateau; phase 1 restores far
      // faster than a Bland crawl here, so hand over instead of cycling
      if (best_ratio <= 1e-10) {
        if (++degen_streak > 64 + nrows) return LoopResult::IterLimit;
      } else {
        degen_streak = 0;
        if (best_ratio > kTolRc) bland = false;
      }
    }
  }

  // Restores dual feasibility after branching relaxed bounds elsewhere in the
  // tree: a nonbasic variable whose reduced cost fights its bound is flipped
  // to the opposite bound when that bound is finite. Only free or one-sided
  // violators remain, and those send the caller through phase 1.
  bool make_dual_feasible() {
    ensure_factor();
    Eigen::VectorXd y = btran(basic_costs(false));
    bool flipped = false, feasible = true;
    for (int vid = 0; vid < total_vids(); ++vid) {
      if (!valid_vid(vid)) continue;
      std::uint8_t st = state(vid);
      if (st == kBasic || fixed(vid)) continue;
      double rc = vcost(vid) - col_dot(y, vid);
      double viol = st == kAtLower ? rc : st == kAtUpper ? -rc : std::abs(rc);
      if (viol <= kTolRc) continue;
      if (st == kAtLower && std::isfinite(vub(vid))) {
        set_state(vid, kAtUpper);
        set_nb_value(vid, vub(vid));
        flipped = true;
      } else if (st == kAtUpper && std::isfinite(vlb(vid))) {
        set_state(vid, kAtLower);
        set_nb_value(vid, vlb(vid));
        flipped = true;
      } else {
        feasible = false;
      }
    }
    if (flipped) compute_beta();
    return feasible;
  }

  LpStatus solve() {
    if (nrows == 0) {
      // degenerate but legal: optimize each variable against its own bound
      double z = 0.0;
      for (int j = 0; j < nstruct; ++j) {
        sstate[j] = c[j] > 0 ? kAtUpper : kAtLower;
        snap_nonbasic(svid(j));
        if (c[j] > 0 && !std::isfinite(sub[j])) return LpStatus::Unbounded;
        if (c[j] < 0 && !std::isfinite(slb[j])) return LpStatus::Unbounded;
        z += c[j] * sval[j];
      }
      obj_cache = z;
      y_cache.resize(0);
      basis_ready = true;
      return LpStatus::Optimal;
    }
    if (!basis_ready) init_basis();
    for (int j = 0; j < nstruct; ++j) snap_nonbasic(svid(j));
    for (int r = 0; r < nrows; ++r) snap_nonbasic(lvid(r));
    // The factor depends only on the basis, so bound-only edits between
    // solves reuse it. compute_beta still runs to absorb the new bounds, and
    // its residual gate escalates to a refactor if the kept factor is stale.
    ensure_factor();
    compute_beta();

    it_budget = 50000 + 20 * (std::int64_t)(nrows + nstruct);
    it_used = 0;

    const bool dbg = std::getenv("TEAMFORM_LINOPT_DEBUG") != nullptr;
    for (int round = 0;; ++round) {
    LoopResult res;
    const char* path = "warm";
    if (primal_infeas() > kTolFeas) {
      // dual simplex is the warm-restart path; its budget is tight enough
      // that a mistaken choice costs O(rows) pivots before phase 1 takes over
      if (make_dual_feasible()) {
        path = "dual";
        // snapshot first: a stalled dual wander scrambles the basis and taxes
        // the phase 1 that follows, so failure rolls back to the warm state
        auto b0 = basis;
        auto ss0 = sstate, ls0 = lstate;
        auto sp0 = spos, lp0 = lpos;
        auto sv0 = sval, lv0 = lval;
        int streak0 = degen_streak;
        bool bland0 = bland;
        res = dual_loop();
        if (res == LoopResult::Done) {
          res = primal_loop(false);
        } else {
          basis = std::move(b0);
          sstate = std::move(ss0);
          lstate = std::move(ls0);
          spos = std::move(sp0);
          lpos = std::move(lp0);
          sval = std::move(sv0);
          lval = std::move(lv0);
          degen_streak = streak0;
          bland = bland0;
          factor_dirty = true;
          ensure_factor();
          // apparent ray or stall: only phase 1 may rule the LP infeasible
          path = "dual+p1";
          res = primal_loop(true);
          if (res == LoopResult::Infeasible) return LpStatus::Infeasible;
          if (res == LoopResult::Done) res = primal_loop(false);
        }
      } else {
        path = "p1";
        if (dbg) {
          Eigen::VectorXd y0 = btran(basic_costs(false));
          int nv = 0;
          double mx = 0.0;
          for (int vid = 0; vid < total_vids(); ++vid) {
            if (!valid_vid(vid) || state(vid) == kBasic || fixed(vid)) continue;
            double rc = vcost(vid) - col_dot(y0, vid);
            std::uint8_t st = state(vid);
            double viol = st == kAtLower ? rc : st == kAtUpper ? -rc : std::abs(rc);
            if (viol > kTolRc) {
              ++nv;
              mx = std::max(mx, viol);
            }
          }
          std::fprintf(stderr, "[linopt] dual-infeasible start: nviol=%d max=%.3e\n", nv, mx);
        }
        res = primal_loop(true);
        if (res == LoopResult::Infeasible) return LpStatus::Infeasible;
        if (res == LoopResult::Done) res = primal_loop(false);
      }
    } else {
      res = primal_loop(false);
    }

    if (res == LoopResult::Unbounded) return LpStatus::Unbounded;
    if (res != LoopResult::Done) {
      if (dbg)
        std::fprintf(stderr,
                     "[linopt] iterlimit: rows=%d vars=%d it=%lld budget=%lld bland=%d streak=%lld "
                     "pinf=%.3e obj=%.9f\n",
                     nrows, nstruct, (long long)it_used, (long long)it_budget, (int)bland,
                     (long long)degen_streak, primal_infeas(), obj_cache);
      return LpStatus::IterLimit;
    }

    if (dbg)
      std::fprintf(stderr, "[linopt] solve: rows=%d vars=%d it=%lld path=%s\n", nrows, nstruct,
                   (long long)it_used, path);
    ensure_factor();
    // Optimal promises a point that survives certification against the raw
    // rows. The beta residual gate should make this unconditional; if the
    // reported point still fails, restart cold once rather than lie.
    double raw = primal_infeas();
    for (int r = 0; r < nrows; ++r) {
      double act = value_of(lvid(r)) - rhs[r];
      for (const auto& t : prog.rows[r].terms) act += t.coef * value_of(svid(t.var));
      raw = std::max(raw, std::abs(act));
    }
    if (raw > 1e-5) {
      if (dbg)
        std::fprintf(stderr, "[linopt] optimal state fails raw rows: %.3e round=%d\n", raw, round);
      if (round >= 1) return LpStatus::IterLimit;
      reset_basis();
      ensure_factor();
      continue;
    }
    y_cache = btran(basic_costs(false));
    double z = 0.0;
    for (int j = 0; j < nstruct; ++j) z += c[j] * value_of(svid(j));
    obj_cache = z;
    return LpStatus::Optimal;
    }
  }

  double value_of(int vid) const {
    int p = pos(vid);
    return p >= 0 ? beta(p) : nb_value(vid);
  }
};

SimplexEngine::SimplexEngine(const LinearProgram& lp) : impl_(std::make_unique<Impl>()) {
  Impl& im = *impl_;
  im.prog = lp;
  im.maximize = lp.maximize;
  im.nstruct = lp.num_vars();
  im.nrows = lp.num_rows();
  im.cols.resize(im.nstruct);
  im.c.resize(im.nstruct);
  for (int j = 0; j < im.nstruct; ++j) im.c[j] = im.maximize ? lp.obj[j] : -lp.obj[j];
  im.slb = lp.lower;
  im.sub = lp.upper;
  im.sval.assign(im.nstruct, 0.0);
  im.sstate.assign(im.nstruct, kAtLower);
  im.spos.assign(im.nstruct, -1);
  im.rhs.resize(im.nrows);
  im.llb.resize(im.nrows);
  im.lub.resize(im.nrows);
  im.lval.assign(im.nrows, 0.0);
  im.lstate.assign(im.nrows, kAtLower);
  im.lpos.assign(im.nrows, -1);
  for (int r = 0; r < im.nrows; ++r) {
    const Row& row = lp.rows[r];
    im.rhs[r] = row.rhs;
    switch (row.sense) {
      case 'L':
        im.llb[r] = 0.0;
        im.lub[r] = kInfinity;
        break;
      case 'G':
        im.llb[r] = -kInfinity;
        im.lub[r] = 0.0;
        break;
      case 'E':
        im.llb[r] = 0.0;
        im.lub[r] = 0.0;
        break;
      default:
        throw std::invalid_argument("linopt: row sense must be L, E, or G");
    }
    for (const auto& t : row.terms) im.cols[t.var].push_back(LinTerm{r, t.coef});
  }
}

SimplexEngine::~SimplexEngine() = default;
SimplexEngine::SimplexEngine(SimplexEngine&&) noexcept = default;
SimplexEngine& SimplexEngine::operator=(SimplexEngine&&) noexcept = default;

int SimplexEngine::add_var(double lb, double ub, double obj_coef,
                           const std::vector<LinTerm>& column) {
  Impl& im = *impl_;
  int j = im.nstruct++;
  im.cols.push_back(column);  // terms are (row, coef)
  im.c.push_back(im.maximize ? obj_coef : -obj_coef);
  im.slb.push_back(lb);
  im.sub.push_back(ub);
  im.sval.push_back(0.0);
  im.sstate.push_back(kAtLower);
  im.spos.push_back(-1);
  im.snap_nonbasic(svid(j));
  im.prog.add_var(lb, ub, obj_coef);
  for (const auto& t : column) im.prog.add_term(t.var, j, t.coef);
  return j;
}

int SimplexEngine::add_row(const Row& row) {
  Impl& im = *impl_;
  int r = im.nrows++;
  im.rhs.push_back(row.rhs);
  switch (row.sense) {
    case 'L':
      im.llb.push_back(0.0);
      im.lub.push_back(kInfinity);
      break;
    case 'G':
      im.llb.push_back(-kInfinity);
      im.lub.push_back(0.0);
      break;
    case 'E':
      im.llb.push_back(0.0);
      im.lub.push_back(0.0);
      break;
    default:
      throw std::invalid_argument("linopt: row sense must be L, E, or G");
  }
  im.lval.push_back(0.0);
  im.lstate.push_back(im.basis_ready ? kBasic : kAtLower);
  im.lpos.push_back(im.basis_ready ? r : -1);
  if (im.basis_ready) im.basis.push_back(lvid(r));
  for (const auto& t : row.terms) im.cols[t.var].push_back(LinTerm{r, t.coef});
  im.factor_dirty = true;
  im.prog.rows.push_back(row);
  return r;
}

void SimplexEngine::set_var_bounds(int var, double lb, double ub) {
  Impl& im = *impl_;
  im.slb[var] = lb;
  im.sub[var] = ub;
  im.prog.lower[var] = lb;
  im.prog.upper[var] = ub;
}

LpStatus SimplexEngine::solve() { return impl_->solve(); }

double SimplexEngine::objective() const {
  return impl_->maximize ? impl_->obj_cache : -impl_->obj_cache;
}

double SimplexEngine::var_value(int var) const { return impl_->value_of(svid(var)); }

std::vector<double> SimplexEngine::struct_values() const {
  std::vector<double> x(impl_->nstruct);
  for (int j = 0; j < impl_->nstruct; ++j) x[j] = impl_->value_of(svid(j));
  return x;
}

std::vector<double> SimplexEngine::row_duals() const {
  std::vector<double> y(impl_->nrows, 0.0);
  for (int r = 0; r < impl_->nrows && r < impl_->y_cache.size(); ++r) y[r] = impl_->y_cache(r);
  return y;
}

double SimplexEngine::reduced_cost(int var) const {
  const Impl& im = *impl_;
  double rc = im.c[var];
  if (im.y_cache.size() == im.nrows) rc -= im.col_dot(im.y_cache, svid(var));
  return rc;
}

const LinearProgram& SimplexEngine::program() const { return impl_->prog; }

std::int64_t SimplexEngine::iterations() const { return impl_->iters_total; }

LpSolution solve_lp(const LinearProgram& lp) {
  SimplexEngine eng(lp);
  LpSolution sol;
  sol.status = eng.solve();
  if (sol.status != LpStatus::Optimal) return sol;
  sol.objective = eng.objective();
  sol.x = eng.struct_values();
  sol.duals = eng.row_duals();
  sol.reduced_costs.resize(lp.num_vars());
  for (int j = 0; j < lp.num_vars(); ++j) sol.reduced_costs[j] = eng.reduced_cost(j);
  if (!lp.maximize) {
    for (auto& v : sol.duals) v = -v;
    for (auto& v : sol.reduced_costs) v = -v;
  }
  return sol;
}

LpCertificate certify(const LinearProgram& lp, const LpSolution& sol) {
  LpCertificate cert;
  int n = lp.num_vars(), m = lp.num_rows();
  // internal max sense for all dual quantities
  std::vector<double> cint(n), y(m);
  for (int j = 0; j < n; ++j) cint[j] = lp.maximize ? lp.obj[j] : -lp.obj[j];
  for (int r = 0; r < m; ++r) y[r] = lp.maximize ? sol.duals[r] : -sol.duals[r];

  for (int j = 0; j < n; ++j) {
    cert.primal_infeasibility = std::max(cert.primal_infeasibility, lp.lower[j] - sol.x[j]);
    cert.primal_infeasibility = std::max(cert.primal_infeasibility, sol.x[j] - lp.upper[j]);
  }
  std::vector<double> rc(cint);
  for (int r = 0; r < m; ++r) {
    double act = 0.0;
    for (const auto& t : lp.rows[r].terms) {
      act += t.coef * sol.x[t.var];
      rc[t.var] -= t.coef * y[r];
    }
    double lo = act - lp.rows[r].rhs, hi = lp.rows[r].rhs - act;
    switch (lp.rows[r].sense) {
      case 'L':
        cert.primal_infeasibility = std::max(cert.primal_infeasibility, lo);
        cert.dual_infeasibility = std::max(cert.dual_infeasibility, -y[r]);
        break;
      case 'G':
        cert.primal_infeasibility = std::max(cert.primal_infeasibility, hi);
        cert.dual_infeasibility = std::max(cert.dual_infeasibility, y[r]);
        break;
      default:
        cert.primal_infeasibility = std::max(cert.primal_infeasibility, std::abs(lo));
        break;
    }
  }

  double primal_obj = 0.0, dual_obj = 0.0;
  for (int r = 0; r < m; ++r) dual_obj += y[r] * lp.rows[r].rhs;
  for (int j = 0; j < n; ++j) {
    primal_obj += cint[j] * sol.x[j];
    bool at_lb = sol.x[j] <= lp.lower[j] + 1e-6;
    bool at_ub = sol.x[j] >= lp.upper[j] - 1e-6;
    if (at_lb && at_ub) {
      dual_obj += rc[j] * sol.x[j];
    } else if (at_lb) {
      cert.dual_infeasibility = std::max(cert.dual_infeasibility, rc[j]);
      dual_obj += std::min(rc[j], 0.0) * lp.lower[j];
    } else if (at_ub) {
      cert.dual_infeasibility = std::max(cert.dual_infeasibility, -rc[j]);
      dual_obj += std::max(rc[j], 0.0) * lp.upper[j];
    } else {
      cert.dual_infeasibility = std::max(cert.dual_infeasibility, std::abs(rc[j]));
    }
  }
  cert.primal_infeasibility = std::max(cert.primal_infeasibility, 0.0);
  cert.dual_infeasibility = std::max(cert.dual_infeasibility, 0.0);
  cert.duality_gap = std::abs(primal_obj - dual_obj) / (1.0 + std::abs(primal_obj));
  return cert;
}

// ---- branch and bound ----

namespace {

struct VarFix {
  int var;
  double lb, ub;
};

struct BnbNode {
  double bound;  // parent LP objective, internal max sense
  std::int64_t id;
  std::vector<VarFix> fixes;
};

struct NodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id < b.id;  // dive on equal bounds: plateaus reach leaves faster
  }
};

}  // namespace

MipResult solve_mip(const MipProblem& mip, const MipLimits& limits) {
  const bool maximize = mip.lp.maximize;
  SimplexEngine eng(mip.lp);
  const int n = mip.lp.num_vars();

  std::vector<int> int_vars;
  for (int j = 0; j < n; ++j) {
    if (j < (int)mip.is_integer.size() && mip.is_integer[j]) int_vars.push_back(j);
  }
  std::vector<int> group_of(n, -1);
  for (std::size_t g = 0; g < mip.sos1_groups.size(); ++g)
    for (int j : mip.sos1_groups[g]) group_of[j] = (int)g;
  std::vector<double> root_lb(n), root_ub(n);
  for (int j = 0; j < n; ++j) {
    root_lb[j] = mip.lp.lower[j];
    root_ub[j] = mip.lp.upper[j];
  }
  std::vector<double> cur_lb(root_lb), cur_ub(root_ub);

  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(
                          std::isfinite(limits.time_budget_secs) ? limits.time_budget_secs
                                                                 : 1e9));
  auto out_of_time = [&] { return std::chrono::steady_clock::now() >= deadline; };

  MipResult res;
  double incumbent = -kInfinity;  // internal max sense
  if (!std::isnan(mip.seed_objective))
    incumbent = maximize ? mip.seed_objective : -mip.seed_objective;
  const bool seeded = std::isfinite(incumbent);
  std::vector<double> inc_x;
  bool budget_hit = false;

  const double gran = mip.obj_granularity;
  auto snap_bound = [&](double b) {
    return gran > 0.0 && std::isfinite(b) ? std::floor(b / gran + 1e-6) * gran : b;
  };

  std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> open;
  std::int64_t next_id = 0;
  open.push(BnbNode{kInfinity, next_id++, {}});

  auto sense_obj = [&](double internal) { return maximize ? internal : -internal; };

  while (!open.empty()) {
    if (res.nodes >= limits.node_budget || out_of_time()) {
      budget_hit = true;
      break;
    }
    BnbNode node = open.top();
    open.pop();
    if ((seeded || !inc_x.empty()) && snap_bound(node.bound) <= incumbent + kTolGap)
      break;  // best-bound: all pruned
    ++res.nodes;

    std::vector<double> eff_lb(root_lb), eff_ub(root_ub);
    for (const auto& f : node.fixes) {
      eff_lb[f.var] = std::max(eff_lb[f.var], f.lb);
      eff_ub[f.var] = std::min(eff_ub[f.var], f.ub);
    }
    // only touch bounds that differ from the engine's state: consecutive
    // nodes share most fixes, so the dual warm start stays warm
    for (int j = 0; j < n; ++j) {
      if (eff_lb[j] != cur_lb[j] || eff_ub[j] != cur_ub[j]) {
        eng.set_var_bounds(j, eff_lb[j], eff_ub[j]);
        cur_lb[j] = eff_lb[j];
        cur_ub[j] = eff_ub[j];
      }
    }

    bool node_done = false;
    while (!node_done) {
      LpStatus st = eng.solve();
      ++res.lp_solves;
      if (st == LpStatus::Infeasible) {
        node_done = true;
        break;
      }
      if (st == LpStatus::Unbounded) throw std::runtime_error("linopt: unbounded MIP relaxation");
      if (st == LpStatus::IterLimit) throw std::runtime_error("linopt: simplex iteration limit");
      double obj = maximize ? eng.objective() : -eng.objective();  // internal max sense
      if ((seeded || !inc_x.empty()) && snap_bound(obj) <= incumbent + kTolGap) {
        node_done = true;
        break;
      }

      int branch_var = -1;
      double branch_score = kInfinity, branch_val = 0.0;
      bool group_frac = false;
      for (int j : int_vars) {
        double v = eng.var_value(j);
        double frac = v - std::floor(v);
        if (frac > kTolInt && frac < 1.0 - kTolInt) {
          if (group_of[j] >= 0) {
            group_frac = true;  // grouped vars branch by dichotomy, below
            continue;
          }
          double score = std::abs(frac - 0.5);
          if (score < branch_score - 1e-12) {
            branch_score = score;
            branch_var = j;
            branch_val = v;
          }
        }
      }

      if (branch_var < 0 && mip.callback) {
        // Ungrouped integers are integral here; grouped blocks may still be
        // fractional, which is exactly where lazy rows have to look.
        std::vector<Row> cuts = mip.callback(eng.struct_values());
        if (!cuts.empty()) {
          for (const auto& row : cuts) eng.add_row(row);
          res.cuts_added += (std::int64_t)cuts.size();
          if (out_of_time()) {
            budget_hit = true;
            node_done = true;
            break;
          }
          continue;  // re-solve this node with the new rows
        }
      }

      if (branch_var < 0 && group_frac) {
        // Group mass sits on ordered positions; when every group mean is
        // (near) integral the point rounds onto a candidate vertex. Exact
        // whenever the relaxation already pays the true price elsewhere.
        std::vector<double> xs = eng.struct_values();
        bool snap_ok = true;
        for (const auto& members : mip.sos1_groups) {
          double mean = 0.0;
          for (std::size_t k = 0; k < members.size(); ++k) mean += xs[members[k]] * (double)k;
          const long long target = std::llround(mean);
          if (std::abs(mean - (double)target) > 1e-7 || target < 0 ||
              target >= (long long)members.size() ||
              eff_ub[members[(std::size_t)target]] < 1.0 - 1e-9) {
            snap_ok = false;
            break;
          }
          for (std::size_t k = 0; k < members.size(); ++k) {
            if ((long long)k != target && eff_lb[members[k]] > 1e-9) {
              snap_ok = false;
              break;
            }
            xs[members[k]] = (long long)k == target ? 1.0 : 0.0;
          }
          if (!snap_ok) break;
        }
        if (snap_ok) {
          const LinearProgram& prog = eng.program();
          for (const Row& row : prog.rows) {
            double lhs = 0.0;
            for (const LinTerm& term : row.terms) lhs += term.coef * xs[term.var];
            if ((row.sense != 'L' && lhs < row.rhs - kTolFeas) ||
                (row.sense != 'G' && lhs > row.rhs + kTolFeas)) {
              snap_ok = false;
              break;
            }
          }
          if (snap_ok) {
            double dot = 0.0;
            for (int j = 0; j < n; ++j) dot += prog.obj[j] * xs[j];
            const double snapped = maximize ? dot : -dot;
            if (snapped > incumbent + 1e-12) {
              incumbent = snapped;
              inc_x = xs;
            }
            if (snapped >= obj - kTolGap) {
              node_done = true;  // the node bound is attained by an integral point
              continue;
            }
          }
        }
        // Most dispersed fractional group: the one spreading mass widest
        // across its ordered members cheats the relaxation hardest.
        int best_g = -1;
        double best_disp = -1.0;
        for (std::size_t g = 0; g < mip.sos1_groups.size(); ++g) {
          const auto& members = mip.sos1_groups[g];
          bool frac_here = false;
          double mean_pos = 0.0;
          for (std::size_t k = 0; k < members.size(); ++k) {
            double v = eng.var_value(members[k]);
            double frac = v - std::floor(v);
            if (frac > kTolInt && frac < 1.0 - kTolInt) frac_here = true;
            mean_pos += v * (double)k;
          }
          if (!frac_here) continue;
          double disp = 0.0;
          for (std::size_t k = 0; k < members.size(); ++k)
            disp += eng.var_value(members[k]) * std::abs((double)k - mean_pos);
          if (disp > best_disp + 1e-12) {
            best_disp = disp;
            best_g = (int)g;
          }
        }
        if (best_g >= 0) {
          const auto& members = mip.sos1_groups[best_g];
          // split closest to half the mass, strictly interior on both sides
          int split = -1;
          double split_score = kInfinity, cum = 0.0;
          for (std::size_t k = 0; k + 1 < members.size(); ++k) {
            cum += eng.var_value(members[k]);
            if (cum <= kTolInt || cum >= 1.0 - kTolInt) continue;
            double score = std::abs(cum - 0.5);
            if (score < split_score - 1e-12) {
              split_score = score;
              split = (int)k;
            }
          }
          if (split >= 0) {
            BnbNode low{obj, next_id++, node.fixes};
            BnbNode high{obj, next_id++, node.fixes};
            for (std::size_t k = 0; k < members.size(); ++k) {
              int j = members[k];
              if (eff_ub[j] <= 0.0) continue;
              ((int)k <= split ? high : low).fixes.push_back(VarFix{j, eff_lb[j], 0.0});
            }
            open.push(std::move(low));
            open.push(std::move(high));
            node_done = true;
            continue;
          }
          // no interior split (degenerate mass): fall through to the
          // single-variable branch on the most fractional group member
          for (int j : members) {
            double v = eng.var_value(j);
            double frac = v - std::floor(v);
            if (frac > kTolInt && frac < 1.0 - kTolInt) {
              double score = std::abs(frac - 0.5);
              if (score < branch_score - 1e-12) {
                branch_score = score;
                branch_var = j;
                branch_val = v;
              }
            }
          }
        }
      }

      if (branch_var < 0) {
        if (group_frac) throw std::logic_error("linopt: unresolved group fraction");
        if (obj > incumbent + 1e-12) {
          incumbent = obj;
          inc_x = eng.struct_values();
        }
        node_done = true;
      } else {
        double up_lb = std::ceil(branch_val);
        double down_ub = std::floor(branch_val);
        BnbNode up{obj, next_id++, node.fixes};
        up.fixes.push_back(VarFix{branch_var, up_lb, eff_ub[branch_var]});
        BnbNode down{obj, next_id++, node.fixes};
        down.fixes.push_back(VarFix{branch_var, eff_lb[branch_var], down_ub});
        open.push(std::move(up));
        open.push(std::move(down));
        node_done = true;
      }
    }
    if (budget_hit) break;
  }

  res.has_incumbent = !inc_x.empty();
  if (budget_hit) {
    res.status = MipStatus::Budget;
    double best_open = incumbent;
    while (!open.empty()) {
      best_open = std::max(best_open, open.top().bound);
      open.pop();
    }
    if (!res.has_incumbent && best_open == -kInfinity) best_open = kInfinity;
    res.bound = sense_obj(best_open == kInfinity ? kInfinity : best_open);
    if (!maximize && best_open == kInfinity) res.bound = -kInfinity;
    if (res.has_incumbent) {
      res.objective = sense_obj(incumbent);
      res.x = inc_x;
    }
  } else if (res.has_incumbent) {
    res.status = MipStatus::Optimal;
    res.objective = sense_obj(incumbent);
    res.bound = res.objective;
    res.x = inc_x;
  } else if (seeded) {
    // exhausted tree without beating the warm start: the seed is optimal
    res.status = MipStatus::Optimal;
    res.objective = sense_obj(incumbent);
    res.bound = res.objective;
  } else {
    res.status = MipStatus::Infeasible;
  }
  return res;
}

}  // namespace teamform
