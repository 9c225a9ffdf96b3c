#include "teamform/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "teamform/core.hpp"
#include "teamform/linopt.hpp"

namespace teamform {

namespace {

bool cuts_hold(const CcbqpProblem& p, const std::vector<int>& members) {
  for (const auto& cut : p.cuts) {
    double lhs = 0.0;
    for (int i : members) lhs += cut.coef[i];
    if (lhs < cut.rhs - 1e-9) return false;
  }
  return true;
}

double quad_value(const Eigen::MatrixXd& Q, const std::vector<int>& members) {
  double v = 0.0;
  for (int i : members) {
    for (int j : members) v += Q(i, j);
  }
  return v;
}

}  // namespace

CcbqpSolution solve_ccbqp_enum(const CcbqpProblem& p) {
  int nu = (int)p.Q.rows();
  if (p.K < 0 || p.K > nu) throw std::invalid_argument("ccbqp: K out of range");
  if (count_combinations(nu, p.K, 100000000ull) > 100000000ull) {
    throw std::invalid_argument("ccbqp enumeration guard: C(nu,K) too large");
  }

  CcbqpSolution best;
  std::vector<int> members(p.K);
  for (int i = 0; i < p.K; ++i) members[i] = i;
  while (true) {
    if (cuts_hold(p, members)) {
      double v = quad_value(p.Q, members);
      if (!best.subset || v > best.value + 1e-12) {  // first-found keeps lex order on ties
        best.subset = Coalition{members};
        best.value = v;
      }
    }
    if (p.K == 0) break;
    int i = p.K - 1;
    while (i >= 0 && members[i] == nu - p.K + i) --i;
    if (i < 0) break;
    ++members[i];
    for (int j = i + 1; j < p.K; ++j) members[j] = members[j - 1] + 1;
  }
  return best;
}

CcbqpSolution solve_ccbqp_mip(const CcbqpProblem& p) {
  int nu = (int)p.Q.rows();
  if (p.K < 0 || p.K > nu) throw std::invalid_argument("ccbqp: K out of range");

  MipProblem mip;
  mip.lp.maximize = true;
  for (int i = 0; i < nu; ++i) mip.lp.add_var(0.0, 1.0, p.Q(i, i));
  // psi_ij for i<j, column-packed after the chi block
  std::vector<std::vector<int>> psi(nu, std::vector<int>(nu, -1));
  for (int i = 0; i < nu; ++i) {
    for (int j = i + 1; j < nu; ++j) {
      psi[i][j] = mip.lp.add_var(0.0, 1.0, p.Q(i, j) + p.Q(j, i));
    }
  }
  mip.is_integer.assign(mip.lp.num_vars(), 1);

  int card = mip.lp.add_row('E', (double)p.K);
  for (int i = 0; i < nu; ++i) mip.lp.add_term(card, i, 1.0);

  for (int i = 0; i < nu; ++i) {
    for (int j = i + 1; j < nu; ++j) {
      int lo = mip.lp.add_row('G', -1.0);  // psi >= chi_i + chi_j - 1
      mip.lp.add_term(lo, psi[i][j], 1.0);
      mip.lp.add_term(lo, i, -1.0);
      mip.lp.add_term(lo, j, -1.0);
      int hi1 = mip.lp.add_row('L', 0.0);  // psi <= chi_i
      mip.lp.add_term(hi1, psi[i][j], 1.0);
      mip.lp.add_term(hi1, i, -1.0);
      int hi2 = mip.lp.add_row('L', 0.0);  // psi <= chi_j
      mip.lp.add_term(hi2, psi[i][j], 1.0);
      mip.lp.add_term(hi2, j, -1.0);
    }
  }
  for (int j = 0; j < nu; ++j) {
    // degree linking: edges at j total (K-1) chi_j
    int row = mip.lp.add_row('E', 0.0);
    for (int i = 0; i < nu; ++i) {
      if (i == j) continue;
      mip.lp.add_term(row, psi[std::min(i, j)][std::max(i, j)], 1.0);
    }
    mip.lp.add_term(row, j, -(double)(p.K - 1));
  }
  for (const auto& cut : p.cuts) {
    int row = mip.lp.add_row('G', cut.rhs);
    for (int i = 0; i < nu; ++i) {
      if (cut.coef[i] != 0.0) mip.lp.add_term(row, i, cut.coef[i]);
    }
  }

  MipResult res = solve_mip(mip);
  CcbqpSolution out;
  if (res.status != MipStatus::Optimal) return out;
  Coalition c;
  for (int i = 0; i < nu; ++i) {
    if (res.x[i] > 0.5) c.members.push_back(i);
  }
  out.subset = std::move(c);
  out.value = res.objective;
  return out;
}

namespace {

CcbqpSolution dispatch(const CcbqpProblem& p, OracleBackend backend) {
  switch (backend) {
    case OracleBackend::Enumeration:
      return solve_ccbqp_enum(p);
    case OracleBackend::Mip:
      return solve_ccbqp_mip(p);
    default:
      return p.Q.rows() <= 24 ? solve_ccbqp_enum(p) : solve_ccbqp_mip(p);
  }
}

void append_char_cuts(const Instance& inst, std::vector<CcbqpCut>& cuts) {
  if (!inst.has_chars()) return;
  const auto& ch = *inst.chars;
  for (int q = 0; q < ch.q_count; ++q) {
    CcbqpCut lo, hi;
    lo.coef.resize(inst.n);
    hi.coef.resize(inst.n);
    for (int i = 0; i < inst.n; ++i) {
      lo.coef[i] = ch.delta(i, q);
      hi.coef[i] = -ch.delta(i, q);
    }
    lo.rhs = ch.q_min[q];
    hi.rhs = -ch.q_max[q];
    cuts.push_back(std::move(lo));
    cuts.push_back(std::move(hi));
  }
}

}  // namespace

std::optional<std::pair<Coalition, double>> separate_violated_uplift(
    const Instance& inst, const std::vector<double>& current_utility, double r_current,
    OracleBackend backend) {
  CcbqpProblem p;
  p.K = inst.s;
  p.Q = inst.u.cast<double>();
  for (int i = 0; i < inst.n; ++i) p.Q(i, i) = -current_utility[i];
  // individual rationality: members of the deviation must weakly gain
  for (int i = 0; i < inst.n; ++i) {
    CcbqpCut ir;
    ir.coef.resize(inst.n);
    for (int j = 0; j < inst.n; ++j) ir.coef[j] = (double)inst.u(i, j);
    ir.coef[i] = -current_utility[i];
    ir.rhs = 0.0;
    p.cuts.push_back(std::move(ir));
  }
  append_char_cuts(inst, p.cuts);

  CcbqpSolution sol = dispatch(p, backend);
  if (!sol.subset || sol.value <= r_current + 1e-9) return std::nullopt;
  return std::make_pair(std::move(*sol.subset), sol.value);
}

std::optional<std::pair<Coalition, double>> price_column(
    const Instance& inst, const PricingDuals& duals, double alpha,
    const std::vector<Coalition>& excluded, OracleBackend backend,
    const PairRestrictions& pairs) {
  CcbqpProblem p;
  p.K = inst.s;
  p.Q.setZero(inst.n, inst.n);
  for (int i = 0; i < inst.n; ++i) {
    for (int j = 0; j < inst.n; ++j) {
      if (i != j) p.Q(i, j) = alpha * (double)inst.u(i, j) - duals.kappa(i, j);
    }
    p.Q(i, i) = -duals.sigma[i];
  }
  for (const auto& c : excluded) {
    // distance row: only c itself has overlap s, everything else survives
    CcbqpCut cut;
    cut.coef.assign(inst.n, 1.0);
    for (int i : c.members) cut.coef[i] = -1.0;
    cut.rhs = 1.0 - (double)inst.s;
    p.cuts.push_back(std::move(cut));
  }
  for (const auto& [i, j] : pairs.together) {
    CcbqpCut a, b;  // chi_i = chi_j as an opposing pair of >= rows
    a.coef.assign(inst.n, 0.0);
    a.coef[i] = 1.0;
    a.coef[j] = -1.0;
    a.rhs = 0.0;
    b.coef.assign(inst.n, 0.0);
    b.coef[i] = -1.0;
    b.coef[j] = 1.0;
    b.rhs = 0.0;
    p.cuts.push_back(std::move(a));
    p.cuts.push_back(std::move(b));
  }
  for (const auto& [i, j] : pairs.apart) {
    CcbqpCut cut;  // chi_i + chi_j <= 1
    cut.coef.assign(inst.n, 0.0);
    cut.coef[i] = -1.0;
    cut.coef[j] = -1.0;
    cut.rhs = -1.0;
    p.cuts.push_back(std::move(cut));
  }
  append_char_cuts(inst, p.cuts);

  CcbqpSolution sol = dispatch(p, backend);
  if (!sol.subset) return std::nullopt;
  double rc = sol.value - duals.mu;
  if (rc <= 1e-6) return std::nullopt;
  return std::make_pair(std::move(*sol.subset), rc);
}

}  // namespace teamform
