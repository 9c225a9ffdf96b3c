#pragma once

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

#include "teamform/types.hpp"

namespace teamform {

// Cardinality-constrained binary quadratic program: maximize chi'Q chi over
// subsets of exactly K indices, optionally intersected with linear cuts
// coef . chi >= rhs. Q may be asymmetric; both orientations contribute.
struct CcbqpCut {
  std::vector<double> coef;
  double rhs = 0.0;
};

struct CcbqpProblem {
  Eigen::MatrixXd Q;
  int K = 0;
  std::vector<CcbqpCut> cuts;
};

// subset is empty-optional when no size-K subset satisfies the cuts.
struct CcbqpSolution {
  std::optional<Coalition> subset;
  double value = 0.0;
};

enum class OracleBackend { Auto, Enumeration, Mip };

// Exhaustive maximizer, lexicographic tie-break. Guard: C(nu,K) <= 1e8.
CcbqpSolution solve_ccbqp_enum(const CcbqpProblem& p);

// Linearized formulation: pair variables psi_ij with envelope rows
// psi >= chi_i + chi_j - 1, psi <= chi_i, psi <= chi_j and degree-linking
// rows sum_i psi_[ij] = (K-1) chi_j, solved by branch and bound.
CcbqpSolution solve_ccbqp_mip(const CcbqpProblem& p);

// Duals of the master partition LP, ordered-pair convention for kappa.
struct PricingDuals {
  double mu = 0.0;
  std::vector<double> sigma;
  Eigen::MatrixXd kappa;
};

// Most uplifting individually-rational coalition against per-agent current
// utilities. Returns the coalition and its uplift r* iff r* exceeds
// r_current; a none return certifies no uplift constraint is violated.
std::optional<std::pair<Coalition, double>> separate_violated_uplift(
    const Instance& inst, const std::vector<double>& current_utility, double r_current,
    OracleBackend backend = OracleBackend::Auto);

// Membership couplings imposed by pair branching: together forces both
// agents in or both out, apart forbids them from sharing the column.
struct PairRestrictions {
  std::vector<std::pair<int, int>> together, apart;
};

// Best-reduced-cost team column against master duals, skipping excluded
// coalitions via distance-style rows. Returns iff the reduced cost is
// positive beyond tolerance; none certifies the column pool is complete.
std::optional<std::pair<Coalition, double>> price_column(
    const Instance& inst, const PricingDuals& duals, double alpha,
    const std::vector<Coalition>& excluded, OracleBackend backend = OracleBackend::Auto,
    const PairRestrictions& pairs = {});

}  // namespace teamform
