#pragma once

#include <vector>

#include "teamform/linopt.hpp"
#include "teamform/types.hpp"

namespace teamform {

// Variable block shared by both exact formulations: ordered-pair co-membership
// variables w_ij, per-agent unary utility expansions z_iv over v in 0..Ubar_i,
// and the uplift variable r.
struct ModelLayout {
  int n = 0;
  int w_offset = 0;
  std::vector<int> z_start;    // z_start[i] + v addresses z_iv
  std::vector<Utility> ubar;
  int r_var = -1;

  int w_index(int i, int j) const {  // ordered pair, i != j
    return w_offset + i * (n - 1) + (j < i ? j : j - 1);
  }
  int pair_slot(int i, int j) const { return i * (n - 1) + (j < i ? j : j - 1); }
};

// Appends w, z, r variables plus the unary rows sum_v z_iv = 1 and
// sum_v v z_iv = sum_j u_ij w_ij. The assignment model puts the utility
// objective on w (alpha u_ij); the enumeration master carries it on the
// team columns instead. r always gets -(1 - alpha).
ModelLayout append_shared_block(LinearProgram& lp, const Instance& inst, double alpha,
                                bool utility_on_w);

// r + sum_{i in c} sum_v v z_iv + sum_{i in c} sum_{v > u(c,i)} U(c) z_iv >= U(c).
// The second sum deactivates the row whenever some member strictly loses.
Row uplift_row(const Instance& inst, const Coalition& c, const ModelLayout& layout);

// One ordered unit-sum group per agent: its unary expansion block, for the
// integer kernel's dichotomy branching.
std::vector<std::vector<int>> unary_groups(const ModelLayout& layout);

// r >= r_star (sum_{co-member pairs of t} w_ij - (pairs - 1)). Implied at
// every integer point, where the uplift rows already force r up to the
// selected partition's worst case; its bite is on relaxation points that
// fix the partition through w but undervalue r with fractional unary mass.
Row partition_uplift_cut(const Instance& inst, const TeamFormation& t, Utility r_star,
                         const ModelLayout& layout);

// Set-partition master over a coalition pool: t_c columns ahead of the shared
// block; rows sum t = m (mu), per-agent cover (sigma), and per ordered pair
// sum_{c containing both} t_c = w_ij (kappa).
struct MasterModel {
  LinearProgram lp;
  ModelLayout layout;
  double alpha = 1.0;
  int mu_row = -1;
  std::vector<int> sigma_row;
  int kappa_row_offset = 0;

  int kappa_row(int i, int j) const { return kappa_row_offset + layout.pair_slot(i, j); }
  // Master-row entries of a team column; objective is alpha U(c).
  std::vector<LinTerm> column_of(const Coalition& c) const;
};

MasterModel build_master_model(const Instance& inst, const std::vector<Coalition>& pool,
                               double alpha);

// Direct assignment formulation: x_ik ahead of the shared block; team-size
// and one-team rows, both co-membership linking families, quota rows.
struct AssignmentModel {
  LinearProgram lp;
  ModelLayout layout;
  int m = 0;

  int x_index(int i, int k) const { return i * m + k; }
};

AssignmentModel build_assignment_model(const Instance& inst, double alpha);

}  // namespace teamform
