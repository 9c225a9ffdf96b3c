#include "teamform/models.hpp"

#include "teamform/core.hpp"

namespace teamform {

ModelLayout append_shared_block(LinearProgram& lp, const Instance& inst, double alpha,
                                bool utility_on_w) {
  const int n = inst.n;
  ModelLayout L;
  L.n = n;
  L.w_offset = lp.num_vars();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      lp.add_var(0.0, 1.0, utility_on_w ? alpha * (double)inst.u(i, j) : 0.0);
    }
  }
  L.z_start.resize(n);
  L.ubar.resize(n);
  for (int i = 0; i < n; ++i) {
    L.ubar[i] = max_realizable_utility(inst, i);
    L.z_start[i] = lp.num_vars();
    for (Utility v = 0; v <= L.ubar[i]; ++v) lp.add_var(0.0, 1.0, 0.0);
  }
  L.r_var = lp.add_var(0.0, kInfinity, -(1.0 - alpha));

  for (int i = 0; i < n; ++i) {
    int unit = lp.add_row('E', 1.0);
    for (Utility v = 0; v <= L.ubar[i]; ++v) lp.add_term(unit, L.z_start[i] + (int)v, 1.0);
    int couple = lp.add_row('E', 0.0);
    for (Utility v = 1; v <= L.ubar[i]; ++v)
      lp.add_term(couple, L.z_start[i] + (int)v, (double)v);
    for (int j = 0; j < n; ++j)
      if (j != i) lp.add_term(couple, L.w_index(i, j), -(double)inst.u(i, j));
  }
  return L;
}

Row uplift_row(const Instance& inst, const Coalition& c, const ModelLayout& layout) {
  Row row;
  row.sense = 'G';
  const Utility big = coalition_utility(inst, c);
  row.rhs = (double)big;
  row.terms.push_back({layout.r_var, 1.0});
  for (int i : c.members) {
    const Utility threshold = agent_utility_in_coalition(inst, i, c);
    for (Utility v = 1; v <= layout.ubar[i]; ++v) {
      double coef = (double)v + (v > threshold ? (double)big : 0.0);
      row.terms.push_back({layout.z_start[i] + (int)v, coef});
    }
  }
  return row;
}

std::vector<std::vector<int>> unary_groups(const ModelLayout& layout) {
  std::vector<std::vector<int>> groups(layout.n);
  for (int i = 0; i < layout.n; ++i) {
    groups[i].resize((std::size_t)layout.ubar[i] + 1);
    for (Utility v = 0; v <= layout.ubar[i]; ++v) groups[i][(std::size_t)v] = layout.z_start[i] + (int)v;
  }
  return groups;
}

Row partition_uplift_cut(const Instance& inst, const TeamFormation& t, Utility r_star,
                         const ModelLayout& layout) {
  Row row;
  row.sense = 'G';
  row.terms.push_back({layout.r_var, 1.0});
  int pairs = 0;
  for (int i = 0; i < inst.n; ++i) {
    for (int j = 0; j < inst.n; ++j) {
      if (i == j || t.team_of[i] != t.team_of[j]) continue;
      row.terms.push_back({layout.w_index(i, j), -(double)r_star});
      ++pairs;
    }
  }
  row.rhs = -(double)r_star * (double)(pairs - 1);
  return row;
}

std::vector<LinTerm> MasterModel::column_of(const Coalition& c) const {
  std::vector<LinTerm> col;
  col.push_back({mu_row, 1.0});
  for (int i : c.members) col.push_back({sigma_row[i], 1.0});
  for (int i : c.members)
    for (int j : c.members)
      if (i != j) col.push_back({kappa_row(i, j), 1.0});
  return col;
}

MasterModel build_master_model(const Instance& inst, const std::vector<Coalition>& pool,
                               double alpha) {
  MasterModel mm;
  mm.alpha = alpha;
  LinearProgram& lp = mm.lp;
  for (const Coalition& c : pool)
    lp.add_var(0.0, kInfinity, alpha * (double)coalition_utility(inst, c));
  mm.layout = append_shared_block(lp, inst, alpha, /*utility_on_w=*/false);

  const int n = inst.n;
  mm.mu_row = lp.add_row('E', (double)inst.m);
  mm.sigma_row.resize(n);
  for (int i = 0; i < n; ++i) mm.sigma_row[i] = lp.add_row('E', 1.0);
  mm.kappa_row_offset = lp.num_rows();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      int row = lp.add_row('E', 0.0);
      lp.add_term(row, mm.layout.w_index(i, j), -1.0);
    }
  }
  for (int p = 0; p < (int)pool.size(); ++p)
    for (const LinTerm& entry : mm.column_of(pool[p])) lp.add_term(entry.var, p, entry.coef);
  return mm;
}

AssignmentModel build_assignment_model(const Instance& inst, double alpha) {
  AssignmentModel am;
  am.m = inst.m;
  LinearProgram& lp = am.lp;
  const int n = inst.n, m = inst.m;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < m; ++k) lp.add_var(0.0, 1.0, 0.0);
  am.layout = append_shared_block(lp, inst, alpha, /*utility_on_w=*/true);

  for (int k = 0; k < m; ++k) {
    int row = lp.add_row('E', (double)inst.s);
    for (int i = 0; i < n; ++i) lp.add_term(row, am.x_index(i, k), 1.0);
  }
  for (int i = 0; i < n; ++i) {
    int row = lp.add_row('E', 1.0);
    for (int k = 0; k < m; ++k) lp.add_term(row, am.x_index(i, k), 1.0);
  }
  // Co-membership linking: w_ij = 1 exactly when i and j share a team.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int w = am.layout.w_index(i, j);
      for (int k = 0; k < m; ++k) {
        int lift = lp.add_row('L', 1.0);  // x_ik + x_jk - w_ij <= 1
        lp.add_term(lift, am.x_index(i, k), 1.0);
        lp.add_term(lift, am.x_index(j, k), 1.0);
        lp.add_term(lift, w, -1.0);
        int drop = lp.add_row('L', 1.0);  // w_ij + x_ik - x_jk <= 1
        lp.add_term(drop, w, 1.0);
        lp.add_term(drop, am.x_index(i, k), 1.0);
        lp.add_term(drop, am.x_index(j, k), -1.0);
      }
    }
  }
  // The linking rows alone are toothless against a uniform x: mass 1/m on
  // every team satisfies them with all of w at 1, and the relaxation hands
  // each agent its best realizable team simultaneously. Symmetry and the
  // exact teammate count are what an actual partition imposes on w, and they
  // pull the root bound down to a fractional matching.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      int sym = lp.add_row('E', 0.0);
      lp.add_term(sym, am.layout.w_index(i, j), 1.0);
      lp.add_term(sym, am.layout.w_index(j, i), -1.0);
    }
  for (int i = 0; i < n; ++i) {
    int deg = lp.add_row('E', (double)(inst.s - 1));
    for (int j = 0; j < n; ++j)
      if (j != i) lp.add_term(deg, am.layout.w_index(i, j), 1.0);
  }
  if (inst.has_chars()) {
    const CharacteristicSet& cs = *inst.chars;
    for (int k = 0; k < m; ++k) {
      for (int q = 0; q < cs.q_count; ++q) {
        int lo = lp.add_row('G', (double)cs.q_min[q]);
        int hi = lp.add_row('L', (double)cs.q_max[q]);
        for (int i = 0; i < n; ++i) {
          if (cs.delta(i, q) == 0) continue;
          lp.add_term(lo, am.x_index(i, k), 1.0);
          lp.add_term(hi, am.x_index(i, k), 1.0);
        }
      }
    }
    // Quotas restated on each agent's teammate set: the trait count of the
    // team holding i, minus i's own trait, must land in the quota window.
    // The x-indexed rows above say the same thing per label and fall to the
    // uniform cloak; these bind any fractional w directly.
    for (int i = 0; i < n; ++i) {
      for (int q = 0; q < cs.q_count; ++q) {
        int lo = lp.add_row('G', (double)cs.q_min[q] - (double)cs.delta(i, q));
        int hi = lp.add_row('L', (double)cs.q_max[q] - (double)cs.delta(i, q));
        for (int j = 0; j < n; ++j) {
          if (j == i || cs.delta(j, q) == 0) continue;
          lp.add_term(lo, am.layout.w_index(i, j), 1.0);
          lp.add_term(hi, am.layout.w_index(i, j), 1.0);
        }
      }
    }
  }
  return am;
}

}  // namespace teamform
