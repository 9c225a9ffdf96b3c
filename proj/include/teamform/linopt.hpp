#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <vector>

namespace teamform {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Simplex tolerances. All model data are integers bounded by u_max * s^2, so
// true objective gaps are never smaller than min(alpha, 1-alpha) for the
// two-decimal alphas used throughout; 1e-6 sits safely below.
inline constexpr double kTolFeas = 1e-6;
inline constexpr double kTolInt = 1e-6;
inline constexpr double kTolGap = 1e-6;

struct LinTerm {
  int var = 0;
  double coef = 0.0;
};

struct Row {
  std::vector<LinTerm> terms;
  char sense = 'L';  // 'L' <=, 'E' =, 'G' >=
  double rhs = 0.0;
};

struct LinearProgram {
  bool maximize = true;
  std::vector<double> obj;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;

  int add_var(double lb, double ub, double obj_coef);
  int add_row(char sense, double rhs);
  void add_term(int row, int var, double coef);
  int num_vars() const { return (int)obj.size(); }
  int num_rows() const { return (int)rows.size(); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterLimit };

struct LpSolution {
  LpStatus status = LpStatus::IterLimit;
  double objective = 0.0;
  std::vector<double> x;              // structural variable values
  std::vector<double> duals;          // one per row, in the program's sense
  std::vector<double> reduced_costs;  // one per structural variable
};

// Optimality certificate magnitudes; all near zero for a correct optimum.
struct LpCertificate {
  double primal_infeasibility = 0.0;  // worst row/bound violation
  double dual_infeasibility = 0.0;    // worst wrong-signed dual or reduced cost
  double duality_gap = 0.0;           // |primal objective - dual objective|
};

LpCertificate certify(const LinearProgram& lp, const LpSolution& sol);

// Dense-basis revised simplex over the bounded-variable computational form
// (one logical variable per row). Supports incremental column/row addition
// and bound changes with warm restarts: primal iterations after new columns,
// dual iterations after bound changes or new rows.
class SimplexEngine {
 public:
  explicit SimplexEngine(const LinearProgram& lp);
  ~SimplexEngine();
  SimplexEngine(SimplexEngine&&) noexcept;
  SimplexEngine& operator=(SimplexEngine&&) noexcept;

  // Appends a structural variable with the given column entries.
  int add_var(double lb, double ub, double obj_coef, const std::vector<LinTerm>& column);
  // Appends a row; its logical variable joins the basis.
  int add_row(const Row& row);
  void set_var_bounds(int var, double lb, double ub);

  LpStatus solve();

  double objective() const;
  double var_value(int var) const;
  std::vector<double> struct_values() const;
  // Row duals for the internal maximization sense.
  std::vector<double> row_duals() const;
  double reduced_cost(int var) const;

  // The mirrored program, including all added columns/rows and current bounds.
  const LinearProgram& program() const;

  std::int64_t iterations() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

LpSolution solve_lp(const LinearProgram& lp);

// Lazy cuts: called with the structural solution at every node whose
// ungrouped integer variables are all integral (grouped blocks may still be
// fractional); returned rows are added globally and the node is re-solved.
using CutCallback = std::function<std::vector<Row>(const std::vector<double>& x)>;

struct MipProblem {
  LinearProgram lp;
  std::vector<char> is_integer;  // per structural variable
  // Ordered unit-sum binary groups (sum over group = 1). Branched by
  // dichotomy on the cumulative mass once every ungrouped integer variable
  // is integral; single-variable branching barely moves the relaxation when
  // a group can shift mass between adjacent members.
  std::vector<std::vector<int>> sos1_groups;
  // Integer-feasible objective values lie on this lattice when > 0 (integer
  // data gives 1, rational cost mixes a fraction of it). Node bounds snap
  // toward the incumbent onto the lattice before pruning, which closes
  // plateau gaps smaller than one lattice step without waiting them out.
  double obj_granularity = 0.0;
  // Known-feasible objective in the program's sense (heuristic warm start).
  // Pruning starts against it; the result carries no x when nothing beat it,
  // and an exhausted tree then proves the warm start optimal.
  double seed_objective = std::numeric_limits<double>::quiet_NaN();
  CutCallback callback;
};

enum class MipStatus { Optimal, Infeasible, Budget };

struct MipLimits {
  double time_budget_secs = kInfinity;
  std::int64_t node_budget = std::numeric_limits<std::int64_t>::max();
};

struct MipResult {
  MipStatus status = MipStatus::Infeasible;
  bool has_incumbent = false;
  double objective = 0.0;  // incumbent objective in the program's sense
  double bound = 0.0;      // best proven bound (equals objective when optimal)
  std::vector<double> x;   // incumbent structural values
  std::int64_t nodes = 0;
  std::int64_t lp_solves = 0;
  std::int64_t cuts_added = 0;
};

// LP-based branch and bound: best-bound node selection, most-fractional
// branching, lazy cuts at integer-feasible nodes. Deterministic for fixed
// inputs when no budget trips.
MipResult solve_mip(const MipProblem& mip, const MipLimits& limits = {});

}  // namespace teamform
