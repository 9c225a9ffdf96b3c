#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "teamform/metrics.hpp"
#include "teamform/solvers.hpp"
#include "teamform/types.hpp"

namespace teamform::io {

// Canonical instance serialization. parse(serialize(x)) == x and
// serialize(parse(text)) reproduces the canonical byte sequence, so files
// written by us round-trip byte-identically.
std::string serialize_instance(const Instance& inst);
Instance parse_instance(const std::string& text);
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

// One solver (or heuristic) run flattened into a results row.
struct RunRecord {
  std::string instance;  // file stem or label
  std::string scheme;
  int n = 0, m = 0, s = 0;
  std::uint64_t seed = 0;
  std::string solver;
  double alpha = 0.0;
  std::string status;  // optimal | budget | infeasible | error
  std::string error;   // failure message when status == error
  std::optional<double> objective;
  std::optional<Utility> utility;
  std::optional<Utility> uplift;
  double lower = 0.0;
  double upper = 0.0;
  double gap = 0.0;  // stored with the unresolved -> 100000 convention applied
  double root_bound = 0.0;
  bool root_certified = false;
  double wall_secs = 0.0;
  std::int64_t nodes = 0, columns = 0, cuts = 0, lp_solves = 0;
  std::vector<int> team_of;  // empty when no incumbent
  std::optional<MetricsReport> metrics;
};

// Absolute-gap convention for tables and stored records: an unresolved run
// (no finite gap) counts as 100000.
double table_gap(double gap);

RunRecord make_record(const std::string& label, const Instance& inst, const std::string& solver,
                      double alpha, const SolveReport& rep,
                      std::optional<MetricsReport> metrics);

// Fixed, versioned column set; the schema cell of every row is "tfr1".
extern const char* const kResultsCsvHeader;

std::string record_to_csv_row(const RunRecord& rec);
std::string record_to_json_line(const RunRecord& rec);
RunRecord record_from_json_line(const std::string& line);

}  // namespace teamform::io
