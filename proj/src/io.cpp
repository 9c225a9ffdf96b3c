#include "teamform/io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "teamform/core.hpp"

namespace teamform::io {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

json matrix_to_json(const UtilityMatrix& u) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < u.cols(); ++j) row.push_back(u(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json int_matrix_to_json(const Eigen::MatrixXi& d) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < d.cols(); ++j) row.push_back(d(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// shortest round-trip representation, same as the JSON output
std::string fmt_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return json(v).dump();
}

std::string fmt_opt_metric(double v) { return fmt_double(v); }

}  // namespace

std::string serialize_instance(const Instance& inst) {
  ordered_json j;
  j["n"] = inst.n;
  j["m"] = inst.m;
  j["s"] = inst.s;
  j["u_max"] = inst.u_max;
  j["scheme"] = inst.scheme;
  j["seed"] = inst.seed;
  j["u"] = matrix_to_json(inst.u);
  if (inst.has_chars()) {
    ordered_json c;
    c["q_count"] = inst.chars->q_count;
    c["delta"] = int_matrix_to_json(inst.chars->delta);
    c["q_min"] = inst.chars->q_min;
    c["q_max"] = inst.chars->q_max;
    j["chars"] = std::move(c);
  } else {
    j["chars"] = nullptr;
  }
  return j.dump() + "\n";
}

Instance parse_instance(const std::string& text) {
  json j = json::parse(text);
  Instance inst;
  inst.n = j.at("n").get<int>();
  inst.m = j.at("m").get<int>();
  inst.s = j.at("s").get<int>();
  inst.u_max = j.at("u_max").get<Utility>();
  inst.scheme = j.at("scheme").get<std::string>();
  inst.seed = j.at("seed").get<std::uint64_t>();

  const json& rows = j.at("u");
  if (!rows.is_array() || (int)rows.size() != inst.n)
    throw std::invalid_argument("instance: u must be an n x n array");
  inst.u = UtilityMatrix::Zero(inst.n, inst.n);
  for (int i = 0; i < inst.n; ++i) {
    const json& row = rows.at((size_t)i);
    if (!row.is_array() || (int)row.size() != inst.n)
      throw std::invalid_argument("instance: u must be an n x n array");
    for (int jj = 0; jj < inst.n; ++jj) inst.u(i, jj) = row.at((size_t)jj).get<Utility>();
  }

  if (j.contains("chars") && !j.at("chars").is_null()) {
    const json& c = j.at("chars");
    CharacteristicSet cs;
    cs.q_count = c.at("q_count").get<int>();
    const json& drows = c.at("delta");
    if (!drows.is_array() || (int)drows.size() != inst.n)
      throw std::invalid_argument("instance: delta must be an n x q_count array");
    cs.delta = Eigen::MatrixXi::Zero(inst.n, cs.q_count);
    for (int i = 0; i < inst.n; ++i) {
      const json& row = drows.at((size_t)i);
      if (!row.is_array() || (int)row.size() != cs.q_count)
        throw std::invalid_argument("instance: delta must be an n x q_count array");
      for (int q = 0; q < cs.q_count; ++q) cs.delta(i, q) = row.at((size_t)q).get<int>();
    }
    cs.q_min = c.at("q_min").get<std::vector<int>>();
    cs.q_max = c.at("q_max").get<std::vector<int>>();
    inst.chars = std::move(cs);
  }

  inst.validate();
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_instance(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << serialize_instance(inst);
  if (!out) throw std::runtime_error("short write on instance file: " + path);
}

double table_gap(double gap) { return std::isfinite(gap) ? gap : 100000.0; }

RunRecord make_record(const std::string& label, const Instance& inst, const std::string& solver,
                      double alpha, const SolveReport& rep,
                      std::optional<MetricsReport> metrics) {
  RunRecord rec;
  rec.instance = label;
  rec.scheme = inst.scheme;
  rec.n = inst.n;
  rec.m = inst.m;
  rec.s = inst.s;
  rec.seed = inst.seed;
  rec.solver = solver;
  rec.alpha = alpha;
  switch (rep.status) {
    case SolveStatus::Optimal: rec.status = "optimal"; break;
    case SolveStatus::Budget: rec.status = "budget"; break;
    case SolveStatus::Infeasible: rec.status = "infeasible"; break;
  }
  if (rep.incumbent) {
    rec.objective = rep.lower;
    rec.utility = total_utility(inst, *rep.incumbent);
    rec.uplift = rep.incumbent_r;
    rec.team_of = rep.incumbent->team_of;
  }
  rec.lower = rep.lower;
  rec.upper = rep.upper;
  rec.gap = table_gap(rep.gap);
  rec.root_bound = rep.root_bound;
  rec.root_certified = rep.root_certified;
  rec.wall_secs = rep.wall_secs;
  rec.nodes = rep.counters.nodes;
  rec.columns = rep.counters.columns;
  rec.cuts = rep.counters.cuts;
  rec.lp_solves = rep.counters.lp_solves;
  rec.metrics = std::move(metrics);
  return rec;
}

const char* const kResultsCsvHeader =
    "schema,instance,scheme,n,m,s,seed,solver,alpha,status,objective,utility,uplift,lower,upper,"
    "gap,wall_secs,nodes,columns,cuts,lp_solves,efficiency_mean,individual_inequity,team_inequity,"
    "individual_instability_mean,individual_instability_max,team_instability_mean,"
    "team_instability_max";

std::string record_to_csv_row(const RunRecord& rec) {
  std::ostringstream out;
  out << "tfr1," << rec.instance << ',' << rec.scheme << ',' << rec.n << ',' << rec.m << ','
      << rec.s << ',' << rec.seed << ',' << rec.solver << ',' << fmt_double(rec.alpha) << ','
      << rec.status << ',';
  out << (rec.objective ? fmt_double(*rec.objective) : "") << ',';
  if (rec.utility) out << *rec.utility;
  out << ',';
  if (rec.uplift) out << *rec.uplift;
  out << ',';
  out << fmt_double(rec.lower) << ',' << fmt_double(rec.upper) << ',' << fmt_double(rec.gap) << ','
      << fmt_double(rec.wall_secs) << ',' << rec.nodes << ',' << rec.columns << ',' << rec.cuts
      << ',' << rec.lp_solves << ',';
  if (rec.metrics) {
    const MetricsReport& m = *rec.metrics;
    out << fmt_opt_metric(m.efficiency_mean) << ',' << fmt_opt_metric(m.individual_inequity) << ','
        << fmt_opt_metric(m.team_inequity) << ',' << fmt_opt_metric(m.individual_instability_mean)
        << ',' << fmt_opt_metric(m.individual_instability_max) << ','
        << fmt_opt_metric(m.team_instability_mean) << ','
        << fmt_opt_metric(m.team_instability_max);
  } else {
    out << ",,,,,,";
  }
  return out.str();
}

namespace {

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

json metric_array(const std::vector<double>& xs) {
  json arr = json::array();
  for (double v : xs) arr.push_back(finite_or_null(v));
  return arr;
}

double json_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<double>();
}

}  // namespace

std::string record_to_json_line(const RunRecord& rec) {
  ordered_json j;
  j["schema"] = "tfr1";
  j["instance"] = rec.instance;
  j["scheme"] = rec.scheme;
  j["n"] = rec.n;
  j["m"] = rec.m;
  j["s"] = rec.s;
  j["seed"] = rec.seed;
  j["solver"] = rec.solver;
  j["alpha"] = rec.alpha;
  j["status"] = rec.status;
  if (!rec.error.empty()) j["error"] = rec.error;
  j["objective"] = rec.objective ? json(*rec.objective) : json(nullptr);
  j["utility"] = rec.utility ? json(*rec.utility) : json(nullptr);
  j["uplift"] = rec.uplift ? json(*rec.uplift) : json(nullptr);
  j["lower"] = finite_or_null(rec.lower);
  j["upper"] = finite_or_null(rec.upper);
  j["gap"] = rec.gap;
  j["root_bound"] = finite_or_null(rec.root_bound);
  j["root_certified"] = rec.root_certified;
  j["wall_secs"] = rec.wall_secs;
  j["nodes"] = rec.nodes;
  j["columns"] = rec.columns;
  j["cuts"] = rec.cuts;
  j["lp_solves"] = rec.lp_solves;
  j["team_of"] = rec.team_of.empty() ? json(nullptr) : json(rec.team_of);
  if (rec.metrics) {
    const MetricsReport& m = *rec.metrics;
    ordered_json mj;
    mj["efficiency"] = metric_array(m.efficiency);
    mj["efficiency_mean"] = finite_or_null(m.efficiency_mean);
    mj["individual_inequity"] = finite_or_null(m.individual_inequity);
    mj["team_inequity"] = finite_or_null(m.team_inequity);
    mj["individual_instability"] = metric_array(m.individual_instability);
    mj["individual_instability_mean"] = finite_or_null(m.individual_instability_mean);
    mj["individual_instability_max"] = finite_or_null(m.individual_instability_max);
    mj["team_instability"] = metric_array(m.team_instability);
    mj["team_instability_mean"] = finite_or_null(m.team_instability_mean);
    mj["team_instability_max"] = finite_or_null(m.team_instability_max);
    j["metrics"] = std::move(mj);
  } else {
    j["metrics"] = nullptr;
  }
  return j.dump();
}

RunRecord record_from_json_line(const std::string& line) {
  json j = json::parse(line);
  if (!j.contains("schema") || j.at("schema").get<std::string>() != "tfr1")
    throw std::invalid_argument("results record: unknown schema");
  RunRecord rec;
  rec.instance = j.at("instance").get<std::string>();
  rec.scheme = j.at("scheme").get<std::string>();
  rec.n = j.at("n").get<int>();
  rec.m = j.at("m").get<int>();
  rec.s = j.at("s").get<int>();
  rec.seed = j.at("seed").get<std::uint64_t>();
  rec.solver = j.at("solver").get<std::string>();
  rec.alpha = j.at("alpha").get<double>();
  rec.status = j.at("status").get<std::string>();
  if (j.contains("error") && !j.at("error").is_null()) rec.error = j.at("error").get<std::string>();
  if (!j.at("objective").is_null()) rec.objective = j.at("objective").get<double>();
  if (!j.at("utility").is_null()) rec.utility = j.at("utility").get<Utility>();
  if (!j.at("uplift").is_null()) rec.uplift = j.at("uplift").get<Utility>();
  rec.lower = json_or(j, "lower", -kInf);
  rec.upper = json_or(j, "upper", kInf);
  rec.gap = j.at("gap").get<double>();
  rec.root_bound = json_or(j, "root_bound", kInf);
  rec.root_certified = j.at("root_certified").get<bool>();
  rec.wall_secs = j.at("wall_secs").get<double>();
  rec.nodes = j.at("nodes").get<std::int64_t>();
  rec.columns = j.at("columns").get<std::int64_t>();
  rec.cuts = j.at("cuts").get<std::int64_t>();
  rec.lp_solves = j.at("lp_solves").get<std::int64_t>();
  if (!j.at("team_of").is_null()) rec.team_of = j.at("team_of").get<std::vector<int>>();
  if (!j.at("metrics").is_null()) {
    const json& mj = j.at("metrics");
    MetricsReport m;
    auto arr = [](const json& a) {
      std::vector<double> out;
      for (const auto& v : a) out.push_back(v.is_null() ? kInf : v.get<double>());
      return out;
    };
    m.efficiency = arr(mj.at("efficiency"));
    m.efficiency_mean = json_or(mj, "efficiency_mean", kInf);
    m.individual_inequity = json_or(mj, "individual_inequity", kInf);
    m.team_inequity = json_or(mj, "team_inequity", kInf);
    m.individual_instability = arr(mj.at("individual_instability"));
    m.individual_instability_mean = json_or(mj, "individual_instability_mean", kInf);
    m.individual_instability_max = json_or(mj, "individual_instability_max", kInf);
    m.team_instability = arr(mj.at("team_instability"));
    m.team_instability_mean = json_or(mj, "team_instability_mean", kInf);
    m.team_instability_max = json_or(mj, "team_instability_max", kInf);
    rec.metrics = std::move(m);
  }
  return rec;
}

}  // namespace teamform::io
