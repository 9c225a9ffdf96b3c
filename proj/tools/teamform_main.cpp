// teamform: experiment harness for the team formation solvers.
//
//   teamform gen campaign.json --out instances/
//   teamform solve instances/*.json --solver bcp --alpha 0,0.01,0.5,0.99,1 --out results
//   teamform report results.jsonl --out tables
//   teamform verify instances/g1_n8_m2_r0.json --alpha 0.5
//
// TEAMFORM_THREADS caps the solve worker pool.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "teamform/core.hpp"
#include "teamform/heuristics.hpp"
#include "teamform/instgen.hpp"
#include "teamform/io.hpp"
#include "teamform/metrics.hpp"
#include "teamform/solvers.hpp"

namespace fs = std::filesystem;
using namespace teamform;

namespace {

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    size_t used = 0;
    double v = std::stod(token, &used);
    if (used != token.size() || v < 0.0 || v > 1.0)
      throw CLI::ValidationError("--alpha", "alpha values must be numbers in [0,1]");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("--alpha", "at least one alpha required");
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ','))
    if (!token.empty()) out.push_back(token);
  return out;
}

int worker_count(size_t tasks) {
  int n = (int)std::thread::hardware_concurrency();
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("TEAMFORM_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end && *end == '\0' && cap >= 1) n = std::min(n, (int)cap);
  }
  return std::max(1, std::min(n, (int)tasks));
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

bool is_exact_solver(const std::string& name) {
  return name == "exp" || name == "bc" || name == "bcp" || name == "brute";
}

bool known_solver(const std::string& name) {
  return is_exact_solver(name) || name == "draft" || name == "opop";
}

SolveReport run_solver(const std::string& name, const Instance& inst, const SolveConfig& cfg) {
  if (name == "exp") return solve_exp(inst, cfg);
  if (name == "bc") return solve_bc(inst, cfg);
  if (name == "bcp") return solve_bcp(inst, cfg);
  if (name == "brute") return solve_brute(inst, cfg);
  if (name == "draft") return score_formation(inst, draft(inst, cfg.seed), cfg.alpha);
  if (name == "opop") return score_formation(inst, opop(inst, cfg.seed), cfg.alpha);
  throw std::invalid_argument("unknown solver: " + name);
}

// ---- gen ----

struct GenCampaign {
  fs::path out_dir = "instances";
  Utility u_max = 25;
  std::vector<std::array<int, 3>> sizes;  // n, m, s
  std::vector<std::string> schemes = {"g1", "g2", "g3", "g4"};
  int replicates = 5;
  std::uint64_t seed = 1;
  bool chars = false;
  int q_count = 3;
};

GenCampaign load_campaign(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  GenCampaign c;
  if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("u_max")) c.u_max = j.at("u_max").get<Utility>();
  if (j.contains("schemes")) c.schemes = j.at("schemes").get<std::vector<std::string>>();
  if (j.contains("replicates")) c.replicates = j.at("replicates").get<int>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("chars")) c.chars = j.at("chars").get<bool>();
  if (j.contains("q_count")) c.q_count = j.at("q_count").get<int>();
  for (const auto& sz : j.at("sizes")) {
    int n = sz.at("n").get<int>();
    int m = sz.at("m").get<int>();
    int s = sz.contains("s") ? sz.at("s").get<int>() : (m > 0 ? n / m : 0);
    if (m <= 0 || s <= 0 || n != m * s)
      throw std::runtime_error("config: size entry needs n = m * s");
    c.sizes.push_back({n, m, s});
  }
  return c;
}

int cmd_gen(const std::string& config_path, const std::string& out_override,
            std::optional<std::uint64_t> seed_override) {
  GenCampaign c = load_campaign(config_path);
  if (!out_override.empty()) c.out_dir = out_override;
  if (seed_override) c.seed = *seed_override;
  fs::create_directories(c.out_dir);

  std::uint64_t k = 0;
  int written = 0;
  for (const auto& [n, m, s] : c.sizes) {
    for (const auto& scheme : c.schemes) {
      for (int rep = 0; rep < c.replicates; ++rep) {
        GenConfig gc;
        gc.n = n;
        gc.m = m;
        gc.s = s;
        gc.u_max = c.u_max;
        gc.scheme = scheme;
        gc.seed = c.seed + k++;
        std::ostringstream name;
        name << scheme << "_n" << n << "_m" << m << "_r" << rep;
        if (scheme != "g4") {
          io::save_instance(generate(gc), (c.out_dir / (name.str() + ".json")).string());
          ++written;
        }
        if (c.chars || scheme == "g4") {
          GenConfig gcc = gc;
          gcc.q_count = c.q_count;
          io::save_instance(generate(gcc), (c.out_dir / (name.str() + "_c.json")).string());
          ++written;
        }
      }
    }
  }
  std::cout << "wrote " << written << " instance files to " << c.out_dir.string() << "\n";
  return 0;
}

// ---- solve ----

struct SolveTask {
  std::string path;
  std::string solver;
  double alpha = 0.0;
};

io::RunRecord run_task(const SolveTask& task, const SolveConfig& base_cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Instance inst = io::load_instance(task.path);
    SolveConfig cfg = base_cfg;
    cfg.alpha = task.alpha;
    SolveReport rep = run_solver(task.solver, inst, cfg);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (rep.wall_secs == 0.0) rep.wall_secs = wall;
    std::optional<MetricsReport> metrics;
    if (rep.incumbent) metrics = compute_metrics(inst, *rep.incumbent);
    return io::make_record(stem_of(task.path), inst, task.solver, task.alpha, rep,
                           std::move(metrics));
  } catch (const std::exception& e) {
    io::RunRecord rec;
    rec.instance = stem_of(task.path);
    rec.solver = task.solver;
    rec.alpha = task.alpha;
    rec.status = "error";
    rec.error = e.what();
    rec.gap = io::table_gap(std::numeric_limits<double>::infinity());
    rec.lower = -std::numeric_limits<double>::infinity();
    rec.upper = std::numeric_limits<double>::infinity();
    rec.root_bound = std::numeric_limits<double>::infinity();
    rec.wall_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
  }
}

int cmd_solve(const std::vector<std::string>& files, const std::string& solver_list,
              const std::string& alpha_list, double budget_secs, std::uint64_t seed,
              const std::string& out_prefix) {
  const std::vector<double> alphas = parse_alpha_list(alpha_list);
  const std::vector<std::string> solvers = split_list(solver_list);
  for (const auto& s : solvers)
    if (!known_solver(s)) throw CLI::ValidationError("--solver", "unknown solver: " + s);

  std::vector<SolveTask> tasks;
  for (const auto& f : files)
    for (const auto& sv : solvers)
      for (double a : alphas) tasks.push_back({f, sv, a});

  SolveConfig base_cfg;
  base_cfg.time_budget_secs = budget_secs;
  base_cfg.seed = seed;

  const fs::path csv_path = out_prefix + ".csv";
  const fs::path jsonl_path = out_prefix + ".jsonl";
  const bool need_header = !fs::exists(csv_path) || fs::file_size(csv_path) == 0;
  std::ofstream csv(csv_path, std::ios::app);
  std::ofstream jsonl(jsonl_path, std::ios::app);
  if (!csv || !jsonl) throw std::runtime_error("cannot open output files: " + out_prefix);
  if (need_header) csv << io::kResultsCsvHeader << "\n";

  // workers solve, one writer drains in task order so outputs are reproducible
  std::mutex mu;
  std::condition_variable cv;
  std::map<size_t, io::RunRecord> ready;
  std::atomic<size_t> next_task{0};
  int errors = 0;

  auto worker = [&] {
    while (true) {
      const size_t k = next_task.fetch_add(1);
      if (k >= tasks.size()) return;
      io::RunRecord rec = run_task(tasks[k], base_cfg);
      std::lock_guard<std::mutex> lock(mu);
      ready.emplace(k, std::move(rec));
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  for (int i = 0; i < worker_count(tasks.size()); ++i) pool.emplace_back(worker);

  for (size_t written = 0; written < tasks.size(); ++written) {
    std::unique_lock<std::mutex> lock(mu);
    cv.wait(lock, [&] { return ready.count(written) > 0; });
    io::RunRecord rec = std::move(ready.at(written));
    ready.erase(written);
    lock.unlock();
    csv << io::record_to_csv_row(rec) << "\n";
    jsonl << io::record_to_json_line(rec) << "\n";
    csv.flush();
    jsonl.flush();
    if (rec.status == "error") {
      ++errors;
      std::cerr << "error: " << rec.instance << " " << rec.solver << " alpha=" << rec.alpha << ": "
                << rec.error << "\n";
    } else {
      std::cout << rec.instance << " " << rec.solver << " alpha=" << rec.alpha << " -> "
                << rec.status << " obj="
                << (rec.objective ? std::to_string(*rec.objective) : std::string("-")) << " ("
                << rec.wall_secs << "s)\n";
    }
  }
  for (auto& t : pool) t.join();

  std::cout << tasks.size() << " runs appended to " << csv_path.string() << " and "
            << jsonl_path.string();
  if (errors) std::cout << " (" << errors << " recorded failures)";
  std::cout << "\n";
  return 0;
}

// ---- report ----

struct Aggregate {
  int n_runs = 0;
  int n_solved = 0;
  double time_solved_sum = 0.0;
  int n_with_gap = 0;
  double gap_sum = 0.0;
  int n_incumbent = 0;
  double utility_sum = 0.0;
  double uplift_sum = 0.0;
};

std::string mean_or_empty(double sum, int count) {
  if (count == 0) return "";
  return nlohmann::json(sum / count).dump();
}

int cmd_report(const std::vector<std::string>& files, const std::string& out_prefix) {
  std::vector<io::RunRecord> records;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw std::runtime_error("cannot open results file: " + f);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        records.push_back(io::record_from_json_line(line));
      } catch (const std::exception& e) {
        std::cerr << f << ":" << lineno << ": skipping bad record: " << e.what() << "\n";
      }
    }
  }

  using Key = std::tuple<int, int, int, std::string, double>;  // n, m, s, solver, alpha
  std::map<Key, Aggregate> groups;
  for (const auto& rec : records) {
    Aggregate& a = groups[{rec.n, rec.m, rec.s, rec.solver, rec.alpha}];
    ++a.n_runs;
    if (rec.status == "optimal") {
      ++a.n_solved;
      a.time_solved_sum += rec.wall_secs;
    }
    if (rec.gap > 1e-6) {
      ++a.n_with_gap;
      a.gap_sum += rec.gap;
    }
    if (rec.utility) {
      ++a.n_incumbent;
      a.utility_sum += (double)*rec.utility;
      a.uplift_sum += (double)(rec.uplift ? *rec.uplift : 0);
    }
  }

  const fs::path summary_path = out_prefix + "_summary.csv";
  std::ofstream summary(summary_path);
  if (!summary) throw std::runtime_error("cannot write " + summary_path.string());
  summary << "schema,n,m,s,solver,alpha,n_runs,n_solved,mean_time_solved,n_with_gap,mean_gap,"
             "mean_best_utility,mean_best_uplift\n";
  for (const auto& [key, a] : groups) {
    const auto& [n, m, s, solver, alpha] = key;
    summary << "tfs1," << n << ',' << m << ',' << s << ',' << solver << ','
            << nlohmann::json(alpha).dump() << ',' << a.n_runs << ',' << a.n_solved << ','
            << mean_or_empty(a.time_solved_sum, a.n_solved) << ',' << a.n_with_gap << ','
            << mean_or_empty(a.gap_sum, a.n_with_gap) << ','
            << mean_or_empty(a.utility_sum, a.n_incumbent) << ','
            << mean_or_empty(a.uplift_sum, a.n_incumbent) << "\n";
  }

  // performance profiles: solved-time curve and log-absolute-gap curve
  using PKey = std::pair<std::string, double>;
  std::map<PKey, std::vector<double>> times, gaps;
  std::map<PKey, int> totals;
  for (const auto& rec : records) {
    PKey key{rec.solver, rec.alpha};
    ++totals[key];
    if (rec.status == "optimal") times[key].push_back(rec.wall_secs);
    gaps[key].push_back(std::log10(std::max(rec.gap, 1e-6)));
  }
  const fs::path profile_path = out_prefix + "_profile.csv";
  std::ofstream profile(profile_path);
  if (!profile) throw std::runtime_error("cannot write " + profile_path.string());
  profile << "schema,solver,alpha,kind,x,fraction\n";
  for (auto& [key, xs] : times) {
    std::sort(xs.begin(), xs.end());
    for (size_t i = 0; i < xs.size(); ++i)
      profile << "tfp1," << key.first << ',' << nlohmann::json(key.second).dump() << ",time,"
              << nlohmann::json(xs[i]).dump() << ','
              << nlohmann::json((double)(i + 1) / totals[key]).dump() << "\n";
  }
  for (auto& [key, xs] : gaps) {
    std::sort(xs.begin(), xs.end());
    for (size_t i = 0; i < xs.size(); ++i)
      profile << "tfp1," << key.first << ',' << nlohmann::json(key.second).dump() << ",log_gap,"
              << nlohmann::json(xs[i]).dump() << ','
              << nlohmann::json((double)(i + 1) / totals[key]).dump() << "\n";
  }

  // mirror the summary on stdout
  std::cout << "n  m  s  solver  alpha  runs  solved  mean_time  with_gap  mean_gap  "
               "mean_utility  mean_uplift\n";
  for (const auto& [key, a] : groups) {
    const auto& [n, m, s, solver, alpha] = key;
    std::cout << n << "  " << m << "  " << s << "  " << solver << "  " << alpha << "  " << a.n_runs
              << "  " << a.n_solved << "  " << mean_or_empty(a.time_solved_sum, a.n_solved) << "  "
              << a.n_with_gap << "  " << mean_or_empty(a.gap_sum, a.n_with_gap) << "  "
              << mean_or_empty(a.utility_sum, a.n_incumbent) << "  "
              << mean_or_empty(a.uplift_sum, a.n_incumbent) << "\n";
  }
  std::cout << "wrote " << summary_path.string() << " and " << profile_path.string() << "\n";
  return 0;
}

// ---- verify ----

int cmd_verify(const std::vector<std::string>& files, const std::string& solver_list,
               const std::string& alpha_list, double budget_secs) {
  const std::vector<double> alphas = parse_alpha_list(alpha_list);
  std::vector<std::string> solvers = split_list(solver_list);
  for (const auto& s : solvers)
    if (!is_exact_solver(s) || s == "brute")
      throw CLI::ValidationError("--solver", "verify checks exact solvers: exp, bc, bcp");

  int fails = 0;
  for (const auto& f : files) {
    Instance inst;
    try {
      inst = io::load_instance(f);
    } catch (const std::exception& e) {
      std::cout << "[FAIL] " << f << ": " << e.what() << "\n";
      ++fails;
      continue;
    }
    for (double alpha : alphas) {
      std::optional<double> brute_value;
      try {
        brute_value = brute_force_optimum(inst, alpha).second;
      } catch (const std::runtime_error&) {
        // no feasible formation: solvers must agree
      }
      for (const auto& sv : solvers) {
        SolveConfig cfg;
        cfg.alpha = alpha;
        cfg.time_budget_secs = budget_secs;
        std::string verdict;
        try {
          SolveReport rep = run_solver(sv, inst, cfg);
          if (!brute_value) {
            verdict = rep.status == SolveStatus::Infeasible ? "" : "expected infeasible";
          } else if (rep.status != SolveStatus::Optimal) {
            verdict = "did not close within budget";
          } else if (std::abs(rep.lower - *brute_value) > 1e-6) {
            verdict = "objective " + std::to_string(rep.lower) + " vs exhaustive " +
                      std::to_string(*brute_value);
          } else if (rep.incumbent &&
                     brute_force_max_uplift(inst, *rep.incumbent).uplift != rep.incumbent_r) {
            verdict = "reported uplift disagrees with exhaustive check";
          }
        } catch (const std::exception& e) {
          verdict = e.what();
        }
        if (verdict.empty()) {
          std::cout << "[PASS] " << stem_of(f) << " alpha=" << alpha << " " << sv << "\n";
        } else {
          std::cout << "[FAIL] " << stem_of(f) << " alpha=" << alpha << " " << sv << ": "
                    << verdict << "\n";
          ++fails;
        }
      }
    }
  }
  std::cout << (fails == 0 ? "all checks passed\n" : "failures: " + std::to_string(fails) + "\n");
  return std::min(fails, 255);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"team formation experiment harness"};
  app.require_subcommand(1);

  std::string out;
  std::string config_path;
  std::vector<std::string> files;
  std::string solver = "bcp";
  std::string alpha = "0,0.01,0.5,0.99,1";
  double budget_secs = 1800.0;
  std::uint64_t seed = 0;
  bool have_seed = false;

  CLI::App* gen = app.add_subcommand("gen", "generate an instance campaign from a config file");
  gen->add_option("config", config_path, "campaign config JSON")->required();
  gen->add_option("--out", out, "output directory (overrides config)");
  gen->add_option("--seed", seed, "base seed (overrides config)")->each([&](const std::string&) {
    have_seed = true;
  });

  CLI::App* solve = app.add_subcommand("solve", "run solvers over instance files");
  solve->add_option("files", files, "instance JSON files")->required()->expected(-1);
  solve->add_option("--solver", solver, "comma list of exp,bc,bcp,brute,draft,opop");
  solve->add_option("--alpha", alpha, "comma list of alpha values in [0,1]");
  solve->add_option("--budget-secs", budget_secs, "per-run time budget");
  solve->add_option("--seed", seed, "solver seed (column sampling, heuristic orderings)");
  solve->add_option("--out", out, "output prefix for .csv and .jsonl");

  CLI::App* report = app.add_subcommand("report", "aggregate results files into tables");
  report->add_option("files", files, "results .jsonl files")->required()->expected(-1);
  report->add_option("--out", out, "output prefix for summary and profile CSVs");

  CLI::App* verify = app.add_subcommand("verify", "check exact solvers against exhaustive search");
  verify->add_option("files", files, "instance JSON files")->required()->expected(-1);
  verify->add_option("--solver", solver, "comma list of exact solvers")->default_str("exp,bc,bcp");
  verify->add_option("--alpha", alpha, "comma list of alpha values");
  verify->add_option("--budget-secs", budget_secs, "per-run time budget");

  try {
    app.parse(argc, argv);
    if (gen->parsed())
      return cmd_gen(config_path, out,
                     have_seed ? std::optional<std::uint64_t>(seed) : std::nullopt);
    if (solve->parsed())
      return cmd_solve(files, solver, alpha, budget_secs, seed,
                       out.empty() ? "results" : out);
    if (report->parsed()) return cmd_report(files, out.empty() ? "report" : out);
    if (verify->parsed()) {
      const std::string chosen =
          verify->get_option("--solver")->count() ? solver : "exp,bc,bcp";
      return cmd_verify(files, chosen, alpha, budget_secs);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
