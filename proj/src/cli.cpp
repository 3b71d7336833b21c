#include "codethresh/cli.hpp"

#include "codethresh/errors.hpp"
#include "codethresh/level_sets.hpp"
#include "codethresh/rlc_list_of_two.hpp"
#include "codethresh/simulator.hpp"
#include "codethresh/threshold_solver.hpp"
#include "codethresh/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace codethresh::cli {

using nlohmann::json;

double round_significant(double value) {
  if (!std::isfinite(value)) {
    return value;
  }
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.12g", value);
  return std::strtod(buffer, nullptr);
}

namespace {

json number(double value) {
  if (!std::isfinite(value)) {
    return nullptr;
  }
  return round_significant(value);
}

json optional_number(const std::optional<double>& value) {
  return value ? number(*value) : json(nullptr);
}

/// Tabular payload shared by the JSON and CSV writers.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

struct Output {
  json parameters = json::object();
  Table table;
  json extras = json::object(); // JSON-only fields merged into results
  json results_override;        // replaces the row listing when set
};

std::string csv_field(const json& value) {
  if (value.is_null()) {
    return "";
  }
  if (value.is_string()) {
    const auto s = value.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) {
      return s;
    }
    std::string quoted = "\"";
    for (char c : s) {
      quoted += c;
      if (c == '"') {
        quoted += '"';
      }
    }
    return quoted + "\"";
  }
  if (value.is_number_float()) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.12g", value.get<double>());
    return buffer;
  }
  return value.dump();
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << csv_field(row[c]);
    }
    out << '\n';
  }
}

json rows_as_json(const Table& table) {
  json rows = json::array();
  for (const auto& row : table.rows) {
    json object = json::object();
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      object[table.columns[c]] = row[c];
    }
    rows.push_back(std::move(object));
  }
  return rows;
}

void write_json(std::ostream& out, const std::string& command, const Output& output,
                long long elapsed_ms) {
  json results;
  if (!output.results_override.is_null()) {
    results = output.results_override;
  } else {
    results = json::object();
    results["rows"] = rows_as_json(output.table);
  }
  for (auto it = output.extras.begin(); it != output.extras.end(); ++it) {
    results[it.key()] = it.value();
  }
  json envelope = {{"command", command},
                   {"parameters", output.parameters},
                   {"results", results},
                   {"version", kVersion},
                   {"elapsed_ms", elapsed_ms}};
  out << envelope.dump(2) << '\n';
}

std::vector<double> grid(double lo, double hi, double step) {
  if (!(step > 0.0)) {
    throw ValidationError("grid step must be > 0");
  }
  if (!(hi >= lo)) {
    throw ValidationError("grid maximum must be >= minimum");
  }
  std::vector<double> values;
  for (long k = 0;; ++k) {
    const double v = lo + static_cast<double>(k) * step;
    if (v > hi + 1e-9 * step) {
      break;
    }
    values.push_back(round_significant(v));
    if (values.size() > 1'000'000) {
      throw BudgetError("grid has more than 1e6 points");
    }
  }
  return values;
}

Output threshold_command(const ThresholdQuery& query) {
  Output o;
  o.parameters = {{"p", query.p}, {"ell", query.ell}, {"L", query.L}, {"q", query.q},
                  {"eps", query.epsilon}};
  query.validate();
  const LevelProfile profile = level_profile(query.level_params());
  const ThresholdResult result = threshold_rate(query, profile);
  const KlEstimate kl = kl_estimate(query);
  const auto closed = closed_form_threshold(query);
  o.table.columns = {"p",      "ell",         "L",      "q",           "r_star",
                     "beta",   "alpha_star",  "method", "error_bound", "t_star",
                     "kl_estimate", "kl_band", "closed_form", "closed_form_r_star"};
  o.table.rows.push_back({number(query.p), query.ell, query.L, query.q, number(result.r_star),
                          number(result.beta), optional_number(result.alpha_star),
                          std::string(to_string(result.method)), number(result.error_bound),
                          number(profile.t_star), number(kl.estimate), number(kl.band),
                          closed ? json(std::string(to_string(closed->method))) : json(nullptr),
                          closed ? number(closed->r_star) : json(nullptr)});
  return o;
}

Output sweep_command(int ell, int L, int q, double p_min, double p_max, double p_step,
                     double eps) {
  Output o;
  o.parameters = {{"ell", ell},       {"L", L},          {"q", q},    {"p_min", p_min},
                  {"p_max", p_max}, {"p_step", p_step}, {"eps", eps}};
  ThresholdQuery base{0.0, ell, L, q, eps};
  base.validate();
  const LevelProfile profile = level_profile(base.level_params());
  o.table.columns = {"p", "r_star", "beta", "method", "kl_estimate", "kl_band"};
  for (double p : grid(p_min, p_max, p_step)) {
    ThresholdQuery query = base;
    query.p = p;
    const ThresholdResult result = threshold_rate(query, profile);
    const KlEstimate kl = kl_estimate(query);
    o.table.rows.push_back({number(p), number(result.r_star), number(result.beta),
                            std::string(to_string(result.method)), number(kl.estimate),
                            number(kl.band)});
  }
  o.extras["t_star"] = number(profile.t_star);
  return o;
}

Output levelsets_command(const LevelSetParams& params) {
  Output o;
  o.parameters = {{"ell", params.ell}, {"L", params.L}, {"q", params.q}};
  const LevelProfile profile = level_profile(params);
  json counts = json::array();
  json log_counts = json::array();
  o.table.columns = {"d", "count", "log_q_count", "t_star"};
  for (int d = 0; d <= params.L; ++d) {
    json count = profile.approximate ? json(nullptr)
                                     : json(profile.counts[static_cast<std::size_t>(d)].str());
    counts.push_back(count);
    log_counts.push_back(number(profile.log_q_count(d)));
    o.table.rows.push_back({d, count, number(profile.log_q_count(d)), number(profile.t_star)});
  }
  o.results_override = {{"q", params.q},          {"ell", params.ell},
                        {"L", params.L},          {"counts", counts},
                        {"log_q_counts", log_counts}, {"t_star", number(profile.t_star)},
                        {"approximate", profile.approximate}};
  return o;
}

Output simulate_command(const sim::SweepConfig& config) {
  Output o;
  o.parameters = {{"p", config.p},         {"ell", config.ell},       {"L", config.L},
                  {"q", config.q},         {"n", config.n_list},      {"rates", config.rate_grid},
                  {"trials", config.trials}, {"seed", config.base_seed}};
  const sim::SweepReport report = sim::empirical_threshold_sweep(config);
  o.table.columns = {"n", "rate", "trials", "satisfied", "fraction"};
  json seeds = json::array();
  for (const auto& row : report.rows) {
    o.table.rows.push_back(
        {row.n, number(row.rate), row.trials, row.satisfied, number(row.fraction)});
    seeds.push_back({{"n", row.n}, {"rate", number(row.rate)}, {"trial0_seed", row.seed}});
  }
  json crossings = json::array();
  for (const auto& [n, rate] : report.crossings) {
    crossings.push_back({{"n", n}, {"crossing_rate", optional_number(rate)}});
  }
  o.extras["base_seed"] = report.base_seed;
  o.extras["seeds"] = seeds;
  o.extras["crossings"] = crossings;
  try {
    const ThresholdQuery query{config.p, config.ell, std::max(config.L, 2), config.q, 1e-9};
    if (config.L >= 2 && config.p < 1.0) {
      o.extras["r_star_limit"] = number(threshold_rate(query).r_star);
    }
  } catch (const BudgetError&) {
    o.extras["r_star_limit"] = nullptr;
  }
  return o;
}

Output rlc_command(double p_min, double p_max, double p_step) {
  Output o;
  o.parameters = {{"p_min", p_min}, {"p_max", p_max}, {"p_step", p_step}};
  o.table.columns = {"p", "label", "entropy", "dim", "ratio"};
  json thresholds = json::array();
  for (double p : grid(p_min, p_max, p_step)) {
    const auto scan = rlc::implied_type_scan(p);
    for (const auto& entry : scan.entries) {
      o.table.rows.push_back(
          {number(p), entry.map_label, number(entry.entropy), entry.dimension, number(entry.ratio)});
    }
    thresholds.push_back({{"p", number(p)},
                          {"rc", number(list_of_two_rc_threshold(p))},
                          {"rlc", number(rlc::rlc_list_of_two_threshold(p))},
                          {"rlc_from_scan", number(1.0 - scan.min_ratio)},
                          {"min_label", scan.entries[scan.argmin].map_label}});
  }
  o.extras["thresholds"] = thresholds;
  return o;
}

Output toy_command(double p_min, double p_max, double p_step) {
  Output o;
  o.parameters = {{"p_min", p_min}, {"p_max", p_max}, {"p_step", p_step}};
  o.table.columns = {"p", "r_theorem", "r_dagger"};
  for (double p : grid(p_min, p_max, p_step)) {
    const ToyRates rates = toy_property_rates(p);
    o.table.rows.push_back({number(p), number(rates.r_theorem), number(rates.r_dagger)});
  }
  return o;
}

Output verify_command(bool& all_passed) {
  Output o;
  o.table.columns = {"check", "passed", "cases", "max_error", "tolerance"};
  all_passed = true;
  for (const CheckResult& check : run_verification_suite()) {
    all_passed = all_passed && check.passed;
    o.table.rows.push_back(
        {check.name, check.passed, check.cases, number(check.max_error), number(check.tolerance)});
  }
  return o;
}

void print_verify_table(std::ostream& err, const Table& table) {
  for (const auto& row : table.rows) {
    err << (row[1].get<bool>() ? "PASS " : "FAIL ") << row[0].get<std::string>() << '\n';
  }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  CLI::App app{"Threshold rates for list-recovery of random codes"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);
  std::string format = "json";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  ThresholdQuery query;
  auto* threshold = app.add_subcommand("threshold", "Threshold rate R* for one (p, ell, L, q)");
  threshold->add_option("--p", query.p)->required();
  threshold->add_option("--ell", query.ell)->required();
  threshold->add_option("--L", query.L)->required();
  threshold->add_option("--q", query.q)->required();
  threshold->add_option("--eps", query.epsilon)->capture_default_str();

  int ell = 1;
  int L = 3;
  int q = 2;
  double p_min = 0.0;
  double p_max = 0.0;
  double p_step = 0.01;
  double eps = 1e-6;
  auto* sweep = app.add_subcommand("sweep", "Exact R* against the KL estimate over a p grid");
  sweep->add_option("--ell", ell)->required();
  sweep->add_option("--L", L)->required();
  sweep->add_option("--q", q)->required();
  sweep->add_option("--p-min", p_min)->required();
  sweep->add_option("--p-max", p_max)->required();
  sweep->add_option("--p-step", p_step)->required();
  sweep->add_option("--eps", eps)->capture_default_str();

  auto* levelsets = app.add_subcommand("levelsets", "Level-set sizes |D_d| and t*");
  levelsets->add_option("--ell", ell)->required();
  levelsets->add_option("--L", L)->required();
  levelsets->add_option("--q", q)->required();

  sim::SweepConfig sim_config;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo threshold sweep");
  simulate->add_option("--p", sim_config.p)->required();
  simulate->add_option("--ell", sim_config.ell)->required();
  simulate->add_option("--L", sim_config.L)->required();
  simulate->add_option("--q", sim_config.q)->required();
  simulate->add_option("--n", sim_config.n_list)->required()->delimiter(',');
  simulate->add_option("--rates", sim_config.rate_grid)->required()->delimiter(',');
  simulate->add_option("--trials", sim_config.trials)->required();
  simulate->add_option("--seed", sim_config.base_seed)->required();

  auto* rlc = app.add_subcommand("rlc", "Implied-type ratios and list-of-two thresholds");
  rlc->add_option("--p-min", p_min)->required();
  rlc->add_option("--p-max", p_max)->required();
  rlc->add_option("--p-step", p_step)->required();

  auto* toy = app.add_subcommand("toy", "Rates for the non-symmetric toy property");
  toy->add_option("--p-min", p_min)->required();
  toy->add_option("--p-max", p_max)->required();
  toy->add_option("--p-step", p_step)->required();

  auto* verify = app.add_subcommand("verify", "Run the oracle-equivalence checks");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    std::string message = e.what();
    std::replace(message.begin(), message.end(), '\n', ' ');
    err << "error: " << message << '\n';
    return 2;
  }

  try {
    Output output;
    std::string command;
    int code = 0;
    if (threshold->parsed()) {
      command = "threshold";
      output = threshold_command(query);
    } else if (sweep->parsed()) {
      command = "sweep";
      output = sweep_command(ell, L, q, p_min, p_max, p_step, eps);
    } else if (levelsets->parsed()) {
      command = "levelsets";
      output = levelsets_command({q, ell, L});
    } else if (simulate->parsed()) {
      command = "simulate";
      output = simulate_command(sim_config);
    } else if (rlc->parsed()) {
      command = "rlc";
      output = rlc_command(p_min, p_max, p_step);
    } else if (toy->parsed()) {
      command = "toy";
      output = toy_command(p_min, p_max, p_step);
    } else if (verify->parsed()) {
      command = "verify";
      bool all_passed = true;
      output = verify_command(all_passed);
      print_verify_table(err, output.table);
      code = all_passed ? 0 : 1;
    }
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    if (format == "csv") {
      write_csv(out, output.table);
    } else {
      write_json(out, command, output, elapsed);
    }
    return code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const BudgetError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

} // namespace codethresh::cli
