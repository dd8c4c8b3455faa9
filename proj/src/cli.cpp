#include "subheat/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "subheat/asymptotics.hpp"
#include "subheat/errors.hpp"
#include "subheat/estimators.hpp"
#include "subheat/parallel.hpp"
#include "subheat/suites.hpp"

namespace subheat::cli {
namespace {

using json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_time(std::string_view text) {
  const std::string s(trim(text));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::logic_error&) {
    throw ConfigError("not a time: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not a time: '" + s + "'");
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("times must be positive and finite: '" + s + "'");
  return v;
}

std::uint64_t env_seed() {
  const char* env = std::getenv("SUBHEAT_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used);
    if (used != std::string_view(env).size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(std::string("SUBHEAT_SEED is not an unsigned integer: '") + env + "'");
  }
}

TimeChangeSpec make_spec(const RunConfig& c) {
  TimeChangeSpec spec{parse_exponent(c.exponent), c.time_change};
  spec.grid_step = c.grid_step;
  spec.max_grid_steps = c.max_grid_steps;
  spec.validate();
  return spec;
}

std::vector<std::string> quantities(const RunConfig& c, const Domain& dom) {
  switch (c.quantity) {
    case Quantity::Spectral: return {"spectral"};
    case Quantity::Regular: return {"regular"};
    case Quantity::Both: return {"spectral", "regular"};
    case Quantity::Auto: break;
  }
  if (dom.is_interval()) return {"spectral", "regular"};
  return {"spectral"};
}

void write_output(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + c.out_path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing '" + c.out_path + "'");
}

/// Check names are prose and may hold commas.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::string render_suites(const std::vector<SuiteResult>& results, const SuiteOptions& opts, OutputFormat format) {
  bool all_pass = true;
  for (const auto& r : results) all_pass = all_pass && r.pass;
  if (format == OutputFormat::Csv) {
    std::string s = "suite,check,target,achieved,stderr,tolerance,pass\n";
    for (const auto& r : results) {
      for (const auto& c : r.checks) {
        s += r.suite + "," + csv_field(c.name) + "," + format_number(c.target) + "," + format_number(c.achieved) + "," +
             format_number(c.std_error) + "," + format_number(c.tolerance) + "," + (c.pass ? "true" : "false") + "\n";
      }
    }
    return s;
  }
  json j;
  j["seed"] = opts.seed;
  j["quick"] = opts.quick;
  j["pass"] = all_pass;
  j["suites"] = json::array();
  for (const auto& r : results) {
    json checks = json::array();
    for (const auto& c : r.checks) {
      checks.push_back({{"check", c.name},
                        {"target", c.target},
                        {"achieved", c.achieved},
                        {"stderr", c.std_error},
                        {"tolerance", c.tolerance},
                        {"pass", c.pass}});
    }
    j["suites"].push_back({{"suite", r.suite}, {"pass", r.pass}, {"wall_time", r.wall_time}, {"checks", checks}});
  }
  return j.dump(2) + "\n";
}

/// Splices `--key=value` tokens from a config file in front of the
/// subcommand's own flags, so explicit flags (parsed later, last one wins)
/// take precedence over the file.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  std::vector<std::string> tokens;
  for (const auto& [key, value] : parse_config_text(buf.str())) {
    if (key == "config") throw ConfigError("config files cannot include other config files");
    tokens.push_back("--" + key + "=" + value);
  }
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < args.size() && !args[i].empty() && args[i][0] == '-') out.push_back(args[i++]);
  if (i < args.size()) out.push_back(args[i++]);  // subcommand
  out.insert(out.end(), tokens.begin(), tokens.end());
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(i), args.end());
  return out;
}

}  // namespace

std::vector<double> parse_ladder(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_time(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (!(out[i] < out[i - 1])) throw ConfigError("t ladder must be strictly decreasing");
  }
  return out;
}

std::map<std::string, std::string> parse_config_text(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + " is not key=value");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + " has an empty key");
    out[key] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<EstimateRow> run_estimate(const RunConfig& c) {
  if (c.t_ladder.empty()) throw ConfigError("estimate needs --t or --t-ladder");
  if (c.n_paths < 2) throw ConfigError("--paths must be at least 2");
  const auto spec = make_spec(c);
  const Domain dom = parse_domain(c.domain);
  RunOptions run;
  run.n_paths = c.n_paths;
  run.seed = c.seed;
  run.workers = c.workers;

  std::vector<EstimateRow> rows;
  for (const auto& q : quantities(c, dom)) {
    const bool spectral = q == "spectral";
    if (!spectral && !dom.is_interval()) {
      throw UnsupportedConfiguration("regular content is only estimated on intervals");
    }
    const auto prediction = spectral ? predict_spectral(spec.exponent, dom, spec.kind)
                                     : predict_regular(spec.exponent, dom, spec.kind);
    const double volume = dom.volume();
    const auto deficit_of = [&](const Estimate& e) { return spectral ? volume - e.value : e.value; };
    for (double t : c.t_ladder) {
      const auto once = [&](const RunOptions& r) {
        if (!spectral) return estimate_regular(spec, dom, t, r);
        if (dom.is_interval()) return estimate_spectral(spec, dom, t, r);
        return estimate_spectral_disk(spec, dom, t, r);
      };
      const Estimate est = c.target_rel_stderr > 0.0
                               ? estimate_adaptive(once, deficit_of, run, c.target_rel_stderr, c.max_paths)
                               : once(run);
      const double rate = prediction.rate(t);
      rows.push_back({t, q, est.value, est.std_error, rate, deficit_of(est) / rate, est.n_paths, est.seed});
    }
  }
  return rows;
}

std::string render_estimate(const std::vector<EstimateRow>& rows, OutputFormat format) {
  if (format == OutputFormat::Csv) {
    std::string s = "t,quantity,value,stderr,rate_value,ratio,n_paths,seed\n";
    for (const auto& r : rows) {
      s += format_number(r.t) + "," + r.quantity + "," + format_number(r.value) + "," + format_number(r.std_error) +
           "," + format_number(r.rate_value) + "," + format_number(r.ratio) + "," + std::to_string(r.n_paths) + "," +
           std::to_string(r.seed) + "\n";
    }
    return s;
  }
  json j = json::array();
  for (const auto& r : rows) {
    j.push_back({{"t", r.t},
                 {"quantity", r.quantity},
                 {"value", r.value},
                 {"stderr", r.std_error},
                 {"rate_value", r.rate_value},
                 {"ratio", r.ratio},
                 {"n_paths", r.n_paths},
                 {"seed", r.seed}});
  }
  return j.dump(2) + "\n";
}

std::string render_predict(const RunConfig& c) {
  const auto spec = make_spec(c);
  const Domain dom = parse_domain(c.domain);
  struct Row {
    std::string quantity;
    AsymptoticPrediction p;
  };
  std::vector<Row> rows;
  for (const auto& q : quantities(c, dom)) {
    rows.push_back({q, q == "spectral" ? predict_spectral(spec.exponent, dom, spec.kind)
                                       : predict_regular(spec.exponent, dom, spec.kind)});
  }
  if (c.format == OutputFormat::Csv) {
    std::string s = "quantity,theorem_tag,rate,constant\n";
    for (const auto& r : rows) {
      s += r.quantity + "," + r.p.theorem_tag + "," + r.p.rate.name() + "," + format_number(r.p.constant) + "\n";
    }
    return s;
  }
  json j = json::array();
  for (const auto& r : rows) {
    j.push_back({{"quantity", r.quantity},
                 {"theorem_tag", r.p.theorem_tag},
                 {"rate", r.p.rate.name()},
                 {"constant", r.p.constant}});
  }
  return j.dump(2) + "\n";
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string ladder_text, t_text, config_path;
  std::string suite_text = "all";

  CLI::App app{"Small-time heat content of time-changed Brownian motion"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  const std::map<std::string, TimeChangeKind> kinds{{"sub", TimeChangeKind::Subordinator},
                                                    {"inv", TimeChangeKind::InverseSubordinator}};
  const std::map<std::string, OutputFormat> formats{{"csv", OutputFormat::Csv}, {"json", OutputFormat::Json}};
  const std::map<std::string, Quantity> quantity_names{
      {"auto", Quantity::Auto}, {"spectral", Quantity::Spectral}, {"regular", Quantity::Regular}, {"both", Quantity::Both}};

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "Random seed (default: $SUBHEAT_SEED or 0)");
    sub->add_option("--workers", c.workers, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--format", c.format, "csv or json")->transform(CLI::CheckedTransformer(formats));
    sub->add_option("--out", c.out_path, "Write output to this file instead of stdout");
    sub->add_option("--config", config_path, "key=value file; explicit flags take precedence");
  };
  auto model = [&](CLI::App* sub) {
    sub->add_option("--exponent", c.exponent, "stable:<b> | tempered:<b>,<theta> | mixed:<b>*<w>+...")->required();
    sub->add_option("--domain", c.domain, "interval:<a>,<b> | disk:<R>");
    sub->add_option("--time-change", c.time_change, "sub or inv")->transform(CLI::CheckedTransformer(kinds));
    sub->add_option("--quantity", c.quantity, "auto, spectral, regular or both")
        ->transform(CLI::CheckedTransformer(quantity_names));
    sub->add_option("--grid-step", c.grid_step, "Relative grid step for non-stable inverse clocks");
    sub->add_option("--max-grid-steps", c.max_grid_steps, "Abort a first-passage walk after this many steps");
  };

  auto* predict = app.add_subcommand("predict", "Print the small-time prediction");
  model(predict);
  common(predict);

  auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimates along a t ladder");
  model(estimate);
  common(estimate);
  auto* t_opt = estimate->add_option("--t", t_text, "Single time");
  auto* ladder_opt = estimate->add_option("--t-ladder", ladder_text, "Comma-separated decreasing times");
  t_opt->excludes(ladder_opt);
  estimate->add_option("--paths", c.n_paths, "Paths per estimate");
  estimate->add_option("--target-rel-stderr", c.target_rel_stderr,
                       "Double the path count until stderr is this fraction of the estimate");
  estimate->add_option("--max-paths", c.max_paths, "Cap for --target-rel-stderr");

  auto* verify = app.add_subcommand("verify", "Run convergence and identity suites");
  common(verify);
  verify->add_option("--suite", suite_text, "Comma-separated suite names or 'all'");
  verify->add_flag("--quick", c.quick, "Reduced path counts");

  try {
    c.seed = env_seed();
    c.workers = default_workers();
    const auto args = expand_config(raw_args);
    std::vector<const char*> argv{"subheat"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kConfigError;
    }
    if (predict->parsed()) {
      write_output(c, render_predict(c), out);
      return kOk;
    }
    if (estimate->parsed()) {
      if (!t_text.empty()) c.t_ladder = {parse_time(t_text)};
      if (!ladder_text.empty()) c.t_ladder = parse_ladder(ladder_text);
      write_output(c, render_estimate(run_estimate(c), c.format), out);
      return kOk;
    }

    std::vector<std::string> names;
    std::size_t start = 0;
    while (start <= suite_text.size()) {
      const auto comma = suite_text.find(',', start);
      const auto piece = std::string(trim(std::string_view(suite_text).substr(start, comma - start)));
      if (piece == "all") {
        names.insert(names.end(), suite_names().begin(), suite_names().end());
      } else {
        if (std::find(suite_names().begin(), suite_names().end(), piece) == suite_names().end()) {
          throw ConfigError("unknown suite '" + piece + "'");
        }
        names.push_back(piece);
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    SuiteOptions opts{c.seed, c.workers, c.quick};
    std::vector<SuiteResult> results;
    bool all_pass = true;
    for (const auto& n : names) {
      results.push_back(run_suite(n, opts));
      all_pass = all_pass && results.back().pass;
      err << results.back().suite << ": " << (results.back().pass ? "pass" : "FAIL") << " ("
          << results.back().wall_time << " s)\n";
    }
    if (verify->get_option("--format")->count() == 0) c.format = OutputFormat::Json;
    write_output(c, render_suites(results, opts, c.format), out);
    return all_pass ? kOk : kSuiteFailed;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    err << "invalid value: " << e.what() << "\n";
    return kConfigError;
  } catch (const UnsupportedConfiguration& e) {
    err << "unsupported: " << e.what() << "\n";
    return kUnsupported;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace subheat::cli
