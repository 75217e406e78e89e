#include "posthoc/app/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <memory>
#include <thread>

#include "posthoc/app/inputs.hpp"
#include "posthoc/app/report.hpp"
#include "posthoc/app/selection.hpp"
#include "posthoc/app/server.hpp"
#include "posthoc/app/session.hpp"
#include "posthoc/sim.hpp"

namespace posthoc::app {
namespace {

struct Options {
  InputFiles files;
  std::string stat = "known-variance";
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::string out = "-";

  std::string method = "simes";
  std::size_t k0 = 1;
  std::vector<std::string> templates;
  std::size_t K = 0;
  std::size_t B = 1000;
  bool B_set = false;

  std::size_t segment_size = 0;
  std::string budget = "dkw";
  bool tree = false;

  std::vector<std::string> selects;
  std::optional<std::size_t> select_top;
  std::optional<double> fc_above;
  std::optional<double> fc_below;
  std::optional<double> bh_level;
  std::vector<std::string> ids;
  std::vector<std::size_t> indices;

  std::string csv;

  std::string scenario = "full_null_iid";
  std::size_t m = 100;
  std::size_t n1 = 50;
  std::size_t n2 = 50;
  std::size_t reps = 1000;
  double rho = 0.0;
  double delta = 0.0;
  double alt_fraction = 0.5;
  double lambda = 0.05;
  std::size_t s0 = 10;

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
};

void add_input_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--pvalues", o.files.pvalues, "CSV with columns id,p");
  cmd->add_option("--data", o.files.data, "CSV matrix: header of sample ids, first column row id");
  cmd->add_option("--labels", o.files.labels, "CSV with columns sample_id,group");
  cmd->add_option("--annotations", o.files.annotations, "CSV with an id column and annotations");
  cmd->add_option("--chrom-col", o.files.chrom_col, "chromosome column for spatial analyses");
  cmd->add_option("--stat", o.stat, "two-sample statistic")
      ->check(CLI::IsMember({"known-variance", "welch"}));
}

void add_common_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--alpha", o.alpha, "confidence level is 1 - alpha")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", o.seed, "seed for every random draw");
  cmd->add_option("--out", o.out, "report path, - for standard output");
}

void add_calibration_options(CLI::App* cmd, Options& o, bool many_templates) {
  if (many_templates) {
    cmd->add_option("--template", o.templates, "templates to calibrate (repeatable)")
        ->check(CLI::IsMember({"linear", "beta"}));
  } else {
    cmd->add_option("--template", o.templates, "template: linear or beta")
        ->check(CLI::IsMember({"linear", "beta"}))
        ->expected(1);
  }
  cmd->add_option("--K", o.K, "number of template curves (0 means m)");
  cmd->add_option_function<std::size_t>(
      "--B",
      [&o](const std::size_t& b) {
        o.B = b;
        o.B_set = true;
      },
      "number of permutations (default 1000)");
}

void add_spatial_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--segment-size", o.segment_size, "hypotheses per segment");
  cmd->add_option("--budget", o.budget, "markov:<t>, markov:sq, dkw, dkw:floor-square or perm-beta");
  cmd->add_flag("--tree", o.tree, "use the multi-scale aggregation tree");
}

void add_selection_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--select", o.selects, "name:spec selection (repeatable)");
  cmd->add_option("--select-top", o.select_top, "the k smallest p-values");
  cmd->add_option("--fc-above", o.fc_above, "log fold change above x");
  cmd->add_option("--fc-below", o.fc_below, "log fold change below x");
  cmd->add_option("--bh-level", o.bh_level, "BH step-up rejections at level q");
  cmd->add_option("--ids", o.ids, "explicit ids")->delimiter(',');
  cmd->add_option("--indices", o.indices, "explicit 1-based rows")->delimiter(',');
}

void add_method_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--method", o.method,
                  "simes, bonf, calibrated, calibrated-linear, calibrated-beta or spatial");
  cmd->add_option("--k0", o.k0, "k0 for the k0-Bonferroni bound");
}

std::string number_text(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<NamedSelection> selections(const Options& o) {
  std::vector<NamedSelection> out;
  for (const auto& s : o.selects) out.push_back(parse_named_selection(s));
  std::vector<std::string> terms;
  if (o.select_top) terms.push_back("top=" + std::to_string(*o.select_top));
  if (o.bh_level) terms.push_back("bh=" + number_text(*o.bh_level));
  if (o.fc_above) terms.push_back("fc>" + number_text(*o.fc_above));
  if (o.fc_below) terms.push_back("fc<" + number_text(*o.fc_below));
  if (!o.ids.empty()) {
    std::string t = "ids=";
    for (std::size_t i = 0; i < o.ids.size(); ++i) t += (i ? "|" : "") + o.ids[i];
    terms.push_back(t);
  }
  if (!o.indices.empty()) {
    std::string t = "idx=";
    for (std::size_t i = 0; i < o.indices.size(); ++i) {
      t += (i ? "|" : "") + std::to_string(o.indices[i]);
    }
    terms.push_back(t);
  }
  if (!terms.empty()) {
    std::string spec;
    for (std::size_t i = 0; i < terms.size(); ++i) spec += (i ? "," : "") + terms[i];
    out.push_back({"selection", spec});
  }
  if (out.empty()) out.push_back({"all", "all"});
  return out;
}

TwoSampleStatistic statistic(const Options& o) {
  return o.stat == "welch" ? TwoSampleStatistic::Welch : TwoSampleStatistic::KnownVariance;
}

std::string first_template(const Options& o) {
  return o.templates.empty() ? "beta" : o.templates.front();
}

SessionConfig session_config(const Options& o, const MethodSpec* method) {
  SessionConfig cfg;
  cfg.alpha = o.alpha;
  cfg.seed = o.seed;
  cfg.B = o.B;
  cfg.K = o.K;
  cfg.stat = statistic(o);
  if (method != nullptr && method->kind == MethodSpec::Kind::Calibrated) {
    cfg.templates.push_back(method->template_name);
  }
  if (method != nullptr && method->kind == MethodSpec::Kind::Spatial) {
    if (o.segment_size < 1) throw UsageError("the spatial method needs --segment-size");
    cfg.spatial = SpatialConfig{o.segment_size, BudgetSpec::parse(o.budget), o.tree};
  }
  return cfg;
}

bool uses_permutations(const SessionConfig& cfg) {
  return !cfg.templates.empty() ||
         (cfg.spatial && cfg.spatial->budget.kind == BudgetSpec::Kind::PermBeta);
}

Provenance provenance(const Options& o, const Session& s) {
  Provenance p;
  p.seed = o.seed;
  if (uses_permutations(s.config())) p.B = o.B;
  p.input_sha256 = s.inputs().digests;
  return p;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot write '" + path + "'");
  file << text;
  if (!file) throw InputError("failed writing '" + path + "'");
}

std::vector<SelectionResult> evaluate(const Session& s, const Options& o,
                                      const MethodSpec& method) {
  std::vector<SelectionResult> out;
  for (const auto& sel : selections(o)) {
    out.push_back({sel.name, s.bound(resolve_selection(sel.spec, s.inputs()), method)});
  }
  return out;
}

Report base_report(const Session& s, const Options& o, const MethodSpec& method) {
  Report r;
  r.method = s.bound(IndexSet{}, method).method;
  r.alpha = o.alpha;
  if (method.kind == MethodSpec::Kind::Calibrated) {
    r.lambda = s.calibration(method.template_name)->lambda;
    r.calibration = calibration_json(*s.calibration(method.template_name));
  }
  if (method.kind == MethodSpec::Kind::Spatial) r.spatial = spatial_json(*s.spatial(), s.inputs());
  r.provenance = provenance(o, s);
  return r;
}

int cmd_bound(const Options& o, std::ostream& out) {
  const auto method = MethodSpec::parse(o.method, first_template(o), o.k0);
  const Session s(load_inputs(o.files, statistic(o)), session_config(o, &method));
  auto r = base_report(s, o, method);
  r.selections = evaluate(s, o, method);
  write_text(o.out, canonical_dump(report_json(r)), out);
  return 0;
}

int cmd_envelope(const Options& o, std::ostream& out) {
  const auto method = MethodSpec::parse(o.method, first_template(o), o.k0);
  const Session s(load_inputs(o.files, statistic(o)), session_config(o, &method));
  auto r = base_report(s, o, method);
  const auto env = s.envelope(method);
  r.envelope = envelope_json(env, s.inputs());
  if (!o.selects.empty() || o.select_top || o.fc_above || o.fc_below || o.bh_level ||
      !o.ids.empty() || !o.indices.empty()) {
    r.selections = evaluate(s, o, method);
  }
  if (!o.csv.empty()) write_text(o.csv, envelope_csv(env, s.inputs()), out);
  write_text(o.out, canonical_dump(report_json(r)), out);
  return 0;
}

int cmd_calibrate(const Options& o, std::ostream& out) {
  auto method = MethodSpec::parse("calibrated", first_template(o));
  const Session s(load_inputs(o.files, statistic(o)), session_config(o, &method));
  auto r = base_report(s, o, method);
  r.selections = evaluate(s, o, method);
  write_text(o.out, canonical_dump(report_json(r)), out);
  return 0;
}

int cmd_spatial(const Options& o, std::ostream& out) {
  const auto method = MethodSpec::parse("spatial");
  const Session s(load_inputs(o.files, statistic(o)), session_config(o, &method));
  auto r = base_report(s, o, method);
  r.selections = evaluate(s, o, method);
  write_text(o.out, canonical_dump(report_json(r)), out);
  return 0;
}

sim::Method simulation_method(const Options& o) {
  const auto kind = [&o] {
    const auto name = first_template(o);
    return name == "linear" ? Template::Kind::Linear : Template::Kind::Beta;
  }();
  if (o.method == "bonf" || o.method == "k0-bonferroni") return sim::method::KBonferroni{o.k0};
  if (o.method == "simes") return sim::method::Simes{};
  if (o.method == "threshold") return sim::method::FixedThreshold{kind, o.lambda, o.K};
  if (o.method == "calibrated") return sim::method::Calibrated{kind, o.K, o.B};
  if (o.method == "single-set") return sim::method::SingleSet{BudgetSpec::parse(o.budget), o.B};
  if (o.method == "spatial") {
    if (o.segment_size < 1) throw UsageError("the spatial method needs --segment-size");
    return sim::method::SpatialFamily{o.segment_size, BudgetSpec::parse(o.budget), o.tree, o.B};
  }
  if (o.method == "selection-effect") return sim::method::SelectionEffect{o.s0, o.k0};
  throw UsageError("unknown simulation method '" + o.method +
                   "' (expected bonf, simes, threshold, calibrated, single-set, spatial or "
                   "selection-effect)");
}

std::optional<SimulationReference> simulation_reference(const sim::ScenarioConfig& cfg,
                                                        const sim::Method& method) {
  const bool full_null = cfg.kind == sim::ScenarioKind::FullNullIid ||
                         (cfg.kind == sim::ScenarioKind::TwoSampleGaussian && cfg.delta == 0.0);
  if (const auto* b = std::get_if<sim::method::KBonferroni>(&method);
      b && cfg.kind == sim::ScenarioKind::FullNullIid && b->k0 <= cfg.m) {
    return SimulationReference{"coverage",
                               sim::selection_effect_coverage(cfg.m, cfg.m, b->k0, cfg.alpha)};
  }
  if (const auto* e = std::get_if<sim::method::SelectionEffect>(&method);
      e && cfg.kind == sim::ScenarioKind::FullNullIid) {
    return SimulationReference{"coverage",
                               sim::selection_effect_coverage(cfg.m, e->s0, e->k0, cfg.alpha)};
  }
  if (std::holds_alternative<sim::method::Simes>(method)) {
    if (cfg.kind == sim::ScenarioKind::EquicorrelatedPairs && cfg.rho > -1.0 && cfg.rho < 1.0) {
      return SimulationReference{"violation_rate",
                                 sim::simes_violation_probability(cfg.rho, cfg.alpha)};
    }
    if (cfg.kind == sim::ScenarioKind::FullNullIid && full_null) {
      return SimulationReference{"violation_rate", cfg.alpha};
    }
  }
  return std::nullopt;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  sim::ScenarioConfig cfg;
  cfg.kind = sim::parse_scenario(o.scenario);
  cfg.m = o.m;
  cfg.n1 = o.n1;
  cfg.n2 = o.n2;
  cfg.alpha = o.alpha;
  cfg.replications = o.reps;
  cfg.seed = o.seed;
  cfg.delta = o.delta;
  cfg.alt_fraction = o.alt_fraction;
  cfg.rho = o.rho;
  cfg.validate();
  const auto method = simulation_method(o);
  const auto report = sim::coverage_experiment(cfg, method);
  Report r;
  r.method = report.method;
  r.alpha = o.alpha;
  if (const auto* t = std::get_if<sim::method::FixedThreshold>(&method)) r.lambda = t->lambda;
  r.simulation = simulation_json(cfg, report, simulation_reference(cfg, method));
  r.provenance.seed = o.seed;
  const bool permutes =
      std::holds_alternative<sim::method::Calibrated>(method) ||
      ((std::holds_alternative<sim::method::SingleSet>(method) ||
        std::holds_alternative<sim::method::SpatialFamily>(method)) &&
       BudgetSpec::parse(o.budget).kind == BudgetSpec::Kind::PermBeta);
  if (permutes) r.provenance.B = o.B;
  write_text(o.out, canonical_dump(report_json(r)), out);
  return 0;
}

int cmd_serve(const Options& o, std::ostream& err) {
  auto files = o.files;
  Api api;
  HttpServer server(api, {o.host, o.port, o.static_dir});
  const int port = server.bind();
  if (port < 0) throw InputError("cannot bind " + o.host + ":" + std::to_string(o.port));
  err << "listening on http://" << o.host << ":" << port << std::endl;
  std::thread listener([&server] { server.listen(); });
  try {
    auto inputs = load_inputs(files, statistic(o));
    SessionConfig cfg;
    cfg.alpha = o.alpha;
    cfg.seed = o.seed;
    cfg.B = o.B;
    cfg.K = o.K;
    cfg.stat = statistic(o);
    if (inputs.two_sample()) {
      cfg.templates = o.templates.empty() ? std::vector<std::string>{"linear", "beta"} : o.templates;
    } else if (!o.templates.empty()) {
      throw UsageError("calibrated templates need two-sample inputs (--data and --labels)");
    }
    if (o.segment_size > 0) {
      cfg.spatial = SpatialConfig{o.segment_size, BudgetSpec::parse(o.budget), o.tree};
    }
    const std::size_t m = inputs.m();
    api.publish(std::make_shared<const Session>(std::move(inputs), std::move(cfg)));
    err << "session ready (m=" << m << ")" << std::endl;
  } catch (...) {
    server.stop();
    listener.join();
    throw;
  }
  listener.join();
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Post hoc bounds on the number of false positives in selected sets"};
  app.require_subcommand(1);

  auto* bound = app.add_subcommand("bound", "bounds for one or more selections");
  add_input_options(bound, o);
  add_common_options(bound, o);
  add_method_options(bound, o);
  add_calibration_options(bound, o, false);
  add_spatial_options(bound, o);
  add_selection_options(bound, o);

  auto* envelope = app.add_subcommand("envelope", "bounds along the p-value level sets");
  add_input_options(envelope, o);
  add_common_options(envelope, o);
  add_method_options(envelope, o);
  add_calibration_options(envelope, o, false);
  add_spatial_options(envelope, o);
  add_selection_options(envelope, o);
  envelope->add_option("--csv", o.csv, "also write the envelope as CSV");

  auto* calibrate = app.add_subcommand("calibrate", "permutation calibration of a template");
  add_input_options(calibrate, o);
  add_common_options(calibrate, o);
  add_calibration_options(calibrate, o, false);
  add_selection_options(calibrate, o);

  auto* spatial = app.add_subcommand("spatial", "segment and tree reference families");
  add_input_options(spatial, o);
  add_common_options(spatial, o);
  add_spatial_options(spatial, o);
  spatial->get_option("--segment-size")->required();
  spatial->add_option_function<std::size_t>(
      "--B",
      [&o](const std::size_t& b) {
        o.B = b;
        o.B_set = true;
      },
      "permutations for the perm-beta budget");
  add_selection_options(spatial, o);

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage experiment");
  add_common_options(simulate, o);
  simulate->add_option("--scenario", o.scenario,
                       "full_null_iid, two_sample_gaussian or equicorrelated_pairs");
  simulate->add_option("--m", o.m, "number of hypotheses");
  simulate->add_option("--n1", o.n1, "group 1 size");
  simulate->add_option("--n2", o.n2, "group 2 size");
  simulate->add_option("--reps", o.reps, "replications");
  simulate->add_option("--rho", o.rho, "block correlation");
  simulate->add_option("--delta", o.delta, "signal strength");
  simulate->add_option("--alt-fraction", o.alt_fraction, "fraction of shifted rows");
  simulate->add_option("--method", o.method,
                       "bonf, simes, threshold, calibrated, single-set, spatial or "
                       "selection-effect");
  simulate->add_option("--k0", o.k0, "k0 for bonf and selection-effect");
  simulate->add_option("--s0", o.s0, "selected set size for selection-effect");
  simulate->add_option("--lambda", o.lambda, "lambda for the fixed threshold method");
  add_calibration_options(simulate, o, false);
  add_spatial_options(simulate, o);

  auto* serve = app.add_subcommand("serve", "HTTP API over a calibrated session");
  add_input_options(serve, o);
  add_common_options(serve, o);
  add_calibration_options(serve, o, true);
  add_spatial_options(serve, o);
  serve->add_option("--host", o.host, "interface to bind");
  serve->add_option("--port", o.port, "port (0 picks a free one)");
  serve->add_option("--static-dir", o.static_dir, "directory of UI assets served at /");

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.push_back("posthoc");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  if (simulate->parsed() && !o.B_set) o.B = 100;

  try {
    if (bound->parsed()) return cmd_bound(o, out);
    if (envelope->parsed()) return cmd_envelope(o, out);
    if (calibrate->parsed()) return cmd_calibrate(o, out);
    if (spatial->parsed()) return cmd_spatial(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (serve->parsed()) return cmd_serve(o, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const SelectionModeError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace posthoc::app
