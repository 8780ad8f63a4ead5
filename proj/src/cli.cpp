#include "qad/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qad/distill.hpp"
#include "qad/thresholds.hpp"

namespace qad::cli {

namespace {

using nlohmann::json;

std::string fixed6(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fixed6(const std::optional<double>& v)
{
  return v ? fixed6(*v) : std::string();
}

json optional_json(const std::optional<double>& v)
{
  return v ? json(*v) : json(nullptr);
}

// --- thresholds / figure ----------------------------------------------------

void write_threshold_csv(std::ostream& os, const std::vector<ThresholdRecord>& rows, bool numeric,
                         bool with_quantum)
{
  os << "n,beta_inc,beta_coh";
  if (with_quantum) {
    os << ",beta_quantum";
  }
  if (numeric) {
    os << ",beta_inc_numeric,beta_coh_numeric";
  }
  os << '\n';
  for (const auto& r : rows) {
    os << r.n << ',' << fixed6(r.beta_inc_closed) << ',' << fixed6(r.beta_coh_closed);
    if (with_quantum) {
      os << ',' << fixed6(r.beta_quantum);
    }
    if (numeric) {
      os << ',' << fixed6(r.beta_inc_numeric) << ',' << fixed6(r.beta_coh_numeric);
    }
    os << '\n';
  }
}

json threshold_json(const std::vector<ThresholdRecord>& rows)
{
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"n", r.n},
                   {"beta_inc", r.beta_inc_closed},
                   {"beta_coh", r.beta_coh_closed},
                   {"beta_quantum", r.beta_quantum},
                   {"beta_inc_numeric", optional_json(r.beta_inc_numeric)},
                   {"beta_coh_numeric", optional_json(r.beta_coh_numeric)}});
  }
  return arr;
}

void cmd_thresholds(const RunConfig& cfg, std::ostream& out)
{
  const auto rows = figure_table(cfg.n_min, cfg.n_max, cfg.numeric);
  if (cfg.out_format == OutFormat::json) {
    out << threshold_json(rows).dump(2) << '\n';
  } else {
    write_threshold_csv(out, rows, cfg.numeric, true);
  }
}

void cmd_figure(const RunConfig& cfg, std::ostream& out)
{
  const auto rows = figure_table(2, cfg.n_max, cfg.numeric);
  write_threshold_csv(out, rows, cfg.numeric, false);
}

// --- attack -----------------------------------------------------------------

json report_json(const AttackReport& r)
{
  return {{"kind", std::string(to_string(r.kind))},
          {"N", r.block_size},
          {"eve_error", r.eve_error},
          {"dims_used", r.dims_used},
          {"notes", r.notes}};
}

void cmd_attack(const RunConfig& cfg, std::ostream& out)
{
  const ChannelParams params = make_params(cfg.n, *cfg.beta0);
  const int N = *cfg.block_size;
  std::vector<AttackReport> reports;
  if (!cfg.kind || *cfg.kind == AttackKind::incoherent) {
    reports.push_back(incoherent_attack_error(params, N));
  }
  if (!cfg.kind || *cfg.kind == AttackKind::coherent) {
    reports.push_back(coherent_attack_error(params, N));
  }
  const double bob = bob_error_after_ad(params, N);

  if (cfg.out_format == OutFormat::json) {
    json doc = {{"n", cfg.n}, {"beta0", params.beta0}, {"N", N}, {"bob_error", bob}};
    doc["reports"] = json::array();
    for (const auto& r : reports) {
      doc["reports"].push_back(report_json(r));
    }
    if (reports.size() == 2) {
      doc["coherent_dominates"] = reports[1].eve_error <= reports[0].eve_error + 1e-9;
      doc["coherent_minus_incoherent"] = reports[1].eve_error - reports[0].eve_error;
    }
    out << doc.dump(2) << '\n';
    return;
  }
  out << "kind,n,beta0,N,eve_error,dims_used,bob_error\n";
  for (const auto& r : reports) {
    out << to_string(r.kind) << ',' << cfg.n << ',' << fixed6(params.beta0) << ',' << N << ','
        << fixed6(r.eve_error) << ',' << r.dims_used << ',' << fixed6(bob) << '\n';
  }
}

// --- simulate ---------------------------------------------------------------

void cmd_simulate(const RunConfig& cfg, std::ostream& out)
{
  const ChannelParams params = make_params(cfg.n, *cfg.beta0);
  const int N = *cfg.block_size;
  const std::uint64_t blocks = *cfg.blocks;

  if (cfg.dump_path) {
    std::ofstream dump(*cfg.dump_path);
    if (!dump) {
      throw std::runtime_error("cannot open transcript dump " + *cfg.dump_path);
    }
    simulate_blocks(params, N, cfg.seed, 0, blocks,
                    [&](const BlockTranscript& t) { write_transcript_line(dump, t); });
    if (!dump) {
      throw std::runtime_error("failed writing transcript dump " + *cfg.dump_path);
    }
  }

  const SessionStats s = run_session(params, N, blocks, cfg.seed, cfg.threads);
  const double acc = acceptance_probability(params, N);
  const double err = bob_error_after_ad(params, N);
  const double acc_se = std::sqrt(acc * (1.0 - acc) / static_cast<double>(blocks));
  const std::optional<double> rate = s.bob_error_rate();
  std::optional<double> err_se;
  if (s.blocks_accepted > 0) {
    err_se = std::sqrt(err * (1.0 - err) / static_cast<double>(s.blocks_accepted));
  }

  if (cfg.out_format == OutFormat::json) {
    json doc = {{"n", cfg.n},
                {"beta0", params.beta0},
                {"N", N},
                {"blocks", blocks},
                {"seed", cfg.seed},
                {"blocks_accepted", s.blocks_accepted},
                {"bob_errors", s.bob_errors},
                {"acceptance_rate", s.acceptance_rate()},
                {"acceptance_analytic", acc},
                {"acceptance_std_error", acc_se},
                {"bob_error_rate", optional_json(rate)},
                {"bob_error_analytic", err},
                {"bob_error_std_error", optional_json(err_se)}};
    out << doc.dump(2) << '\n';
    return;
  }
  out << "n,beta0,N,blocks,seed,blocks_accepted,bob_errors,acceptance_rate,acceptance_analytic,"
         "bob_error_rate,bob_error_analytic\n";
  out << cfg.n << ',' << fixed6(params.beta0) << ',' << N << ',' << blocks << ',' << cfg.seed << ','
      << s.blocks_accepted << ',' << s.bob_errors << ',' << fixed6(s.acceptance_rate()) << ',' << fixed6(acc)
      << ',' << fixed6(rate) << ',' << fixed6(err) << '\n';
}

// --- parsing ----------------------------------------------------------------

OutFormat parse_format(const std::string& s)
{
  if (s == "csv") {
    return OutFormat::csv;
  }
  if (s == "json") {
    return OutFormat::json;
  }
  throw UsageError("unknown format '" + s + "' (expected csv or json)");
}

void require(bool ok, const std::string& what)
{
  if (!ok) {
    throw UsageError(what);
  }
}

} // namespace

void validate(const RunConfig& cfg)
{
  switch (cfg.command) {
  case Command::thresholds:
    require(cfg.n_min >= 2, "--n-min must be at least 2");
    require(cfg.n_max >= cfg.n_min, "--n-max must be at least --n-min (and at least 2)");
    break;
  case Command::figure:
    require(cfg.n_max >= 2, "--n-max must be at least 2");
    break;
  case Command::attack:
  case Command::simulate:
    require(cfg.n >= 2, "--n must be at least 2");
    require(cfg.beta0.has_value(), "--beta0 is required");
    require(cfg.block_size.has_value(), "--N is required");
    require(*cfg.block_size >= 1, "--N must be at least 1");
    require(*cfg.beta0 >= 1.0 / cfg.n - 1e-12 && *cfg.beta0 <= 1.0 + 1e-12, "--beta0 must lie in [1/n, 1]");
    if (cfg.command == Command::simulate) {
      require(cfg.blocks.has_value(), "--blocks is required");
      require(*cfg.blocks >= 1, "--blocks must be at least 1");
    }
    break;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Advantage distillation thresholds for noisy qunit key distribution"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string format;
  std::string kind;
  double beta0 = 0.0;
  int block_size = 0;
  std::uint64_t blocks = 0;
  std::string out_path;
  std::string dump_path;

  auto add_format = [&](CLI::App* sub, const std::string& fallback) {
    sub->add_option("--format", format, "csv or json")->default_str(fallback);
  };

  auto* thresholds = app.add_subcommand("thresholds", "closed-form (and optionally numeric) threshold table");
  thresholds->add_option("--n-min", cfg.n_min, "smallest dimension")->capture_default_str();
  thresholds->add_option("--n-max", cfg.n_max, "largest dimension")->capture_default_str();
  thresholds->add_flag("--numeric", cfg.numeric, "also recover thresholds numerically (n <= 3)");
  thresholds->add_option("--out", out_path, "output file (default: standard output)");
  add_format(thresholds, "csv");

  auto* attack = app.add_subcommand("attack", "Eve's error for one block size");
  attack->add_option("--n", cfg.n, "qunit dimension")->required();
  attack->add_option("--beta0", beta0, "probability of matching symbols")->required();
  attack->add_option("--N", block_size, "block size")->required();
  attack->add_option("--kind", kind, "incoherent or coherent (default: both)");
  attack->add_option("--out", out_path, "output file (default: standard output)");
  add_format(attack, "json");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of the distillation protocol");
  simulate->add_option("--n", cfg.n, "qunit dimension")->required();
  simulate->add_option("--beta0", beta0, "probability of matching symbols")->required();
  simulate->add_option("--N", block_size, "block size")->required();
  simulate->add_option("--blocks", blocks, "number of blocks")->required();
  simulate->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  simulate->add_option("--threads", cfg.threads, "worker threads (0: all cores)")->capture_default_str();
  simulate->add_option("--dump", dump_path, "write one transcript line per block to this file");
  simulate->add_option("--out", out_path, "output file (default: standard output)");
  add_format(simulate, "json");

  auto* figure = app.add_subcommand("figure", "threshold curves as plot-ready CSV");
  figure->add_option("--n-max", cfg.n_max, "largest dimension")->capture_default_str();
  figure->add_flag("--numeric", cfg.numeric, "append numerically recovered columns (n <= 3)");
  figure->add_option("--out", out_path, "output CSV file (default: fig1.csv)");

  // CLI11 consumes a vector argument list from the back
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  CLI::App* active = nullptr;
  try {
    if (thresholds->parsed()) {
      cfg.command = Command::thresholds;
      active = thresholds;
      cfg.out_format = format.empty() ? OutFormat::csv : parse_format(format);
    } else if (attack->parsed()) {
      cfg.command = Command::attack;
      active = attack;
      cfg.out_format = format.empty() ? OutFormat::json : parse_format(format);
    } else if (simulate->parsed()) {
      cfg.command = Command::simulate;
      active = simulate;
      cfg.out_format = format.empty() ? OutFormat::json : parse_format(format);
    } else {
      cfg.command = Command::figure;
      active = figure;
      cfg.out_format = OutFormat::csv;
      if (out_path.empty()) {
        out_path = "fig1.csv";
      }
    }
    const auto given = [active](const std::string& name) {
      const CLI::Option* opt = active->get_option_no_throw(name);
      return opt != nullptr && opt->count() > 0;
    };
    if (given("--beta0")) {
      cfg.beta0 = beta0;
    }
    if (given("--N")) {
      cfg.block_size = block_size;
    }
    if (given("--blocks")) {
      cfg.blocks = blocks;
    }
    if (!kind.empty()) {
      cfg.kind = parse_attack_kind(kind);
      require(cfg.kind.has_value(), "unknown --kind '" + kind + "' (expected incoherent or coherent)");
    }
    if (!out_path.empty()) {
      cfg.out_path = out_path;
    }
    if (!dump_path.empty()) {
      cfg.dump_path = dump_path;
    }
    validate(cfg);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  }

  // Render into a buffer so a failed command leaves no partial output.
  std::ostringstream data;
  try {
    switch (cfg.command) {
    case Command::thresholds:
      cmd_thresholds(cfg, data);
      break;
    case Command::attack:
      cmd_attack(cfg, data);
      break;
    case Command::simulate:
      cmd_simulate(cfg, data);
      break;
    case Command::figure:
      cmd_figure(cfg, data);
      break;
    }
  } catch (const GuardExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  if (cfg.out_path) {
    std::ofstream file(*cfg.out_path, std::ios::binary);
    file << data.str();
    file.flush();
    if (!file) {
      err << "error: cannot write " << *cfg.out_path << '\n';
      return kExitRuntime;
    }
  } else {
    out << data.str();
  }
  return kExitOk;
}

} // namespace qad::cli
