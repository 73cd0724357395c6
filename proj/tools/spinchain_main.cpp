// Command-line front end: parameter sweeps of the exact / approximate
// partition functions, thermal eigenvalue distributions and cumulants of the
// built-in observables, and the oracle comparison suite.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spinchain/chain.hpp"
#include "spinchain/fcs.hpp"
#include "spinchain/parallel.hpp"
#include "spinchain/partition.hpp"
#include "spinchain/verify.hpp"

namespace {

using nlohmann::ordered_json;
using namespace spinchain;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitVerification = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inclusive grid "min:max:count", or a single value "x".
struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  int count = 1;

  static GridSpec parse(const std::string& text) {
    GridSpec spec;
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
      try {
        spec.min = spec.max = std::stod(text);
      } catch (const std::exception&) {
        throw ConfigError("bad grid value '" + text + "'");
      }
      return spec;
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError("bad grid '" + text + "', want min:max:count");
    try {
      spec.min = std::stod(text.substr(0, c1));
      spec.max = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
      spec.count = std::stoi(text.substr(c2 + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad grid '" + text + "', want min:max:count");
    }
    if (spec.count < 1) throw ConfigError("grid count must be >= 1");
    return spec;
  }

  std::vector<double> materialize(bool log_spaced) const {
    if (count == 1) return {min};
    if (log_spaced && (min <= 0.0 || max <= 0.0))
      throw ConfigError("log-spaced grid needs positive endpoints");
    std::vector<double> values(count);
    for (int i = 0; i < count; ++i) {
      const double t = static_cast<double>(i) / (count - 1);
      values[i] = log_spaced ? std::exp(std::log(min) + t * (std::log(max) - std::log(min)))
                             : min + t * (max - min);
    }
    return values;
  }
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Output {
 public:
  explicit Output(const std::string& path) : path_(path) {
    if (path_ != "-") {
      file_.open(path_);
      if (!file_) throw IoError("cannot open output path '" + path_ + "'");
    }
  }
  std::ostream& stream() { return path_ == "-" ? std::cout : file_; }
  void finish() {
    stream().flush();
    if (path_ != "-" && !file_) throw IoError("write to '" + path_ + "' failed");
  }

 private:
  std::string path_;
  std::ofstream file_;
};

struct CommonArgs {
  int L = 0;
  double gamma = 1.0;
  std::string format = "csv";
  std::string out = "-";
  unsigned threads = 0;
};

void write_csv(Output& out, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostream& os = out.stream();
  for (std::size_t i = 0; i < header.size(); ++i)
    os << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i)
      os << row[i] << (i + 1 < row.size() ? "," : "\n");
  out.finish();
}

void write_json(Output& out, ordered_json meta, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  ordered_json doc;
  doc["meta"] = std::move(meta);
  doc["rows"] = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json r;
    for (std::size_t i = 0; i < row.size(); ++i) {
      // Numeric fields round-trip through the same 17-digit text as the CSV.
      try {
        std::size_t used = 0;
        const double v = std::stod(row[i], &used);
        if (used == row[i].size()) {
          r[header[i]] = v;
          continue;
        }
      } catch (const std::exception&) {
      }
      r[header[i]] = row[i];
    }
    doc["rows"].push_back(std::move(r));
  }
  out.stream() << doc.dump(2) << "\n";
  out.finish();
}

void emit(const CommonArgs& common, Output& out, ordered_json meta,
          const std::vector<std::string>& header,
          const std::vector<std::vector<std::string>>& rows) {
  if (common.format == "csv")
    write_csv(out, header, rows);
  else
    write_json(out, std::move(meta), header, rows);
}

int cmd_partition(const CommonArgs& common, const GridSpec& g_spec, const GridSpec& b_spec,
                  bool beta_log) {
  const ChainParams base(common.L, 0.0, common.gamma);
  const std::vector<double> gs = g_spec.materialize(false);
  const std::vector<double> betas = b_spec.materialize(beta_log);

  std::vector<partition::PartitionBreakdown> cells(gs.size() * betas.size());
  parallel_for(cells.size(), common.threads, [&](std::size_t idx) {
    const ChainParams p(base.L, gs[idx % gs.size()], base.gamma);
    cells[idx] = partition::z_exact(p, Thermal(betas[idx / gs.size()]));
  });

  std::vector<std::string> header = {"beta", "g", "log_z_exact", "log_z_ppa", "ratio"};
  if (common.gamma == 1.0) header.push_back("log_z_two_level");
  header.push_back("cancellation_flag");

  std::vector<std::vector<std::string>> rows;
  rows.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& b = cells[i];
    std::vector<std::string> row = {
        fmt17(betas[i / gs.size()]), fmt17(gs[i % gs.size()]),
        fmt17(b.z_exact.log_magnitude()), fmt17(b.z_ppa.log_magnitude()),
        fmt17(std::exp(b.z_ppa.log_magnitude() - b.z_exact.log_magnitude()))};
    if (common.gamma == 1.0) row.push_back(fmt17(b.z_two_level->log_magnitude()));
    row.push_back(b.any_cancellation() ? "1" : "0");
    rows.push_back(std::move(row));
  }

  Output out(common.out);
  ordered_json meta{{"L", common.L}, {"gamma", common.gamma}, {"command", "partition"}};
  emit(common, out, std::move(meta), header, rows);
  return kExitOk;
}

fcs::QuadraticObservable make_observable(const std::string& name, const ChainParams& p) {
  if (name == "kinks") return fcs::kink_observable(p);
  if (name == "magnetization") return fcs::magnetization_observable(p);
  throw ConfigError("unknown observable '" + name + "'");
}

int cmd_distribution(const CommonArgs& common, const std::string& observable,
                     const std::string& variant, std::optional<double> g,
                     std::optional<double> beta) {
  const bool thermal = variant == "exact" || variant == "ppa" || variant == "coarse_grained_ppa";
  if (thermal && (!g || !beta))
    throw ConfigError("variant '" + variant + "' needs --g and --beta");
  if (variant == "ground_state" && !g) throw ConfigError("ground_state needs --g");
  if (variant == "coarse_grained_ppa" && observable != "kinks")
    throw ConfigError("coarse_grained_ppa is defined for kinks only");

  const ChainParams p(common.L, g.value_or(0.0), common.gamma);
  const fcs::QuadraticObservable obs = make_observable(observable, p);

  fcs::Distribution dist;
  if (variant == "exact")
    dist = fcs::distribution_exact(obs, p, Thermal(*beta), common.threads);
  else if (variant == "ppa")
    dist = fcs::distribution_ppa(obs, p, Thermal(*beta), common.threads);
  else if (variant == "coarse_grained_ppa")
    dist = fcs::coarse_grained_ppa(fcs::distribution_ppa(obs, p, Thermal(*beta), common.threads));
  else if (variant == "ground_state")
    dist = fcs::distribution_limit(obs, p, fcs::Limit::ground_state);
  else if (variant == "infinite_temperature")
    dist = fcs::distribution_limit(obs, p, fcs::Limit::infinite_temperature);
  else
    throw ConfigError("unknown variant '" + variant + "'");

  std::vector<std::vector<std::string>> rows;
  rows.reserve(dist.support.size());
  for (std::size_t i = 0; i < dist.support.size(); ++i)
    rows.push_back({std::to_string(dist.support[i]), fmt17(dist.probs[i])});

  Output out(common.out);
  ordered_json meta{{"L", common.L},
                    {"gamma", common.gamma},
                    {"observable", observable},
                    {"variant", variant},
                    {"normalization_residual", dist.norm_residual},
                    {"command", "distribution"}};
  if (g) meta["g"] = *g;
  if (beta && thermal) meta["beta"] = *beta;
  emit(common, out, std::move(meta), {"support_value", "probability"}, rows);
  return kExitOk;
}

int cmd_cumulants(const CommonArgs& common, const std::string& observable,
                  const std::string& variant, const GridSpec& g_spec, const GridSpec& b_spec,
                  bool beta_log) {
  const std::vector<double> gs = g_spec.materialize(false);
  const std::vector<double> betas =
      variant == "exact" ? b_spec.materialize(beta_log) : std::vector<double>{0.0};

  const std::vector<std::string> header = {
      "beta", "g", "variant", "kappa1", "kappa2", "kappa3", "kappa4",
      "relerr_kappa1", "relerr_kappa2", "relerr_kappa3", "relerr_kappa4"};

  struct Cell {
    fcs::CumulantSet exact, ppa;
  };
  std::vector<Cell> cells;
  std::vector<std::vector<std::string>> rows;

  if (variant == "exact") {
    cells.resize(gs.size() * betas.size());
    parallel_for(cells.size(), common.threads, [&](std::size_t idx) {
      const ChainParams p(common.L, gs[idx % gs.size()], common.gamma);
      const fcs::QuadraticObservable obs = make_observable(observable, p);
      const Thermal th(betas[idx / gs.size()]);
      cells[idx].exact = fcs::cumulants(fcs::distribution_exact(obs, p, th, 1), 4);
      cells[idx].ppa = fcs::cumulants(fcs::distribution_ppa(obs, p, th, 1), 4);
    });
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::string beta_s = fmt17(betas[i / gs.size()]);
      const std::string g_s = fmt17(gs[i % gs.size()]);
      std::vector<std::string> relerr(4);
      for (int m = 1; m <= 4; ++m) {
        const double ke = cells[i].exact(m);
        relerr[m - 1] = std::abs(ke) > 1e-12
                            ? fmt17(std::abs(ke - cells[i].ppa(m)) / std::abs(ke))
                            : "nan";
      }
      for (const std::string which : {"exact", "ppa"}) {
        const fcs::CumulantSet& k = which == "exact" ? cells[i].exact : cells[i].ppa;
        rows.push_back({beta_s, g_s, which, fmt17(k(1)), fmt17(k(2)), fmt17(k(3)), fmt17(k(4)),
                        relerr[0], relerr[1], relerr[2], relerr[3]});
      }
    }
  } else if (variant == "ground_state" || variant == "infinite_temperature") {
    const fcs::Limit limit = variant == "ground_state" ? fcs::Limit::ground_state
                                                       : fcs::Limit::infinite_temperature;
    for (double g : gs) {
      const ChainParams p(common.L, g, common.gamma);
      const fcs::QuadraticObservable obs = make_observable(observable, p);
      const fcs::CumulantSet k = fcs::cumulants(fcs::distribution_limit(obs, p, limit), 4);
      rows.push_back({variant == "ground_state" ? "inf" : "0", fmt17(g), variant,
                      fmt17(k(1)), fmt17(k(2)), fmt17(k(3)), fmt17(k(4)), "nan", "nan", "nan",
                      "nan"});
    }
  } else {
    throw ConfigError("unknown variant '" + variant + "' for cumulants");
  }

  Output out(common.out);
  ordered_json meta{{"L", common.L},
                    {"gamma", common.gamma},
                    {"observable", observable},
                    {"variant", variant},
                    {"command", "cumulants"}};
  emit(common, out, std::move(meta), header, rows);
  return kExitOk;
}

int cmd_oracle_check(int l_max, std::uint64_t seed, const std::string& inject_fault) {
  verify::Options opts;
  opts.l_max = l_max;
  opts.seed = seed;
  if (!inject_fault.empty()) {
    if (inject_fault == "flip-zb-minus")
      opts.flip_zb_minus = true;
    else
      throw ConfigError("unknown fault '" + inject_fault + "'");
  }
  std::cout << "oracle-check: L up to " << opts.l_max << ", seed " << opts.seed << "\n";
  const std::vector<verify::CheckResult> results = verify::run_all(opts, std::cout);
  bool ok = true;
  for (const auto& r : results)
    if (!r.pass) {
      ok = false;
      std::cout << "TOLERANCE BREACH in " << r.name << " at " << r.worst_case << "\n";
    }
  std::cout << (ok ? "all checks passed" : "oracle check FAILED") << "\n";
  return ok ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact finite-temperature properties of free-fermion spin chains"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string g_text, beta_text;
  bool beta_log = false;
  std::string observable = "kinks";
  std::string variant = "exact";
  double g_single = 0.0, beta_single = 0.0;

  auto add_common = [&](CLI::App* cmd, bool needs_L = true) {
    if (needs_L)
      cmd->add_option("--L", common.L, "chain length (even)")->required();
    cmd->add_option("--gamma", common.gamma, "anisotropy in [0, 1]")->capture_default_str();
    cmd->add_option("--format", common.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", common.out, "output path, '-' for stdout")->capture_default_str();
    cmd->add_option("--threads", common.threads,
                    "worker threads (0 = SPINCHAIN_THREADS or hardware)");
  };

  CLI::App* partition_cmd =
      app.add_subcommand("partition", "exact / PPA / two-level partition sweep");
  add_common(partition_cmd);
  partition_cmd->add_option("--g", g_text, "field grid min:max:count or value")->required();
  partition_cmd->add_option("--beta", beta_text, "beta grid min:max:count or value")->required();
  partition_cmd->add_flag("--beta-log", beta_log, "log-spaced beta grid");

  CLI::App* dist_cmd = app.add_subcommand("distribution", "eigenvalue distribution");
  add_common(dist_cmd);
  dist_cmd->add_option("--observable", observable, "kinks or magnetization")
      ->check(CLI::IsMember({"kinks", "magnetization"}))
      ->capture_default_str();
  dist_cmd
      ->add_option("--variant", variant,
                   "exact, ppa, coarse_grained_ppa, ground_state, infinite_temperature")
      ->capture_default_str();
  CLI::Option* g_opt = dist_cmd->add_option("--g", g_single, "transverse field");
  CLI::Option* beta_opt = dist_cmd->add_option("--beta", beta_single, "inverse temperature");

  CLI::App* cum_cmd = app.add_subcommand("cumulants", "cumulants over a (beta, g) sweep");
  add_common(cum_cmd);
  cum_cmd->add_option("--observable", observable, "kinks or magnetization")
      ->check(CLI::IsMember({"kinks", "magnetization"}))
      ->capture_default_str();
  cum_cmd->add_option("--variant", variant, "exact, ground_state, infinite_temperature")
      ->capture_default_str();
  cum_cmd->add_option("--g", g_text, "field grid min:max:count or value")->required();
  CLI::Option* cum_beta = cum_cmd->add_option("--beta", beta_text, "beta grid (exact variant)");
  cum_cmd->add_flag("--beta-log", beta_log, "log-spaced beta grid");

  int l_max = 10;
  std::uint64_t seed = 12345;
  std::string inject_fault;
  CLI::App* check_cmd = app.add_subcommand("oracle-check", "dense-oracle comparison suite");
  check_cmd->add_option("--L-max", l_max, "largest chain length (<= 12)")
      ->check(CLI::Range(2, 12))
      ->capture_default_str();
  check_cmd->add_option("--seed", seed, "seed for random instances")->capture_default_str();
  check_cmd->add_option("--inject-fault", inject_fault, "self-test fault (flip-zb-minus)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (partition_cmd->parsed())
      return cmd_partition(common, GridSpec::parse(g_text), GridSpec::parse(beta_text),
                           beta_log);
    if (dist_cmd->parsed())
      return cmd_distribution(common, observable, variant,
                              *g_opt ? std::optional<double>(g_single) : std::nullopt,
                              *beta_opt ? std::optional<double>(beta_single) : std::nullopt);
    if (cum_cmd->parsed()) {
      if (variant == "exact" && cum_beta->count() == 0)
        throw ConfigError("cumulants with variant=exact needs --beta");
      return cmd_cumulants(common, observable, variant, GridSpec::parse(g_text),
                           cum_beta->count() ? GridSpec::parse(beta_text) : GridSpec::parse("0"),
                           beta_log);
    }
    if (check_cmd->parsed()) return cmd_oracle_check(l_max, seed, inject_fault);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "internal inconsistency: " << e.what() << "\n";
    return kExitVerification;
  }
  return kExitConfig;
}
