#include "adaptgap/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "adaptgap/direct_sum.hpp"
#include "adaptgap/error.hpp"
#include "adaptgap/estimators.hpp"
#include "adaptgap/harness.hpp"
#include "adaptgap/hard_instances.hpp"
#include "adaptgap/info_oracle.hpp"

namespace adaptgap::cli {

namespace {

struct Common {
  std::uint64_t seed = kDefaultSeed;
  std::string out_path;
  std::string format = "csv";
  unsigned workers = 1;
};

struct EstimateArgs {
  std::string family = "mu2";
  std::string alg = "a2";
  std::size_t n1 = 64, n2 = 64;
  std::string p = "2", u = "2";
  std::uint64_t n = 1024;
  std::optional<std::size_t> m;
  std::string input;
};

struct GapArgs {
  std::vector<std::uint64_t> budgets{1024, 4096, 16384, 65536};
  double c3 = 5.0;
  std::size_t trials = 300;
  std::optional<std::size_t> m;
  double guard_c0 = kRegimeC0;
};

struct RatesArgs {
  std::string regime;
  std::size_t trials = 300;
  double guard_c0 = kRegimeC0;
};

struct DsArgs {
  double alpha = 1.5;
  std::string p = "1", u = "inf", p1 = "1";
  std::vector<unsigned> k0{3, 4, 5, 6};
  std::optional<double> delta;
  double c0 = kDefaultLevelC0;
  std::optional<std::size_t> m;
  std::string mode = "both";
  std::size_t trials = 200;
};

struct NormEstArgs {
  std::string u = "inf", v = "2";
  std::size_t size = 4;
  std::vector<std::uint64_t> budgets{16, 32, 64, 128, 256, 512, 1024, 2048, 4096};
  std::size_t trials = 500;
};

// Effective configuration echoed as "# key=value" header lines.
class Header {
 public:
  explicit Header(std::string command) : command_(std::move(command)) {}
  template <class T>
  void add(const std::string& key, const T& value) {
    std::ostringstream s;
    s << value;
    entries_.emplace_back(key, s.str());
  }
  void write(std::ostream& out) const {
    out << "# adaptgap " << command_ << '\n';
    for (const auto& [k, v] : entries_) out << "# " << k << '=' << v << '\n';
  }

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

template <class T>
std::string join(const std::vector<T>& values) {
  std::ostringstream s;
  for (std::size_t i = 0; i < values.size(); ++i) s << (i ? ";" : "") << values[i];
  return s.str();
}

std::string opt_text(const std::optional<std::size_t>& m) {
  return m ? std::to_string(*m) : std::string("default");
}

TableFormat table_format(const Common& c) {
  return c.format == "tsv" ? TableFormat::kTsv : TableFormat::kCsv;
}

void write_fit(std::ostream& out, const std::string& label, const std::optional<RateFit>& fit) {
  if (!fit) {
    out << "# fit " << label << " unavailable (needs four budgets)\n";
    return;
  }
  out << "# fit " << label << " slope=" << format_double(fit->slope)
      << " intercept=" << format_double(fit->intercept)
      << " r2=" << format_double(fit->r_squared) << '\n';
}

MixedMatrix load_matrix(const std::string& path, const Extended& p, const Extended& u) {
  std::ifstream in(path);
  if (!in) throw InvalidParameters("cannot open input matrix '" + path + "'");
  std::size_t n1 = 0, n2 = 0;
  if (!(in >> n1 >> n2)) throw InvalidParameters("input matrix must start with 'N1 N2'");
  ProblemSpec spec(n1, n2, p, u);
  std::vector<double> entries(spec.entries());
  for (double& x : entries) {
    if (!(in >> x)) throw InvalidParameters("input matrix has fewer than N1*N2 entries");
  }
  return MixedMatrix(spec, std::move(entries));
}

void cmd_estimate(const EstimateArgs& a, const Common& c, std::ostream& out) {
  const Extended p = Extended::parse(a.p), u = Extended::parse(a.u);
  if (a.alg != "a2" && a.alg != "a3") throw InvalidParameters("--alg must be a2 or a3");
  const RngStream root(c.seed, 0);
  const MixedMatrix f = a.input.empty()
                            ? HardFamily{parse_variant(a.family), ProblemSpec(a.n1, a.n2, p, u)}
                                  .sample(root.derive(0))
                            : load_matrix(a.input, p, u);
  const ProblemSpec& spec = f.spec();
  EstimateReport report;
  std::size_t m = 0;
  if (a.alg == "a3") {
    const Extended two(2.0);
    if (!(p < two && two < u)) {
      throw PreconditionViolated("A3 is defined for p < 2 < u (got p=" + p.to_string() +
                                 ", u=" + u.to_string() + ")");
    }
    m = a.m.value_or(default_repetitions(spec.n1));
    auto tape = QueryTape::open_adaptive(f, 6 * m * a.n);
    report = adaptive_mean_a3(tape, a.n, m, p, root.derive(1));
  } else {
    report = a2_estimator(a.n)(f, root.derive(1));
  }
  const double truth = scalar_mean(f);

  Header h("estimate");
  h.add("family", a.input.empty() ? a.family : "file:" + a.input);
  h.add("alg", a.alg);
  h.add("N1", spec.n1);
  h.add("N2", spec.n2);
  h.add("p", p.to_string());
  h.add("u", u.to_string());
  h.add("n", a.n);
  if (a.alg == "a3") h.add("m", m);
  h.add("seed", c.seed);
  h.write(out);
  const char sep = table_format(c) == TableFormat::kTsv ? '\t' : ',';
  out << "field" << sep << "value\n";
  out << "value" << sep << format_double(report.value) << '\n';
  out << "true_mean" << sep << format_double(truth) << '\n';
  out << "error" << sep << format_double(report.value - truth) << '\n';
  out << "card" << sep << report.cards << '\n';
  if (report.stage_cards) {
    out << "stage1_card" << sep << report.stage_cards->first << '\n';
    out << "stage2_card" << sep << report.stage_cards->second << '\n';
  }
  if (report.allocation) out << "allocation" << sep << join(*report.allocation) << '\n';
}

void cmd_gap(const GapArgs& a, const Common& c, std::ostream& out) {
  GapOptions options;
  options.m = a.m;
  options.guard_c0 = a.guard_c0;
  options.workers = c.workers;
  const GapResult result = gap_experiment(a.budgets, a.c3, a.trials, c.seed, options);

  Header h("gap");
  h.add("p", "1");
  h.add("u", "inf");
  h.add("budgets", join(a.budgets));
  h.add("c3", format_double(a.c3));
  h.add("trials", a.trials);
  h.add("m", opt_text(a.m));
  h.add("guard_c0", format_double(a.guard_c0));
  h.add("seed", c.seed);
  h.write(out);

  std::vector<ResultRow> rows;
  const Extended p(1.0), u = Extended::inf();
  for (const auto& r : result.rows) {
    rows.push_back({"mu4", "A3", p, u, r.n1, r.n2, r.n, r.a3, c.seed});
    rows.push_back({"mu4", "A2_MATCHED", p, u, r.n1, r.n2, r.n, r.a2_matched, c.seed});
    rows.push_back({"mu4", "A2", p, u, r.n1, r.n2, r.n, r.a2_nominal, c.seed});
  }
  write_table(out, rows, table_format(c));
  for (const auto& r : result.rows) {
    out << "# gap n=" << r.n << " m=" << r.m << " ratio=" << format_double(r.ratio) << '\n';
  }
  write_fit(out, "ratio", result.ratio_fit);
  write_fit(out, "A2_MATCHED", result.a2_matched_fit);
  write_fit(out, "A2", result.a2_nominal_fit);
  write_fit(out, "A3", result.a3_fit);
}

void cmd_rates(const RatesArgs& a, const Common& c, std::ostream& out) {
  const RegimeSetup setup = default_regime_setup(parse_regime(a.regime));
  const RateReport report = rate_experiment(setup, a.trials, c.seed, c.workers, a.guard_c0);

  Header h("rates");
  h.add("regime", a.regime);
  h.add("family", variant_name(setup.family));
  h.add("p", setup.p.to_string());
  h.add("u", setup.u.to_string());
  h.add("trials", a.trials);
  h.add("guard_c0", format_double(a.guard_c0));
  h.add("seed", c.seed);
  h.write(out);
  write_table(out, report.rows, table_format(c));
  for (const auto& s : report.summaries) {
    out << "# fit " << estimator_name(s.estimator)
        << " rms_slope=" << format_double(s.rms_fit.slope)
        << " mae_slope=" << format_double(s.mae_fit.slope)
        << " predicted_slope=" << format_double(s.predicted_slope) << '\n';
  }
}

void cmd_ds(const DsArgs& a, const Common& c, std::ostream& out) {
  if (a.mode != "adaptive" && a.mode != "nonadaptive" && a.mode != "both") {
    throw InvalidParameters("--mode must be adaptive, nonadaptive or both");
  }
  const DirectSumSpec base(a.alpha, Extended::parse(a.p), Extended::parse(a.u),
                           Extended::parse(a.p1), 0);
  std::vector<DsMode> modes;
  if (a.mode != "nonadaptive") modes.push_back(DsMode::kAdaptive);
  if (a.mode != "adaptive") modes.push_back(DsMode::kNonadaptive);

  std::vector<ResultRow> rows;
  std::map<unsigned, std::pair<double, double>> by_k0;
  for (unsigned k0 : a.k0) {
    DsOptions options;
    options.k0 = k0;
    options.delta = a.delta;
    options.c0 = a.c0;
    options.m = a.m;
    for (DsMode mode : modes) {
      rows.push_back(ds_rms_error(base, mode, options, a.trials, c.seed, c.workers));
      (mode == DsMode::kAdaptive ? by_k0[k0].first : by_k0[k0].second) = rows.back().stats.rms;
    }
  }

  Header h("ds");
  h.add("alpha", format_double(a.alpha));
  h.add("p", base.p.to_string());
  h.add("u", base.u.to_string());
  h.add("p1", base.p1.to_string());
  h.add("k0", join(a.k0));
  h.add("delta", format_double(a.delta.value_or(default_delta(a.alpha))));
  h.add("c0", format_double(a.c0));
  h.add("m", opt_text(a.m));
  h.add("mode", a.mode);
  h.add("trials", a.trials);
  h.add("seed", c.seed);
  h.write(out);
  write_table(out, rows, table_format(c));
  const double delta = a.delta.value_or(default_delta(a.alpha));
  for (unsigned k0 : a.k0) {
    const LevelAllocation schedule = level_allocation(k0, a.alpha, delta, a.c0);
    out << "# level k0=" << k0 << " k1=" << schedule.k1 << " total=" << schedule.total()
        << " c3=" << schedule.c3 << " bound=" << schedule.bound();
    if (modes.size() == 2 && by_k0[k0].first > 0.0) {
      out << " ratio=" << format_double(by_k0[k0].second / by_k0[k0].first);
    }
    out << '\n';
  }
}

void cmd_norm_est(const NormEstArgs& a, const Common& c, std::ostream& out) {
  const Extended u = Extended::parse(a.u), v = Extended::parse(a.v);
  if (v.is_inf()) throw InvalidParameters("--v must be finite");
  if (!(v < u)) throw PreconditionViolated("norm estimation rate needs v < u");
  if (a.size == 0) throw InvalidParameters("--size must be positive");
  if (a.trials < 2) throw InvalidParameters("--trials must be at least 2");
  // Single spike of height size^{1/v}: unit L_v norm.
  const double height = std::pow(static_cast<double>(a.size), 1.0 / v.value());
  auto access = [&](std::size_t i) { return i == 0 ? height : 0.0; };

  std::vector<ResultRow> rows;
  std::vector<std::pair<double, double>> pts;
  for (const std::uint64_t n : a.budgets) {
    const auto outcomes = run_trials(a.trials, c.workers, [&](std::size_t t) {
      RngStream s = trial_stream(c.seed, t).derive(n);
      const double est = norm_est_a1(access, a.size, v, n, s);
      return TrialOutcome{est - 1.0, static_cast<double>(n)};
    });
    rows.push_back({"spike-population", "A1", v, u, a.size, 1, n, summarize(outcomes), c.seed});
    pts.emplace_back(static_cast<double>(n), rows.back().stats.rms);
  }

  Header h("norm-est");
  h.add("v", v.to_string());
  h.add("u", u.to_string());
  h.add("size", a.size);
  h.add("budgets", join(a.budgets));
  h.add("trials", a.trials);
  h.add("seed", c.seed);
  h.write(out);
  out << "# columns: p holds the estimated exponent v\n";
  write_table(out, rows, table_format(c));
  std::optional<RateFit> fit;
  if (pts.size() >= 4 && std::all_of(pts.begin(), pts.end(), [](auto& q) { return q.second > 0; })) {
    fit = rate_fit(pts);
  }
  write_fit(out, "A1", fit);
  out << "# predicted_slope=" << format_double(std::max(u.reciprocal() - v.reciprocal(), -0.5))
      << '\n';
}

std::optional<std::uint64_t> env_seed() {
  const char* text = std::getenv("ADAPTGAP_SEED");
  if (text == nullptr || *text == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(text, &end, 10);
  if (end == nullptr || *end != '\0') throw InvalidParameters("ADAPTGAP_SEED is not an integer");
  return value;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "master seed (default: ADAPTGAP_SEED or a fixed constant)");
  sub->add_option("--out", c.out_path, "write output to this file instead of stdout");
  sub->add_option("--format", c.format, "csv or tsv")->check(CLI::IsMember({"csv", "tsv"}));
  sub->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive vs non-adaptive randomized mean computation experiments", "adaptgap"};
  app.require_subcommand(1);
  Common common;

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "run one estimator on one instance");
  estimate->add_option("--family", est.family, "mu1|mu2|mu3|mu4");
  estimate->add_option("--alg", est.alg, "a2|a3");
  estimate->add_option("--n1", est.n1)->check(CLI::PositiveNumber);
  estimate->add_option("--n2", est.n2)->check(CLI::PositiveNumber);
  estimate->add_option("--p", est.p, "outer exponent (number or inf)");
  estimate->add_option("--u", est.u, "inner exponent (number or inf)");
  estimate->add_option("--n", est.n, "budget")->check(CLI::PositiveNumber);
  estimate->add_option("--m", est.m, "A3 repetitions")->check(CLI::PositiveNumber);
  estimate->add_option("--input", est.input, "matrix file: 'N1 N2' then entries row by row");
  add_common(estimate, common);

  GapArgs gap;
  auto* gap_cmd = app.add_subcommand("gap", "adaption gap experiment at p = 1, u = inf");
  gap_cmd->add_option("--budgets", gap.budgets)->delimiter(',');
  gap_cmd->add_option("--c3", gap.c3, "N1 = N2 = ceil(c3 sqrt(n))");
  gap_cmd->add_option("--trials", gap.trials)->check(CLI::Range(2, 100000000));
  gap_cmd->add_option("--m", gap.m)->check(CLI::PositiveNumber);
  gap_cmd->add_option("--guard-c0", gap.guard_c0, "regime guard constant (0 disables)");
  add_common(gap_cmd, common);

  RatesArgs rates;
  auto* rates_cmd = app.add_subcommand("rates", "convergence rates in one exponent regime");
  rates_cmd->add_option("--regime", rates.regime)
      ->required()
      ->check(CLI::IsMember({"p-ge-u", "p-lt-u-le-2", "two-le-p-lt-u", "p-lt-2-lt-u",
                             "p-lt-2-lt-u-small-n"}));
  rates_cmd->add_option("--trials", rates.trials)->check(CLI::Range(2, 100000000));
  rates_cmd->add_option("--guard-c0", rates.guard_c0, "regime guard constant (0 disables)");
  add_common(rates_cmd, common);

  DsArgs ds;
  auto* ds_cmd = app.add_subcommand("ds", "direct-sum composite estimators");
  ds_cmd->add_option("--alpha", ds.alpha);
  ds_cmd->add_option("--p", ds.p);
  ds_cmd->add_option("--u", ds.u);
  ds_cmd->add_option("--p1", ds.p1);
  ds_cmd->add_option("--k0", ds.k0)->delimiter(',');
  ds_cmd->add_option("--delta", ds.delta);
  ds_cmd->add_option("--c0", ds.c0);
  ds_cmd->add_option("--m", ds.m)->check(CLI::PositiveNumber);
  ds_cmd->add_option("--mode", ds.mode, "adaptive|nonadaptive|both");
  ds_cmd->add_option("--trials", ds.trials)->check(CLI::Range(2, 100000000));
  add_common(ds_cmd, common);

  NormEstArgs ne;
  auto* ne_cmd = app.add_subcommand("norm-est", "decay of the randomized norm estimate");
  ne_cmd->add_option("--u", ne.u);
  ne_cmd->add_option("--v", ne.v);
  ne_cmd->add_option("--size", ne.size, "population size");
  ne_cmd->add_option("--budgets", ne.budgets)->delimiter(',');
  ne_cmd->add_option("--trials", ne.trials)->check(CLI::Range(2, 100000000));
  add_common(ne_cmd, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    if (auto seed = env_seed()) common.seed = *seed;
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!common.out_path.empty()) {
    file.open(common.out_path);
    if (!file) {
      err << "error: cannot open '" << common.out_path << "' for writing\n";
      return kExitUsage;
    }
    sink = &file;
  }

  try {
    // Build into a buffer so a failed run writes no partial data section.
    std::ostringstream buffer;
    if (*estimate) cmd_estimate(est, common, buffer);
    if (*gap_cmd) cmd_gap(gap, common, buffer);
    if (*rates_cmd) cmd_rates(rates, common, buffer);
    if (*ds_cmd) cmd_ds(ds, common, buffer);
    if (*ne_cmd) cmd_norm_est(ne, common, buffer);
    *sink << buffer.str();
  } catch (const PreconditionViolated& e) {
    err << "precondition violated: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const RegimeViolation& e) {
    err << "regime violation: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitPrecondition;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace adaptgap::cli
