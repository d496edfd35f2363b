#include "smoothkl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "smoothkl/asymptotics.hpp"
#include "smoothkl/estimation.hpp"
#include "smoothkl/network.hpp"
#include "smoothkl/numfmt.hpp"
#include "smoothkl/parallel.hpp"
#include "smoothkl/random.hpp"

namespace smoothkl {

namespace {

std::uint64_t stream_of(std::uint64_t key, StreamRole role) {
  return (key << 8) | static_cast<std::uint32_t>(role);
}

// LSQLR is reported at its limiting level a = 1.
double alpha_column(const Method& m) {
  return m.family == Family::lsqlr ? 1.0 : m.alpha;
}

std::string fmt(double v) {
  return format_number(v);
}

}  // namespace

void write_csv_header(std::ostream& out, const std::string& command, std::uint64_t seed) {
  out << "# smoothkl v" << kCsvVersion << ' ' << command << " seed=" << seed << '\n';
}

std::vector<AreRow> run_are_table(const AreTableConfig& cfg, unsigned threads) {
  const CovariateMeasure measure = CovariateMeasure::intercept_and_normal();
  const QuadratureSpec quad{cfg.nodes};
  std::vector<AreRow> rows(cfg.betas.size() * cfg.methods.size());
  parallel_for(rows.size(), threads, [&](std::size_t cell) {
    const auto& beta = cfg.betas[cell / cfg.methods.size()];
    const Method& method = cfg.methods[cell % cfg.methods.size()];
    rows[cell] = {beta, method, are(method.spec(2), TrueParameter(beta), measure, quad)};
  });
  return rows;
}

void write_are_table(std::ostream& out, const std::vector<AreRow>& rows, std::uint64_t seed) {
  write_csv_header(out, "are-table", seed);
  out << "beta1,beta2,method,alpha,are\n";
  for (const auto& r : rows) {
    out << fmt(r.beta[0]) << ',' << fmt(r.beta[1]) << ',' << to_string(r.method.family) << ','
        << fmt(alpha_column(r.method)) << ',' << fmt(r.are) << '\n';
  }
}

std::vector<double> EfficiencyResult::sob(std::size_t n, std::size_t method) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.n == n && r.method == method) out.push_back(r.sob);
  }
  return out;
}

std::vector<double> EfficiencyResult::ttr(std::size_t n, std::size_t method) const {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.n == n && r.method == method) out.push_back(r.ttr);
  }
  return out;
}

EfficiencyResult run_efficiency(const EfficiencyConfig& cfg, std::uint64_t seed, unsigned threads) {
  const CovariateMeasure measure = CovariateMeasure::intercept_and_normal();
  const TrueParameter beta(cfg.beta);
  const std::size_t methods = cfg.methods.size();
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);

  EfficiencyResult result;
  result.methods = cfg.methods;
  result.n_grid = cfg.n_grid;
  result.trials = cfg.trials;
  result.records.resize(cfg.n_grid.size() * trials * methods);

  parallel_for(cfg.n_grid.size() * trials, threads, [&](std::size_t cell) {
    const std::size_t n_index = cell / trials;
    const std::size_t trial = cell % trials;
    const std::size_t n = cfg.n_grid[n_index];
    const std::uint64_t key = (static_cast<std::uint64_t>(n_index) << 24) | trial;
    const Dataset train = sample_nominal(measure, beta, n, seed, stream_of(key, StreamRole::train_data));
    const Dataset test = sample_nominal(measure, beta, cfg.test_size, seed, stream_of(trial, StreamRole::test_data));
    const MarginDesign design = margin_design(train);
    OptimizerConfig opt = cfg.optimizer;
    opt.seed = seed;
    opt.trial = key;
    for (std::size_t m = 0; m < methods; ++m) {
      const LossSpec spec = cfg.methods[m].spec(2);
      const FitResult fit = fit_linear(design, spec, opt, cfg.beta);
      EfficiencyTrial& rec = result.records[cell * methods + m];
      rec.n = n;
      rec.trial = static_cast<int>(trial);
      rec.method = m;
      rec.sob = eval_sob(fit.beta_hat, beta);
      rec.ttr = eval_ttr(fit.beta_hat, test, spec);
      rec.diverged = fit.diverged;
    }
  });
  return result;
}

void write_efficiency(std::ostream& out, const EfficiencyResult& result, std::uint64_t seed) {
  write_csv_header(out, "efficiency", seed);
  out << "record,method,alpha,n,trial,sob,ttr\n";
  for (const auto& r : result.records) {
    const Method& m = result.methods[r.method];
    out << "trial," << to_string(m.family) << ',' << fmt(alpha_column(m)) << ',' << r.n << ',' << r.trial << ','
        << fmt(r.sob) << ',' << fmt(r.ttr) << '\n';
  }
  for (std::size_t n : result.n_grid) {
    for (std::size_t mi = 0; mi < result.methods.size(); ++mi) {
      const Method& m = result.methods[mi];
      const MeanStd sob = mean_std(result.sob(n, mi));
      const MeanStd ttr = mean_std(result.ttr(n, mi));
      const std::string prefix = to_string(m.family) + "," + fmt(alpha_column(m)) + "," + std::to_string(n) + "," +
                                 std::to_string(result.trials) + ",";
      out << "mean," << prefix << fmt(sob.mean) << ',' << fmt(ttr.mean) << '\n';
      out << "std," << prefix << fmt(sob.std) << ',' << fmt(ttr.std) << '\n';
    }
  }
}

RobustnessResult run_robustness(const RobustnessConfig& cfg, std::uint64_t seed, unsigned threads) {
  const CovariateMeasure measure = CovariateMeasure::intercept_and_normal();
  const TrueParameter beta(cfg.beta);
  const std::vector<double> grid = cfg.x_c2_grid();
  const std::size_t methods = cfg.methods.size();
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);

  // Common random numbers across the sweep: the nominal rows, the contamination
  // draws and the test set depend on the trial only.
  std::vector<Dataset> tests;
  for (std::size_t t = 0; t < trials; ++t) {
    tests.push_back(sample_nominal(measure, beta, cfg.test_size, seed, stream_of(t, StreamRole::test_data)));
  }

  RobustnessResult result;
  result.methods = cfg.methods;
  result.trials = cfg.trials;
  const std::size_t cells = cfg.y_c.size() * grid.size() * trials;
  result.records.resize(cells * methods);

  parallel_for(cells, threads, [&](std::size_t cell) {
    const std::size_t trial = cell % trials;
    const std::size_t x_index = (cell / trials) % grid.size();
    const std::size_t y_index = cell / (trials * grid.size());
    const int y_c = cfg.y_c[y_index];
    const ContaminationSpec contamination(cfg.epsilon, {cfg.x_c1, grid[x_index]}, binary_label(y_c));
    const Dataset train =
        sample_contaminated(measure, beta, contamination, cfg.n, seed, stream_of(trial, StreamRole::train_data));
    const MarginDesign design = margin_design(train);
    OptimizerConfig opt = cfg.optimizer;
    opt.seed = seed;
    opt.trial = trial;
    for (std::size_t m = 0; m < methods; ++m) {
      const LossSpec spec = cfg.methods[m].spec(2);
      const FitResult fit = fit_linear(design, spec, opt, cfg.beta);
      RobustnessRecord& rec = result.records[cell * methods + m];
      rec.y_c = y_c;
      rec.x_c2 = grid[x_index];
      rec.trial = static_cast<int>(trial);
      rec.method = m;
      rec.sob = eval_sob(fit.beta_hat, beta);
      rec.ttr = eval_ttr(fit.beta_hat, tests[trial], spec);
      rec.diverged = fit.diverged;
    }
  });
  return result;
}

void write_robustness(std::ostream& out, const RobustnessResult& result, std::uint64_t seed) {
  write_csv_header(out, "robustness", seed);
  out << "record,y_c,x_c2,method,alpha,trial,sob,ttr\n";
  const std::size_t methods = result.methods.size();
  const std::size_t trials = static_cast<std::size_t>(result.trials);
  const std::size_t block = methods * trials;
  for (std::size_t start = 0; start < result.records.size(); start += block) {
    for (std::size_t i = start; i < start + block; ++i) {
      const auto& r = result.records[i];
      const Method& m = result.methods[r.method];
      out << "trial," << r.y_c << ',' << fmt(r.x_c2) << ',' << to_string(m.family) << ',' << fmt(alpha_column(m))
          << ',' << r.trial << ',' << fmt(r.sob) << ',' << fmt(r.ttr) << '\n';
    }
    for (std::size_t mi = 0; mi < methods; ++mi) {
      std::vector<double> sob, ttr;
      for (std::size_t t = 0; t < trials; ++t) {
        const auto& r = result.records[start + t * methods + mi];
        sob.push_back(r.sob);
        ttr.push_back(r.ttr);
      }
      const auto& first = result.records[start + mi];
      const Method& m = result.methods[mi];
      const MeanStd s = mean_std(sob);
      const MeanStd t = mean_std(ttr);
      const std::string prefix = std::to_string(first.y_c) + "," + fmt(first.x_c2) + "," + to_string(m.family) + "," +
                                 fmt(alpha_column(m)) + "," + std::to_string(trials) + ",";
      out << "mean," << prefix << fmt(s.mean) << ',' << fmt(t.mean) << '\n';
      out << "std," << prefix << fmt(s.std) << ',' << fmt(t.std) << '\n';
    }
  }
}

ClusterProblem make_cluster_problem(const MulticlassConfig& cfg, std::uint64_t seed) {
  ClusterProblem problem;
  problem.classes = cfg.classes;
  problem.dim = cfg.dim;
  problem.cluster_sd = cfg.cluster_sd;
  RandomStream rng(seed, 0, StreamRole::problem);
  problem.means.resize(static_cast<std::size_t>(cfg.classes) * cfg.dim);
  for (double& v : problem.means) v = cfg.separation * rng.normal();
  return problem;
}

Dataset sample_clusters(const ClusterProblem& problem, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  RandomStream rng(seed, stream);
  Dataset data(problem.dim, problem.classes);
  std::vector<double> x(problem.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(rng.below(static_cast<std::uint64_t>(problem.classes)));
    const double* mean = problem.means.data() + static_cast<std::size_t>(y) * problem.dim;
    for (std::size_t j = 0; j < problem.dim; ++j) x[j] = mean[j] + problem.cluster_sd * rng.normal();
    data.push_back(x, y);
  }
  return data;
}

MulticlassResult run_multiclass(const MulticlassConfig& cfg, std::uint64_t seed, unsigned threads) {
  const ClusterProblem problem = make_cluster_problem(cfg, seed);
  const std::size_t methods = cfg.methods.size();
  const std::size_t trials = static_cast<std::size_t>(cfg.trials);
  std::vector<Dataset> trains, tests;
  for (std::size_t t = 0; t < trials; ++t) {
    trains.push_back(sample_clusters(problem, cfg.n, seed, stream_of(t, StreamRole::train_data)));
    tests.push_back(sample_clusters(problem, cfg.test_size, seed, stream_of(t, StreamRole::test_data)));
  }
  NetworkArch arch;
  arch.input_dim = cfg.dim;
  arch.hidden = cfg.hidden;
  arch.classes = cfg.classes;
  arch.activation = cfg.activation;

  MulticlassResult result;
  result.methods = cfg.methods;
  result.trials = cfg.trials;
  result.records.resize(trials * methods);
  parallel_for(trials * methods, threads, [&](std::size_t cell) {
    const std::size_t trial = cell / methods;
    const std::size_t m = cell % methods;
    NetworkConfig net_cfg = cfg.network;
    net_cfg.seed = seed;
    net_cfg.trial = trial;
    const LossSpec spec = cfg.methods[m].spec(cfg.classes);
    const NetworkFit fit = fit_network(trains[trial], &tests[trial], spec, arch, net_cfg, cfg.msor_variant);

    std::size_t best_tsr = 0, best_ttr = 0;
    for (std::size_t e = 1; e < fit.history.size(); ++e) {
      if (fit.history[e].test.tsr < fit.history[best_tsr].test.tsr) best_tsr = e;
      if (fit.history[e].test.ttr < fit.history[best_ttr].test.ttr) best_ttr = e;
    }
    MulticlassRecord& rec = result.records[cell];
    rec.trial = static_cast<int>(trial);
    rec.method = m;
    rec.train = fit.history[best_tsr].train;
    rec.test = fit.history[best_tsr].test;
    rec.train.ttr = fit.history[best_ttr].train.ttr;
    rec.test.ttr = fit.history[best_ttr].test.ttr;
    rec.epoch_min_tsr = fit.history[best_tsr].epoch;
    rec.epoch_min_ttr = fit.history[best_ttr].epoch;
  });

  for (std::size_t ls = 0; ls < methods; ++ls) {
    if (cfg.methods[ls].family != Family::lslr) continue;
    for (std::size_t mls = 0; mls < methods; ++mls) {
      if (cfg.methods[mls].family != Family::mlslr || cfg.methods[mls].alpha != cfg.methods[ls].alpha) continue;
      std::vector<double> tsr_ls, tsr_mls, ttr_ls, ttr_mls;
      for (std::size_t t = 0; t < trials; ++t) {
        tsr_ls.push_back(result.records[t * methods + ls].test.tsr);
        ttr_ls.push_back(result.records[t * methods + ls].test.ttr);
        tsr_mls.push_back(result.records[t * methods + mls].test.tsr);
        ttr_mls.push_back(result.records[t * methods + mls].test.ttr);
      }
      result.comparisons.push_back(
          {cfg.methods[ls].alpha, rank_sum_p_less(tsr_mls, tsr_ls), rank_sum_p_less(ttr_mls, ttr_ls)});
    }
  }
  return result;
}

void write_multiclass(std::ostream& out, const MulticlassResult& result, std::uint64_t seed) {
  write_csv_header(out, "multiclass", seed);
  out << "record,method,alpha,trial,split,tsr,ttr,opder,oper,msor,epoch_min_tsr,epoch_min_ttr\n";
  const std::size_t methods = result.methods.size();
  const std::size_t trials = static_cast<std::size_t>(result.trials);
  auto row = [&](const std::string& record, const Method& m, const std::string& trial, const char* split,
                 const SplitMetrics& s, const std::string& epochs) {
    out << record << ',' << to_string(m.family) << ',' << fmt(alpha_column(m)) << ',' << trial << ',' << split << ','
        << fmt(s.tsr) << ',' << fmt(s.ttr) << ',' << fmt(s.deviation.opder) << ',' << fmt(s.deviation.oper) << ','
        << fmt(s.deviation.msor) << ',' << epochs << '\n';
  };
  for (const auto& r : result.records) {
    const Method& m = result.methods[r.method];
    const std::string epochs = std::to_string(r.epoch_min_tsr) + "," + std::to_string(r.epoch_min_ttr);
    row("trial", m, std::to_string(r.trial), "train", r.train, epochs);
    row("trial", m, std::to_string(r.trial), "test", r.test, epochs);
  }
  for (std::size_t mi = 0; mi < methods; ++mi) {
    for (const char* split : {"train", "test"}) {
      const bool is_train = std::string(split) == "train";
      std::vector<double> tsr, ttr, opder, oper, msor;
      for (std::size_t t = 0; t < trials; ++t) {
        const auto& r = result.records[t * methods + mi];
        const SplitMetrics& s = is_train ? r.train : r.test;
        tsr.push_back(s.tsr);
        ttr.push_back(s.ttr);
        opder.push_back(s.deviation.opder);
        oper.push_back(s.deviation.oper);
        msor.push_back(s.deviation.msor);
      }
      SplitMetrics mean, std;
      const MeanStd a = mean_std(tsr), b = mean_std(ttr), c = mean_std(opder), d = mean_std(oper), e = mean_std(msor);
      mean.tsr = a.mean, std.tsr = a.std;
      mean.ttr = b.mean, std.ttr = b.std;
      mean.deviation = {c.mean, d.mean, e.mean};
      std.deviation = {c.std, d.std, e.std};
      row("mean", result.methods[mi], std::to_string(trials), split, mean, ",");
      row("std", result.methods[mi], std::to_string(trials), split, std, ",");
    }
  }
  for (const auto& c : result.comparisons) {
    out << "ranksum_p,MLSLR<LSLR," << fmt(c.alpha) << ',' << trials << ",test," << fmt(c.p_tsr) << ','
        << fmt(c.p_ttr) << ",,,,,\n";
  }
}

std::vector<RhoCurvePoint> run_rho_curves(const RhoCurvesConfig& cfg) {
  std::vector<RhoSpec> specs{RhoSpec::bianco_yohai(cfg.c), RhoSpec::croux_haesbroeck(cfg.c)};
  for (double alpha : cfg.alphas) specs.push_back(RhoSpec::mls(alpha));
  specs.push_back(RhoSpec::lsq());
  const long long steps = std::llround(std::floor(cfg.u_max / cfg.u_step + 1e-9));
  std::vector<RhoCurvePoint> points;
  for (const auto& spec : specs) {
    for (long long i = 0; i <= steps; ++i) {
      const double u = std::round(static_cast<double>(i) * cfg.u_step * 1e12) / 1e12;
      points.push_back({spec.name(), spec.parameter(), u, rho_rescaled(spec, u)});
    }
  }
  return points;
}

void write_rho_curves(std::ostream& out, const std::vector<RhoCurvePoint>& points, std::uint64_t seed) {
  write_csv_header(out, "rho-curves", seed);
  out << "rho,parameter,u,rescaled\n";
  for (const auto& p : points) out << p.rho << ',' << fmt(p.parameter) << ',' << fmt(p.u) << ',' << fmt(p.value) << '\n';
}

std::vector<RlogitRangePoint> run_rlogit_range(const RlogitRangeConfig& cfg) {
  std::vector<RlogitRangePoint> points;
  for (int k : cfg.classes) {
    std::vector<double> alphas;
    for (int i = 0; i < cfg.points; ++i) alphas.push_back(static_cast<double>(i) / cfg.points);
    const double top = SmoothingLevel::upper_limit(k);
    for (int i = 1; i <= cfg.points; ++i) alphas.push_back(1.0 + (top - 1.0) * i / cfg.points);
    for (double alpha : alphas) {
      const RangeEnds ends = rlogit_range(SmoothingLevel(alpha, k));
      points.push_back({k, alpha, ends.low, ends.high});
    }
  }
  return points;
}

void write_rlogit_range(std::ostream& out, const std::vector<RlogitRangePoint>& points, std::uint64_t seed) {
  write_csv_header(out, "rlogit-range", seed);
  out << "k,alpha,low,high\n";
  for (const auto& p : points) out << p.k << ',' << fmt(p.alpha) << ',' << fmt(p.low) << ',' << fmt(p.high) << '\n';
}

}  // namespace smoothkl
