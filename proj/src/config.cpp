#include "smoothkl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "smoothkl/errors.hpp"
#include "smoothkl/numfmt.hpp"

namespace smoothkl {

namespace {

const std::string kDefaults = R"ini([general]
seed = 20240101
threads = 0

[are_table]
betas = 0:1, 0:2, 0:4, 1:1, 1:2, 1:4, 2:1, 2:2, 2:4
methods = MLSLR:0.2, MLSLR:0.4, MLSLR:0.6, MLSLR:0.8, LSQLR
nodes = 200

[efficiency]
beta = 0:2
n = 25, 50, 100, 200, 400, 800
test_size = 10000
trials = 100
methods = LR, MLSLR:0.2, MLSLR:0.4, MLSLR:0.6, MLSLR:0.8, LSQLR
learning_rate = 0.01
decay_factor = 0.31622776601683794
decay_every = 50
epochs = 150
multistart = 0
scatter_sd = 1
divergence_cap = 1000

[robustness]
beta = 1:4
epsilon = 0.05
x_c1 = 1
x_c2_from = -10
x_c2_to = 10
x_c2_step = 0.1
y_c = 1, -1
n = 10000
test_size = 10000
trials = 1
methods = LR, MLSLR:0.2, MLSLR:0.4, MLSLR:0.6, MLSLR:0.8, LSQLR
learning_rate = 0.01
decay_factor = 0.31622776601683794
decay_every = 50
epochs = 150
multistart = 0
scatter_sd = 1
divergence_cap = 1000

[multiclass]
classes = 10
dim = 20
n = 10000
test_size = 10000
trials = 20
separation = 1
cluster_sd = 1.3
hidden = 32
activation = relu
methods = LR, LSLR:0.2, LSLR:0.4, LSLR:0.6, LSLR:0.8, MLSLR:0.2, MLSLR:0.4, MLSLR:0.6, MLSLR:0.8, LSLR:9.2/9, LSLR:9.6/9, LSLR:10/9, MLSLR:9.2/9, MLSLR:9.6/9, MLSLR:10/9, LSQLR
learning_rate = 0.001
decay_factor = 0.31622776601683794
decay_every = 10
epochs = 30
batch_size = 128
msor_variant = as_printed

[rho_curves]
c = 0.5
alphas = 0.2, 0.4, 0.6, 0.8
u_max = 10
u_step = 0.01

[rlogit_range]
classes = 10
points = 100
)ini";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Plain decimal or a ratio "a/b".
double parse_real(const std::string& text, const std::string& key) {
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return parse_number(text);
    const double num = parse_number(text.substr(0, slash));
    const double den = parse_number(text.substr(slash + 1));
    if (den == 0.0) throw std::invalid_argument("zero denominator");
    return num / den;
  } catch (const std::invalid_argument&) {
    throw ConfigError("invalid number '" + text + "' for " + key);
  }
}

long long parse_int(const std::string& text, const std::string& key) {
  try {
    return parse_integer(text);
  } catch (const std::invalid_argument&) {
    throw ConfigError("invalid integer '" + text + "' for " + key);
  }
}

std::vector<double> parse_reals(const std::string& text, const std::string& key, char sep = ',') {
  std::vector<double> out;
  for (const auto& item : split(text, sep)) out.push_back(parse_real(item, key));
  if (out.empty()) throw ConfigError(key + " must not be empty");
  return out;
}

std::vector<double> parse_vector(const std::string& text, const std::string& key) {
  return parse_reals(text, key, ':');
}

template <typename T>
T positive_int(const std::string& text, const std::string& key) {
  const long long v = parse_int(text, key);
  if (v < 1) throw ConfigError(key + " must be at least 1");
  return static_cast<T>(v);
}

using Section = std::map<std::string, std::string>;
using Ini = std::map<std::string, Section>;

Ini read_ini(std::istream& in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message());
  }
  Ini ini;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' outside of a section");
    for (const auto& [key, value] : body) ini[section][key] = trim(value.data());
  }
  return ini;
}

void check_keys(const Ini& defaults, const Ini& user) {
  for (const auto& [section, body] : user) {
    const auto it = defaults.find(section);
    if (it == defaults.end()) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }
}

OptimizerConfig optimizer_from(const Section& s, const std::string& name) {
  OptimizerConfig opt;
  opt.learning_rate_init = parse_real(s.at("learning_rate"), name + ".learning_rate");
  opt.decay_factor = parse_real(s.at("decay_factor"), name + ".decay_factor");
  opt.decay_every_epochs = positive_int<int>(s.at("decay_every"), name + ".decay_every");
  opt.epochs = positive_int<int>(s.at("epochs"), name + ".epochs");
  const long long starts = parse_int(s.at("multistart"), name + ".multistart");
  if (starts < 0) throw ConfigError(name + ".multistart must be nonnegative");
  opt.multistart = static_cast<int>(starts);
  opt.multistart_scatter_sd = parse_real(s.at("scatter_sd"), name + ".scatter_sd");
  opt.divergence_cap = parse_real(s.at("divergence_cap"), name + ".divergence_cap");
  opt.validate();
  return opt;
}

std::vector<Method> methods_for(const std::string& text, int k, const std::string& key) {
  std::vector<Method> methods;
  try {
    methods = parse_methods(text);
    for (const auto& m : methods) (void)m.spec(k);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
  if (methods.empty()) throw ConfigError(key + " must not be empty");
  return methods;
}

ExperimentConfig build(const Ini& ini) {
  ExperimentConfig cfg;
  const Section& g = ini.at("general");
  const long long seed = parse_int(g.at("seed"), "general.seed");
  if (seed < 0) throw ConfigError("general.seed must be nonnegative");
  cfg.seed = static_cast<std::uint64_t>(seed);
  const long long threads = parse_int(g.at("threads"), "general.threads");
  if (threads < 0) throw ConfigError("general.threads must be nonnegative");
  cfg.threads = static_cast<unsigned>(threads);

  const Section& a = ini.at("are_table");
  for (const auto& item : split(a.at("betas"), ',')) cfg.are_table.betas.push_back(parse_vector(item, "are_table.betas"));
  if (cfg.are_table.betas.empty()) throw ConfigError("are_table.betas must not be empty");
  cfg.are_table.methods = methods_for(a.at("methods"), 2, "are_table.methods");
  cfg.are_table.nodes = positive_int<int>(a.at("nodes"), "are_table.nodes");
  if (cfg.are_table.nodes < 10) throw ConfigError("are_table.nodes must be at least 10");
  for (const auto& b : cfg.are_table.betas) {
    if (b.size() != 2) throw ConfigError("are_table.betas entries need two coordinates");
  }

  const Section& e = ini.at("efficiency");
  cfg.efficiency.beta = parse_vector(e.at("beta"), "efficiency.beta");
  if (cfg.efficiency.beta.size() != 2) throw ConfigError("efficiency.beta needs two coordinates");
  for (const auto& item : split(e.at("n"), ',')) cfg.efficiency.n_grid.push_back(positive_int<std::size_t>(item, "efficiency.n"));
  if (cfg.efficiency.n_grid.empty()) throw ConfigError("efficiency.n must not be empty");
  cfg.efficiency.test_size = positive_int<std::size_t>(e.at("test_size"), "efficiency.test_size");
  cfg.efficiency.trials = positive_int<int>(e.at("trials"), "efficiency.trials");
  cfg.efficiency.methods = methods_for(e.at("methods"), 2, "efficiency.methods");
  cfg.efficiency.optimizer = optimizer_from(e, "efficiency");

  const Section& r = ini.at("robustness");
  auto& rob = cfg.robustness;
  rob.beta = parse_vector(r.at("beta"), "robustness.beta");
  if (rob.beta.size() != 2) throw ConfigError("robustness.beta needs two coordinates");
  rob.epsilon = parse_real(r.at("epsilon"), "robustness.epsilon");
  if (!(rob.epsilon >= 0.0 && rob.epsilon < 1.0)) throw ConfigError("robustness.epsilon must lie in [0, 1)");
  rob.x_c1 = parse_real(r.at("x_c1"), "robustness.x_c1");
  rob.x_c2_from = parse_real(r.at("x_c2_from"), "robustness.x_c2_from");
  rob.x_c2_to = parse_real(r.at("x_c2_to"), "robustness.x_c2_to");
  rob.x_c2_step = parse_real(r.at("x_c2_step"), "robustness.x_c2_step");
  if (!(rob.x_c2_step > 0.0) || rob.x_c2_to < rob.x_c2_from) throw ConfigError("robustness x_c2 grid is empty");
  for (const auto& item : split(r.at("y_c"), ',')) {
    const long long y = parse_int(item, "robustness.y_c");
    if (y != 1 && y != -1) throw ConfigError("robustness.y_c entries must be 1 or -1");
    rob.y_c.push_back(static_cast<int>(y));
  }
  if (rob.y_c.empty()) throw ConfigError("robustness.y_c must not be empty");
  rob.n = positive_int<std::size_t>(r.at("n"), "robustness.n");
  rob.test_size = positive_int<std::size_t>(r.at("test_size"), "robustness.test_size");
  rob.trials = positive_int<int>(r.at("trials"), "robustness.trials");
  rob.methods = methods_for(r.at("methods"), 2, "robustness.methods");
  rob.optimizer = optimizer_from(r, "robustness");

  const Section& m = ini.at("multiclass");
  auto& mc = cfg.multiclass;
  mc.classes = positive_int<int>(m.at("classes"), "multiclass.classes");
  if (mc.classes < 2) throw ConfigError("multiclass.classes must be at least 2");
  mc.dim = positive_int<std::size_t>(m.at("dim"), "multiclass.dim");
  mc.n = positive_int<std::size_t>(m.at("n"), "multiclass.n");
  mc.test_size = positive_int<std::size_t>(m.at("test_size"), "multiclass.test_size");
  mc.trials = positive_int<int>(m.at("trials"), "multiclass.trials");
  mc.separation = parse_real(m.at("separation"), "multiclass.separation");
  mc.cluster_sd = parse_real(m.at("cluster_sd"), "multiclass.cluster_sd");
  if (!(mc.separation > 0.0) || !(mc.cluster_sd > 0.0)) throw ConfigError("multiclass cluster scales must be positive");
  for (const auto& item : split(m.at("hidden"), ',')) mc.hidden.push_back(positive_int<std::size_t>(item, "multiclass.hidden"));
  if (mc.hidden.empty()) throw ConfigError("multiclass.hidden needs at least one hidden layer");
  mc.activation = activation_from_string(m.at("activation"));
  mc.methods = methods_for(m.at("methods"), mc.classes, "multiclass.methods");
  mc.network.learning_rate_init = parse_real(m.at("learning_rate"), "multiclass.learning_rate");
  mc.network.decay_factor = parse_real(m.at("decay_factor"), "multiclass.decay_factor");
  mc.network.decay_every_epochs = positive_int<int>(m.at("decay_every"), "multiclass.decay_every");
  mc.network.epochs = positive_int<int>(m.at("epochs"), "multiclass.epochs");
  mc.network.batch_size = positive_int<std::size_t>(m.at("batch_size"), "multiclass.batch_size");
  mc.network.validate();
  const std::string variant = m.at("msor_variant");
  if (variant == "as_printed") {
    mc.msor_variant = MsorVariant::as_printed;
  } else if (variant == "conditional_mean") {
    mc.msor_variant = MsorVariant::conditional_mean;
  } else {
    throw ConfigError("multiclass.msor_variant must be as_printed or conditional_mean");
  }

  const Section& rc = ini.at("rho_curves");
  cfg.rho_curves.c = parse_real(rc.at("c"), "rho_curves.c");
  if (!(cfg.rho_curves.c > 0.0)) throw ConfigError("rho_curves.c must be positive");
  cfg.rho_curves.alphas = parse_reals(rc.at("alphas"), "rho_curves.alphas");
  for (double alpha : cfg.rho_curves.alphas) {
    try {
      (void)RhoSpec::mls(alpha);
    } catch (const std::exception& ex) {
      throw ConfigError(std::string("rho_curves.alphas: ") + ex.what());
    }
  }
  cfg.rho_curves.u_max = parse_real(rc.at("u_max"), "rho_curves.u_max");
  cfg.rho_curves.u_step = parse_real(rc.at("u_step"), "rho_curves.u_step");
  if (!(cfg.rho_curves.u_max > 0.0) || !(cfg.rho_curves.u_step > 0.0)) throw ConfigError("rho_curves grid must be positive");

  const Section& rl = ini.at("rlogit_range");
  for (const auto& item : split(rl.at("classes"), ',')) {
    const int k = positive_int<int>(item, "rlogit_range.classes");
    if (k < 2) throw ConfigError("rlogit_range.classes entries must be at least 2");
    cfg.rlogit_range.classes.push_back(k);
  }
  if (cfg.rlogit_range.classes.empty()) throw ConfigError("rlogit_range.classes must not be empty");
  cfg.rlogit_range.points = positive_int<int>(rl.at("points"), "rlogit_range.points");
  return cfg;
}

Ini default_ini() {
  std::istringstream in(kDefaults);
  return read_ini(in);
}

}  // namespace

std::string Method::label() const {
  if (family == Family::lr || family == Family::lsqlr) return to_string(family);
  return to_string(family) + ":" + format_number(alpha);
}

Method parse_method(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.empty() || parts.size() > 2) throw ConfigError("invalid method '" + text + "'");
  Method m;
  try {
    m.family = family_from_string(parts[0]);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const bool smoothed = m.family == Family::lslr || m.family == Family::mlslr;
  if (smoothed != (parts.size() == 2)) {
    throw ConfigError("method '" + text + "' " + (smoothed ? "needs a smoothing level" : "takes no smoothing level"));
  }
  if (smoothed) m.alpha = parse_real(parts[1], "method '" + text + "'");
  return m;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_method(item));
  return out;
}

std::vector<double> RobustnessConfig::x_c2_grid() const {
  std::vector<double> grid;
  const long long count = std::llround(std::floor((x_c2_to - x_c2_from) / x_c2_step + 1e-9));
  for (long long i = 0; i <= count; ++i) {
    // Rounded to 12 decimals so the grid prints as its nominal values.
    grid.push_back(std::round((x_c2_from + static_cast<double>(i) * x_c2_step) * 1e12) / 1e12);
  }
  return grid;
}

const std::string& default_config_text() {
  return kDefaults;
}

ExperimentConfig default_config() {
  return build(default_ini());
}

ExperimentConfig load_config(std::istream& in) {
  Ini ini = default_ini();
  const Ini user = read_ini(in);
  check_keys(ini, user);
  for (const auto& [section, body] : user) {
    for (const auto& [key, value] : body) ini[section][key] = value;
  }
  return build(ini);
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return load_config(in);
}

}  // namespace smoothkl
