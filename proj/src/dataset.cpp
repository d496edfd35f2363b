#include "smoothkl/dataset.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "smoothkl/numfmt.hpp"
#include "smoothkl/random.hpp"

namespace smoothkl {

Dataset::Dataset(std::size_t d, int k) : d_(d), k_(k) {
  if (d == 0) throw std::invalid_argument("dataset needs at least one covariate");
  if (k < 2) throw std::invalid_argument("dataset needs at least two classes");
}

Dataset::Dataset(std::size_t d, int k, std::vector<double> x, std::vector<int> y) : Dataset(d, k) {
  if (x.size() != y.size() * d) throw std::invalid_argument("feature matrix does not match label count");
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("covariates must be finite");
  }
  for (int label : y) {
    if (label < 0 || label >= k) throw std::invalid_argument("label out of range");
  }
  x_ = std::move(x);
  y_ = std::move(y);
}

void Dataset::push_back(std::span<const double> x, int y) {
  if (x.size() != d_) throw std::invalid_argument("row has wrong dimension");
  if (y < 0 || y >= k_) throw std::invalid_argument("label out of range");
  x_.insert(x_.end(), x.begin(), x.end());
  y_.push_back(y);
}

MarginDesign margin_design(const Dataset& data) {
  if (data.classes() != 2) throw std::invalid_argument("margin design needs binary labels");
  MarginDesign design;
  design.n = data.size();
  design.d = data.dim();
  design.columns.resize(design.n * design.d);
  design.signs.resize(design.n);
  for (std::size_t i = 0; i < design.n; ++i) {
    const auto x = data.row(i);
    for (std::size_t j = 0; j < design.d; ++j) design.columns[j * design.n + i] = x[j];
    design.signs[i] = binary_sign(data.label(i));
  }
  return design;
}

ContaminationSpec::ContaminationSpec(double epsilon, std::vector<double> x_c, int y_c)
    : epsilon_(epsilon), x_c_(std::move(x_c)), y_c_(y_c) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) throw std::invalid_argument("contamination ratio must lie in [0, 1)");
  if (x_c_.empty()) throw std::invalid_argument("contamination point is empty");
  for (double v : x_c_) {
    if (!std::isfinite(v)) throw std::invalid_argument("contamination point must be finite");
  }
  if (y_c != 0 && y_c != 1) throw std::invalid_argument("contamination label must be binary");
}

namespace {

constexpr std::uint64_t kContaminationBit = 1ull << 63;

void draw_nominal_row(const CovariateMeasure& measure, const TrueParameter& beta, RandomStream& rng,
                      std::vector<double>& x, int& y) {
  double eta = 0.0;
  for (std::size_t j = 0; j < measure.dim(); ++j) {
    const auto& c = measure.coords()[j];
    x[j] = std::holds_alternative<PointMass>(c) ? std::get<PointMass>(c).value : rng.normal();
    eta += beta[j] * x[j];
  }
  const double p = eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
  y = rng.uniform() < p ? 0 : 1;
}

}  // namespace

Dataset sample_nominal(const CovariateMeasure& measure, const TrueParameter& beta, std::size_t n,
                       std::uint64_t seed, std::uint64_t stream) {
  if (beta.dim() != measure.dim()) throw std::invalid_argument("parameter and covariate dimensions differ");
  Dataset data(measure.dim(), 2);
  RandomStream rng(seed, stream);
  std::vector<double> x(measure.dim());
  int y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    draw_nominal_row(measure, beta, rng, x, y);
    data.push_back(x, y);
  }
  return data;
}

Dataset sample_contaminated(const CovariateMeasure& measure, const TrueParameter& beta,
                            const ContaminationSpec& spec, std::size_t n, std::uint64_t seed,
                            std::uint64_t stream) {
  if (beta.dim() != measure.dim()) throw std::invalid_argument("parameter and covariate dimensions differ");
  if (spec.x().size() != measure.dim()) throw std::invalid_argument("contamination point has wrong dimension");
  Dataset data(measure.dim(), 2);
  RandomStream rng(seed, stream);
  RandomStream coin(seed, stream | kContaminationBit);
  std::vector<double> x(measure.dim());
  int y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    draw_nominal_row(measure, beta, rng, x, y);
    if (coin.uniform() < spec.epsilon()) {
      data.push_back(spec.x(), spec.y());
    } else {
      data.push_back(x, y);
    }
  }
  return data;
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t j = 0; j < data.dim(); ++j) out << 'x' << (j + 1) << ',';
  out << "y\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.row(i)) out << format_number(v) << ',';
    out << (data.label(i) + 1) << '\n';
  }
}

Dataset read_csv(std::istream& in, int k) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty dataset CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::size_t columns = 1;
  for (char c : line) columns += (c == ',');
  if (columns < 2) throw std::invalid_argument("dataset CSV needs at least one covariate column");
  std::istringstream header(line);
  std::string cell;
  for (std::size_t j = 0; j < columns; ++j) {
    std::getline(header, cell, ',');
    const std::string expected = j + 1 == columns ? "y" : "x" + std::to_string(j + 1);
    if (cell != expected) throw std::invalid_argument("unexpected CSV header cell '" + cell + "'");
  }

  const std::size_t d = columns - 1;
  std::vector<double> x;
  std::vector<int> y;
  int max_label = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::getline(row, cell, ',')) throw std::invalid_argument("short row at line " + std::to_string(line_no));
      x.push_back(parse_number(cell));
    }
    if (!std::getline(row, cell)) throw std::invalid_argument("missing label at line " + std::to_string(line_no));
    const long long label = parse_integer(cell);
    if (label < 1) throw std::invalid_argument("labels are 1-based (line " + std::to_string(line_no) + ")");
    y.push_back(static_cast<int>(label - 1));
    max_label = std::max(max_label, static_cast<int>(label));
  }
  if (k == 0) k = std::max(max_label, 2);
  return Dataset(d, k, std::move(x), std::move(y));
}

}  // namespace smoothkl
