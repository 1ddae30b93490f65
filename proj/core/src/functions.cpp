#include "levelset/functions.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>

#include "csv_util.hpp"
#include "levelset/error.hpp"
#include "levelset/rng.hpp"

namespace levelset {

DomainBox DomainBox::cube(int dim, double lo, double hi) {
  return {Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi), Density::kUniform};
}

bool DomainBox::contains(const Eigen::VectorXd& x) const {
  return x.size() == lower.size() && (x.array() >= lower.array()).all() &&
         (x.array() <= upper.array()).all();
}

void DomainBox::validate() const {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw ConfigError("domain bounds must be nonempty and of equal length");
  }
  if (!(lower.array() < upper.array()).all()) {
    throw ConfigError("domain lower bounds must be strictly below upper bounds");
  }
}

std::string_view to_string(FunctionId id) {
  switch (id) {
    case FunctionId::kF1: return "f1";
    case FunctionId::kF2: return "f2";
    case FunctionId::kF3: return "f3";
    case FunctionId::kF4: return "f4";
    case FunctionId::kF5: return "f5";
  }
  return "unknown";
}

std::optional<FunctionId> function_id_from_string(std::string_view name) {
  for (auto id : {FunctionId::kF1, FunctionId::kF2, FunctionId::kF3, FunctionId::kF4,
                  FunctionId::kF5}) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

namespace {

using std::numbers::pi;

constexpr double kF5Offset = 1.0 / (1.2 * 1.2);

TestFunction make_f1() {
  return {"f1", 2, DomainBox::cube(2, 0.0, 1.0),
          [](const Eigen::VectorXd& x) { return 0.5 * std::sin(2.0 * pi * (x[0] + x[1])) + 1.0; },
          [](const Eigen::VectorXd& x) {
            const double c = pi * std::cos(2.0 * pi * (x[0] + x[1]));
            return Eigen::VectorXd(Eigen::Vector2d(c, c));
          }};
}

TestFunction make_f2() {
  return {"f2", 2, DomainBox::cube(2, 0.0, 1.0),
          [](const Eigen::VectorXd& x) {
            return std::exp(-(x[0] - 0.5) * (x[0] - 0.5) - x[1] * x[1]);
          },
          [](const Eigen::VectorXd& x) {
            const double e = std::exp(-(x[0] - 0.5) * (x[0] - 0.5) - x[1] * x[1]);
            return Eigen::VectorXd(Eigen::Vector2d(-2.0 * (x[0] - 0.5) * e, -2.0 * x[1] * e));
          }};
}

TestFunction make_f3() {
  return {"f3", 2, DomainBox::cube(2, -1.0, 1.0),
          [](const Eigen::VectorXd& x) {
            return x[0] * x[0] * x[0] + x[1] * x[1] * x[1] + 0.2 * x[0] + 0.6 * x[1];
          },
          [](const Eigen::VectorXd& x) {
            return Eigen::VectorXd(
                Eigen::Vector2d(3.0 * x[0] * x[0] + 0.2, 3.0 * x[1] * x[1] + 0.6));
          }};
}

TestFunction make_f4() {
  return {"f4", 20, DomainBox::cube(20, 0.0, 1.0),
          [](const Eigen::VectorXd& x) { return std::sin(x.squaredNorm()); },
          [](const Eigen::VectorXd& x) {
            return Eigen::VectorXd(2.0 * std::cos(x.squaredNorm()) * x);
          }};
}

TestFunction make_f5() {
  auto f5 = [](const Eigen::VectorXd& x) {
    return (kF5Offset + x.array().square()).inverse().prod();
  };
  return {"f5", 20, DomainBox::cube(20, 0.0, 1.0), f5, [f5](const Eigen::VectorXd& x) {
            const double v = f5(x);
            return Eigen::VectorXd(v * (-2.0 * x.array()) / (kF5Offset + x.array().square()));
          }};
}

std::mutex g_warning_mutex;
DomainWarning g_warning = [](const TestFunction& fn, const Eigen::VectorXd&) {
  std::cerr << "warning: " << fn.name << " evaluated outside its domain\n";
};

void check_input(const TestFunction& fn, const Eigen::VectorXd& x) {
  if (x.size() != fn.dim) {
    throw DimensionError(fn.name + " expects " + std::to_string(fn.dim) + " inputs, got " +
                         std::to_string(x.size()));
  }
  if (fn.domain.lower.size() == fn.dim && !fn.domain.contains(x)) {
    std::lock_guard lock(g_warning_mutex);
    if (g_warning) g_warning(fn, x);
  }
}

}  // namespace

TestFunction make_function(FunctionId id) {
  switch (id) {
    case FunctionId::kF1: return make_f1();
    case FunctionId::kF2: return make_f2();
    case FunctionId::kF3: return make_f3();
    case FunctionId::kF4: return make_f4();
    case FunctionId::kF5: return make_f5();
  }
  throw ConfigError("unknown function id");
}

void set_domain_warning(DomainWarning hook) {
  std::lock_guard lock(g_warning_mutex);
  g_warning = std::move(hook);
}

double evaluate(const TestFunction& fn, const Eigen::VectorXd& x) {
  check_input(fn, x);
  return fn.eval(x);
}

Eigen::VectorXd gradient(const TestFunction& fn, const Eigen::VectorXd& x) {
  check_input(fn, x);
  return fn.grad(x);
}

std::string_view to_string(SampleLayout layout) {
  return layout == SampleLayout::kGrid ? "grid" : "uniform_random";
}

SampleLayout sample_layout_from_string(std::string_view name) {
  if (name == "grid") return SampleLayout::kGrid;
  if (name == "uniform_random" || name == "uniform") return SampleLayout::kUniformRandom;
  throw ConfigError("unknown sample layout '" + std::string(name) + "'");
}

std::vector<Eigen::VectorXd> sample_points(const DomainBox& domain, std::size_t n,
                                           std::uint64_t seed, SampleLayout layout) {
  domain.validate();
  if (n == 0) throw ConfigError("sample count must be positive");
  const int d = domain.dim();
  std::vector<Eigen::VectorXd> points;
  points.reserve(n);

  if (layout == SampleLayout::kUniformRandom) {
    Rng rng(seed);
    for (std::size_t s = 0; s < n; ++s) {
      Eigen::VectorXd x(d);
      for (int i = 0; i < d; ++i) x[i] = rng.uniform(domain.lower[i], domain.upper[i]);
      points.push_back(std::move(x));
    }
    return points;
  }

  const auto per_axis =
      static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / d)));
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) total *= per_axis;
  if (per_axis < 2 || total != n) {
    throw ConfigError("grid layout needs n = k^" + std::to_string(d) + " with k >= 2, got " +
                      std::to_string(n));
  }
  std::vector<std::size_t> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t s = 0; s < n; ++s) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) {
      const double t = static_cast<double>(idx[static_cast<std::size_t>(i)]) /
                       static_cast<double>(per_axis - 1);
      x[i] = domain.lower[i] + t * (domain.upper[i] - domain.lower[i]);
    }
    points.push_back(std::move(x));
    for (int i = d - 1; i >= 0; --i) {
      if (++idx[static_cast<std::size_t>(i)] < per_axis) break;
      idx[static_cast<std::size_t>(i)] = 0;
    }
  }
  return points;
}

Dataset evaluate_dataset(const TestFunction& fn, const std::vector<Eigen::VectorXd>& points) {
  Dataset data;
  data.reserve(points.size());
  for (const auto& x : points) data.push_back({x, evaluate(fn, x), gradient(fn, x)});
  return data;
}

Dataset sample_dataset(const TestFunction& fn, std::size_t n, std::uint64_t seed,
                       SampleLayout layout) {
  return evaluate_dataset(fn, sample_points(fn.domain, n, seed, layout));
}

Dataset read_tabulated_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("dataset '" + path.string() + "' is empty");
  const auto header = detail::split_csv_line(line);
  if (header.size() < 3 || (header.size() - 1) % 2 != 0) {
    throw SchemaError("dataset header must be x_1..x_d,y,g_1..g_d");
  }
  const std::size_t d = (header.size() - 1) / 2;
  for (std::size_t i = 0; i < d; ++i) {
    if (header[i] != "x_" + std::to_string(i + 1) ||
        header[d + 1 + i] != "g_" + std::to_string(i + 1)) {
      throw SchemaError("dataset header must be x_1..x_d,y,g_1..g_d");
    }
  }
  if (header[d] != "y") throw SchemaError("dataset header must be x_1..x_d,y,g_1..g_d");

  Dataset data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw SchemaError("dataset '" + path.string() + "' line " + std::to_string(line_no) +
                        " has " + std::to_string(cells.size()) + " columns, expected " +
                        std::to_string(header.size()));
    }
    GradientSample s{Eigen::VectorXd(static_cast<Eigen::Index>(d)), 0.0,
                     Eigen::VectorXd(static_cast<Eigen::Index>(d))};
    for (std::size_t i = 0; i < d; ++i) {
      s.x[static_cast<Eigen::Index>(i)] = detail::parse_double(cells[i], line_no);
      s.grad[static_cast<Eigen::Index>(i)] = detail::parse_double(cells[d + 1 + i], line_no);
    }
    s.y = detail::parse_double(cells[d], line_no);
    data.push_back(std::move(s));
  }
  if (data.empty()) throw SchemaError("dataset '" + path.string() + "' has no rows");
  return data;
}

void write_tabulated_dataset(const Dataset& data, const std::filesystem::path& path) {
  if (data.empty()) throw ConfigError("cannot write an empty dataset");
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  const auto d = data.front().x.size();
  for (Eigen::Index i = 0; i < d; ++i) out << "x_" << i + 1 << ',';
  out << 'y';
  for (Eigen::Index i = 0; i < d; ++i) out << ",g_" << i + 1;
  out << '\n';
  for (const auto& s : data) {
    for (Eigen::Index i = 0; i < d; ++i) out << detail::format_double(s.x[i]) << ',';
    out << detail::format_double(s.y);
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << detail::format_double(s.grad[i]);
    out << '\n';
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

DomainBox bounding_box(const Dataset& data) {
  if (data.empty()) throw ConfigError("bounding box of an empty dataset");
  DomainBox box{data.front().x, data.front().x, Density::kUniform};
  for (const auto& s : data) {
    box.lower = box.lower.cwiseMin(s.x);
    box.upper = box.upper.cwiseMax(s.x);
  }
  return box;
}

}  // namespace levelset
