#include "qfh/moments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include "json.hpp"

#include "qfh/error.hpp"

namespace qfh {

Axis Axis::uniform(double lo, double hi, std::size_t count) {
  if (!(hi > lo) || count < 2)
    throw InvalidArgument("uniform axis needs hi > lo and at least 2 nodes");
  std::vector<double> nodes(count);
  const double h = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) nodes[i] = lo + h * static_cast<double>(i);
  nodes.back() = hi;
  Axis a;
  a.nodes = std::move(nodes);
  a.weights.assign(count, h);
  a.weights.front() = a.weights.back() = 0.5 * h;
  return a;
}

Axis Axis::from_nodes(std::vector<double> nodes) {
  if (nodes.size() < 2) throw InvalidArgument("axis needs at least 2 nodes");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1]))
      throw InvalidArgument("axis nodes must be strictly increasing");
  Axis a;
  a.weights.assign(nodes.size(), 0.0);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const double h = nodes[i] - nodes[i - 1];
    a.weights[i - 1] += 0.5 * h;
    a.weights[i] += 0.5 * h;
  }
  a.nodes = std::move(nodes);
  return a;
}

Axis Axis::gauss_hermite(std::size_t count, double center, double scale) {
  if (count < 2 || !(scale > 0.0))
    throw InvalidArgument("Gauss-Hermite rule needs >= 2 nodes and scale > 0");
  // Golub–Welsch on the Hermite Jacobi matrix.
  const auto n = static_cast<Eigen::Index>(count);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double b = std::sqrt(static_cast<double>(k) / 2.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Axis a;
  a.nodes.resize(count);
  a.weights.resize(count);
  const double log_sqrt_pi = 0.5 * std::log(M_PI);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    const auto k = static_cast<std::size_t>(i);
    a.nodes[k] = center + scale * x;
    a.weights[k] = scale * std::exp(log_sqrt_pi + 2.0 * std::log(std::abs(v0)) + x * x);
  }
  return a;
}

VelocityGrid::VelocityGrid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.size() != 1 && axes_.size() != 3)
    throw InvalidArgument("velocity grid dimension must be 1 or 3");
  for (const auto& a : axes_) {
    if (a.nodes.size() < min_nodes)
      throw InvalidArgument("velocity grid needs at least 8 nodes per axis");
    if (a.weights.size() != a.nodes.size())
      throw InvalidArgument("axis weights and nodes differ in length");
    for (std::size_t i = 1; i < a.nodes.size(); ++i)
      if (!(a.nodes[i] > a.nodes[i - 1]))
        throw InvalidArgument("axis nodes must be strictly increasing");
    for (double w : a.weights)
      if (!(w > 0.0)) throw InvalidArgument("axis weights must be positive");
  }
}

std::size_t VelocityGrid::size() const {
  std::size_t s = 1;
  for (const auto& a : axes_) s *= a.size();
  return s;
}

void VelocityGrid::unflatten(std::size_t flat, std::size_t* idx) const {
  for (int d = dim() - 1; d >= 0; --d) {
    const auto n = axes_[static_cast<std::size_t>(d)].size();
    idx[d] = flat % n;
    flat /= n;
  }
}

Tensor::Tensor(int dim, int rank) : dim_(dim), rank_(rank) {
  std::size_t n = 1;
  for (int r = 0; r < rank; ++r) n *= static_cast<std::size_t>(dim);
  data_.assign(n, 0.0);
}

std::size_t Tensor::offset(std::span<const int> idx) const {
  std::size_t off = 0;
  for (int i : idx) off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
  return off;
}

namespace {

using Tuple = std::array<int, 4>;

// Non-decreasing index tuples of length `rank` over `dim` indices.
std::vector<Tuple> sorted_tuples(int dim, int rank) {
  std::vector<Tuple> out;
  Tuple t{};
  auto rec = [&](auto&& self, int pos, int start) -> void {
    if (pos == rank) {
      out.push_back(t);
      return;
    }
    for (int i = start; i < dim; ++i) {
      t[static_cast<std::size_t>(pos)] = i;
      self(self, pos + 1, i);
    }
  };
  rec(rec, 0, 0);
  return out;
}

// Writes `value` to every permutation of the sorted tuple.
void scatter(Tensor& T, Tuple t, double value) {
  const int r = T.rank();
  std::sort(t.begin(), t.begin() + r);
  do {
    T.at(std::span<const int>(t.data(), static_cast<std::size_t>(r))) = value;
  } while (std::next_permutation(t.begin(), t.begin() + r));
}

const char* axis_name(int dim, int i) {
  static const char* names3[] = {"x", "y", "z"};
  return dim == 1 ? "x" : names3[i];
}

std::string component_name(const char* base, int dim, const Tuple& t, int rank) {
  std::string s = base;
  s += '_';
  for (int r = 0; r < rank; ++r) s += axis_name(dim, t[static_cast<std::size_t>(r)]);
  return s;
}

}  // namespace

MomentSet compute_moments(std::span<const double> f, const VelocityGrid& grid,
                          const MomentOptions& opts) {
  const int d = grid.dim();
  const std::size_t total = grid.size();
  if (f.size() != total)
    throw InvalidArgument("tabulated distribution size does not match the grid");
  if (!(opts.mass > 0.0)) throw InvalidArgument("mass must be positive");

  MomentSet out;
  out.dim = d;

  std::vector<double> W(total);
  std::vector<std::array<double, 3>> V(total);
  std::array<std::size_t, 3> idx{};
  double max_all = 0.0, max_boundary = 0.0, abs_mass = 0.0;
  for (std::size_t k = 0; k < total; ++k) {
    grid.unflatten(k, idx.data());
    double w = 1.0;
    bool on_boundary = false;
    for (int a = 0; a < d; ++a) {
      const auto& ax = grid.axis(a);
      const auto i = idx[static_cast<std::size_t>(a)];
      w *= ax.weights[i];
      V[k][static_cast<std::size_t>(a)] = ax.nodes[i];
      on_boundary = on_boundary || i == 0 || i + 1 == ax.size();
    }
    W[k] = w;
    const double af = std::abs(f[k]);
    if (!std::isfinite(af)) throw NumericalError("tabulated distribution has a non-finite value");
    max_all = std::max(max_all, af);
    if (on_boundary) max_boundary = std::max(max_boundary, af);
    abs_mass += w * af;
  }

  double n = 0.0;
  std::array<double, 3> flux{};
  for (std::size_t k = 0; k < total; ++k) {
    const double wf = W[k] * f[k];
    n += wf;
    for (int a = 0; a < d; ++a) flux[static_cast<std::size_t>(a)] += wf * V[k][static_cast<std::size_t>(a)];
  }
  if (!(n > 1e-14 * abs_mass) || n <= 0.0)
    throw NumericalError("density is not positive; mean velocity undefined");
  out.n = n;
  out.u.resize(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) out.u[static_cast<std::size_t>(a)] = flux[static_cast<std::size_t>(a)] / n;

  out.boundary_ratio = max_all > 0.0 ? max_boundary / max_all : 0.0;
  out.boundary_decay_violated = out.boundary_ratio >= opts.decay_threshold;

  out.P = Tensor(d, 2);
  out.Q = Tensor(d, 3);
  out.R = Tensor(d, 4);
  Tensor* targets[] = {&out.P, &out.Q, &out.R};
  for (int rank = 2; rank <= 4; ++rank) {
    const auto tuples = sorted_tuples(d, rank);
    std::vector<double> acc(tuples.size(), 0.0);
    for (std::size_t k = 0; k < total; ++k) {
      const double wf = W[k] * f[k];
      std::array<double, 3> c{};
      for (int a = 0; a < d; ++a)
        c[static_cast<std::size_t>(a)] = V[k][static_cast<std::size_t>(a)] - out.u[static_cast<std::size_t>(a)];
      for (std::size_t t = 0; t < tuples.size(); ++t) {
        double prod = wf;
        for (int r = 0; r < rank; ++r) prod *= c[static_cast<std::size_t>(tuples[t][static_cast<std::size_t>(r)])];
        acc[t] += prod;
      }
    }
    for (std::size_t t = 0; t < tuples.size(); ++t)
      scatter(*targets[rank - 2], tuples[t], opts.mass * acc[t]);
  }

  const auto red = scalar_reductions(out);
  out.p = red.p;
  out.q = red.q;
  return out;
}

ScalarReductions scalar_reductions(const MomentSet& mset) {
  const int d = mset.dim;
  ScalarReductions r;
  if (d == 1) {
    r.p = mset.P(0, 0);
  } else {
    r.p = (mset.P(0, 0) + mset.P(1, 1) + mset.P(2, 2)) / 3.0;
  }
  r.q.assign(static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += mset.Q(j, j, i);
    r.q[static_cast<std::size_t>(i)] = 0.5 * s;
  }
  return r;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  return cells;
}

double to_double(const std::string& s, int lineno) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw ConfigError("distribution CSV line " + std::to_string(lineno) +
                      ": '" + s + "' is not a number");
  return v;
}

}  // namespace

TabulatedDistribution load_distribution_csv(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  int d = 0;
  if (header == std::vector<std::string>{"v", "f"}) d = 1;
  else if (header == std::vector<std::string>{"vx", "vy", "vz", "f"}) d = 3;
  else throw ConfigError("distribution CSV header must be 'v,f' or 'vx,vy,vz,f'");

  std::vector<std::array<double, 4>> rows;
  std::array<std::vector<double>, 3> values;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (cells.size() != static_cast<std::size_t>(d + 1))
      throw ConfigError("distribution CSV line " + std::to_string(lineno) +
                        ": expected " + std::to_string(d + 1) + " columns");
    std::array<double, 4> r{};
    for (int c = 0; c <= d; ++c) r[static_cast<std::size_t>(c)] = to_double(cells[static_cast<std::size_t>(c)], lineno);
    for (int a = 0; a < d; ++a) values[static_cast<std::size_t>(a)].push_back(r[static_cast<std::size_t>(a)]);
    rows.push_back(r);
  }

  std::vector<Axis> axes;
  std::array<std::map<double, std::size_t>, 3> lookup;
  for (int a = 0; a < d; ++a) {
    auto& v = values[static_cast<std::size_t>(a)];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    for (std::size_t i = 0; i < v.size(); ++i) lookup[static_cast<std::size_t>(a)][v[i]] = i;
    axes.push_back(Axis::from_nodes(v));
  }
  VelocityGrid grid(std::move(axes));
  std::vector<double> f(grid.size(), 0.0);
  std::vector<char> seen(grid.size(), 0);
  for (const auto& r : rows) {
    std::size_t flat = 0;
    for (int a = 0; a < d; ++a)
      flat = flat * grid.axis(a).size() + lookup[static_cast<std::size_t>(a)].at(r[static_cast<std::size_t>(a)]);
    if (seen[flat]) throw ConfigError("distribution CSV repeats a velocity node");
    seen[flat] = 1;
    f[flat] = r[static_cast<std::size_t>(d)];
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw ConfigError("distribution CSV does not cover the full velocity tensor grid");
  return {std::move(grid), std::move(f)};
}

TabulatedDistribution load_distribution_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open distribution file '" + path + "'");
  return load_distribution_csv(in);
}

namespace {

template <class Emit>
void for_each_component(const MomentSet& m, Emit&& emit) {
  const int d = m.dim;
  emit(std::string("n"), m.n);
  for (int i = 0; i < d; ++i) emit(std::string("u_") + axis_name(d, i), m.u[static_cast<std::size_t>(i)]);
  const Tensor* tensors[] = {&m.P, &m.Q, &m.R};
  const char* names[] = {"P", "Q", "R"};
  for (int rank = 2; rank <= 4; ++rank)
    for (const auto& t : sorted_tuples(d, rank))
      emit(component_name(names[rank - 2], d, t, rank),
           tensors[rank - 2]->at(std::span<const int>(t.data(), static_cast<std::size_t>(rank))));
  emit(std::string("p"), m.p);
  for (int i = 0; i < d; ++i) emit(std::string("q_") + axis_name(d, i), m.q[static_cast<std::size_t>(i)]);
}

}  // namespace

void write_moments_csv(std::ostream& out, const MomentSet& mset) {
  out << "component,value\n";
  out << std::scientific << std::setprecision(16);
  for_each_component(mset, [&](const std::string& name, double v) { out << name << ',' << v << '\n'; });
}

std::vector<std::pair<std::string, double>> moment_components(const MomentSet& mset) {
  std::vector<std::pair<std::string, double>> out;
  for_each_component(mset, [&](const std::string& name, double v) { out.emplace_back(name, v); });
  return out;
}

std::string moments_to_json(const MomentSet& mset) {
  nlohmann::ordered_json j;
  j["dim"] = mset.dim;
  for_each_component(mset, [&](const std::string& name, double v) { j[name] = v; });
  j["boundary_decay_violated"] = mset.boundary_decay_violated;
  j["boundary_ratio"] = mset.boundary_ratio;
  return j.dump(2);
}

}  // namespace qfh
