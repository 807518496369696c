#include "mwplate/grid.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace mwplate {

Stencil first_derivative_stencil(int i, int n, double spacing) {
  const double r = 1.0 / (2.0 * spacing);
  if (i == 0) return {{0, 1, 2}, {-3.0 * r, 4.0 * r, -r}};
  if (i == n - 1) return {{n - 1, n - 2, n - 3}, {3.0 * r, -4.0 * r, r}};
  return {{i - 1, i, i + 1}, {-r, 0.0, r}};
}

SecondStencil second_derivative_stencil(int i, int n, double spacing) {
  const double r = 1.0 / (spacing * spacing);
  if (i == 0) return {{0, 1, 2, 3}, {2.0 * r, -5.0 * r, 4.0 * r, -r}};
  if (i == n - 1) return {{n - 1, n - 2, n - 3, n - 4}, {2.0 * r, -5.0 * r, 4.0 * r, -r}};
  return {{i - 1, i, i + 1, i}, {r, -2.0 * r, r, 0.0}};
}

MidplaneGrid::MidplaneGrid(const Vec2& lower, const Vec2& upper, int n1, int n2)
    : lower_(lower), upper_(upper), n_{n1, n2} {
  if (n1 < min_nodes || n2 < min_nodes) {
    throw std::invalid_argument("MidplaneGrid: need at least " + std::to_string(min_nodes) +
                                " nodes per axis, got " + std::to_string(n1) + "x" +
                                std::to_string(n2));
  }
  if (!((upper - lower).minCoeff() > 0.0)) {
    throw std::invalid_argument("MidplaneGrid: upper bounds must exceed lower bounds");
  }
  spacing_ = Vec2((upper(0) - lower(0)) / (n1 - 1), (upper(1) - lower(1)) / (n2 - 1));
  build_weights();

  for (int axis = 0; axis < 2; ++axis) {
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(3 * size());
    for (int k = 0; k < size(); ++k) {
      const int i = column(k), j = row(k);
      const Stencil s = first_derivative_stencil(axis == 0 ? i : j, n_[axis], spacing_(axis));
      for (int m = 0; m < 3; ++m) {
        if (s.weight[m] == 0.0) continue;
        const int node = axis == 0 ? index(s.index[m], j) : index(i, s.index[m]);
        entries.emplace_back(k, node, s.weight[m]);
      }
    }
    D_[axis].resize(size(), size());
    D_[axis].setFromTriplets(entries.begin(), entries.end());

    entries.clear();
    for (int k = 0; k < size(); ++k) {
      const int i = column(k), j = row(k);
      const SecondStencil s = second_derivative_stencil(axis == 0 ? i : j, n_[axis], spacing_(axis));
      for (int m = 0; m < 4; ++m) {
        if (s.weight[m] == 0.0) continue;
        const int node = axis == 0 ? index(s.index[m], j) : index(i, s.index[m]);
        entries.emplace_back(k, node, s.weight[m]);
      }
    }
    DD_[axis].resize(size(), size());
    DD_[axis].setFromTriplets(entries.begin(), entries.end());
  }
}

MidplaneGrid MidplaneGrid::unit_square(int n) {
  return MidplaneGrid(Vec2(-0.5, -0.5), Vec2(0.5, 0.5), n, n);
}

Vec2 MidplaneGrid::point(int k) const {
  return Vec2(lower_(0) + column(k) * spacing_(0), lower_(1) + row(k) * spacing_(1));
}

bool MidplaneGrid::is_interior(int k, int margin) const {
  const int i = column(k), j = row(k);
  return i >= margin && j >= margin && i < n_[0] - margin && j < n_[1] - margin;
}

void MidplaneGrid::set_mask(std::vector<bool> mask) {
  if (!mask.empty() && static_cast<int>(mask.size()) != size()) {
    throw std::invalid_argument("MidplaneGrid: mask size does not match node count");
  }
  mask_ = std::move(mask);
  build_weights();
}

void MidplaneGrid::build_weights() {
  weights_.resize(size());
  for (int k = 0; k < size(); ++k) {
    const int i = column(k), j = row(k);
    const double w1 = (i == 0 || i == n_[0] - 1) ? 0.5 : 1.0;
    const double w2 = (j == 0 || j == n_[1] - 1) ? 0.5 : 1.0;
    weights_(k) = in_mask(k) ? w1 * w2 * spacing_(0) * spacing_(1) : 0.0;
  }
}

bool MidplaneGrid::operator==(const MidplaneGrid& other) const {
  return lower_ == other.lower_ && upper_ == other.upper_ && n_ == other.n_ && mask_ == other.mask_;
}

Field<Vec2> gradient(const Field<double>& f) {
  const Field<double> d1 = derivative(f, 0), d2 = derivative(f, 1);
  std::vector<Vec2> out(f.size());
  for (int k = 0; k < f.size(); ++k) out[k] = Vec2(d1[k], d2[k]);
  return Field<Vec2>(f.grid(), std::move(out));
}

Field<Mat2> hessian(const Field<double>& f) {
  const auto s = second_derivatives(f);
  std::vector<Mat2> out(f.size());
  for (int k = 0; k < f.size(); ++k) out[k] << s.d11[k], s.d12[k], s.d12[k], s.d22[k];
  return Field<Mat2>(f.grid(), std::move(out));
}

Field<Mat32> gradient(const Field<Vec3>& f) {
  const Field<Vec3> d1 = derivative(f, 0), d2 = derivative(f, 1);
  std::vector<Mat32> out(f.size());
  for (int k = 0; k < f.size(); ++k) {
    out[k].col(0) = d1[k];
    out[k].col(1) = d2[k];
  }
  return Field<Mat32>(f.grid(), std::move(out));
}

Field<Mat2> gradient(const Field<Vec2>& f) {
  const Field<Vec2> d1 = derivative(f, 0), d2 = derivative(f, 1);
  std::vector<Mat2> out(f.size());
  for (int k = 0; k < f.size(); ++k) {
    out[k].col(0) = d1[k];
    out[k].col(1) = d2[k];
  }
  return Field<Mat2>(f.grid(), std::move(out));
}

double integrate(const Field<double>& f) {
  const Eigen::VectorXd& w = f.grid().weights();
  double acc = 0.0;
  for (int k = 0; k < f.size(); ++k) acc += w(k) * f[k];
  return acc;
}

Vec3 integrate(const Field<Vec3>& f) {
  const Eigen::VectorXd& w = f.grid().weights();
  Vec3 acc = Vec3::Zero();
  for (int k = 0; k < f.size(); ++k) acc += w(k) * f[k];
  return acc;
}

namespace {

template <typename T, int N>
void write_components(const std::string& path, const Field<T>& f, const std::string& name,
                      const std::function<double(const T&, int)>& component) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << std::setprecision(17) << "x1,x2";
  for (int c = 0; c < N; ++c) out << "," << name << (N > 1 ? std::to_string(c + 1) : "");
  out << "\n";
  for (int k = 0; k < f.size(); ++k) {
    const Vec2 x = f.grid().point(k);
    out << x(0) << "," << x(1);
    for (int c = 0; c < N; ++c) out << "," << component(f[k], c);
    out << "\n";
  }
}

std::vector<std::vector<double>> read_rows(const std::string& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != columns) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(columns) + " columns");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int locate(const MidplaneGrid& grid, double x1, double x2) {
  const int i = static_cast<int>(std::lround((x1 - grid.lower()(0)) / grid.spacing(0)));
  const int j = static_cast<int>(std::lround((x2 - grid.lower()(1)) / grid.spacing(1)));
  if (i < 0 || j < 0 || i >= grid.n1() || j >= grid.n2()) {
    throw std::runtime_error("sample point outside grid");
  }
  const int k = grid.index(i, j);
  if ((grid.point(k) - Vec2(x1, x2)).norm() > 1e-6 * grid.spacing(0)) {
    throw std::runtime_error("sample point does not coincide with a grid node");
  }
  return k;
}

}  // namespace

void write_field_csv(const std::string& path, const Field<double>& f, const std::string& name) {
  write_components<double, 1>(path, f, name, [](const double& v, int) { return v; });
}

void write_field_csv(const std::string& path, const Field<Vec2>& f, const std::string& name) {
  write_components<Vec2, 2>(path, f, name, [](const Vec2& v, int c) { return v(c); });
}

void write_field_csv(const std::string& path, const Field<Vec3>& f, const std::string& name) {
  write_components<Vec3, 3>(path, f, name, [](const Vec3& v, int c) { return v(c); });
}

Field<double> read_scalar_csv(const std::string& path, const MidplaneGrid& grid) {
  const auto rows = read_rows(path, 3);
  if (static_cast<int>(rows.size()) != grid.size()) {
    throw std::runtime_error(path + ": " + std::to_string(rows.size()) + " samples for " +
                             std::to_string(grid.size()) + " nodes");
  }
  Field<double> f(grid, std::numeric_limits<double>::quiet_NaN());
  for (const auto& r : rows) f[locate(grid, r[0], r[1])] = r[2];
  return f;
}

Field<Vec3> read_vector_csv(const std::string& path, const MidplaneGrid& grid) {
  const auto rows = read_rows(path, 5);
  if (static_cast<int>(rows.size()) != grid.size()) {
    throw std::runtime_error(path + ": " + std::to_string(rows.size()) + " samples for " +
                             std::to_string(grid.size()) + " nodes");
  }
  Field<Vec3> f(grid, Vec3::Constant(std::numeric_limits<double>::quiet_NaN()));
  for (const auto& r : rows) f[locate(grid, r[0], r[1])] = Vec3(r[2], r[3], r[4]);
  return f;
}

}  // namespace mwplate
