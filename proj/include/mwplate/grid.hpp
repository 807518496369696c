#pragma once

// Rectangular mid-plane grids, node fields and second-order finite differences.

#include "mwplate/linalg.hpp"

#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <type_traits>
#include <string>
#include <vector>

namespace mwplate {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Three-point stencil: f'(x_i) ~ sum_k weight[k] f(x_{index[k]}).
struct Stencil {
  std::array<int, 3> index;
  std::array<double, 3> weight;
};

/// Central in the interior, second-order one-sided at the two ends.
Stencil first_derivative_stencil(int i, int n, double spacing);

/// f''(x_i): compact three-point in the interior, (2, -5, 4, -1) / d^2 at the ends.
struct SecondStencil {
  std::array<int, 4> index;
  std::array<double, 4> weight;
};

SecondStencil second_derivative_stencil(int i, int n, double spacing);

/// Tensor grid on [lower, upper], node k = i + n1 * j.
class MidplaneGrid {
 public:
  static constexpr int min_nodes = 5;

  MidplaneGrid(const Vec2& lower, const Vec2& upper, int n1, int n2);
  /// The unit square (-1/2, 1/2)^2.
  static MidplaneGrid unit_square(int n);

  int n1() const { return n_[0]; }
  int n2() const { return n_[1]; }
  int nodes(int axis) const { return n_[axis]; }
  int size() const { return n_[0] * n_[1]; }
  double spacing(int axis) const { return spacing_[axis]; }
  const Vec2& lower() const { return lower_; }
  const Vec2& upper() const { return upper_; }
  double area() const { return (upper_ - lower_).prod(); }

  int index(int i, int j) const { return i + n_[0] * j; }
  int column(int k) const { return k % n_[0]; }
  int row(int k) const { return k / n_[0]; }
  Vec2 point(int k) const;

  /// At least `margin` nodes away from every edge.
  bool is_interior(int k, int margin = 1) const;
  bool in_mask(int k) const { return mask_.empty() || mask_[k]; }
  void set_mask(std::vector<bool> mask);
  const std::vector<bool>& mask() const { return mask_; }

  /// Tensor trapezoid weights (zero outside the mask).
  const Eigen::VectorXd& weights() const { return weights_; }
  /// Sparse first-derivative operator along axis 0 or 1.
  const SparseMatrix& derivative_operator(int axis) const { return D_[axis]; }
  /// Sparse pure second-derivative operator along axis 0 or 1.
  const SparseMatrix& second_derivative_operator(int axis) const { return DD_[axis]; }

  bool operator==(const MidplaneGrid& other) const;

 private:
  Vec2 lower_;
  Vec2 upper_;
  std::array<int, 2> n_;
  Vec2 spacing_;
  std::vector<bool> mask_;
  Eigen::VectorXd weights_;
  std::array<SparseMatrix, 2> D_;
  std::array<SparseMatrix, 2> DD_;

  void build_weights();
};

/// Node values of type T on a grid. Holds a reference: the grid must outlive the field.
template <typename T> class Field {
 public:
  Field() = default;
  explicit Field(const MidplaneGrid& grid, const T& fill = T{}) : grid_(&grid), values_(grid.size(), fill) {}
  Field(const MidplaneGrid& grid, std::vector<T> values) : grid_(&grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid.size()) {
      throw std::invalid_argument("Field: value count " + std::to_string(values_.size()) +
                                  " does not match node count " + std::to_string(grid.size()));
    }
  }

  template <typename Fn> static Field sample(const MidplaneGrid& grid, Fn&& fn) {
    std::vector<T> values(grid.size());
    for (int k = 0; k < grid.size(); ++k) values[k] = fn(grid.point(k));
    return Field(grid, std::move(values));
  }

  const MidplaneGrid& grid() const { return *grid_; }
  bool empty() const { return values_.empty(); }
  int size() const { return static_cast<int>(values_.size()); }
  const T& operator[](int k) const { return values_[k]; }
  T& operator[](int k) { return values_[k]; }
  const std::vector<T>& values() const { return values_; }

  template <typename Fn> auto map(Fn&& fn) const {
    using R = std::decay_t<decltype(fn(values_[0]))>;
    std::vector<R> out(values_.size());
    for (std::size_t k = 0; k < values_.size(); ++k) out[k] = fn(values_[k]);
    return Field<R>(*grid_, std::move(out));
  }

 private:
  const MidplaneGrid* grid_ = nullptr;
  std::vector<T> values_;
};

namespace detail {
template <typename T> T zero_like(const T& x) {
  if constexpr (std::is_arithmetic_v<T>) {
    return T(0);
  } else {
    return T::Zero(x.rows(), x.cols());
  }
}
}  // namespace detail

/// First derivative along one axis with the stencils of first_derivative_stencil.
template <typename T> Field<T> derivative(const Field<T>& f, int axis) {
  const MidplaneGrid& g = f.grid();
  std::vector<T> out(f.size());
  for (int k = 0; k < g.size(); ++k) {
    const int i = g.column(k), j = g.row(k);
    const int pos = axis == 0 ? i : j;
    const Stencil s = first_derivative_stencil(pos, g.nodes(axis), g.spacing(axis));
    T acc = detail::zero_like(f[k]);
    for (int m = 0; m < 3; ++m) {
      const int node = axis == 0 ? g.index(s.index[m], j) : g.index(i, s.index[m]);
      acc += s.weight[m] * f[node];
    }
    out[k] = acc;
  }
  return Field<T>(g, std::move(out));
}

/// Pure second derivative along one axis with second_derivative_stencil.
template <typename T> Field<T> second_derivative(const Field<T>& f, int axis) {
  const MidplaneGrid& g = f.grid();
  std::vector<T> out(f.size());
  for (int k = 0; k < g.size(); ++k) {
    const int i = g.column(k), j = g.row(k);
    const SecondStencil s = second_derivative_stencil(axis == 0 ? i : j, g.nodes(axis), g.spacing(axis));
    T acc = detail::zero_like(f[k]);
    for (int m = 0; m < 4; ++m) {
      if (s.weight[m] == 0.0) continue;
      const int node = axis == 0 ? g.index(s.index[m], j) : g.index(i, s.index[m]);
      acc += s.weight[m] * f[node];
    }
    out[k] = acc;
  }
  return Field<T>(g, std::move(out));
}

/// d11, d22 by second differences, d12 by repeated first differences.
template <typename T> struct SecondDerivatives {
  Field<T> d11, d12, d22;
};

template <typename T> SecondDerivatives<T> second_derivatives(const Field<T>& f) {
  return {second_derivative(f, 0), derivative(derivative(f, 0), 1), second_derivative(f, 1)};
}

Field<Vec2> gradient(const Field<double>& f);
Field<Mat2> hessian(const Field<double>& f);
/// Columns d1 y, d2 y.
Field<Mat32> gradient(const Field<Vec3>& f);
Field<Mat2> gradient(const Field<Vec2>& f);

/// Trapezoid quadrature of a scalar field.
double integrate(const Field<double>& f);
Vec3 integrate(const Field<Vec3>& f);

/// Writes x1,x2 followed by one column per component.
void write_field_csv(const std::string& path, const Field<double>& f, const std::string& name);
void write_field_csv(const std::string& path, const Field<Vec2>& f, const std::string& name);
void write_field_csv(const std::string& path, const Field<Vec3>& f, const std::string& name);
Field<double> read_scalar_csv(const std::string& path, const MidplaneGrid& grid);
Field<Vec3> read_vector_csv(const std::string& path, const MidplaneGrid& grid);

}  // namespace mwplate
