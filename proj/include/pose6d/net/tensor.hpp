#pragma once

#include <Eigen/Core>

#include <numeric>
#include <vector>

#include "pose6d/core/error.hpp"

namespace pose6d {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixMap = Eigen::Map<RowMatrix>;
using ConstRowMatrixMap = Eigen::Map<const RowMatrix>;

/// Dense value with a shape, flattened row-major. Everything the network
/// touches is one of these; image feature maps travel as (H*W) x C.
struct Tensor {
  std::vector<int> shape;
  Eigen::ArrayXd data;

  Tensor() = default;
  Tensor(std::vector<int> s, Eigen::ArrayXd d) : shape(std::move(s)), data(std::move(d)) {
    if (numel() != static_cast<int>(data.size()))
      throw InvalidArgumentError("tensor: data length does not match shape");
  }

  static Tensor zeros(std::vector<int> s) {
    const int n = std::accumulate(s.begin(), s.end(), 1, std::multiplies<int>());
    return Tensor(std::move(s), Eigen::ArrayXd::Zero(n));
  }
  static Tensor scalar(double v) {
    Eigen::ArrayXd d(1);
    d[0] = v;
    return Tensor({1}, d);
  }
  static Tensor from_matrix(const Eigen::MatrixXd& m) {
    Tensor t = zeros({static_cast<int>(m.rows()), static_cast<int>(m.cols())});
    t.matrix() = m;
    return t;
  }

  int numel() const {
    return std::accumulate(shape.begin(), shape.end(), 1, std::multiplies<int>());
  }
  int rank() const { return static_cast<int>(shape.size()); }
  int rows() const { return shape.at(0); }
  int cols() const { return shape.at(1); }

  /// 2D row-major view (requires rank 2).
  RowMatrixMap matrix() {
    if (rank() != 2) throw InvalidArgumentError("tensor: matrix view needs rank 2");
    return RowMatrixMap(data.data(), shape[0], shape[1]);
  }
  ConstRowMatrixMap matrix() const {
    if (rank() != 2) throw InvalidArgumentError("tensor: matrix view needs rank 2");
    return ConstRowMatrixMap(data.data(), shape[0], shape[1]);
  }

  double& at(int r, int c) { return data[r * shape[1] + c]; }
  double at(int r, int c) const { return data[r * shape[1] + c]; }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

}  // namespace pose6d
