/*
 * Copyright 2026 The RethinkNet Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef RETHINK_TENSOR_HPP_
#define RETHINK_TENSOR_HPP_

#include <Eigen/Core>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <utility>

namespace rethink {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense row-major 2-D array of doubles.
///
/// Thin value wrapper around an Eigen row-major matrix. Arithmetic goes
/// through `mat()`; the wrapper adds shape checks and a flat view of the
/// storage for optimizers, serialization and gradient checking.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0);
  explicit Tensor(Matrix m) : m_(std::move(m)) {}

  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor identity(std::size_t n);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(m_.cols()); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(m_.size()); }
  bool empty() const noexcept { return m_.size() == 0; }

  double& operator()(std::size_t r, std::size_t c) { return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)); }
  double operator()(std::size_t r, std::size_t c) const { return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)); }

  std::span<double> values() noexcept { return {m_.data(), size()}; }
  std::span<const double> values() const noexcept { return {m_.data(), size()}; }

  Matrix& mat() noexcept { return m_; }
  const Matrix& mat() const noexcept { return m_; }

  bool all_finite() const noexcept { return m_.allFinite(); }
  bool same_shape(const Tensor& other) const noexcept {
    return m_.rows() == other.m_.rows() && m_.cols() == other.m_.cols();
  }
  void fill(double v) { m_.setConstant(v); }

  /// Exact element-wise equality (shape included).
  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.same_shape(b) && (a.m_.array() == b.m_.array()).all();
  }

 private:
  Matrix m_;
};

/// Throws DimensionError unless `a` and `b` have the same shape.
void require_same_shape(const Tensor& a, const Tensor& b, std::string_view what);
/// Throws DimensionError unless `t` is rows x cols.
void require_shape(const Tensor& t, std::size_t rows, std::size_t cols, std::string_view what);

}  // namespace rethink

#endif  // RETHINK_TENSOR_HPP_
