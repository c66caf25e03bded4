/*
 Copyright 2026 The cloudmpc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef CLOUDMPC_LINALG_HPP
#define CLOUDMPC_LINALG_HPP

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace cloudmpc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Trajectory = std::vector<Vector>;

/// Vector norm used throughout one experiment; every bound is stated in it.
enum class NormKind { One, Two, Inf };

NormKind parse_norm_kind(std::string_view name);
std::string to_string(NormKind kind);

double vector_norm(const Vector& v, NormKind kind);

/// Norm dual to `kind` (1 <-> inf, 2 <-> 2).
double dual_norm(const Vector& v, NormKind kind);

/// Operator norm of M induced by `kind` on both sides.
double induced_norm(const Matrix& M, NormKind kind);

/// Upper bound on sup ||M x||_2 over ||x||_kind <= 1 (exact for One and Two).
double induced_norm_to_euclidean(const Matrix& M, NormKind kind);

/// Symmetric PSD square root via eigendecomposition; negative eigenvalues are clamped.
Matrix psd_sqrt(const Matrix& S);

bool all_finite(const Vector& v);

} // namespace cloudmpc

#endif // CLOUDMPC_LINALG_HPP
