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
#include "cloudmpc/linalg.hpp"

#include "cloudmpc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cloudmpc {

NormKind parse_norm_kind(std::string_view name)
{
    if (name == "one" || name == "1") return NormKind::One;
    if (name == "two" || name == "2") return NormKind::Two;
    if (name == "inf" || name == "infinity") return NormKind::Inf;
    throw ConfigError("unknown norm kind '" + std::string(name) + "' (expected one, two or inf)");
}

std::string to_string(NormKind kind)
{
    switch (kind) {
    case NormKind::One: return "one";
    case NormKind::Two: return "two";
    case NormKind::Inf: return "inf";
    }
    return "two";
}

double vector_norm(const Vector& v, NormKind kind)
{
    if (v.size() == 0) return 0.0;
    switch (kind) {
    case NormKind::One: return v.lpNorm<1>();
    case NormKind::Two: return v.norm();
    case NormKind::Inf: return v.lpNorm<Eigen::Infinity>();
    }
    return v.norm();
}

double dual_norm(const Vector& v, NormKind kind)
{
    switch (kind) {
    case NormKind::One: return vector_norm(v, NormKind::Inf);
    case NormKind::Two: return vector_norm(v, NormKind::Two);
    case NormKind::Inf: return vector_norm(v, NormKind::One);
    }
    return v.norm();
}

double induced_norm(const Matrix& M, NormKind kind)
{
    if (M.size() == 0) return 0.0;
    switch (kind) {
    case NormKind::One: return M.cwiseAbs().colwise().sum().maxCoeff();
    case NormKind::Inf: return M.cwiseAbs().rowwise().sum().maxCoeff();
    case NormKind::Two: {
        Eigen::JacobiSVD<Matrix> svd(M);
        return svd.singularValues()(0);
    }
    }
    return 0.0;
}

double induced_norm_to_euclidean(const Matrix& M, NormKind kind)
{
    if (M.size() == 0) return 0.0;
    switch (kind) {
    case NormKind::One: return M.colwise().norm().maxCoeff();
    case NormKind::Two: return induced_norm(M, NormKind::Two);
    case NormKind::Inf: return M.colwise().norm().sum();
    }
    return 0.0;
}

Matrix psd_sqrt(const Matrix& S)
{
    if (S.rows() != S.cols()) throw ConfigError("psd_sqrt: matrix is not square");
    if (S.size() == 0) return S;
    const bool diagonal = (S - Matrix(S.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
    if (diagonal) {
        if (S.diagonal().minCoeff() < 0.0) throw ConfigError("weight matrix has a negative diagonal entry");
        return S.diagonal().cwiseSqrt().asDiagonal();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (S + S.transpose()));
    if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff()))
        throw ConfigError("weight matrix is not positive semidefinite");
    const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

bool all_finite(const Vector& v)
{
    return v.allFinite();
}

} // namespace cloudmpc
