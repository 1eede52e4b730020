// Copyright 2026 The Aeroflow Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <Eigen/Dense>

#include "aeroflow/core/error.hpp"
#include "trainers.hpp"

namespace aeroflow::ml::detail {

// Minimizes ||y - Z w - b||^2 + lambda ||w||^2 over standardized columns Z.
// Z is centered, so the intercept decouples to mean(y) and w solves
// (Z'Z + lambda I) w = Z'(y - mean(y)).
TrainedModel train_ridge(const pipeline::Dataset& data, const Hyper& hyper) {
  check_trainable(data);
  if (!(hyper.ridge_lambda >= 0.0)) throw Error(ErrorCode::BadHyper, "ridge lambda must be >= 0");

  const auto n = static_cast<Eigen::Index>(data.rows);
  const auto d = static_cast<Eigen::Index>(data.cols);
  FeatureSchema schema = standardizing_schema(data);

  Eigen::MatrixXd Z(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index p = 0; p < n; ++p) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      Z(p, j) = (data.at(static_cast<std::size_t>(p), jj) - schema.means[jj]) / schema.scales[jj];
    }
    y(p) = data.y[static_cast<std::size_t>(p)];
  }
  const double y_mean = y.mean();
  const Eigen::VectorXd yc = y.array() - y_mean;

  Eigen::MatrixXd A = Z.transpose() * Z;
  A.diagonal().array() += hyper.ridge_lambda;
  const Eigen::VectorXd rhs = Z.transpose() * yc;

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  if (d > 0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-12);
    if (qr.rank() < d) {
      throw Error(ErrorCode::SingularSystem, "normal equations are rank deficient (rank " + std::to_string(qr.rank()) +
                                                 " of " + std::to_string(d) + "); use lambda > 0");
    }
    w = qr.solve(rhs);
  }

  RidgeParams params;
  params.lambda = hyper.ridge_lambda;
  params.weights.resize(static_cast<std::size_t>(d));
  double intercept = y_mean;
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto jj = static_cast<std::size_t>(j);
    params.weights[jj] = w(j) / schema.scales[jj];
    intercept -= params.weights[jj] * schema.means[jj];
  }
  params.intercept = intercept;

  TrainedModel m;
  m.kind = ModelKind::Ridge;
  m.schema = std::move(schema);
  m.params = std::move(params);
  m.meta = {data.rows, "", hyper.seed};
  return m;
}

}  // namespace aeroflow::ml::detail
