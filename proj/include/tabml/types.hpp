#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace tabml {

// Dense numeric substrate. Rows are samples, columns are features.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Class labels as indices into an ordered class roster.
using Labels = std::vector<int>;

}  // namespace tabml
