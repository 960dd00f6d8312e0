#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace rdde {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Which second-level lift the areas of a rough path follow.
enum class Convention { Ito, Stratonovich };

inline const char* to_string(Convention c) {
  return c == Convention::Ito ? "ito" : "stratonovich";
}

}  // namespace rdde
