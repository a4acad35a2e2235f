#ifndef GSCP_SRC_ROBUST_FIT_HPP
#define GSCP_SRC_ROBUST_FIT_HPP

#include <Eigen/Dense>

#include "gscp/model_selection.hpp"

namespace gscp::detail {

/// Robust linear fit of y on the columns of x (pass an explicit intercept
/// column). Huber uses IRLS with the 1.345 tuning constant and MAD scale;
/// lad uses reweighting by 1/|residual|. Deterministic.
Eigen::VectorXd robust_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                           RobustRegression kind);

}  // namespace gscp::detail

#endif
