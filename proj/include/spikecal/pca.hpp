#pragma once

#include <Eigen/Dense>

namespace spikecal::pca {

struct PcaModel {
    Eigen::VectorXd mean;
    Eigen::MatrixXd loadings; // m x c, orthonormal columns
    Eigen::VectorXd explained_variance_ratio;
    /// Scores of the fitted rows.
    Eigen::MatrixXd training_scores;
};

/// Mean-centred SVD; ratio i = sigma_i^2 / sum of all sigma^2.
PcaModel fit_pca(const Eigen::Ref<const Eigen::MatrixXd>& x, std::size_t components);

/// (x - mean) * loadings
Eigen::MatrixXd project(const PcaModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x);

} // namespace spikecal::pca
