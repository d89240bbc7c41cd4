#pragma once

#include <filesystem>
#include <optional>

#include <Eigen/Dense>

#include "spikecal/spectra.hpp"

namespace spikecal::pls {

/// Single-response PLS model on mean-centred predictors (no scaling).
struct PlsModel {
    Eigen::VectorXd x_mean;
    double y_mean = 0.0;
    Eigen::MatrixXd weights;    // m x p
    Eigen::MatrixXd x_loadings; // m x p
    Eigen::VectorXd y_loadings; // p
    Eigen::VectorXd regression_coefficients;
    std::size_t n_components = 0;
    /// Grid of the training spectra, when known; checked on prediction from CSV.
    std::optional<WavelengthGrid> grid;

    std::size_t n_features() const { return static_cast<std::size_t>(x_mean.size()); }
};

/// NIPALS components up to a maximum, stopping early when the residual is exhausted.
/// The first q columns are exactly the q-component model for every q <= achieved().
class NipalsPath {
public:
    NipalsPath(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
               std::size_t max_components);

    std::size_t achieved() const { return achieved_; }
    /// Coefficients of the q-component model, q in 1..achieved().
    Eigen::VectorXd coefficients(std::size_t q) const;
    PlsModel model(std::size_t q) const;
    /// Predictions of every q = 1..achieved() for the rows of `x` (q-th column = q components).
    Eigen::MatrixXd predict_all(const Eigen::Ref<const Eigen::MatrixXd>& x) const;

private:
    Eigen::VectorXd x_mean_;
    double y_mean_ = 0.0;
    Eigen::MatrixXd w_, p_;
    Eigen::VectorXd q_;
    std::size_t achieved_ = 0;
};

/// Throws NumericalError when fewer than p components are achievable, naming the achieved rank.
PlsModel fit(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
             std::size_t p);

Eigen::VectorXd predict(const PlsModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x);

/// Score vectors of the training data, one column per component.
Eigen::MatrixXd training_scores(const PlsModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x);

/// Sectioned CSV: `section,<name>` lines followed by comma-separated rows.
void save_model(const std::filesystem::path& path, const PlsModel& model);
PlsModel load_model(const std::filesystem::path& path);

} // namespace spikecal::pls
