#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spikecal::selection {

struct MetricsReport {
    double rmse = 0.0;
    double me = 0.0;
    double r2 = 0.0;
    std::size_t n = 0;
};

/// RMSE uses the 1/n convention; ME is mean(predicted - actual).
/// Throws NumericalError when `actual` has zero variance (R^2 undefined).
MetricsReport evaluate(const Eigen::Ref<const Eigen::VectorXd>& predicted, const Eigen::Ref<const Eigen::VectorXd>& actual);

/// n ln(RMSE^2) + 2p + 2p(p+1)/(n-p-1).
double aicc(std::size_t n, std::size_t p, double rmse);

/// Sample count entering AICc for a calibration set of `calibration_size` rows
/// (lab plus synthetic when spiked).
inline std::size_t aicc_sample_count(std::size_t calibration_size) { return calibration_size; }

/// Leave-one-out predictions for a fixed component count.
Eigen::VectorXd loocv_predictions(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                                  std::size_t p);

/// Leave-one-out predictions for every p = 1..max_p; column p-1 holds count p.
/// Columns past the smallest achievable rank over all held-out fits are NaN.
Eigen::MatrixXd loocv_prediction_path(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                      const Eigen::Ref<const Eigen::VectorXd>& y, std::size_t max_p);

struct SelectionResult {
    std::size_t best_p = 0;
    std::map<std::size_t, double> aicc_by_p;
    std::map<std::size_t, double> rmse_cv_by_p;
    Eigen::VectorXd loocv_predictions_best;
    /// Human-readable reasons for every skipped component count.
    std::vector<std::string> warnings;
};

struct ComponentRange {
    std::size_t min_p = 1;
    std::size_t max_p = 15;
};

/// Argmin of LOOCV AICc over the range, ties to the smallest p. Infeasible p are
/// skipped with a warning; throws NumericalError when none is feasible.
SelectionResult select_components(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                                  ComponentRange range = {});

} // namespace spikecal::selection
