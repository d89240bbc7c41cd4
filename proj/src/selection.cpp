#include "spikecal/selection.hpp"

#include <cmath>
#include <limits>

#include "spikecal/errors.hpp"
#include "spikecal/pls.hpp"

namespace spikecal::selection {

MetricsReport evaluate(const Eigen::Ref<const Eigen::VectorXd>& predicted, const Eigen::Ref<const Eigen::VectorXd>& actual)
{
    if (predicted.size() != actual.size())
        throw DataError("metrics need equal lengths, got " + std::to_string(predicted.size()) + " and " +
                        std::to_string(actual.size()));
    if (actual.size() < 1)
        throw DataError("metrics need at least one sample");
    const double n = static_cast<double>(actual.size());
    const Eigen::VectorXd err = predicted - actual;
    const double ss_res = err.squaredNorm();
    const double ss_tot = (actual.array() - actual.mean()).square().sum();
    if (ss_tot == 0.0)
        throw NumericalError("R^2 undefined: measured values have zero variance");
    MetricsReport r;
    r.n = static_cast<std::size_t>(actual.size());
    r.rmse = std::sqrt(ss_res / n);
    r.me = err.sum() / n;
    r.r2 = 1.0 - ss_res / ss_tot;
    return r;
}

double aicc(std::size_t n, std::size_t p, double rmse)
{
    if (n <= p + 1)
        throw NumericalError("AICc undefined for n=" + std::to_string(n) + ", p=" + std::to_string(p) +
                             " (needs n > p + 1)");
    if (!(rmse > 0.0))
        throw NumericalError("AICc needs RMSE > 0");
    const double nn = static_cast<double>(n);
    const double pp = static_cast<double>(p);
    return nn * std::log(rmse * rmse) + 2.0 * pp + 2.0 * pp * (pp + 1.0) / (nn - pp - 1.0);
}

namespace {

Eigen::MatrixXd without_row(const Eigen::Ref<const Eigen::MatrixXd>& x, Eigen::Index i)
{
    Eigen::MatrixXd out(x.rows() - 1, x.cols());
    out.topRows(i) = x.topRows(i);
    out.bottomRows(x.rows() - 1 - i) = x.bottomRows(x.rows() - 1 - i);
    return out;
}

Eigen::VectorXd without_entry(const Eigen::Ref<const Eigen::VectorXd>& y, Eigen::Index i)
{
    Eigen::VectorXd out(y.size() - 1);
    out.head(i) = y.head(i);
    out.tail(y.size() - 1 - i) = y.tail(y.size() - 1 - i);
    return out;
}

} // namespace

Eigen::MatrixXd loocv_prediction_path(const Eigen::Ref<const Eigen::MatrixXd>& x,
                                      const Eigen::Ref<const Eigen::VectorXd>& y, std::size_t max_p)
{
    const auto n = x.rows();
    if (n < 3)
        throw DataError("LOOCV needs at least 3 samples, got " + std::to_string(n));
    if (y.size() != n)
        throw DataError("LOOCV got " + std::to_string(n) + " rows but " + std::to_string(y.size()) + " targets");
    Eigen::MatrixXd out =
        Eigen::MatrixXd::Constant(n, static_cast<Eigen::Index>(max_p), std::numeric_limits<double>::quiet_NaN());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::MatrixXd xi = without_row(x, i);
        const Eigen::VectorXd yi = without_entry(y, i);
        std::size_t cap = std::min<std::size_t>(max_p, std::min<std::size_t>(static_cast<std::size_t>(n - 2),
                                                                           static_cast<std::size_t>(x.cols())));
        if (cap == 0)
            continue;
        try {
            pls::NipalsPath path(xi, yi, cap);
            const Eigen::MatrixXd pr = path.predict_all(x.row(i));
            out.block(i, 0, 1, pr.cols()) = pr;
        } catch (const NumericalError&) {
            // zero-variance subset response: every p infeasible for this hold-out
        }
    }
    return out;
}

Eigen::VectorXd loocv_predictions(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                                  std::size_t p)
{
    if (p < 1)
        throw ConfigError("LOOCV needs p >= 1");
    const auto n = x.rows();
    if (n < 3)
        throw DataError("LOOCV needs at least 3 samples, got " + std::to_string(n));
    Eigen::VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        try {
            const auto model = pls::fit(without_row(x, i), without_entry(y, i), p);
            out(i) = pls::predict(model, x.row(i))(0);
        } catch (const NumericalError& e) {
            throw NumericalError("LOOCV fit without sample " + std::to_string(i) + " failed: " + e.what());
        }
    }
    return out;
}

SelectionResult select_components(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                                  ComponentRange range)
{
    if (range.min_p < 1 || range.max_p < range.min_p)
        throw ConfigError("component range must satisfy 1 <= min <= max");
    const Eigen::MatrixXd path = loocv_prediction_path(x, y, range.max_p);
    const std::size_t n = aicc_sample_count(static_cast<std::size_t>(x.rows()));

    SelectionResult res;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = range.min_p; p <= range.max_p; ++p) {
        const auto col = path.col(static_cast<Eigen::Index>(p - 1));
        if (!col.allFinite()) {
            res.warnings.push_back("p=" + std::to_string(p) + " skipped: not achievable in every leave-one-out fit");
            continue;
        }
        const double rmse = std::sqrt((col - y).squaredNorm() / static_cast<double>(y.size()));
        if (n <= p + 1 || !(rmse > 0.0)) {
            res.warnings.push_back("p=" + std::to_string(p) + " skipped: AICc undefined");
            continue;
        }
        const double a = aicc(n, p, rmse);
        res.aicc_by_p[p] = a;
        res.rmse_cv_by_p[p] = rmse;
        if (a < best) {
            best = a;
            res.best_p = p;
        }
    }
    if (res.best_p == 0)
        throw NumericalError("no feasible PLS component count in " + std::to_string(range.min_p) + ".." +
                             std::to_string(range.max_p));
    res.loocv_predictions_best = path.col(static_cast<Eigen::Index>(res.best_p - 1));
    return res;
}

} // namespace spikecal::selection
