#include "spikecal/pca.hpp"

#include <string>

#include "spikecal/errors.hpp"

namespace spikecal::pca {

PcaModel fit_pca(const Eigen::Ref<const Eigen::MatrixXd>& x, std::size_t components)
{
    const auto n = x.rows();
    const auto m = x.cols();
    if (n < 2)
        throw DataError("PCA needs at least 2 samples");
    const auto limit = static_cast<std::size_t>(std::min<Eigen::Index>(n - 1, m));
    if (components < 1 || components > limit)
        throw ConfigError("PCA components must lie in 1.." + std::to_string(limit) + ", got " +
                          std::to_string(components));

    PcaModel model;
    model.mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd xc = x.rowwise() - model.mean.transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd s2 = svd.singularValues().array().square();
    const double total = s2.sum();
    if (total == 0.0)
        throw NumericalError("PCA input has zero variance");
    const auto c = static_cast<Eigen::Index>(components);
    model.loadings = svd.matrixV().leftCols(c);
    model.explained_variance_ratio = s2.head(c) / total;
    model.training_scores = xc * model.loadings;
    return model;
}

Eigen::MatrixXd project(const PcaModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x)
{
    if (x.cols() != model.mean.size())
        throw DataError("PCA projection expects " + std::to_string(model.mean.size()) + " features, got " +
                        std::to_string(x.cols()));
    return (x.rowwise() - model.mean.transpose()) * model.loadings;
}

} // namespace spikecal::pca
