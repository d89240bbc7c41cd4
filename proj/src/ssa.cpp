#include "spikecal/ssa.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "spikecal/errors.hpp"

namespace spikecal::ssa {

void SsaConfig::validate(std::size_t n) const
{
    if (window_len < 2 || window_len > n / 2)
        throw ConfigError("ssa.window_len must satisfy 2 <= L <= n/2 (n=" + std::to_string(n) +
                          "), got " + std::to_string(window_len));
    if (energy_threshold) {
        if (!(*energy_threshold > 0.0 && *energy_threshold <= 1.0))
            throw ConfigError("ssa.energy_threshold must lie in (0, 1]");
    } else if (rank < 1 || rank > window_len) {
        throw ConfigError("ssa.rank must satisfy 1 <= r <= L, got " + std::to_string(rank));
    }
}

Eigen::MatrixXd trajectory_matrix(std::span<const double> series, std::size_t window)
{
    const auto L = static_cast<Eigen::Index>(window);
    const auto K = static_cast<Eigen::Index>(series.size() - window + 1);
    Eigen::MatrixXd x(L, K);
    for (Eigen::Index j = 0; j < K; ++j)
        for (Eigen::Index i = 0; i < L; ++i)
            x(i, j) = series[static_cast<std::size_t>(i + j)];
    return x;
}

SsaDecomposition decompose(std::span<const double> series, std::size_t window)
{
    const std::size_t n = series.size();
    if (n < 4)
        throw DataError("SSA needs a series of length >= 4, got " + std::to_string(n));
    if (window < 2 || window > n / 2)
        throw DataError("SSA window must satisfy 2 <= L <= n/2 (n=" + std::to_string(n) + "), got " +
                        std::to_string(window));
    for (double v : series)
        if (!std::isfinite(v))
            throw DataError("SSA input contains a non-finite value");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(trajectory_matrix(series, window),
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    SsaDecomposition dec;
    dec.singular_values = svd.singularValues();
    dec.left_vectors = svd.matrixU();
    dec.right_vectors = svd.matrixV();
    dec.series_length = n;
    return dec;
}

std::vector<double> reconstruct(const SsaDecomposition& dec, std::span<const std::size_t> components)
{
    if (components.empty())
        throw DataError("SSA reconstruction needs at least one component");
    const auto L = dec.left_vectors.rows();
    const auto K = dec.right_vectors.rows();

    // Sum of selected elementary matrices, U_sel * diag(s) * V_sel^T.
    Eigen::MatrixXd us(L, static_cast<Eigen::Index>(components.size()));
    Eigen::MatrixXd vs(K, static_cast<Eigen::Index>(components.size()));
    for (std::size_t c = 0; c < components.size(); ++c) {
        const std::size_t idx = components[c];
        if (idx < 1 || idx > dec.components())
            throw DataError("SSA component index " + std::to_string(idx) + " outside 1.." +
                            std::to_string(dec.components()));
        const auto col = static_cast<Eigen::Index>(idx - 1);
        us.col(static_cast<Eigen::Index>(c)) = dec.left_vectors.col(col) * dec.singular_values(col);
        vs.col(static_cast<Eigen::Index>(c)) = dec.right_vectors.col(col);
    }
    const Eigen::MatrixXd x = us * vs.transpose();

    // Antidiagonal i + j = s averaged over its entries.
    std::vector<double> out(dec.series_length, 0.0);
    std::vector<double> count(dec.series_length, 0.0);
    for (Eigen::Index j = 0; j < K; ++j)
        for (Eigen::Index i = 0; i < L; ++i) {
            out[static_cast<std::size_t>(i + j)] += x(i, j);
            count[static_cast<std::size_t>(i + j)] += 1.0;
        }
    for (std::size_t s = 0; s < out.size(); ++s)
        out[s] /= count[s];
    return out;
}

std::size_t selected_rank(const SsaDecomposition& dec, const SsaConfig& cfg)
{
    const std::size_t d = dec.components();
    if (!cfg.energy_threshold)
        return std::min(cfg.rank, d);
    const double total = dec.singular_values.squaredNorm();
    if (total == 0.0)
        return 1;
    double acc = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
        acc += dec.singular_values(static_cast<Eigen::Index>(r)) * dec.singular_values(static_cast<Eigen::Index>(r));
        if (acc >= *cfg.energy_threshold * total)
            return r + 1;
    }
    return d;
}

std::vector<double> smooth(std::span<const double> series, const SsaConfig& cfg)
{
    cfg.validate(series.size());
    const auto dec = decompose(series, cfg.window_len);
    std::vector<std::size_t> idx(selected_rank(dec, cfg));
    std::iota(idx.begin(), idx.end(), std::size_t{1});
    return reconstruct(dec, idx);
}

} // namespace spikecal::ssa
