#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace spikecal::ssa {

struct SsaConfig {
    std::size_t window_len = 50;
    std::size_t rank = 10;
    /// When set, overrides `rank`: keep the fewest leading eigentriples whose
    /// cumulative squared singular values reach this fraction of the total.
    std::optional<double> energy_threshold;

    /// Throws ConfigError if the configuration cannot be applied to a series of length n.
    void validate(std::size_t series_length) const;
};

/// SVD of the L x K trajectory matrix (K = n - L + 1), singular values nonincreasing.
struct SsaDecomposition {
    Eigen::VectorXd singular_values;
    Eigen::MatrixXd left_vectors;  // L x d
    Eigen::MatrixXd right_vectors; // K x d
    std::size_t series_length = 0;

    std::size_t window() const { return static_cast<std::size_t>(left_vectors.rows()); }
    std::size_t components() const { return static_cast<std::size_t>(singular_values.size()); }
};

/// Hankel trajectory matrix: column j holds series[j .. j+L-1].
Eigen::MatrixXd trajectory_matrix(std::span<const double> series, std::size_t window);

SsaDecomposition decompose(std::span<const double> series, std::size_t window);

/// Diagonal averaging of the sum of the selected elementary matrices.
/// Indices are 1-based, matching eigentriple numbering.
std::vector<double> reconstruct(const SsaDecomposition& dec, std::span<const std::size_t> components);

/// Number of leading components `smooth` keeps for this decomposition.
std::size_t selected_rank(const SsaDecomposition& dec, const SsaConfig& cfg);

std::vector<double> smooth(std::span<const double> series, const SsaConfig& cfg);

} // namespace spikecal::ssa
