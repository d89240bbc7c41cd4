#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "spikecal/config.hpp"
#include "spikecal/montecarlo.hpp"
#include "spikecal/pca.hpp"

namespace spikecal::report {

struct AggregateRow {
    std::string model;
    /// Zero for the unspiked model.
    int n_percent = 0;
    int k = 0;
    montecarlo::AggregateReport stats;
};

/// Header of aggregate.csv.
const std::string& aggregate_header();
/// Header of replicates.csv.
const std::string& replicates_header();

void write_aggregate_csv(const std::filesystem::path& path, std::span<const AggregateRow> rows);
void write_replicates_csv(const std::filesystem::path& path, std::span<const montecarlo::ReplicateRecord> records);
std::vector<montecarlo::ReplicateRecord> read_replicates_csv(const std::filesystem::path& path);

struct PredictionRow {
    std::string id;
    double measured = 0.0;
    double predicted = 0.0;
    std::string split;
};

/// Calibration (LOOCV) rows split into lab and synthetic, then field validation rows.
std::vector<PredictionRow> prediction_rows(const montecarlo::CalibrationRun& run, const LabeledSet& field);
void write_predictions_csv(const std::filesystem::path& path, std::span<const PredictionRow> rows);

/// Columns p, rmse_cv, aicc.
void write_aicc_csv(const std::filesystem::path& path, const selection::SelectionResult& sel);

struct ScoreTable {
    std::vector<std::string> ids;
    std::vector<char> tags;
    std::vector<double> targets;
    Eigen::MatrixXd scores;
    Eigen::VectorXd explained_variance_ratio;
};

/// PCA of raw lab (and field) spectra; remaining sets are projected.
ScoreTable pca_scores(const LabeledSet& lab_raw, const LabeledSet& field_raw, const LabeledSet* synthetic_raw,
                      PcaFitOn fit_on, std::size_t components);
void write_scores_csv(const std::filesystem::path& path, const ScoreTable& table);
void write_explained_variance_csv(const std::filesystem::path& path, const ScoreTable& table);

/// Writes aggregate.csv, replicates.csv, predictions_representative.csv, predictions_unspiked.csv,
/// scores.csv and explained_variance.csv into cfg.out_dir. The representative replicate is
/// re-run from its seed.
void emit_report(const RunConfig& cfg, const montecarlo::PreparedData& data,
                 std::span<const montecarlo::ReplicateRecord> records);

} // namespace spikecal::report
