#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spikecal/pls.hpp"
#include "spikecal/preprocess.hpp"
#include "spikecal/selection.hpp"
#include "spikecal/smoter.hpp"
#include "spikecal/spectra.hpp"

namespace spikecal::montecarlo {

struct PipelineConfig {
    preprocess::PreprocessConfig preprocess;
    selection::ComponentRange components;
};

/// One calibrate-and-validate pass, with everything needed to report it.
struct CalibrationRun {
    LabeledSet synthetic_raw; // empty for the unspiked model
    LabeledSet calibration;   // preprocessed, lab rows first
    std::size_t n_lab = 0;
    selection::SelectionResult selection;
    pls::PlsModel model;
    Eigen::VectorXd validation_predictions;
    selection::MetricsReport calibration_metrics; // LOOCV on the calibration set
    selection::MetricsReport validation_metrics;  // on the field set
};

/// Lab and field sets run through the pipeline once, reused by every replicate.
struct PreparedData {
    LabeledSet lab_raw, field_raw;
    LabeledSet lab, field;

    static PreparedData prepare(LabeledSet lab_raw, LabeledSet field_raw, const PipelineConfig& cfg);
};

/// Model I: calibrate on lab spectra only.
CalibrationRun run_unspiked(const PreparedData& data, const PipelineConfig& cfg);

/// SMOTE on raw field spectra, preprocess, spike the lab set, select, validate on the field set.
CalibrationRun run_spiked(const PreparedData& data, const smoter::SmoteParams& params, const PipelineConfig& cfg);

struct ReplicateRecord {
    std::size_t replicate_index = 0;
    std::uint64_t seed = 0;
    smoter::SmoteParams smote_params;
    bool ok = false;
    std::string error;
    std::size_t best_p = 0;
    std::size_t n_calibration = 0;
    std::size_t n_synthetic = 0;
    selection::MetricsReport calibration;
    selection::MetricsReport validation;
};

/// Replicate i uses seed derive_seed(master_seed, i); params.seed is ignored.
/// Output is ordered by replicate index for any thread count. Individual failures are
/// recorded; throws NumericalError only when every replicate fails.
std::vector<ReplicateRecord> run_replicates(const PreparedData& data, const smoter::SmoteParams& params,
                                            std::size_t reps, std::uint64_t master_seed, const PipelineConfig& cfg,
                                            unsigned threads = 1);

std::vector<ReplicateRecord> run_replicates(const LabeledSet& lab, const LabeledSet& field,
                                            const smoter::SmoteParams& params, std::size_t reps,
                                            std::uint64_t master_seed, const PipelineConfig& cfg,
                                            unsigned threads = 1);

/// Quantile with linear interpolation between order statistics (R type 7).
double quantile(std::vector<double> values, double prob);

struct Summary {
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

Summary summarize(std::vector<double> values);

struct AggregateReport {
    Summary best_p;
    Summary cal_rmse, cal_r2, cal_me;
    Summary val_rmse, val_r2, val_me;
    std::size_t replicates = 0;
    std::size_t failed = 0;
};

/// Failed records are excluded and counted; throws DataError when none succeeded.
AggregateReport aggregate(std::span<const ReplicateRecord> records);

/// Among successful records whose best_p equals the median best_p (snapped to the nearest
/// attained value, downward on a half), the one with the highest validation R^2;
/// ties go to the lowest replicate index.
const ReplicateRecord& pick_representative(std::span<const ReplicateRecord> records);

/// Conventional labels for the six (N, k) settings (II..VII); "S" otherwise.
std::string model_label(int n_percent, int k);

} // namespace spikecal::montecarlo
