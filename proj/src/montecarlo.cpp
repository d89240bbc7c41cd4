#include "spikecal/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "spikecal/errors.hpp"
#include "spikecal/rng.hpp"

namespace spikecal::montecarlo {

PreparedData PreparedData::prepare(LabeledSet lab_raw, LabeledSet field_raw, const PipelineConfig& cfg)
{
    assert_same_grid(lab_raw, field_raw);
    PreparedData d;
    d.lab = preprocess::run_pipeline(lab_raw, cfg.preprocess);
    d.field = preprocess::run_pipeline(field_raw, cfg.preprocess);
    d.lab_raw = std::move(lab_raw);
    d.field_raw = std::move(field_raw);
    return d;
}

namespace {

CalibrationRun calibrate(const PreparedData& data, LabeledSet calibration, LabeledSet synthetic_raw,
                         const PipelineConfig& cfg)
{
    CalibrationRun run;
    run.n_lab = data.lab.size();
    const Eigen::MatrixXd x = calibration.matrix();
    const Eigen::VectorXd y = calibration.target_vector();
    run.selection = selection::select_components(x, y, cfg.components);
    run.model = pls::fit(x, y, run.selection.best_p);
    run.model.grid = calibration.grid();
    run.calibration_metrics = selection::evaluate(run.selection.loocv_predictions_best, y);
    run.validation_predictions = pls::predict(run.model, data.field.matrix());
    run.validation_metrics = selection::evaluate(run.validation_predictions, data.field.target_vector());
    run.calibration = std::move(calibration);
    run.synthetic_raw = std::move(synthetic_raw);
    return run;
}

} // namespace

CalibrationRun run_unspiked(const PreparedData& data, const PipelineConfig& cfg)
{
    return calibrate(data, data.lab, LabeledSet{}, cfg);
}

CalibrationRun run_spiked(const PreparedData& data, const smoter::SmoteParams& params, const PipelineConfig& cfg)
{
    auto synthetic = smoter::generate_set(data.field_raw, params);
    auto synthetic_pre = preprocess::run_pipeline(synthetic, cfg.preprocess);
    auto calibration = LabeledSet::concat(data.lab, synthetic_pre, DatasetTag::Other);
    return calibrate(data, std::move(calibration), std::move(synthetic), cfg);
}

std::vector<ReplicateRecord> run_replicates(const PreparedData& data, const smoter::SmoteParams& params,
                                            std::size_t reps, std::uint64_t master_seed, const PipelineConfig& cfg,
                                            unsigned threads)
{
    if (reps < 1)
        throw ConfigError("Monte Carlo needs at least one replicate");
    params.validate(data.field_raw.size());

    std::vector<ReplicateRecord> records(reps);
    auto run_one = [&](std::size_t i) {
        ReplicateRecord& r = records[i];
        r.replicate_index = i;
        r.seed = derive_seed(master_seed, i);
        r.smote_params = params;
        r.smote_params.seed = r.seed;
        try {
            const auto run = run_spiked(data, r.smote_params, cfg);
            r.best_p = run.selection.best_p;
            r.n_calibration = run.calibration.size();
            r.n_synthetic = run.synthetic_raw.size();
            r.calibration = run.calibration_metrics;
            r.validation = run.validation_metrics;
            r.ok = true;
        } catch (const std::exception& e) {
            r.ok = false;
            r.error = e.what();
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
    if (workers == 1) {
        for (std::size_t i = 0; i < reps; ++i)
            run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < reps; i = next++)
                    run_one(i);
            });
    }

    if (std::none_of(records.begin(), records.end(), [](const ReplicateRecord& r) { return r.ok; }))
        throw NumericalError("all " + std::to_string(reps) + " replicates failed; first error: " + records[0].error);
    return records;
}

std::vector<ReplicateRecord> run_replicates(const LabeledSet& lab, const LabeledSet& field,
                                            const smoter::SmoteParams& params, std::size_t reps,
                                            std::uint64_t master_seed, const PipelineConfig& cfg, unsigned threads)
{
    const auto data = PreparedData::prepare(lab, field, cfg);
    return run_replicates(data, params, reps, master_seed, cfg, threads);
}

double quantile(std::vector<double> values, double prob)
{
    if (values.empty())
        throw DataError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size())
        return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

Summary summarize(std::vector<double> values)
{
    return {quantile(values, 0.5), quantile(values, 0.25), quantile(values, 0.75)};
}

AggregateReport aggregate(std::span<const ReplicateRecord> records)
{
    std::vector<double> p, crm, cr2, cme, vrm, vr2, vme;
    AggregateReport rep;
    for (const auto& r : records) {
        if (!r.ok) {
            ++rep.failed;
            continue;
        }
        p.push_back(static_cast<double>(r.best_p));
        crm.push_back(r.calibration.rmse);
        cr2.push_back(r.calibration.r2);
        cme.push_back(r.calibration.me);
        vrm.push_back(r.validation.rmse);
        vr2.push_back(r.validation.r2);
        vme.push_back(r.validation.me);
    }
    if (p.empty())
        throw DataError("no successful replicates to aggregate");
    rep.replicates = p.size();
    rep.best_p = summarize(std::move(p));
    rep.cal_rmse = summarize(std::move(crm));
    rep.cal_r2 = summarize(std::move(cr2));
    rep.cal_me = summarize(std::move(cme));
    rep.val_rmse = summarize(std::move(vrm));
    rep.val_r2 = summarize(std::move(vr2));
    rep.val_me = summarize(std::move(vme));
    return rep;
}

const ReplicateRecord& pick_representative(std::span<const ReplicateRecord> records)
{
    std::vector<double> ps;
    for (const auto& r : records)
        if (r.ok)
            ps.push_back(static_cast<double>(r.best_p));
    if (ps.empty())
        throw DataError("no successful replicates to choose from");
    const double med = quantile(ps, 0.5);

    double snapped = ps.front();
    for (double v : ps) {
        const double dv = std::abs(v - med);
        const double ds = std::abs(snapped - med);
        if (dv < ds || (dv == ds && v < snapped))
            snapped = v;
    }

    const ReplicateRecord* best = nullptr;
    for (const auto& r : records) {
        if (!r.ok || static_cast<double>(r.best_p) != snapped)
            continue;
        if (!best || r.validation.r2 > best->validation.r2 ||
            (r.validation.r2 == best->validation.r2 && r.replicate_index < best->replicate_index))
            best = &r;
    }
    return *best;
}

std::string model_label(int n_percent, int k)
{
    if (k == 3) {
        if (n_percent == 100) return "II";
        if (n_percent == 200) return "III";
        if (n_percent == 300) return "IV";
    } else if (k == 5) {
        if (n_percent == 100) return "V";
        if (n_percent == 200) return "VI";
        if (n_percent == 300) return "VII";
    }
    return "S";
}

} // namespace spikecal::montecarlo
