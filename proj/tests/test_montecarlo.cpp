#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "spikecal/benchmark.hpp"
#include "spikecal/errors.hpp"
#include "spikecal/montecarlo.hpp"
#include "spikecal/rng.hpp"

using namespace spikecal;
using namespace spikecal::montecarlo;

namespace {

const PreparedData& small_data()
{
    static const PreparedData data = [] {
        auto b = benchmark::generate({});
        return PreparedData::prepare(b.lab, b.field, PipelineConfig{});
    }();
    return data;
}

ReplicateRecord record(std::size_t idx, std::size_t p, double val_r2, bool ok = true)
{
    ReplicateRecord r;
    r.replicate_index = idx;
    r.ok = ok;
    r.best_p = p;
    r.validation.r2 = val_r2;
    r.validation.rmse = 1.0 + static_cast<double>(idx);
    r.calibration.rmse = 2.0 * static_cast<double>(idx);
    return r;
}

} // namespace

TEST(Quantile, TypeSevenExamples)
{
    EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.25), 1.75);
    EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
    EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.75), 3.25);
    EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4, 5}, 0.5), 3.0);
    EXPECT_DOUBLE_EQ(quantile({7}, 0.25), 7.0);
    EXPECT_DOUBLE_EQ(quantile({1, 9}, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(quantile({1, 9}, 1.0), 9.0);
    EXPECT_THROW(quantile({}, 0.5), DataError);
}

TEST(Summarize, SingleValue)
{
    const auto s = summarize({3.5});
    EXPECT_EQ(s.median, 3.5);
    EXPECT_EQ(s.q25, 3.5);
    EXPECT_EQ(s.q75, 3.5);
}

TEST(Summarize, OrderedAndPermutationInvariant)
{
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 50; ++t) {
        std::vector<double> v(1 + gen() % 30);
        for (auto& x : v)
            x = nd(gen);
        const auto a = summarize(v);
        std::shuffle(v.begin(), v.end(), gen);
        const auto b = summarize(v);
        EXPECT_EQ(a.median, b.median);
        EXPECT_EQ(a.q25, b.q25);
        EXPECT_EQ(a.q75, b.q75);
        EXPECT_LE(a.q25, a.median);
        EXPECT_LE(a.median, a.q75);
    }
}

TEST(Aggregate, ExcludesFailures)
{
    std::vector<ReplicateRecord> recs{record(0, 3, 0.5), record(1, 4, 0.1, false), record(2, 5, 0.7)};
    const auto a = aggregate(recs);
    EXPECT_EQ(a.replicates, 2u);
    EXPECT_EQ(a.failed, 1u);
    EXPECT_DOUBLE_EQ(a.best_p.median, 4.0);
    EXPECT_DOUBLE_EQ(a.val_rmse.median, 2.0);
    std::vector<ReplicateRecord> none{record(0, 3, 0.5, false)};
    EXPECT_THROW(aggregate(none), DataError);
}

TEST(PickRepresentative, Examples)
{
    std::vector<ReplicateRecord> recs{record(0, 3, 0.9), record(1, 4, 0.2), record(2, 4, 0.6), record(3, 5, 0.95)};
    // Median of {3,4,4,5} is 4; best R^2 among p = 4.
    EXPECT_EQ(pick_representative(recs).replicate_index, 2u);

    std::vector<ReplicateRecord> half{record(0, 3, 0.1), record(1, 6, 0.9)};
    // Median 4.5 snaps downward to the nearest attained value 3 (distance 1.5 either way).
    EXPECT_EQ(pick_representative(half).replicate_index, 0u);

    std::vector<ReplicateRecord> tie{record(0, 2, 0.5), record(1, 2, 0.5)};
    EXPECT_EQ(pick_representative(tie).replicate_index, 0u);

    std::vector<ReplicateRecord> failed{record(0, 9, 0.99, false), record(1, 2, 0.1)};
    EXPECT_EQ(pick_representative(failed).replicate_index, 1u);
}

TEST(ModelLabel, Settings)
{
    EXPECT_EQ(model_label(100, 3), "II");
    EXPECT_EQ(model_label(200, 3), "III");
    EXPECT_EQ(model_label(300, 3), "IV");
    EXPECT_EQ(model_label(100, 5), "V");
    EXPECT_EQ(model_label(200, 5), "VI");
    EXPECT_EQ(model_label(300, 5), "VII");
    EXPECT_EQ(model_label(400, 5), "S");
}

TEST(RunReplicates, SingleReplicateMatchesManualRun)
{
    const auto& data = small_data();
    PipelineConfig cfg;
    smoter::SmoteParams params{200, 5, 0};
    const auto recs = run_replicates(data, params, 1, 7, cfg);
    ASSERT_EQ(recs.size(), 1u);
    ASSERT_TRUE(recs[0].ok);
    EXPECT_EQ(recs[0].seed, derive_seed(7, 0));

    params.seed = derive_seed(7, 0);
    const auto run = run_spiked(data, params, cfg);
    EXPECT_EQ(recs[0].best_p, run.selection.best_p);
    EXPECT_EQ(recs[0].n_synthetic, 24u);
    EXPECT_EQ(recs[0].n_calibration, 31u + 24u);
    EXPECT_EQ(recs[0].validation.rmse, run.validation_metrics.rmse);
    EXPECT_EQ(recs[0].calibration.r2, run.calibration_metrics.r2);
}

TEST(RunReplicates, DeterministicAndThreadIndependent)
{
    const auto& data = small_data();
    PipelineConfig cfg;
    const smoter::SmoteParams params{100, 3, 0};
    const auto a = run_replicates(data, params, 4, 11, cfg, 1);
    const auto b = run_replicates(data, params, 4, 11, cfg, 3);
    ASSERT_EQ(a.size(), 4u);
    ASSERT_EQ(b.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(a[i].replicate_index, i);
        EXPECT_EQ(b[i].replicate_index, i);
        EXPECT_EQ(a[i].seed, b[i].seed);
        EXPECT_EQ(a[i].best_p, b[i].best_p);
        EXPECT_EQ(a[i].validation.rmse, b[i].validation.rmse);
        EXPECT_EQ(a[i].calibration.me, b[i].calibration.me);
    }
    EXPECT_NE(a[0].seed, a[1].seed);
}

TEST(RunReplicates, UnspikedModelUsesLabOnly)
{
    const auto& data = small_data();
    const auto run = run_unspiked(data, PipelineConfig{});
    EXPECT_EQ(run.calibration.size(), 31u);
    EXPECT_EQ(run.n_lab, 31u);
    EXPECT_TRUE(run.synthetic_raw.empty());
    EXPECT_EQ(run.validation_predictions.size(), 12);
}

TEST(RunReplicates, Errors)
{
    const auto& data = small_data();
    PipelineConfig cfg;
    EXPECT_THROW(run_replicates(data, {200, 5, 0}, 0, 1, cfg), ConfigError);
    EXPECT_THROW(run_replicates(data, {200, 12, 0}, 1, 1, cfg), ConfigError);
    cfg.components = {80, 80};
    EXPECT_THROW(run_replicates(data, {100, 3, 0}, 2, 1, cfg), NumericalError);
}
