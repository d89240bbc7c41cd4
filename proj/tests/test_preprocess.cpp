#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spikecal/errors.hpp"
#include "spikecal/preprocess.hpp"

using namespace spikecal;
using namespace spikecal::preprocess;

namespace {

Spectrum ramp(const WavelengthGrid& g, double a, double b)
{
    std::vector<double> v(g.length());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = a + b * g.wavelength(i);
    return Spectrum("r", v, g);
}

Spectrum smooth_reflectance(const WavelengthGrid& g, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double c1 = u(gen), c2 = u(gen);
    std::vector<double> v(g.length());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = (g.wavelength(i) - 350.0) / 2150.0;
        v[i] = 0.3 + 0.2 * x + 0.05 * c1 * std::sin(6.0 * x) + 0.03 * c2 * std::cos(11.0 * x);
        if (g.wavelength(i) > 1000)
            v[i] += 0.02;
        if (g.wavelength(i) > 1830)
            v[i] -= 0.015;
    }
    return Spectrum("s" + std::to_string(seed), v, g);
}

} // namespace

TEST(CorrectDetectorOffsets, SingleSpliceShiftsRightSegment)
{
    WavelengthGrid g(100, 104, 1);
    Spectrum s("x", {1, 1, 1, 1.1, 1.1}, g);
    const auto out = correct_detector_offsets(s, {102});
    const std::vector<double> expected{1, 1, 1, 1.0, 1.0};
    for (std::size_t i = 0; i < expected.size(); ++i)
        EXPECT_NEAR(out.values[i], expected[i], 1e-15);
}

TEST(CorrectDetectorOffsets, ContinuousRampUnchanged)
{
    WavelengthGrid g(350, 2500, 1);
    const auto s = ramp(g, 0.1, 1e-4);
    const auto out = correct_detector_offsets(s, {1000, 1830});
    for (std::size_t i = 0; i < s.values.size(); ++i)
        EXPECT_NEAR(out.values[i], s.values[i], 1e-12);
}

TEST(CorrectDetectorOffsets, ThreeSegmentsCentralAnchored)
{
    WavelengthGrid g(350, 2500, 1);
    std::vector<double> v(g.length(), 0.5);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const int wl = g.wavelength(i);
        if (wl <= 1000)
            v[i] = 0.5 - 0.2; // jump +0.2 going 1000 -> 1001
        else if (wl > 1830)
            v[i] = 0.5 - 0.1; // jump -0.1 going 1830 -> 1831
    }
    const auto out = correct_detector_offsets(Spectrum("x", v, g), {1000, 1830});
    // Boundary differences vanish.
    EXPECT_NEAR(out.values[g.index_of(1001)] - out.values[g.index_of(1000)], 0.0, 1e-12);
    EXPECT_NEAR(out.values[g.index_of(1831)] - out.values[g.index_of(1830)], 0.0, 1e-12);
    // Central segment untouched, outer segments shifted by +0.2 and +0.1.
    EXPECT_EQ(out.values[g.index_of(1500)], 0.5);
    EXPECT_NEAR(out.values[g.index_of(400)] - v[g.index_of(400)], 0.2, 1e-12);
    EXPECT_NEAR(out.values[g.index_of(2400)] - v[g.index_of(2400)], 0.1, 1e-12);
}

TEST(CorrectDetectorOffsets, AdjacentEstimatorZeroesBoundaryDifference)
{
    WavelengthGrid g(100, 110, 1);
    const auto s = ramp(g, 0.0, 0.5);
    const auto out = correct_detector_offsets(s, {104}, OffsetEstimator::Adjacent);
    EXPECT_NEAR(out.values[5] - out.values[4], 0.0, 1e-12);
}

TEST(CorrectDetectorOffsets, Idempotent)
{
    WavelengthGrid g(350, 2500, 1);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto s = smooth_reflectance(g, seed);
        for (auto est : {OffsetEstimator::SlopeCorrected, OffsetEstimator::Adjacent}) {
            const auto once = correct_detector_offsets(s, {1000, 1830}, est);
            const auto twice = correct_detector_offsets(once, {1000, 1830}, est);
            for (std::size_t i = 0; i < s.values.size(); ++i)
                ASSERT_NEAR(once.values[i], twice.values[i], 1e-12);
        }
    }
}

TEST(CorrectDetectorOffsets, Errors)
{
    WavelengthGrid g(100, 110, 1);
    const auto s = ramp(g, 0.0, 0.1);
    EXPECT_THROW(correct_detector_offsets(s, {120}), DataError);
    EXPECT_THROW(correct_detector_offsets(s, {110}), DataError);
    EXPECT_THROW(correct_detector_offsets(s, {100}), DataError);
}

TEST(Trim, Lengths)
{
    WavelengthGrid g(350, 2500, 1);
    const auto s = ramp(g, 0.1, 1e-4);
    const auto t = trim(s, 450, 2400);
    EXPECT_EQ(t.values.size(), 1951u);
    EXPECT_EQ(t.grid, WavelengthGrid(450, 2400, 1));
    EXPECT_EQ(t.values.front(), s.values[100]);
    EXPECT_EQ(trim(s, 350, 2500).values, s.values);
    EXPECT_EQ(trim(s, 999, 1000).values.size(), 2u);
    EXPECT_EQ(trim(t, 450, 2400).values, t.values);
    EXPECT_THROW(trim(s, 300, 2400), DataError);
    EXPECT_THROW(trim(s, 1000, 1000), DataError);
}

TEST(ToAbsorbance, Values)
{
    WavelengthGrid g(100, 102, 1);
    const auto a = to_absorbance(Spectrum("x", {1.0, 0.5, 0.1}, g));
    EXPECT_EQ(a.values[0], 0.0);
    EXPECT_NEAR(a.values[1], 0.3010299957, 1e-10);
    EXPECT_NEAR(a.values[2], 1.0, 1e-15);
    EXPECT_THROW(to_absorbance(Spectrum("x", {1.0, 0.0, 0.1}, g)), DataError);
}

TEST(MaxNormalize, Values)
{
    WavelengthGrid g(100, 102, 1);
    const auto n = max_normalize(Spectrum("x", {1, 2, 4}, g));
    EXPECT_EQ(n.values, (std::vector<double>{0.25, 0.5, 1.0}));
    EXPECT_EQ(max_normalize(Spectrum("x", {3, 3, 3}, g)).values, (std::vector<double>{1, 1, 1}));
    EXPECT_THROW(max_normalize(Spectrum("x", {-1, -2}, WavelengthGrid(100, 101, 1))), NumericalError);
}

TEST(MaxNormalize, MaximumIsExactlyOne)
{
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(1e-3, 7.0);
    WavelengthGrid g(0, 99, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(g.length());
        for (auto& x : v)
            x = u(gen);
        const auto n = max_normalize(Spectrum("x", v, g));
        EXPECT_EQ(*std::max_element(n.values.begin(), n.values.end()), 1.0);
    }
}

TEST(FirstDerivative, Values)
{
    WavelengthGrid g(100, 102, 1);
    const auto d = first_derivative(Spectrum("x", {0, 1, 3}, g));
    EXPECT_EQ(d.values, (std::vector<double>{1, 2}));
    EXPECT_EQ(d.grid, WavelengthGrid(100, 101, 1));

    WavelengthGrid g5(100, 150, 5);
    const auto c = first_derivative(ramp(g5, 2.0, 0.0));
    EXPECT_EQ(c.values.size(), g5.length() - 1);
    for (double x : c.values)
        EXPECT_EQ(x, 0.0);
    const auto r = first_derivative(ramp(g5, 2.0, 0.25));
    for (double x : r.values)
        EXPECT_NEAR(x, 0.25, 1e-12);
}

TEST(RunPipeline, AllStagesDisabledIsIdentity)
{
    WavelengthGrid g(350, 2500, 1);
    LabeledSet set({smooth_reflectance(g, 1), smooth_reflectance(g, 2)}, {1.0, 2.0}, DatasetTag::Lab);
    PreprocessConfig cfg;
    cfg.offset = cfg.trim = cfg.absorbance = cfg.smooth = cfg.normalize = cfg.derivative = false;
    const auto out = run_pipeline(set, cfg);
    EXPECT_EQ(out.spectra()[0].values, set.spectra()[0].values);
    EXPECT_EQ(out.targets(), set.targets());
}

TEST(RunPipeline, DefaultsOnInstrumentGrid)
{
    WavelengthGrid g(350, 2500, 1);
    LabeledSet set({smooth_reflectance(g, 1), smooth_reflectance(g, 2), smooth_reflectance(g, 3)}, {3.0, 1.0, 2.0},
                   DatasetTag::Field);
    const auto out = run_pipeline(set, PreprocessConfig{});
    EXPECT_EQ(out.grid(), WavelengthGrid(450, 2399, 1));
    EXPECT_EQ(out.grid().length(), 1950u);
    EXPECT_EQ(out.targets(), set.targets());
    EXPECT_EQ(out.spectra()[2].id, "s3");
}

TEST(RunPipeline, ZeroReflectanceNamesSampleAndStage)
{
    WavelengthGrid g(350, 2500, 1);
    auto bad = smooth_reflectance(g, 5);
    bad.values[g.index_of(1400)] = 0.0;
    LabeledSet set({smooth_reflectance(g, 4), bad}, {1.0, 2.0}, DatasetTag::Lab);
    try {
        run_pipeline(set, PreprocessConfig{});
        FAIL() << "expected failure";
    } catch (const DataError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("s5"), std::string::npos) << msg;
        EXPECT_NE(msg.find("absorbance"), std::string::npos) << msg;
        EXPECT_NE(msg.find("1400"), std::string::npos) << msg;
    }
}

TEST(RunPipeline, NormalizeBeforeDerivativeMatters)
{
    WavelengthGrid g(350, 2500, 5);
    const auto s = smooth_reflectance(g, 9);
    PreprocessConfig cfg;
    cfg.ssa.window_len = 20;
    const auto ordered = run_spectrum(s, cfg);

    // Swapped order: derivative then normalize.
    PreprocessConfig head = cfg;
    head.normalize = head.derivative = false;
    const auto swapped = max_normalize(first_derivative(run_spectrum(s, head)));
    ASSERT_EQ(ordered.values.size(), swapped.values.size());
    double diff = 0.0;
    for (std::size_t i = 0; i < ordered.values.size(); ++i)
        diff = std::max(diff, std::abs(ordered.values[i] - swapped.values[i]));
    EXPECT_GT(diff, 1e-6);

    // Golden values of the fixed order; regenerate only if the chain changes on purpose.
    EXPECT_EQ(ordered.grid, WavelengthGrid(450, 2395, 5));
    const auto step = first_derivative(max_normalize(ssa_smooth(
        to_absorbance(trim(correct_detector_offsets(s, cfg.splice_wavelengths_nm), 450, 2400)), cfg.ssa)));
    EXPECT_EQ(step.values, ordered.values);
}

TEST(PreprocessConfig, Validation)
{
    WavelengthGrid g(350, 2500, 1);
    PreprocessConfig cfg;
    EXPECT_NO_THROW(cfg.validate(g));
    cfg.splice_wavelengths_nm = {1830, 1000};
    EXPECT_THROW(cfg.validate(g), ConfigError);
    cfg = PreprocessConfig{};
    cfg.trim_lo_nm = 2400;
    cfg.trim_hi_nm = 450;
    EXPECT_THROW(cfg.validate(g), ConfigError);
    cfg = PreprocessConfig{};
    cfg.trim_hi_nm = 2600;
    EXPECT_THROW(cfg.validate(g), ConfigError);
    cfg = PreprocessConfig{};
    cfg.ssa.window_len = 1000;
    EXPECT_THROW(cfg.validate(g), ConfigError);
}
