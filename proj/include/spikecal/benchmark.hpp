#pragma once

#include <cstdint>

#include "spikecal/spectra.hpp"

namespace spikecal::benchmark {

/// Simulated lab/field calibration problem.
///
/// Lab spectra are absorbance curves A(wl) = baseline + three broad nuisance bands with
/// random heights + target * carbon signature, returned as reflectance 10^-A with small
/// detector-splice jumps at 1000/1830 nm and white noise. Field spectra come from the
/// same model with a target range shifted upward, then a "moisture" distortion: water
/// bands at 1450/1930 nm of random depth, a multiplicative reflectance factor and an
/// additive reflectance offset.
struct BenchmarkConfig {
    WavelengthGrid grid{350, 2500, 10};
    std::size_t n_lab = 31;
    std::size_t n_field = 12;
    double lab_target_lo = 5.0, lab_target_hi = 60.0;
    double field_target_lo = 20.0, field_target_hi = 40.0;
    /// Carbon absorbance per target unit at the signature peak.
    double carbon_strength = 0.004;
    double water_depth_lo = 0.02, water_depth_hi = 0.06;
    double moisture_factor_lo = 0.80, moisture_factor_hi = 0.90;
    double moisture_offset_sd = 0.01;
    double splice_jump_sd = 0.004;
    double noise_sd = 0.0008;
    std::uint64_t seed = 2014;
};

struct Benchmark {
    LabeledSet lab;
    LabeledSet field;
};

Benchmark generate(const BenchmarkConfig& cfg);

} // namespace spikecal::benchmark
