#pragma once

#include <string>
#include <vector>

#include "spikecal/spectra.hpp"
#include "spikecal/ssa.hpp"

namespace spikecal::preprocess {

/// How the jump at a detector splice is estimated.
enum class OffsetEstimator {
    /// Adjacent difference minus the local in-segment slope (mean of the
    /// neighbouring differences on either side). Leaves smooth ramps untouched.
    SlopeCorrected,
    /// Raw adjacent difference v[w+step] - v[w].
    Adjacent,
};

struct PreprocessConfig {
    std::vector<int> splice_wavelengths_nm{1000, 1830};
    int trim_lo_nm = 450;
    int trim_hi_nm = 2400;
    OffsetEstimator offset_estimator = OffsetEstimator::SlopeCorrected;
    ssa::SsaConfig ssa;

    bool offset = true;
    bool trim = true;
    bool absorbance = true;
    bool smooth = true;
    bool normalize = true;
    bool derivative = true;

    /// Throws ConfigError when the enabled stages cannot run on `grid`.
    void validate(const WavelengthGrid& grid) const;
};

Spectrum correct_detector_offsets(const Spectrum& s, const std::vector<int>& splices,
                                  OffsetEstimator estimator = OffsetEstimator::SlopeCorrected);
Spectrum trim(const Spectrum& s, int lo_nm, int hi_nm);
Spectrum to_absorbance(const Spectrum& s);
Spectrum ssa_smooth(const Spectrum& s, const ssa::SsaConfig& cfg);
Spectrum max_normalize(const Spectrum& s);
/// Forward difference per nm; output is one point shorter, labelled by left endpoints.
Spectrum first_derivative(const Spectrum& s);

/// All enabled stages in fixed order: offset, trim, absorbance, SSA, normalize, derivative.
Spectrum run_spectrum(const Spectrum& s, const PreprocessConfig& cfg);
LabeledSet run_pipeline(const LabeledSet& set, const PreprocessConfig& cfg);
SpectraSet run_pipeline(const SpectraSet& set, const PreprocessConfig& cfg);

} // namespace spikecal::preprocess
