#pragma once

#include <cstdint>
#include <vector>

#include "spikecal/spectra.hpp"

namespace spikecal::smoter {

struct SmoteParams {
    /// Amount of oversampling in percent of the source set.
    int n_percent = 200;
    int k = 5;
    std::uint64_t seed = 0;

    /// Throws ConfigError unless N >= 1 (a multiple of 100 when >= 100) and 1 <= k <= T-1.
    void validate(std::size_t source_size) const;
    /// Throws ConfigError for the size-independent part of `validate`.
    void validate_amount() const;
    /// Number of synthetic samples produced from a source of size T.
    std::size_t output_count(std::size_t source_size) const;
};

struct SyntheticSample {
    Spectrum spectrum;
    double target = 0.0;
    std::string parent_id;
    std::string neighbor_id;
    double weight = 0.0;
    double d1 = 0.0; // new -> parent
    double d2 = 0.0; // new -> neighbor
};

/// k nearest other samples of `index` by Euclidean distance, ordered by (distance, index).
std::vector<std::size_t> nearest_neighbours(const LabeledSet& set, std::size_t index, std::size_t k);

/// parent + weight * (neighbor - parent); target interpolated by the distances to both ends.
SyntheticSample synthesize_one(const Spectrum& parent, double parent_target, const Spectrum& neighbor,
                               double neighbor_target, double weight);

struct GenerationResult {
    LabeledSet set;
    std::vector<SyntheticSample> samples;
};

/// Full generation with per-sample provenance. Output ids are `S<parent id>_<round>`.
GenerationResult generate(const LabeledSet& source, const SmoteParams& params);

LabeledSet generate_set(const LabeledSet& source, const SmoteParams& params);

} // namespace spikecal::smoter
