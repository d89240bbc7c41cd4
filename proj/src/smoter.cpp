#include "spikecal/smoter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spikecal/errors.hpp"
#include "spikecal/rng.hpp"

namespace spikecal::smoter {

void SmoteParams::validate_amount() const
{
    if (n_percent < 1)
        throw ConfigError("SMOTE amount N must be >= 1, got " + std::to_string(n_percent));
    if (n_percent >= 100 && n_percent % 100 != 0)
        throw ConfigError("SMOTE amount N >= 100 must be a multiple of 100, got " + std::to_string(n_percent));
    if (k < 1)
        throw ConfigError("SMOTE neighbour count k must be >= 1, got " + std::to_string(k));
}

void SmoteParams::validate(std::size_t source_size) const
{
    validate_amount();
    if (source_size < 2)
        throw ConfigError("SMOTE needs at least 2 source samples, got " + std::to_string(source_size));
    if (static_cast<std::size_t>(k) > source_size - 1)
        throw ConfigError("SMOTE k=" + std::to_string(k) + " exceeds T-1=" + std::to_string(source_size - 1));
}

std::size_t SmoteParams::output_count(std::size_t source_size) const
{
    if (n_percent < 100)
        return static_cast<std::size_t>(n_percent) * source_size / 100;
    return static_cast<std::size_t>(n_percent / 100) * source_size;
}

namespace {

double distance(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

} // namespace

std::vector<std::size_t> nearest_neighbours(const LabeledSet& set, std::size_t index, std::size_t k)
{
    const std::size_t t = set.size();
    if (index >= t)
        throw DataError("neighbour query index " + std::to_string(index) + " out of range");
    if (k >= t || k < 1)
        throw ConfigError("k=" + std::to_string(k) + " nearest neighbours need 1 <= k <= T-1 with T=" +
                          std::to_string(t));
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(t - 1);
    const auto& q = set.spectra()[index].values;
    for (std::size_t j = 0; j < t; ++j)
        if (j != index)
            d.emplace_back(distance(q, set.spectra()[j].values), j);
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i)
        out[i] = d[i].second;
    return out;
}

SyntheticSample synthesize_one(const Spectrum& parent, double parent_target, const Spectrum& neighbor,
                               double neighbor_target, double weight)
{
    if (!(parent.grid == neighbor.grid))
        throw DataError("SMOTE parent '" + parent.id + "' and neighbour '" + neighbor.id + "' are on different grids");
    if (!(weight >= 0.0 && weight <= 1.0))
        throw DataError("SMOTE weight must lie in [0,1], got " + format_double(weight));

    std::vector<double> v(parent.values.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = parent.values[i] + weight * (neighbor.values[i] - parent.values[i]);

    SyntheticSample s;
    s.d1 = distance(v, parent.values);
    s.d2 = distance(v, neighbor.values);
    const double total = s.d1 + s.d2;
    s.target = total == 0.0 ? parent_target : (s.d2 * parent_target + s.d1 * neighbor_target) / total;
    s.spectrum = Spectrum(parent.id, std::move(v), parent.grid);
    s.parent_id = parent.id;
    s.neighbor_id = neighbor.id;
    s.weight = weight;
    return s;
}

GenerationResult generate(const LabeledSet& source, const SmoteParams& params)
{
    params.validate(source.size());
    const std::size_t t = source.size();
    Rng rng(params.seed);

    std::vector<std::size_t> parents(t);
    std::iota(parents.begin(), parents.end(), std::size_t{0});
    std::size_t rounds = static_cast<std::size_t>(params.n_percent / 100);
    if (params.n_percent < 100) {
        const std::size_t keep = params.output_count(t);
        // Partial Fisher-Yates; selected parents are then visited in source order.
        for (std::size_t i = 0; i < keep; ++i)
            std::swap(parents[i], parents[i + rng.below(t - i)]);
        parents.resize(keep);
        std::sort(parents.begin(), parents.end());
        rounds = 1;
    }

    GenerationResult out;
    std::vector<Spectrum> spectra;
    std::vector<double> targets;
    for (std::size_t p : parents) {
        const auto nns = nearest_neighbours(source, p, static_cast<std::size_t>(params.k));
        for (std::size_t round = 1; round <= rounds; ++round) {
            const std::size_t nb = nns[rng.below(nns.size())];
            const double w = rng.uniform01();
            auto s = synthesize_one(source.spectra()[p], source.targets()[p], source.spectra()[nb],
                                    source.targets()[nb], w);
            s.spectrum.id = "S" + source.spectra()[p].id + "_" + std::to_string(round);
            spectra.push_back(s.spectrum);
            targets.push_back(s.target);
            out.samples.push_back(std::move(s));
        }
    }
    if (spectra.empty())
        throw ConfigError("SMOTE amount N=" + std::to_string(params.n_percent) + " yields no samples for T=" +
                          std::to_string(t));
    out.set = LabeledSet(std::move(spectra), std::move(targets), DatasetTag::Synthetic);
    return out;
}

LabeledSet generate_set(const LabeledSet& source, const SmoteParams& params)
{
    return generate(source, params).set;
}

} // namespace spikecal::smoter
