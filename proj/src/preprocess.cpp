#include "spikecal/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "spikecal/errors.hpp"

namespace spikecal::preprocess {

namespace {

std::string stage_error(const std::string& id, const char* stage, const std::string& what)
{
    return "sample '" + id + "' stage \"" + stage + "\": " + what;
}

template <class Fn>
Spectrum run_stage(const Spectrum& s, const char* stage, Fn&& fn)
{
    try {
        return fn(s);
    } catch (const NumericalError& e) {
        throw NumericalError(stage_error(s.id, stage, e.what()));
    } catch (const ConfigError& e) {
        throw ConfigError(stage_error(s.id, stage, e.what()));
    } catch (const DataError& e) {
        throw DataError(stage_error(s.id, stage, e.what()));
    }
}

} // namespace

void PreprocessConfig::validate(const WavelengthGrid& grid) const
{
    if (offset) {
        for (std::size_t i = 0; i < splice_wavelengths_nm.size(); ++i) {
            const int w = splice_wavelengths_nm[i];
            if (!grid.contains(w) || !grid.contains(w + grid.step_nm) || w == grid.start_nm)
                throw ConfigError("splice " + std::to_string(w) + " nm is not strictly inside grid " +
                                  grid.describe());
            if (i > 0 && w <= splice_wavelengths_nm[i - 1])
                throw ConfigError("splice wavelengths must be strictly increasing");
        }
    }
    WavelengthGrid g = grid;
    if (trim) {
        if (trim_lo_nm >= trim_hi_nm)
            throw ConfigError("trim bounds need lo < hi");
        if (!grid.contains(trim_lo_nm) || !grid.contains(trim_hi_nm))
            throw ConfigError("trim bounds " + std::to_string(trim_lo_nm) + ".." + std::to_string(trim_hi_nm) +
                              " are not on grid " + grid.describe());
        g = WavelengthGrid(trim_lo_nm, trim_hi_nm, grid.step_nm);
    }
    if (smooth)
        ssa.validate(g.length());
}

Spectrum correct_detector_offsets(const Spectrum& s, const std::vector<int>& splices, OffsetEstimator estimator)
{
    if (splices.empty())
        return s;
    const auto& g = s.grid;
    const std::size_t n = s.values.size();

    // Segment b spans [seg_start[b], seg_start[b+1]); splice w ends the segment containing it.
    std::vector<std::size_t> seg_start{0};
    for (std::size_t i = 0; i < splices.size(); ++i) {
        const int w = splices[i];
        if (!g.contains(w) || !g.contains(w + g.step_nm) || w == g.start_nm)
            throw DataError("splice " + std::to_string(w) + " nm outside or at the edge of grid " + g.describe());
        const std::size_t next = g.index_of(w) + 1;
        if (next <= seg_start.back())
            throw DataError("splice wavelengths must be strictly increasing");
        seg_start.push_back(next);
    }
    seg_start.push_back(n);
    const std::size_t nseg = seg_start.size() - 1;

    auto jump = [&](const std::vector<double>& v, std::size_t b) {
        // b is the first index of the right-hand segment.
        const double raw = v[b] - v[b - 1];
        if (estimator == OffsetEstimator::Adjacent)
            return raw;
        double slope = 0.0;
        int used = 0;
        const std::size_t left_begin = *std::prev(std::upper_bound(seg_start.begin(), seg_start.end(), b - 1));
        const std::size_t right_end = *std::upper_bound(seg_start.begin(), seg_start.end(), b);
        if (b - 1 > left_begin) {
            slope += v[b - 1] - v[b - 2];
            ++used;
        }
        if (b + 1 < right_end) {
            slope += v[b + 1] - v[b];
            ++used;
        }
        return used ? raw - slope / used : raw;
    };

    std::vector<double> v = s.values;
    const std::size_t anchor = splices.size() / 2;
    for (std::size_t seg = anchor + 1; seg < nseg; ++seg) {
        const double d = jump(v, seg_start[seg]);
        for (std::size_t i = seg_start[seg]; i < seg_start[seg + 1]; ++i)
            v[i] -= d;
    }
    for (std::size_t seg = anchor; seg-- > 0;) {
        const double d = jump(v, seg_start[seg + 1]);
        for (std::size_t i = seg_start[seg]; i < seg_start[seg + 1]; ++i)
            v[i] += d;
    }
    return Spectrum(s.id, std::move(v), g);
}

Spectrum trim(const Spectrum& s, int lo_nm, int hi_nm)
{
    if (lo_nm >= hi_nm)
        throw DataError("trim needs lo < hi, got " + std::to_string(lo_nm) + ".." + std::to_string(hi_nm));
    const std::size_t lo = s.grid.index_of(lo_nm);
    const std::size_t hi = s.grid.index_of(hi_nm);
    std::vector<double> v(s.values.begin() + static_cast<std::ptrdiff_t>(lo),
                          s.values.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
    return Spectrum(s.id, std::move(v), WavelengthGrid(lo_nm, hi_nm, s.grid.step_nm));
}

Spectrum to_absorbance(const Spectrum& s)
{
    std::vector<double> v(s.values.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!(s.values[i] > 0.0))
            throw DataError("reflectance " + format_double(s.values[i]) + " <= 0 at " +
                            std::to_string(s.grid.wavelength(i)) + " nm in sample '" + s.id + "'");
        v[i] = std::log10(1.0 / s.values[i]);
    }
    return Spectrum(s.id, std::move(v), s.grid);
}

Spectrum ssa_smooth(const Spectrum& s, const ssa::SsaConfig& cfg)
{
    return Spectrum(s.id, ssa::smooth(s.values, cfg), s.grid);
}

Spectrum max_normalize(const Spectrum& s)
{
    const double mx = *std::max_element(s.values.begin(), s.values.end());
    if (!(mx > 0.0))
        throw NumericalError("cannot max-normalize, maximum is " + format_double(mx));
    std::vector<double> v(s.values.size());
    std::transform(s.values.begin(), s.values.end(), v.begin(), [mx](double x) { return x / mx; });
    return Spectrum(s.id, std::move(v), s.grid);
}

Spectrum first_derivative(const Spectrum& s)
{
    if (s.values.size() < 2)
        throw DataError("first derivative needs at least 2 points");
    if (s.values.size() == 2)
        throw DataError("first derivative of a 2-point spectrum leaves a single point, which is not a grid");
    const double h = s.grid.step_nm;
    std::vector<double> d(s.values.size() - 1);
    for (std::size_t i = 0; i + 1 < s.values.size(); ++i)
        d[i] = (s.values[i + 1] - s.values[i]) / h;
    return Spectrum(s.id, std::move(d), WavelengthGrid(s.grid.start_nm, s.grid.end_nm - s.grid.step_nm, s.grid.step_nm));
}

Spectrum run_spectrum(const Spectrum& in, const PreprocessConfig& cfg)
{
    Spectrum s = in;
    if (cfg.offset)
        s = run_stage(s, "offset", [&](const Spectrum& x) {
            return correct_detector_offsets(x, cfg.splice_wavelengths_nm, cfg.offset_estimator);
        });
    if (cfg.trim)
        s = run_stage(s, "trim", [&](const Spectrum& x) { return trim(x, cfg.trim_lo_nm, cfg.trim_hi_nm); });
    if (cfg.absorbance)
        s = run_stage(s, "absorbance", [](const Spectrum& x) { return to_absorbance(x); });
    if (cfg.smooth)
        s = run_stage(s, "ssa", [&](const Spectrum& x) { return ssa_smooth(x, cfg.ssa); });
    if (cfg.normalize)
        s = run_stage(s, "normalize", [](const Spectrum& x) { return max_normalize(x); });
    if (cfg.derivative)
        s = run_stage(s, "derivative", [](const Spectrum& x) { return first_derivative(x); });
    return s;
}

LabeledSet run_pipeline(const LabeledSet& set, const PreprocessConfig& cfg)
{
    cfg.validate(set.grid());
    std::vector<Spectrum> out;
    out.reserve(set.size());
    for (const auto& s : set.spectra())
        out.push_back(run_spectrum(s, cfg));
    return LabeledSet(std::move(out), set.targets(), set.tag());
}

SpectraSet run_pipeline(const SpectraSet& set, const PreprocessConfig& cfg)
{
    cfg.validate(set.grid());
    SpectraSet out;
    out.tag = set.tag;
    for (const auto& s : set.spectra)
        out.spectra.push_back(run_spectrum(s, cfg));
    return out;
}

} // namespace spikecal::preprocess
