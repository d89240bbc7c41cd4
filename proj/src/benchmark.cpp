#include "spikecal/benchmark.hpp"

#include <cmath>
#include <string>

#include "spikecal/rng.hpp"

namespace spikecal::benchmark {

namespace {

double gauss(double x, double centre, double width)
{
    const double z = (x - centre) / width;
    return std::exp(-0.5 * z * z);
}

// Box-Muller on the project RNG so the benchmark is identical across standard libraries.
double normal(Rng& rng)
{
    double u1 = rng.uniform01();
    while (u1 <= 0.0)
        u1 = rng.uniform01();
    const double u2 = rng.uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

struct Draw {
    std::vector<double> absorbance;
    double target;
};

Draw draw_sample(const BenchmarkConfig& cfg, Rng& rng, double t_lo, double t_hi)
{
    const double y = uniform(rng, t_lo, t_hi);
    const double c1 = uniform(rng, 0.02, 0.12);
    const double c2 = uniform(rng, 0.02, 0.10);
    const double c3 = uniform(rng, 0.02, 0.10);
    const double tilt = uniform(rng, -0.05, 0.05);
    std::vector<double> a(cfg.grid.length());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double wl = cfg.grid.wavelength(i);
        const double u = (wl - 350.0) / 2150.0;
        const double baseline = 0.20 + (0.10 + tilt) * u;
        const double nuisance = c1 * gauss(wl, 900.0, 180.0) + c2 * gauss(wl, 1600.0, 220.0) +
                                c3 * gauss(wl, 2200.0, 120.0);
        // Organic carbon: dark in the visible plus weak bands near 1730 and 2310 nm.
        const double carbon = std::exp(-(wl - 350.0) / 500.0) + 0.4 * gauss(wl, 1730.0, 60.0) +
                              0.5 * gauss(wl, 2310.0, 70.0);
        a[i] = baseline + nuisance + cfg.carbon_strength * y * carbon;
    }
    return {std::move(a), y};
}

std::vector<double> to_raw_reflectance(const BenchmarkConfig& cfg, Rng& rng, const std::vector<double>& a,
                                       double factor, double offset)
{
    const double j1 = cfg.splice_jump_sd * normal(rng);
    const double j2 = cfg.splice_jump_sd * normal(rng);
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double wl = cfg.grid.wavelength(i);
        double v = factor * std::pow(10.0, -a[i]) + offset + cfg.noise_sd * normal(rng);
        if (wl <= 1000.0)
            v += j1;
        else if (wl > 1830.0)
            v += j2;
        r[i] = std::max(v, 1e-4);
    }
    return r;
}

std::string sample_id(char prefix, std::size_t i)
{
    std::string n = std::to_string(i + 1);
    return std::string(1, prefix) + std::string(n.size() < 3 ? 3 - n.size() : 0, '0') + n;
}

} // namespace

Benchmark generate(const BenchmarkConfig& cfg)
{
    Rng rng(cfg.seed);
    std::vector<Spectrum> lab;
    std::vector<double> lab_y;
    for (std::size_t i = 0; i < cfg.n_lab; ++i) {
        auto d = draw_sample(cfg, rng, cfg.lab_target_lo, cfg.lab_target_hi);
        lab.emplace_back(sample_id('L', i), to_raw_reflectance(cfg, rng, d.absorbance, 1.0, 0.0), cfg.grid);
        lab_y.push_back(d.target);
    }

    std::vector<Spectrum> field;
    std::vector<double> field_y;
    for (std::size_t i = 0; i < cfg.n_field; ++i) {
        auto d = draw_sample(cfg, rng, cfg.field_target_lo, cfg.field_target_hi);
        const double depth = uniform(rng, cfg.water_depth_lo, cfg.water_depth_hi);
        for (std::size_t w = 0; w < d.absorbance.size(); ++w) {
            const double wl = cfg.grid.wavelength(w);
            d.absorbance[w] += depth * (0.6 * gauss(wl, 1450.0, 40.0) + gauss(wl, 1930.0, 50.0) +
                                        0.3 * gauss(wl, 2400.0, 150.0));
        }
        const double factor = uniform(rng, cfg.moisture_factor_lo, cfg.moisture_factor_hi);
        const double offset = cfg.moisture_offset_sd * normal(rng);
        field.emplace_back(sample_id('F', i), to_raw_reflectance(cfg, rng, d.absorbance, factor, offset), cfg.grid);
        field_y.push_back(d.target);
    }
    return {LabeledSet(std::move(lab), std::move(lab_y), DatasetTag::Lab),
            LabeledSet(std::move(field), std::move(field_y), DatasetTag::Field)};
}

} // namespace spikecal::benchmark
