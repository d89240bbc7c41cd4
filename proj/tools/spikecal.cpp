// spikecal: calibrate spectral PLS models with SMOTE-spiked calibration sets.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spikecal/benchmark.hpp"
#include "spikecal/config.hpp"
#include "spikecal/errors.hpp"
#include "spikecal/montecarlo.hpp"
#include "spikecal/pls.hpp"
#include "spikecal/preprocess.hpp"
#include "spikecal/report.hpp"
#include "spikecal/selection.hpp"
#include "spikecal/smoter.hpp"

namespace fs = std::filesystem;
using namespace spikecal;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

/// Values given on the command line, in config-key form.
struct Overrides {
    std::vector<std::pair<std::string, std::string>> items;

    template <class T>
    void add(const CLI::Option* opt, const std::string& key, const T& value)
    {
        if (opt && opt->count() > 0) {
            if constexpr (std::is_same_v<T, std::string>)
                items.emplace_back(key, value);
            else
                items.emplace_back(key, std::to_string(value));
        }
    }
    void flag(const CLI::Option* opt, const std::string& key, const std::string& value)
    {
        if (opt && opt->count() > 0)
            items.emplace_back(key, value);
    }
};

struct StageFlags {
    CLI::Option* no_offset = nullptr;
    CLI::Option* no_trim = nullptr;
    CLI::Option* no_absorbance = nullptr;
    CLI::Option* no_ssa = nullptr;
    CLI::Option* no_normalize = nullptr;
    CLI::Option* no_derivative = nullptr;
    CLI::Option* percent = nullptr;

    void attach(CLI::App* sub)
    {
        no_offset = sub->add_flag("--no-offset", "Skip detector offset correction");
        no_trim = sub->add_flag("--no-trim", "Skip wavelength trimming");
        no_absorbance = sub->add_flag("--no-absorbance", "Skip the log10(1/R) transform");
        no_ssa = sub->add_flag("--no-ssa", "Skip SSA smoothing");
        no_normalize = sub->add_flag("--no-normalize", "Skip division by the maximum");
        no_derivative = sub->add_flag("--no-derivative", "Skip the first derivative");
        percent = sub->add_flag("--reflectance-percent", "Input reflectance is in percent");
    }
    void collect(Overrides& o) const
    {
        o.flag(no_offset, "preprocess.offset", "false");
        o.flag(no_trim, "preprocess.trim", "false");
        o.flag(no_absorbance, "preprocess.absorbance", "false");
        o.flag(no_ssa, "preprocess.ssa", "false");
        o.flag(no_normalize, "preprocess.normalize", "false");
        o.flag(no_derivative, "preprocess.derivative", "false");
        o.flag(percent, "input.reflectance_percent", "true");
    }
};

void write_effective_config(const RunConfig& cfg)
{
    fs::create_directories(cfg.out_dir);
    std::ofstream out(cfg.out_dir / "effective_config.txt");
    out << effective_config(cfg);
    if (!out)
        throw DataError("cannot write " + (cfg.out_dir / "effective_config.txt").string());
}

CsvOptions csv_options(const RunConfig& cfg) { return {cfg.reflectance_percent}; }

LabeledSet load_concat(const std::vector<std::string>& paths, const CsvOptions& opts)
{
    LabeledSet out;
    for (const auto& p : paths) {
        auto s = load_labeled_csv(p, DatasetTag::Other, opts);
        out = out.empty() ? std::move(s) : LabeledSet::concat(out, s, DatasetTag::Other);
    }
    return out;
}

void write_metrics_csv(const fs::path& path, const selection::MetricsReport& m, std::size_t p)
{
    std::ofstream out(path);
    out << "n,p,rmse,r2,me\n"
        << m.n << ',' << p << ',' << format_double(m.rmse) << ',' << format_double(m.r2) << ','
        << format_double(m.me) << '\n';
    if (!out)
        throw DataError("cannot write " + path.string());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"spikecal - SMOTE-spiked PLS calibration for reflectance spectra"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    auto* o_config = app.add_option("--config", config_path, "Flat key = value config file");
    auto* o_out = app.add_option("--out", out_dir, "Output directory");
    auto* o_seed = app.add_option("--seed", seed, "RNG seed (SMOTE / Monte Carlo master seed)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Write the synthetic lab/field benchmark");
    benchmark::BenchmarkConfig bench;
    int sim_step = bench.grid.step_nm;
    sim->add_option("--step", sim_step, "Wavelength step in nm (grid 350-2500)")->capture_default_str();
    sim->add_option("--n-lab", bench.n_lab, "Lab sample count")->capture_default_str();
    sim->add_option("--n-field", bench.n_field, "Field sample count")->capture_default_str();

    // preprocess
    auto* pre = app.add_subcommand("preprocess", "Run the pretreatment chain on a CSV");
    std::string pre_in, pre_out;
    pre->add_option("--input", pre_in, "Labeled or unlabeled spectra CSV")->required();
    pre->add_option("--output", pre_out, "Output CSV (default <out>/preprocessed.csv)");
    StageFlags pre_flags;
    pre_flags.attach(pre);

    // smote
    auto* smo = app.add_subcommand("smote", "Generate synthetic samples from raw labeled spectra");
    std::string smo_in, smo_out;
    int smo_n = 0, smo_k = 0;
    smo->add_option("--input", smo_in, "Labeled raw spectra (the rare set)")->required();
    smo->add_option("--output", smo_out, "Output CSV (default <out>/synthetic.csv)");
    auto* o_smo_n = smo->add_option("--n", smo_n, "Amount of SMOTE in percent");
    auto* o_smo_k = smo->add_option("--k", smo_k, "Nearest neighbour count");
    auto* o_smo_pct = smo->add_flag("--reflectance-percent", "Input reflectance is in percent");

    // pca
    auto* pc = app.add_subcommand("pca", "PCA of raw lab/field spectra with projected synthetic spectra");
    std::string pc_lab, pc_field, pc_syn, pc_fit_on;
    std::size_t pc_comp = 0;
    auto* o_pc_lab = pc->add_option("--lab", pc_lab, "Raw lab CSV");
    auto* o_pc_field = pc->add_option("--field", pc_field, "Raw field CSV");
    pc->add_option("--synthetic", pc_syn, "Raw synthetic CSV to project");
    auto* o_pc_comp = pc->add_option("--components", pc_comp, "Number of principal components");
    auto* o_pc_fit = pc->add_option("--fit-on", pc_fit_on, "L or LF");

    // train
    auto* tr = app.add_subcommand("train", "Select components by LOOCV AICc and fit a PLS model");
    std::vector<std::string> tr_in;
    std::string tr_comp = "auto";
    tr->add_option("--input", tr_in, "Preprocessed labeled CSV(s), concatenated in order")->required();
    tr->add_option("--components", tr_comp, "auto or a fixed component count")->capture_default_str();

    // validate
    auto* va = app.add_subcommand("validate", "Predict with a saved model");
    std::string va_model, va_in;
    va->add_option("--model", va_model, "model.csv from train")->required();
    va->add_option("--input", va_in, "Preprocessed CSV (labeled for metrics)")->required();

    // mc
    auto* mc = app.add_subcommand("mc", "Monte Carlo SMOTE -> spike -> select -> validate");
    std::string mc_lab, mc_field;
    std::size_t mc_reps = 0;
    int mc_n = 0, mc_k = 0;
    unsigned mc_threads = 1;
    auto* o_mc_lab = mc->add_option("--lab", mc_lab, "Raw lab calibration CSV");
    auto* o_mc_field = mc->add_option("--field", mc_field, "Raw field CSV");
    auto* o_mc_reps = mc->add_option("--reps", mc_reps, "Replicate count");
    auto* o_mc_n = mc->add_option("--n", mc_n, "Amount of SMOTE in percent");
    auto* o_mc_k = mc->add_option("--k", mc_k, "Nearest neighbour count");
    auto* o_mc_threads = mc->add_option("--threads", mc_threads, "Worker threads");
    StageFlags mc_flags;
    mc_flags.attach(mc);

    // report
    auto* rp = app.add_subcommand("report", "Rebuild report files from replicates.csv");
    std::string rp_records, rp_lab, rp_field;
    rp->add_option("--replicates", rp_records, "replicates.csv from mc")->required();
    auto* o_rp_lab = rp->add_option("--lab", rp_lab, "Raw lab calibration CSV");
    auto* o_rp_field = rp->add_option("--field", rp_field, "Raw field CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        Overrides ov;
        ov.add(o_out, "out", out_dir);
        ov.add(o_seed, "seed", seed);
        ov.add(o_smo_n, "smote.n", smo_n);
        ov.add(o_smo_k, "smote.k", smo_k);
        ov.flag(o_smo_pct, "input.reflectance_percent", "true");
        ov.add(o_pc_lab, "lab", pc_lab);
        ov.add(o_pc_field, "field", pc_field);
        ov.add(o_pc_comp, "pca.components", pc_comp);
        ov.add(o_pc_fit, "pca.fit_on", pc_fit_on);
        ov.add(o_mc_lab, "lab", mc_lab);
        ov.add(o_mc_field, "field", mc_field);
        ov.add(o_mc_reps, "mc.reps", mc_reps);
        ov.add(o_mc_n, "smote.n", mc_n);
        ov.add(o_mc_k, "smote.k", mc_k);
        ov.add(o_mc_threads, "mc.threads", mc_threads);
        ov.add(o_rp_lab, "lab", rp_lab);
        ov.add(o_rp_field, "field", rp_field);
        pre_flags.collect(ov);
        mc_flags.collect(ov);

        const std::optional<fs::path> cfg_file =
            o_config->count() ? std::optional<fs::path>(config_path) : std::nullopt;
        RunConfig cfg = parse_config(cfg_file, ov.items);

        if (sim->parsed()) {
            cfg.validate_paths(false, false);
            bench.grid = WavelengthGrid(350, 2500, sim_step);
            if (o_seed->count())
                bench.seed = cfg.smote.seed;
            const auto b = benchmark::generate(bench);
            write_labeled_csv(cfg.out_dir / "lab.csv", b.lab);
            write_labeled_csv(cfg.out_dir / "field.csv", b.field);
            write_effective_config(cfg);
        } else if (pre->parsed()) {
            cfg.validate_paths(false, false);
            const fs::path out = pre_out.empty() ? cfg.out_dir / "preprocessed.csv" : fs::path(pre_out);
            if (csv_is_labeled(pre_in)) {
                auto set = load_labeled_csv(pre_in, DatasetTag::Other, csv_options(cfg));
                write_labeled_csv(out, preprocess::run_pipeline(set, cfg.pipeline.preprocess));
            } else {
                auto set = load_unlabeled_csv(pre_in, DatasetTag::Other, csv_options(cfg));
                write_unlabeled_csv(out, preprocess::run_pipeline(set, cfg.pipeline.preprocess));
            }
            write_effective_config(cfg);
        } else if (smo->parsed()) {
            cfg.validate_paths(false, false);
            auto source = load_labeled_csv(smo_in, DatasetTag::Field, csv_options(cfg));
            const auto gen = smoter::generate(source, cfg.smote);
            const fs::path out = smo_out.empty() ? cfg.out_dir / "synthetic.csv" : fs::path(smo_out);
            write_labeled_csv(out, gen.set);
            std::ofstream prov(fs::path(out).replace_extension(".provenance.csv"));
            prov << "id,parent_id,neighbor_id,weight,d1,d2,target\n";
            for (const auto& s : gen.samples)
                prov << s.spectrum.id << ',' << s.parent_id << ',' << s.neighbor_id << ',' << format_double(s.weight)
                     << ',' << format_double(s.d1) << ',' << format_double(s.d2) << ',' << format_double(s.target)
                     << '\n';
            write_effective_config(cfg);
        } else if (pc->parsed()) {
            cfg.validate_paths(true, true);
            const auto opts = csv_options(cfg);
            auto lab = load_labeled_csv(cfg.lab_path, DatasetTag::Lab, opts);
            auto field = load_labeled_csv(cfg.field_path, DatasetTag::Field, opts);
            std::optional<LabeledSet> syn;
            if (!pc_syn.empty())
                syn = load_labeled_csv(pc_syn, DatasetTag::Synthetic, opts);
            const auto table =
                report::pca_scores(lab, field, syn ? &*syn : nullptr, cfg.pca_fit_on, cfg.pca_components);
            report::write_scores_csv(cfg.out_dir / "scores.csv", table);
            report::write_explained_variance_csv(cfg.out_dir / "explained_variance.csv", table);
            write_effective_config(cfg);
        } else if (tr->parsed()) {
            cfg.validate_paths(false, false);
            const auto set = load_concat(tr_in, {});
            const Eigen::MatrixXd x = set.matrix();
            const Eigen::VectorXd y = set.target_vector();
            selection::ComponentRange range = cfg.pipeline.components;
            if (tr_comp != "auto") {
                std::size_t p = 0;
                try {
                    p = std::stoul(tr_comp);
                } catch (const std::exception&) {
                    throw ConfigError("--components expects 'auto' or an integer, got '" + tr_comp + "'");
                }
                range = {p, p};
            }
            const auto sel = selection::select_components(x, y, range);
            for (const auto& w : sel.warnings)
                std::cerr << "warning: " << w << '\n';
            auto model = pls::fit(x, y, sel.best_p);
            model.grid = set.grid();
            pls::save_model(cfg.out_dir / "model.csv", model);
            report::write_aicc_csv(cfg.out_dir / "aicc_by_p.csv", sel);
            std::vector<report::PredictionRow> rows;
            for (std::size_t i = 0; i < set.size(); ++i)
                rows.push_back({set.spectra()[i].id, set.targets()[i],
                                sel.loocv_predictions_best(static_cast<Eigen::Index>(i)), "calibration"});
            report::write_predictions_csv(cfg.out_dir / "loocv_predictions.csv", rows);
            write_metrics_csv(cfg.out_dir / "calibration_metrics.csv",
                              selection::evaluate(sel.loocv_predictions_best, y), sel.best_p);
            write_effective_config(cfg);
        } else if (va->parsed()) {
            cfg.validate_paths(false, false);
            const auto model = pls::load_model(va_model);
            auto check_grid = [&](const WavelengthGrid& g) {
                if (model.grid && !(*model.grid == g))
                    throw DataError("model grid " + model.grid->describe() + " differs from input grid " + g.describe());
            };
            std::vector<report::PredictionRow> rows;
            if (csv_is_labeled(va_in)) {
                const auto set = load_labeled_csv(va_in, DatasetTag::Field);
                check_grid(set.grid());
                const Eigen::VectorXd pred = pls::predict(model, set.matrix());
                for (std::size_t i = 0; i < set.size(); ++i)
                    rows.push_back({set.spectra()[i].id, set.targets()[i], pred(static_cast<Eigen::Index>(i)),
                                    "validation"});
                write_metrics_csv(cfg.out_dir / "validation_metrics.csv",
                                  selection::evaluate(pred, set.target_vector()), model.n_components);
            } else {
                const auto set = load_unlabeled_csv(va_in, DatasetTag::Field);
                check_grid(set.grid());
                Eigen::MatrixXd x(static_cast<Eigen::Index>(set.size()), static_cast<Eigen::Index>(set.grid().length()));
                for (std::size_t i = 0; i < set.size(); ++i)
                    x.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(
                        set.spectra[i].values.data(), x.cols());
                const Eigen::VectorXd pred = pls::predict(model, x);
                for (std::size_t i = 0; i < set.size(); ++i)
                    rows.push_back({set.spectra[i].id, std::numeric_limits<double>::quiet_NaN(),
                                    pred(static_cast<Eigen::Index>(i)), "prediction"});
            }
            report::write_predictions_csv(cfg.out_dir / "validation_predictions.csv", rows);
            write_effective_config(cfg);
        } else if (mc->parsed() || rp->parsed()) {
            cfg.validate_paths(true, true);
            write_effective_config(cfg);
            const auto opts = csv_options(cfg);
            auto data = montecarlo::PreparedData::prepare(load_labeled_csv(cfg.lab_path, DatasetTag::Lab, opts),
                                                          load_labeled_csv(cfg.field_path, DatasetTag::Field, opts),
                                                          cfg.pipeline);
            std::vector<montecarlo::ReplicateRecord> records;
            if (mc->parsed()) {
                records = montecarlo::run_replicates(data, cfg.smote, cfg.reps, cfg.smote.seed, cfg.pipeline,
                                                     cfg.threads);
            } else {
                records = report::read_replicates_csv(rp_records);
            }
            for (const auto& r : records)
                if (!r.ok)
                    std::cerr << "warning: replicate " << r.replicate_index << " failed: " << r.error << '\n';
            report::emit_report(cfg, data, records);
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
    return kOk;
}
