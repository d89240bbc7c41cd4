#include "spikecal/report.hpp"

#include <fstream>
#include <sstream>

#include "spikecal/errors.hpp"

namespace spikecal::report {

namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out)
        throw DataError("write failed for " + path.string());
}

std::string fmt(double v) { return format_double(v); }

void put_summary(std::ostream& out, const montecarlo::Summary& s)
{
    out << ',' << fmt(s.median) << ',' << fmt(s.q25) << ',' << fmt(s.q75);
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ','))
        cells.push_back(cell);
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

} // namespace

const std::string& aggregate_header()
{
    static const std::string h = [] {
        std::string s = "model,N,k";
        for (const char* f : {"p", "cal_rmse", "cal_r2", "cal_me", "val_rmse", "val_r2", "val_me"})
            for (const char* q : {"median", "q25", "q75"})
                s += std::string(",") + f + "_" + q;
        return s + ",replicates,failed";
    }();
    return h;
}

const std::string& replicates_header()
{
    static const std::string h = "replicate,seed,N,k,status,best_p,n_calibration,n_synthetic,"
                                 "cal_rmse,cal_r2,cal_me,val_rmse,val_r2,val_me,error";
    return h;
}

void write_aggregate_csv(const std::filesystem::path& path, std::span<const AggregateRow> rows)
{
    auto out = open_out(path);
    out << aggregate_header() << '\n';
    for (const auto& r : rows) {
        out << r.model << ',';
        if (r.n_percent > 0)
            out << r.n_percent << ',' << r.k;
        else
            out << "-,-";
        const auto& s = r.stats;
        for (const auto* f : {&s.best_p, &s.cal_rmse, &s.cal_r2, &s.cal_me, &s.val_rmse, &s.val_r2, &s.val_me})
            put_summary(out, *f);
        out << ',' << s.replicates << ',' << s.failed << '\n';
    }
    finish(out, path);
}

void write_replicates_csv(const std::filesystem::path& path, std::span<const montecarlo::ReplicateRecord> records)
{
    auto out = open_out(path);
    out << replicates_header() << '\n';
    for (const auto& r : records) {
        out << r.replicate_index << ',' << r.seed << ',' << r.smote_params.n_percent << ',' << r.smote_params.k << ','
            << (r.ok ? "ok" : "failed") << ',';
        if (r.ok) {
            out << r.best_p << ',' << r.n_calibration << ',' << r.n_synthetic << ',' << fmt(r.calibration.rmse) << ','
                << fmt(r.calibration.r2) << ',' << fmt(r.calibration.me) << ',' << fmt(r.validation.rmse) << ','
                << fmt(r.validation.r2) << ',' << fmt(r.validation.me) << ',';
        } else {
            std::string msg = r.error;
            for (char& c : msg)
                if (c == ',' || c == '\n' || c == '\r')
                    c = ';';
            out << ",,,,,,,,," << msg;
        }
        out << '\n';
    }
    finish(out, path);
}

std::vector<montecarlo::ReplicateRecord> read_replicates_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != replicates_header())
        throw DataError(path.string() + ": unexpected header");
    std::vector<montecarlo::ReplicateRecord> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        auto c = split(line);
        if (c.size() != 15)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 15 cells");
        try {
            montecarlo::ReplicateRecord r;
            r.replicate_index = std::stoul(c[0]);
            r.seed = std::stoull(c[1]);
            r.smote_params.n_percent = std::stoi(c[2]);
            r.smote_params.k = std::stoi(c[3]);
            r.smote_params.seed = r.seed;
            r.ok = c[4] == "ok";
            if (r.ok) {
                r.best_p = std::stoul(c[5]);
                r.n_calibration = std::stoul(c[6]);
                r.n_synthetic = std::stoul(c[7]);
                r.calibration = {std::stod(c[8]), std::stod(c[10]), std::stod(c[9]), r.n_calibration};
                r.validation = {std::stod(c[11]), std::stod(c[13]), std::stod(c[12]), 0};
            } else {
                r.error = c[14];
            }
            out.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed record");
        }
    }
    if (out.empty())
        throw DataError(path.string() + ": no records");
    return out;
}

std::vector<PredictionRow> prediction_rows(const montecarlo::CalibrationRun& run, const LabeledSet& field)
{
    std::vector<PredictionRow> rows;
    const auto& cal = run.calibration;
    for (std::size_t i = 0; i < cal.size(); ++i)
        rows.push_back({cal.spectra()[i].id, cal.targets()[i],
                        run.selection.loocv_predictions_best(static_cast<Eigen::Index>(i)),
                        i < run.n_lab ? "calibration_lab" : "calibration_synthetic"});
    for (std::size_t i = 0; i < field.size(); ++i)
        rows.push_back({field.spectra()[i].id, field.targets()[i],
                        run.validation_predictions(static_cast<Eigen::Index>(i)), "validation_field"});
    return rows;
}

void write_predictions_csv(const std::filesystem::path& path, std::span<const PredictionRow> rows)
{
    auto out = open_out(path);
    out << "id,measured,predicted,split\n";
    for (const auto& r : rows)
        out << r.id << ',' << fmt(r.measured) << ',' << fmt(r.predicted) << ',' << r.split << '\n';
    finish(out, path);
}

void write_aicc_csv(const std::filesystem::path& path, const selection::SelectionResult& sel)
{
    auto out = open_out(path);
    out << "p,rmse_cv,aicc\n";
    for (const auto& [p, a] : sel.aicc_by_p)
        out << p << ',' << fmt(sel.rmse_cv_by_p.at(p)) << ',' << fmt(a) << '\n';
    finish(out, path);
}

ScoreTable pca_scores(const LabeledSet& lab_raw, const LabeledSet& field_raw, const LabeledSet* synthetic_raw,
                      PcaFitOn fit_on, std::size_t components)
{
    assert_same_grid(lab_raw, field_raw);
    const LabeledSet fit_set =
        fit_on == PcaFitOn::Lab ? lab_raw : LabeledSet::concat(lab_raw, field_raw, DatasetTag::Other);
    const auto model = pca::fit_pca(fit_set.matrix(), components);

    ScoreTable t;
    t.explained_variance_ratio = model.explained_variance_ratio;
    std::vector<const LabeledSet*> sets{&lab_raw, &field_raw};
    std::vector<char> letters{'L', 'F'};
    if (synthetic_raw && !synthetic_raw->empty()) {
        assert_same_grid(lab_raw, *synthetic_raw);
        sets.push_back(synthetic_raw);
        letters.push_back('S');
    }
    std::size_t rows = 0;
    for (const auto* s : sets)
        rows += s->size();
    t.scores.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(components));
    Eigen::Index at = 0;
    for (std::size_t k = 0; k < sets.size(); ++k) {
        const auto& s = *sets[k];
        t.scores.middleRows(at, static_cast<Eigen::Index>(s.size())) = pca::project(model, s.matrix());
        at += static_cast<Eigen::Index>(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            t.ids.push_back(s.spectra()[i].id);
            t.tags.push_back(letters[k]);
            t.targets.push_back(s.targets()[i]);
        }
    }
    return t;
}

void write_scores_csv(const std::filesystem::path& path, const ScoreTable& t)
{
    auto out = open_out(path);
    out << "id,dataset_tag,target";
    for (Eigen::Index c = 0; c < t.scores.cols(); ++c)
        out << ",pc" << c + 1;
    out << '\n';
    for (std::size_t i = 0; i < t.ids.size(); ++i) {
        out << t.ids[i] << ',' << t.tags[i] << ',' << fmt(t.targets[i]);
        for (Eigen::Index c = 0; c < t.scores.cols(); ++c)
            out << ',' << fmt(t.scores(static_cast<Eigen::Index>(i), c));
        out << '\n';
    }
    finish(out, path);
}

void write_explained_variance_csv(const std::filesystem::path& path, const ScoreTable& t)
{
    auto out = open_out(path);
    out << "component,explained_variance_ratio\n";
    for (Eigen::Index c = 0; c < t.explained_variance_ratio.size(); ++c)
        out << "pc" << c + 1 << ',' << fmt(t.explained_variance_ratio(c)) << '\n';
    finish(out, path);
}

void emit_report(const RunConfig& cfg, const montecarlo::PreparedData& data,
                 std::span<const montecarlo::ReplicateRecord> records)
{
    const auto& dir = cfg.out_dir;
    std::filesystem::create_directories(dir);

    const auto stats = montecarlo::aggregate(records);
    const auto& rep = montecarlo::pick_representative(records);
    const auto unspiked = montecarlo::run_unspiked(data, cfg.pipeline);
    const auto spiked = montecarlo::run_spiked(data, rep.smote_params, cfg.pipeline);

    montecarlo::ReplicateRecord baseline;
    baseline.ok = true;
    baseline.best_p = unspiked.selection.best_p;
    baseline.calibration = unspiked.calibration_metrics;
    baseline.validation = unspiked.validation_metrics;
    const std::vector<AggregateRow> rows{
        {"I", 0, 0, montecarlo::aggregate(std::span(&baseline, 1))},
        {montecarlo::model_label(rep.smote_params.n_percent, rep.smote_params.k), rep.smote_params.n_percent,
         rep.smote_params.k, stats},
    };
    write_aggregate_csv(dir / "aggregate.csv", rows);
    write_replicates_csv(dir / "replicates.csv", records);
    write_predictions_csv(dir / "predictions_representative.csv", prediction_rows(spiked, data.field));
    write_predictions_csv(dir / "predictions_unspiked.csv", prediction_rows(unspiked, data.field));

    const auto scores =
        pca_scores(data.lab_raw, data.field_raw, &spiked.synthetic_raw, cfg.pca_fit_on, cfg.pca_components);
    write_scores_csv(dir / "scores.csv", scores);
    write_explained_variance_csv(dir / "explained_variance.csv", scores);
}

} // namespace spikecal::report
