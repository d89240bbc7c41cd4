#include "spikecal/pls.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "spikecal/errors.hpp"

namespace spikecal::pls {

namespace {

// Relative size below which a new weight direction or score counts as exhausted.
constexpr double kExhausted = 1e-12;

} // namespace

NipalsPath::NipalsPath(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                       std::size_t max_components)
{
    const auto n = x.rows();
    const auto m = x.cols();
    if (n < 2)
        throw DataError("PLS needs at least 2 samples, got " + std::to_string(n));
    if (y.size() != n)
        throw DataError("PLS got " + std::to_string(n) + " rows but " + std::to_string(y.size()) + " targets");
    if (max_components < 1)
        throw ConfigError("PLS needs at least one component");
    if (!x.allFinite() || !y.allFinite())
        throw DataError("PLS input contains non-finite values");

    x_mean_ = x.colwise().mean().transpose();
    y_mean_ = y.mean();
    Eigen::MatrixXd e = x.rowwise() - x_mean_.transpose();
    Eigen::VectorXd f = y.array() - y_mean_;
    if (f.squaredNorm() == 0.0)
        throw NumericalError("PLS response has zero variance");

    const auto cap = static_cast<Eigen::Index>(max_components);
    w_.resize(m, cap);
    p_.resize(m, cap);
    q_.resize(cap);

    const double w0 = (e.transpose() * f).norm();
    const double x0 = e.norm();
    for (Eigen::Index a = 0; a < cap; ++a) {
        Eigen::VectorXd w = e.transpose() * f;
        const double wn = w.norm();
        if (wn <= kExhausted * w0)
            break;
        w /= wn;
        const Eigen::VectorXd t = e * w;
        const double tt = t.squaredNorm();
        if (tt <= (kExhausted * x0) * (kExhausted * x0))
            break;
        const Eigen::VectorXd pl = e.transpose() * t / tt;
        const double qa = f.dot(t) / tt;
        e.noalias() -= t * pl.transpose();
        f -= qa * t;
        w_.col(a) = w;
        p_.col(a) = pl;
        q_(a) = qa;
        ++achieved_;
    }
    const auto got = static_cast<Eigen::Index>(achieved_);
    w_.conservativeResize(m, got);
    p_.conservativeResize(m, got);
    q_.conservativeResize(got);
}

Eigen::VectorXd NipalsPath::coefficients(std::size_t q) const
{
    if (q < 1 || q > achieved_)
        throw NumericalError("PLS model with " + std::to_string(q) + " components requested, achievable rank is " +
                             std::to_string(achieved_));
    const auto k = static_cast<Eigen::Index>(q);
    // B = W (P^T W)^{-1} q; P^T W is unit upper triangular for NIPALS.
    const Eigen::MatrixXd ptw = p_.leftCols(k).transpose() * w_.leftCols(k);
    const Eigen::VectorXd r = ptw.triangularView<Eigen::Upper>().solve(q_.head(k));
    return w_.leftCols(k) * r;
}

PlsModel NipalsPath::model(std::size_t q) const
{
    PlsModel mdl;
    mdl.regression_coefficients = coefficients(q);
    const auto k = static_cast<Eigen::Index>(q);
    mdl.x_mean = x_mean_;
    mdl.y_mean = y_mean_;
    mdl.weights = w_.leftCols(k);
    mdl.x_loadings = p_.leftCols(k);
    mdl.y_loadings = q_.head(k);
    mdl.n_components = q;
    return mdl;
}

Eigen::MatrixXd NipalsPath::predict_all(const Eigen::Ref<const Eigen::MatrixXd>& x) const
{
    if (static_cast<std::size_t>(x.cols()) != static_cast<std::size_t>(x_mean_.size()))
        throw DataError("PLS prediction expects " + std::to_string(x_mean_.size()) + " features, got " +
                        std::to_string(x.cols()));
    const Eigen::MatrixXd xc = x.rowwise() - x_mean_.transpose();
    Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(achieved_));
    for (std::size_t q = 1; q <= achieved_; ++q)
        out.col(static_cast<Eigen::Index>(q - 1)) = (xc * coefficients(q)).array() + y_mean_;
    return out;
}

PlsModel fit(const Eigen::Ref<const Eigen::MatrixXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y, std::size_t p)
{
    const auto limit = std::min<std::size_t>(static_cast<std::size_t>(std::max<Eigen::Index>(x.rows() - 1, 0)),
                                             static_cast<std::size_t>(x.cols()));
    if (p < 1 || p > limit)
        throw NumericalError("PLS components p=" + std::to_string(p) + " outside 1.." + std::to_string(limit) +
                             " (n-1 and feature count bound)");
    NipalsPath path(x, y, p);
    if (path.achieved() < p)
        throw NumericalError("PLS with p=" + std::to_string(p) + " is degenerate: achievable rank is " +
                             std::to_string(path.achieved()));
    return path.model(p);
}

Eigen::VectorXd predict(const PlsModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x)
{
    if (x.rows() == 0)
        return Eigen::VectorXd(0);
    if (static_cast<std::size_t>(x.cols()) != model.n_features())
        throw DataError("PLS prediction expects " + std::to_string(model.n_features()) + " features, got " +
                        std::to_string(x.cols()));
    return ((x.rowwise() - model.x_mean.transpose()) * model.regression_coefficients).array() + model.y_mean;
}

Eigen::MatrixXd training_scores(const PlsModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x)
{
    Eigen::MatrixXd e = x.rowwise() - model.x_mean.transpose();
    Eigen::MatrixXd t(x.rows(), static_cast<Eigen::Index>(model.n_components));
    for (Eigen::Index a = 0; a < t.cols(); ++a) {
        t.col(a) = e * model.weights.col(a);
        e.noalias() -= t.col(a) * model.x_loadings.col(a).transpose();
    }
    return t;
}

namespace {

void write_row(std::ostream& out, const Eigen::Ref<const Eigen::VectorXd>& v)
{
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out << (i ? "," : "") << format_double(v(i));
    out << '\n';
}

std::vector<double> parse_row(const std::string& line, const std::filesystem::path& path)
{
    std::vector<double> row;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        try {
            std::size_t used = 0;
            row.push_back(std::stod(cell, &used));
            if (used != cell.size())
                throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw DataError(path.string() + ": non-numeric model value '" + cell + "'");
        }
    }
    return row;
}

} // namespace

void save_model(const std::filesystem::path& path, const PlsModel& model)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path.string());
    out << "section,meta\n";
    out << "n_features," << model.n_features() << '\n';
    out << "n_components," << model.n_components << '\n';
    out << "y_mean," << format_double(model.y_mean) << '\n';
    if (model.grid)
        out << "grid," << model.grid->start_nm << ',' << model.grid->end_nm << ',' << model.grid->step_nm << '\n';
    out << "section,x_mean\n";
    write_row(out, model.x_mean);
    out << "section,weights\n";
    for (Eigen::Index a = 0; a < model.weights.cols(); ++a)
        write_row(out, model.weights.col(a));
    out << "section,x_loadings\n";
    for (Eigen::Index a = 0; a < model.x_loadings.cols(); ++a)
        write_row(out, model.x_loadings.col(a));
    out << "section,y_loadings\n";
    write_row(out, model.y_loadings);
    out << "section,coefficients\n";
    write_row(out, model.regression_coefficients);
    if (!out)
        throw DataError("write failed for " + path.string());
}

PlsModel load_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::map<std::string, std::vector<std::string>> sections;
    std::string current;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line.rfind("section,", 0) == 0) {
            current = line.substr(8);
            sections[current];
            continue;
        }
        if (current.empty())
            throw DataError(path.string() + ": data before first section");
        sections[current].push_back(line);
    }
    for (const char* name : {"meta", "x_mean", "weights", "x_loadings", "y_loadings", "coefficients"})
        if (!sections.count(name))
            throw DataError(path.string() + ": missing section '" + name + "'");

    PlsModel m;
    std::size_t n_features = 0;
    for (const auto& l : sections["meta"]) {
        const auto comma = l.find(',');
        const auto key = l.substr(0, comma);
        const auto val = comma == std::string::npos ? std::string{} : l.substr(comma + 1);
        if (key == "n_features")
            n_features = std::stoul(val);
        else if (key == "n_components")
            m.n_components = std::stoul(val);
        else if (key == "y_mean")
            m.y_mean = parse_row(val, path).at(0);
        else if (key == "grid") {
            auto g = parse_row(val, path);
            if (g.size() != 3)
                throw DataError(path.string() + ": grid needs start,end,step");
            m.grid = WavelengthGrid(static_cast<int>(g[0]), static_cast<int>(g[1]), static_cast<int>(g[2]));
        }
    }
    auto vec = [&](const std::string& name) {
        const auto& rows = sections[name];
        if (rows.size() != 1)
            throw DataError(path.string() + ": section '" + name + "' must have one row");
        auto r = parse_row(rows[0], path);
        return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size())));
    };
    auto mat = [&](const std::string& name) {
        const auto& rows = sections[name];
        if (rows.size() != m.n_components)
            throw DataError(path.string() + ": section '" + name + "' must have n_components rows");
        Eigen::MatrixXd out(static_cast<Eigen::Index>(n_features), static_cast<Eigen::Index>(rows.size()));
        for (std::size_t a = 0; a < rows.size(); ++a) {
            auto r = parse_row(rows[a], path);
            if (r.size() != n_features)
                throw DataError(path.string() + ": section '" + name + "' row has wrong length");
            out.col(static_cast<Eigen::Index>(a)) = Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
        }
        return out;
    };
    m.x_mean = vec("x_mean");
    m.weights = mat("weights");
    m.x_loadings = mat("x_loadings");
    m.y_loadings = vec("y_loadings");
    m.regression_coefficients = vec("coefficients");
    if (static_cast<std::size_t>(m.x_mean.size()) != n_features ||
        static_cast<std::size_t>(m.regression_coefficients.size()) != n_features ||
        static_cast<std::size_t>(m.y_loadings.size()) != m.n_components)
        throw DataError(path.string() + ": inconsistent model dimensions");
    return m;
}

} // namespace spikecal::pls
