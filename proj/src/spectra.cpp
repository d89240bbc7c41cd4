#include "spikecal/spectra.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "spikecal/errors.hpp"

namespace spikecal {

WavelengthGrid::WavelengthGrid(int start, int end, int step) : start_nm(start), end_nm(end), step_nm(step)
{
    if (step < 1)
        throw DataError("wavelength grid step must be >= 1, got " + std::to_string(step));
    if (start >= end)
        throw DataError("wavelength grid needs start < end, got " + std::to_string(start) + ".." +
                        std::to_string(end));
    if ((end - start) % step != 0)
        throw DataError("wavelength grid span " + std::to_string(end - start) + " is not a multiple of step " +
                        std::to_string(step));
}

bool WavelengthGrid::contains(int nm) const
{
    return nm >= start_nm && nm <= end_nm && (nm - start_nm) % step_nm == 0;
}

std::size_t WavelengthGrid::index_of(int nm) const
{
    if (!contains(nm))
        throw DataError("wavelength " + std::to_string(nm) + " nm is not on grid " + describe());
    return static_cast<std::size_t>((nm - start_nm) / step_nm);
}

std::string WavelengthGrid::describe() const
{
    return std::to_string(start_nm) + "-" + std::to_string(end_nm) + " nm step " + std::to_string(step_nm);
}

Spectrum::Spectrum(std::string id_, std::vector<double> values_, WavelengthGrid grid_)
    : id(std::move(id_)), values(std::move(values_)), grid(grid_)
{
    if (values.size() != grid.length())
        throw DataError("spectrum '" + id + "' has " + std::to_string(values.size()) + " values but grid " +
                        grid.describe() + " has " + std::to_string(grid.length()));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw DataError("spectrum '" + id + "' has a non-finite value at " +
                            std::to_string(grid.wavelength(i)) + " nm");
    }
}

char tag_letter(DatasetTag tag)
{
    switch (tag) {
    case DatasetTag::Lab: return 'L';
    case DatasetTag::Field: return 'F';
    case DatasetTag::Synthetic: return 'S';
    case DatasetTag::Other: break;
    }
    return 'X';
}

DatasetTag tag_from_letter(char c)
{
    switch (c) {
    case 'L': return DatasetTag::Lab;
    case 'F': return DatasetTag::Field;
    case 'S': return DatasetTag::Synthetic;
    default: return DatasetTag::Other;
    }
}

const WavelengthGrid& SpectraSet::grid() const
{
    if (spectra.empty())
        throw DataError("empty dataset has no grid");
    return spectra.front().grid;
}

LabeledSet::LabeledSet(std::vector<Spectrum> spectra, std::vector<double> targets, DatasetTag tag)
    : spectra_(std::move(spectra)), targets_(std::move(targets)), tag_(tag)
{
    if (spectra_.empty())
        throw DataError("labeled dataset must contain at least one sample");
    if (spectra_.size() != targets_.size())
        throw DataError("labeled dataset has " + std::to_string(spectra_.size()) + " spectra but " +
                        std::to_string(targets_.size()) + " targets");
    const auto& g = spectra_.front().grid;
    for (std::size_t i = 0; i < spectra_.size(); ++i) {
        if (!(spectra_[i].grid == g))
            throw DataError("sample '" + spectra_[i].id + "' is on grid " + spectra_[i].grid.describe() +
                            ", expected " + g.describe());
        if (!std::isfinite(targets_[i]) || targets_[i] < 0.0)
            throw DataError("sample '" + spectra_[i].id + "' has invalid target " + format_double(targets_[i]));
    }
}

const WavelengthGrid& LabeledSet::grid() const
{
    if (spectra_.empty())
        throw DataError("empty dataset has no grid");
    return spectra_.front().grid;
}

Eigen::MatrixXd LabeledSet::matrix() const
{
    const auto m = spectra_.empty() ? 0 : static_cast<Eigen::Index>(grid().length());
    Eigen::MatrixXd x(static_cast<Eigen::Index>(spectra_.size()), m);
    for (std::size_t i = 0; i < spectra_.size(); ++i)
        x.row(static_cast<Eigen::Index>(i)) = Eigen::Map<const Eigen::RowVectorXd>(spectra_[i].values.data(), m);
    return x;
}

Eigen::VectorXd LabeledSet::target_vector() const
{
    return Eigen::Map<const Eigen::VectorXd>(targets_.data(), static_cast<Eigen::Index>(targets_.size()));
}

LabeledSet LabeledSet::concat(const LabeledSet& a, const LabeledSet& b, DatasetTag tag)
{
    assert_same_grid(a, b);
    std::vector<Spectrum> spectra = a.spectra_;
    spectra.insert(spectra.end(), b.spectra_.begin(), b.spectra_.end());
    std::vector<double> targets = a.targets_;
    targets.insert(targets.end(), b.targets_.begin(), b.targets_.end());
    return LabeledSet(std::move(spectra), std::move(targets), tag);
}

void assert_same_grid(const LabeledSet& a, const LabeledSet& b)
{
    if (a.empty() || b.empty())
        throw DataError("empty dataset cannot be compared");
    if (!(a.grid() == b.grid()))
        throw DataError("grid mismatch: " + a.grid().describe() + " vs " + b.grid().describe());
}

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
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

std::string trim_ws(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& cell, const std::filesystem::path& path, std::size_t line_no)
{
    const auto s = trim_ws(cell);
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": non-numeric cell '" + s + "'");
    return v;
}

int parse_wavelength(const std::string& cell, const std::filesystem::path& path)
{
    const auto s = trim_ws(cell);
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw DataError(path.string() + ":1: wavelength header '" + s + "' is not an integer");
    return v;
}

struct RawTable {
    WavelengthGrid grid;
    std::vector<std::string> ids;
    std::vector<double> targets;
    std::vector<std::vector<double>> rows;
};

RawTable read_table(const std::filesystem::path& path, bool labeled, const CsvOptions& opts)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw DataError(path.string() + ": empty file");
    auto header = split_csv_line(line);
    const std::size_t first_wl = labeled ? 2 : 1;
    if (header.size() < first_wl + 2)
        throw DataError(path.string() + ":1: need at least two wavelength columns");
    if (trim_ws(header[0]) != "id")
        throw DataError(path.string() + ":1: first header column must be 'id'");
    if (labeled && trim_ws(header[1]) != "target")
        throw DataError(path.string() + ":1: second header column must be 'target'");

    std::vector<int> wl;
    for (std::size_t c = first_wl; c < header.size(); ++c)
        wl.push_back(parse_wavelength(header[c], path));
    const int step = wl[1] - wl[0];
    for (std::size_t i = 1; i < wl.size(); ++i) {
        if (wl[i] - wl[i - 1] != step || step < 1)
            throw DataError(path.string() + ":1: wavelength header is not an increasing arithmetic sequence at " +
                            std::to_string(wl[i]) + " nm");
    }

    RawTable t;
    t.grid = WavelengthGrid(wl.front(), wl.back(), step);
    std::unordered_set<std::string> seen;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_ws(line).empty())
            continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()));
        auto id = trim_ws(cells[0]);
        if (!seen.insert(id).second)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": duplicate sample id '" + id + "'");
        if (labeled)
            t.targets.push_back(parse_number(cells[1], path, line_no));
        std::vector<double> row;
        row.reserve(wl.size());
        for (std::size_t c = first_wl; c < cells.size(); ++c) {
            double v = parse_number(cells[c], path, line_no);
            row.push_back(opts.reflectance_percent ? v / 100.0 : v);
        }
        t.ids.push_back(std::move(id));
        t.rows.push_back(std::move(row));
    }
    if (t.rows.empty())
        throw DataError(path.string() + ": no sample rows");
    return t;
}

void write_table(const std::filesystem::path& path, const std::vector<Spectrum>& spectra,
                 const std::vector<double>* targets)
{
    if (spectra.empty())
        throw DataError("refusing to write empty dataset to " + path.string());
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path.string());
    const auto& g = spectra.front().grid;
    out << "id";
    if (targets)
        out << ",target";
    for (std::size_t i = 0; i < g.length(); ++i)
        out << ',' << g.wavelength(i);
    out << '\n';
    for (std::size_t r = 0; r < spectra.size(); ++r) {
        out << spectra[r].id;
        if (targets)
            out << ',' << format_double((*targets)[r]);
        for (double v : spectra[r].values)
            out << ',' << format_double(v);
        out << '\n';
    }
    if (!out)
        throw DataError("write failed for " + path.string());
}

} // namespace

LabeledSet load_labeled_csv(const std::filesystem::path& path, DatasetTag tag, const CsvOptions& opts)
{
    auto t = read_table(path, true, opts);
    std::vector<Spectrum> spectra;
    spectra.reserve(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        spectra.emplace_back(t.ids[i], std::move(t.rows[i]), t.grid);
    return LabeledSet(std::move(spectra), std::move(t.targets), tag);
}

SpectraSet load_unlabeled_csv(const std::filesystem::path& path, DatasetTag tag, const CsvOptions& opts)
{
    auto t = read_table(path, false, opts);
    SpectraSet set;
    set.tag = tag;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
        set.spectra.emplace_back(t.ids[i], std::move(t.rows[i]), t.grid);
    return set;
}

bool csv_is_labeled(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    auto header = split_csv_line(line);
    return header.size() > 1 && trim_ws(header[1]) == "target";
}

void write_labeled_csv(const std::filesystem::path& path, const LabeledSet& set)
{
    write_table(path, set.spectra(), &set.targets());
}

void write_unlabeled_csv(const std::filesystem::path& path, const SpectraSet& set)
{
    write_table(path, set.spectra, nullptr);
}

} // namespace spikecal
