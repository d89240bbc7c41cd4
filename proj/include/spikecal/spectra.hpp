#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace spikecal {

/// Evenly spaced integer wavelength axis in nanometres, both ends inclusive.
struct WavelengthGrid {
    int start_nm = 0;
    int end_nm = 0;
    int step_nm = 1;

    WavelengthGrid() = default;
    /// Throws DataError unless start < end, step >= 1 and the span is a multiple of step.
    WavelengthGrid(int start, int end, int step);

    std::size_t length() const { return static_cast<std::size_t>((end_nm - start_nm) / step_nm) + 1; }
    int wavelength(std::size_t index) const { return start_nm + static_cast<int>(index) * step_nm; }
    bool contains(int nm) const;
    /// Index of an on-grid wavelength; throws DataError when off-grid.
    std::size_t index_of(int nm) const;

    std::string describe() const;

    friend bool operator==(const WavelengthGrid&, const WavelengthGrid&) = default;
};

struct Spectrum {
    std::string id;
    std::vector<double> values;
    WavelengthGrid grid;

    Spectrum() = default;
    /// Validates length against the grid and that every value is finite.
    Spectrum(std::string id, std::vector<double> values, WavelengthGrid grid);
};

enum class DatasetTag { Lab, Field, Synthetic, Other };

char tag_letter(DatasetTag tag);
DatasetTag tag_from_letter(char c);

/// Spectra without targets (prediction-only files).
struct SpectraSet {
    std::vector<Spectrum> spectra;
    DatasetTag tag = DatasetTag::Other;

    const WavelengthGrid& grid() const;
    std::size_t size() const { return spectra.size(); }
};

/// Spectra on one grid paired with non-negative finite targets.
class LabeledSet {
public:
    LabeledSet() = default;
    LabeledSet(std::vector<Spectrum> spectra, std::vector<double> targets, DatasetTag tag);

    const std::vector<Spectrum>& spectra() const { return spectra_; }
    const std::vector<double>& targets() const { return targets_; }
    DatasetTag tag() const { return tag_; }
    std::size_t size() const { return spectra_.size(); }
    bool empty() const { return spectra_.empty(); }
    const WavelengthGrid& grid() const;

    /// Samples x wavelengths design matrix.
    Eigen::MatrixXd matrix() const;
    Eigen::VectorXd target_vector() const;

    /// Concatenation in order (a then b); grids must match. The result carries `tag`.
    static LabeledSet concat(const LabeledSet& a, const LabeledSet& b, DatasetTag tag);

private:
    std::vector<Spectrum> spectra_;
    std::vector<double> targets_;
    DatasetTag tag_ = DatasetTag::Other;
};

struct CsvOptions {
    /// Divide every intensity by 100 on load.
    bool reflectance_percent = false;
};

/// Layout: `id,target,<wl>,<wl>,...`.
LabeledSet load_labeled_csv(const std::filesystem::path& path, DatasetTag tag = DatasetTag::Other,
                            const CsvOptions& opts = {});
/// Layout: `id,<wl>,<wl>,...`.
SpectraSet load_unlabeled_csv(const std::filesystem::path& path, DatasetTag tag = DatasetTag::Other,
                              const CsvOptions& opts = {});
/// True when the header's second column is `target`.
bool csv_is_labeled(const std::filesystem::path& path);

/// Values are written with 17 significant digits.
void write_labeled_csv(const std::filesystem::path& path, const LabeledSet& set);
void write_unlabeled_csv(const std::filesystem::path& path, const SpectraSet& set);

/// Throws DataError naming both grids on mismatch, or when either set is empty.
void assert_same_grid(const LabeledSet& a, const LabeledSet& b);

/// Shortest round-trippable decimal text for a double.
std::string format_double(double v);

} // namespace spikecal
