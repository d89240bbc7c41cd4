#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "spikecal/errors.hpp"
#include "spikecal/spectra.hpp"

using namespace spikecal;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content)
{
    const auto dir = fs::temp_directory_path() / "spikecal_test_spectra";
    fs::create_directories(dir);
    const auto path = dir / name;
    std::ofstream(path) << content;
    return path;
}

std::string labeled_header(int lo, int hi)
{
    std::string h = "id,target";
    for (int w = lo; w <= hi; ++w)
        h += "," + std::to_string(w);
    return h + "\n";
}

} // namespace

TEST(WavelengthGrid, LengthAndIndex)
{
    WavelengthGrid g(350, 2500, 1);
    EXPECT_EQ(g.length(), 2151u);
    EXPECT_EQ(g.index_of(1000), 650u);
    EXPECT_THROW(g.index_of(2501), DataError);
    EXPECT_EQ(WavelengthGrid(350, 2500, 10).length(), 216u);
}

TEST(WavelengthGrid, RejectsBadAxes)
{
    EXPECT_THROW(WavelengthGrid(100, 100, 1), DataError);
    EXPECT_THROW(WavelengthGrid(100, 105, 2), DataError);
    EXPECT_THROW(WavelengthGrid(100, 110, 0), DataError);
}

TEST(Spectrum, RejectsNonFiniteAndLengthMismatch)
{
    WavelengthGrid g(100, 102, 1);
    EXPECT_THROW(Spectrum("a", {1.0, 2.0}, g), DataError);
    EXPECT_THROW(Spectrum("a", {1.0, NAN, 2.0}, g), DataError);
}

TEST(LabeledSet, Invariants)
{
    WavelengthGrid g(100, 102, 1);
    Spectrum a("a", {0.1, 0.2, 0.3}, g);
    Spectrum b("b", {0.1, 0.2, 0.3, 0.4}, WavelengthGrid(100, 103, 1));
    EXPECT_THROW(LabeledSet({}, {}, DatasetTag::Lab), DataError);
    EXPECT_THROW(LabeledSet({a}, {1.0, 2.0}, DatasetTag::Lab), DataError);
    EXPECT_THROW(LabeledSet({a, b}, {1.0, 2.0}, DatasetTag::Lab), DataError);
    EXPECT_THROW(LabeledSet({a}, {-1.0}, DatasetTag::Lab), DataError);
    EXPECT_NO_THROW(LabeledSet({a}, {0.0}, DatasetTag::Lab));
}

TEST(LoadLabeledCsv, FullInstrumentGrid)
{
    std::string content = labeled_header(350, 2500);
    for (int r = 0; r < 31; ++r) {
        content += "L" + std::to_string(r) + "," + std::to_string(10 + r);
        for (int w = 350; w <= 2500; ++w)
            content += ",0.5";
        content += "\n";
    }
    const auto set = load_labeled_csv(temp_file("l31.csv", content), DatasetTag::Lab);
    EXPECT_EQ(set.size(), 31u);
    EXPECT_EQ(set.grid(), WavelengthGrid(350, 2500, 1));
    EXPECT_EQ(set.spectra()[7].id, "L7");
    EXPECT_DOUBLE_EQ(set.targets()[7], 17.0);
}

TEST(LoadLabeledCsv, SingleRowThreeColumns)
{
    const auto set = load_labeled_csv(temp_file("one.csv", "id,target,100,101,102\nx,1.5,0.1,0.2,0.3\n"));
    EXPECT_EQ(set.size(), 1u);
    EXPECT_EQ(set.grid().length(), 3u);
    EXPECT_DOUBLE_EQ(set.spectra()[0].values[2], 0.3);
}

TEST(LoadLabeledCsv, MalformedInputs)
{
    EXPECT_THROW(load_labeled_csv(temp_file("gap.csv", "id,target,100,102,103\nx,1,0.1,0.2,0.3\n")), DataError);
    EXPECT_THROW(load_labeled_csv(temp_file("ragged.csv", "id,target,100,101,102\nx,1,0.1,0.2\n")), DataError);
    EXPECT_THROW(load_labeled_csv(temp_file("nan.csv", "id,target,100,101,102\nx,1,0.1,abc,0.3\n")), DataError);
    EXPECT_THROW(load_labeled_csv(temp_file("dup.csv", "id,target,100,101,102\nx,1,0.1,0.2,0.3\nx,2,0.1,0.2,0.3\n")),
                 DataError);
    EXPECT_THROW(load_labeled_csv(temp_file("hdr.csv", "id,target,100,10a,102\nx,1,0.1,0.2,0.3\n")), DataError);
}

TEST(LoadLabeledCsv, ReflectancePercent)
{
    const auto path = temp_file("pct.csv", "id,target,100,101\nx,1,50,25\n");
    const auto set = load_labeled_csv(path, DatasetTag::Field, CsvOptions{true});
    EXPECT_DOUBLE_EQ(set.spectra()[0].values[0], 0.5);
    EXPECT_DOUBLE_EQ(set.spectra()[0].values[1], 0.25);
}

TEST(LoadUnlabeledCsv, Layout)
{
    const auto path = temp_file("unl.csv", "id,100,101,102\na,0.1,0.2,0.3\nb,0.4,0.5,0.6\n");
    EXPECT_FALSE(csv_is_labeled(path));
    const auto set = load_unlabeled_csv(path);
    ASSERT_EQ(set.size(), 2u);
    EXPECT_EQ(set.spectra[1].id, "b");
}

TEST(Csv, RoundTripPreservesValuesAndOrder)
{
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    WavelengthGrid g(400, 440, 5);
    std::vector<Spectrum> spectra;
    std::vector<double> targets;
    for (int i = 0; i < 20; ++i) {
        std::vector<double> v(g.length());
        for (auto& x : v)
            x = u(gen) * std::pow(10.0, static_cast<int>(u(gen) * 12) - 6);
        spectra.emplace_back("s" + std::to_string(19 - i), v, g);
        targets.push_back(u(gen) * 100);
    }
    LabeledSet set(spectra, targets, DatasetTag::Lab);
    const auto path = fs::temp_directory_path() / "spikecal_test_spectra" / "rt.csv";
    write_labeled_csv(path, set);
    const auto back = load_labeled_csv(path, DatasetTag::Lab);
    ASSERT_EQ(back.size(), set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        EXPECT_EQ(back.spectra()[i].id, set.spectra()[i].id);
        EXPECT_EQ(back.targets()[i], set.targets()[i]);
        EXPECT_EQ(back.spectra()[i].values, set.spectra()[i].values);
    }
}

TEST(AssertSameGrid, Cases)
{
    auto make = [](int lo, int hi) {
        WavelengthGrid g(lo, hi, 1);
        return LabeledSet({Spectrum("a", std::vector<double>(g.length(), 0.5), g)}, {1.0}, DatasetTag::Lab);
    };
    EXPECT_NO_THROW(assert_same_grid(make(350, 2500), make(350, 2500)));
    try {
        assert_same_grid(make(350, 2500), make(450, 2400));
        FAIL() << "expected mismatch";
    } catch (const DataError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("350-2500"), std::string::npos);
        EXPECT_NE(msg.find("450-2400"), std::string::npos);
    }
    EXPECT_THROW(assert_same_grid(LabeledSet{}, make(350, 2500)), DataError);
}
