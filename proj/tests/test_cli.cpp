#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args)
{
    const std::string cmd = std::string(SPIKECAL_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string c; std::getline(ss, c, ',');)
        out.push_back(c);
    return out;
}

std::string column(const fs::path& csv, const std::string& name, std::size_t row = 1)
{
    const auto ls = lines(csv);
    const auto head = split(ls.at(0));
    const auto cells = split(ls.at(row));
    for (std::size_t i = 0; i < head.size(); ++i)
        if (head[i] == name)
            return cells.at(i);
    return "<missing " + name + ">";
}

class Cli : public ::testing::Test {
protected:
    static fs::path dir;

    static void SetUpTestSuite()
    {
        dir = fs::temp_directory_path() / "spikecal_cli_test";
        fs::remove_all(dir);
        fs::create_directories(dir);
        ASSERT_EQ(run("simulate --out " + (dir / "data").string()), 0);
        ASSERT_EQ(run("mc --lab " + (dir / "data/lab.csv").string() + " --field " + (dir / "data/field.csv").string() +
                      " --reps 1 --seed 5 --out " + (dir / "mc").string()),
                  0);
    }
};

fs::path Cli::dir;

} // namespace

TEST_F(Cli, MonteCarloWritesReport)
{
    for (const char* f : {"aggregate.csv", "replicates.csv", "predictions_representative.csv",
                          "predictions_unspiked.csv", "scores.csv", "explained_variance.csv", "effective_config.txt"})
        EXPECT_TRUE(fs::exists(dir / "mc" / f)) << f;
    EXPECT_EQ(lines(dir / "mc/replicates.csv").size(), 2u);
    EXPECT_EQ(lines(dir / "mc/aggregate.csv").size(), 3u);
}

TEST_F(Cli, AggregateHeader)
{
    std::string expected = "model,N,k";
    for (const char* s : {"p", "cal_rmse", "cal_r2", "cal_me", "val_rmse", "val_r2", "val_me"})
        for (const char* q : {"median", "q25", "q75"})
            expected += std::string(",") + s + "_" + q;
    expected += ",replicates,failed";
    EXPECT_EQ(lines(dir / "mc/aggregate.csv").at(0), expected);
    EXPECT_EQ(split(lines(dir / "mc/aggregate.csv").at(1)).at(0), "I");
    EXPECT_EQ(split(lines(dir / "mc/aggregate.csv").at(2)).at(0), "VI");
}

TEST_F(Cli, PredictionRowCount)
{
    // 31 lab + 24 synthetic + 12 field rows plus the header.
    EXPECT_EQ(lines(dir / "mc/predictions_representative.csv").size(), 31u + 24u + 12u + 1u);
    EXPECT_EQ(lines(dir / "mc/predictions_unspiked.csv").size(), 31u + 12u + 1u);
    EXPECT_EQ(lines(dir / "mc/scores.csv").size(), 31u + 12u + 24u + 1u);
}

TEST_F(Cli, StepwiseMatchesMonteCarlo)
{
    const fs::path s = dir / "step";
    fs::create_directories(s);
    const std::string seed = column(dir / "mc/replicates.csv", "seed");
    const std::string lab = (dir / "data/lab.csv").string();
    const std::string field = (dir / "data/field.csv").string();
    ASSERT_EQ(run("smote --input " + field + " --n 200 --k 5 --seed " + seed + " --output " + (s / "syn.csv").string() +
                  " --out " + s.string()),
              0);
    for (const auto& [in, out] : std::vector<std::pair<std::string, std::string>>{
             {lab, "lab_pre.csv"}, {(s / "syn.csv").string(), "syn_pre.csv"}, {field, "field_pre.csv"}})
        ASSERT_EQ(run("preprocess --input " + in + " --output " + (s / out).string() + " --out " + s.string()), 0);
    ASSERT_EQ(run("train --input " + (s / "lab_pre.csv").string() + " --input " + (s / "syn_pre.csv").string() +
                  " --components auto --out " + s.string()),
              0);
    ASSERT_EQ(run("validate --model " + (s / "model.csv").string() + " --input " + (s / "field_pre.csv").string() +
                  " --out " + s.string()),
              0);
    const fs::path rep = dir / "mc/replicates.csv";
    EXPECT_EQ(column(s / "calibration_metrics.csv", "p"), column(rep, "best_p"));
    EXPECT_EQ(column(s / "calibration_metrics.csv", "rmse"), column(rep, "cal_rmse"));
    EXPECT_EQ(column(s / "calibration_metrics.csv", "r2"), column(rep, "cal_r2"));
    EXPECT_EQ(column(s / "validation_metrics.csv", "rmse"), column(rep, "val_rmse"));
    EXPECT_EQ(column(s / "validation_metrics.csv", "r2"), column(rep, "val_r2"));
    EXPECT_EQ(column(s / "validation_metrics.csv", "me"), column(rep, "val_me"));
}

TEST_F(Cli, ReportRebuildsFromReplicates)
{
    const fs::path r = dir / "rebuilt";
    ASSERT_EQ(run("report --replicates " + (dir / "mc/replicates.csv").string() + " --lab " +
                  (dir / "data/lab.csv").string() + " --field " + (dir / "data/field.csv").string() + " --out " +
                  r.string()),
              0);
    EXPECT_EQ(lines(r / "aggregate.csv"), lines(dir / "mc/aggregate.csv"));
    EXPECT_EQ(lines(r / "predictions_representative.csv"), lines(dir / "mc/predictions_representative.csv"));
}

TEST_F(Cli, ExitCodes)
{
    const std::string lab = (dir / "data/lab.csv").string();
    const std::string out = " --out " + (dir / "err").string();
    EXPECT_EQ(run("--help"), 0);
    EXPECT_EQ(run(""), 1);
    EXPECT_EQ(run("bogus"), 1);
    EXPECT_EQ(run("smote --input " + lab + " --n 150" + out), 1);
    EXPECT_EQ(run("smote --input " + (dir / "missing.csv").string() + out), 2);

    const fs::path bad = dir / "bad.csv";
    std::ofstream(bad) << "id,target,100,102,103\na,1,0.1,0.2,0.3\n";
    EXPECT_EQ(run("preprocess --input " + bad.string() + out), 2);

    const fs::path flat = dir / "flat.csv";
    {
        std::ofstream f(flat);
        f << "id,target,1,2,3\n";
        for (int i = 0; i < 6; ++i)
            f << "s" << i << ",4," << i << "," << i * i << "," << 1 + i % 2 << "\n";
    }
    EXPECT_EQ(run("train --input " + flat.string() + out), 3);
}
