#include "mblrevive/errors.hpp"
#include "mblrevive/harness.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mblrevive;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

EnsembleConfig small_config(const std::string &tag) {
    EnsembleConfig c;
    c.lengths      = {8};
    c.strengths    = {8.0};
    c.realizations = 1;
    c.seed_base    = 500;
    c.output       = fs::temp_directory_path() / "mblrevive_harness_test";
    c.tag          = tag;
    c.threads      = 1;
    fs::remove_all(c.run_dir());
    return c;
}

} // namespace

TEST(Config, JsonRoundTripAndValidation) {
    EnsembleConfig c;
    c.lengths        = {20, 40};
    c.strengths      = {8.0, 0.5};
    c.realizations   = 3;
    c.seed_base      = 17;
    c.schedule       = SweepSchedule::parse("2:3,4:3", 1e-11);
    c.tag            = "x";
    c.flipped_family = true;
    const auto j     = to_json(c);
    EXPECT_EQ(j.at("schema_version").get<int>(), ensemble_schema_version);
    const auto back = ensemble_config_from_json(j);
    EXPECT_EQ(back.lengths, c.lengths);
    EXPECT_EQ(back.strengths, c.strengths);
    EXPECT_EQ(back.schedule.to_string(), "2:3,4:3");
    EXPECT_EQ(back.schedule.threshold, 1e-11);
    EXPECT_TRUE(back.flipped_family);
    EXPECT_EQ(to_json(back), j);

    auto bad = j;
    bad["L"] = nlohmann::json::array();
    EXPECT_THROW((void)ensemble_config_from_json(bad), ValidationError);
    bad = j;
    bad.erase("W");
    EXPECT_THROW((void)ensemble_config_from_json(bad), ValidationError);
    bad                 = j;
    bad["realizations"] = 0;
    EXPECT_THROW((void)ensemble_config_from_json(bad), ValidationError);
    EXPECT_THROW((void)load_ensemble_config("/nonexistent/config.json"), Error);
}

TEST(Config, DirectoryLayout) {
    EnsembleConfig c;
    c.output = "out";
    c.tag    = "t";
    EXPECT_EQ(point_dir(c, 20, 0.5), fs::path("out/t/L20_W0.5"));
    EXPECT_EQ(realization_dir(c, 40, 8.0, 3), fs::path("out/t/L40_W8/r3"));
}

TEST(MiddleHalf, BoundariesAreIncluded) {
    EXPECT_TRUE(in_middle_half(5, 20));
    EXPECT_TRUE(in_middle_half(15, 20));
    EXPECT_FALSE(in_middle_half(4, 20));
    EXPECT_FALSE(in_middle_half(16, 20));
    EXPECT_TRUE(in_middle_half(10, 40));
    EXPECT_TRUE(in_middle_half(30, 40));
    EXPECT_FALSE(in_middle_half(31, 40));
    // L = 10: [2.5, 7.5] holds k = 3..7.
    std::vector<std::size_t> ks;
    for(std::size_t k = 1; k < 10; ++k)
        if(in_middle_half(k, 10)) ks.push_back(k);
    EXPECT_EQ(ks, (std::vector<std::size_t>{3, 4, 5, 6, 7}));
}

TEST(Ensemble, RunIsCompleteDeterministicAndResumable) {
    auto       c   = small_config("run");
    const auto sum = run_ensemble(c);
    ASSERT_EQ(sum.realizations.size(), 1u);
    EXPECT_TRUE(sum.ok()) << sum.realizations[0].failure;
    EXPECT_EQ(sum.realizations[0].certificates, 7u);
    const auto dir = realization_dir(c, 8, 8.0, 0);
    for(const char *f : {files::disorder, files::certificates, files::eigenpairs, files::sweeps, files::convergence, files::done}) EXPECT_TRUE(fs::exists(dir / f)) << f;
    EXPECT_TRUE(fs::exists(c.run_dir() / "config.json"));

    const auto recs = read_certificates(dir / files::certificates);
    ASSERT_EQ(recs.size(), 7u);
    for(std::size_t i = 0; i < recs.size(); ++i) {
        EXPECT_EQ(recs[i].certificate.k, i + 1);
        EXPECT_GE(recs[i].certificate.A_certified, 0.0);
        EXPECT_LE(recs[i].certificate.A_certified, 1.0);
    }
    const auto disorder = load_disorder((dir / files::disorder).string());
    EXPECT_EQ(disorder.fields, sample_disorder(8, 8.0, 500).fields);

    // Second run skips; clearing the marker reruns to identical bytes.
    const std::string first = slurp(dir / files::certificates);
    EXPECT_TRUE(run_ensemble(c).realizations[0].skipped);
    fs::remove(dir / files::done);
    std::ofstream(dir / files::certificates) << "garbage\n";
    const auto again = run_ensemble(c);
    EXPECT_FALSE(again.realizations[0].skipped);
    EXPECT_EQ(slurp(dir / files::certificates), first);
}

TEST(Ensemble, FlippedFamilyIsSavedAndLoadable) {
    auto c           = small_config("flipped");
    c.flipped_family = true;
    ASSERT_TRUE(run_ensemble(c).ok());
    const auto dir = realization_dir(c, 8, 8.0, 0);
    const auto du  = load_family(dir, SeedOrientation::domain_wall);
    const auto ud  = load_family(dir, SeedOrientation::flipped);
    EXPECT_EQ(du.size(), 8u);
    EXPECT_EQ(ud.size(), 8u);
    EXPECT_EQ(ud.at(3).seed.to_string(), "uuuddddd");
    EXPECT_EQ(du.at(3).seed.to_string(), "ddduuuuu");
}

TEST(Aggregate, SingleRealizationStatistics) {
    auto c = small_config("agg");
    ASSERT_TRUE(run_ensemble(c).ok());
    const auto recs = read_certificates(realization_dir(c, 8, 8.0, 0) / files::certificates);

    AggregateOptions o;
    o.post_select_variance = post_selection_variance;
    const auto rows        = aggregate(c.run_dir(), o);
    ASSERT_EQ(rows.size(), 2u);
    const auto &r = rows[0];
    EXPECT_FALSE(r.post_selected);
    EXPECT_EQ(r.realizations, 1u);
    EXPECT_EQ(r.certificates, 7u);
    std::vector<double> mid, all;
    for(const auto &x : recs) {
        all.push_back(x.certificate.A_certified);
        if(in_middle_half(x.certificate.k, 8)) mid.push_back(x.certificate.A_certified);
    }
    std::sort(mid.begin(), mid.end());
    auto sorted = all;
    std::sort(sorted.begin(), sorted.end());
    EXPECT_DOUBLE_EQ(r.median_A, sorted[sorted.size() / 2]);
    EXPECT_DOUBLE_EQ(r.mean_A, r.median_A);
    EXPECT_EQ(r.std_A, 0.0);
    EXPECT_DOUBLE_EQ(r.max_A_median, mid.back());
    EXPECT_GE(r.max_A_median, r.median_A);
    double mean = 0.0;
    for(double a : all) mean += a / static_cast<double>(all.size());
    EXPECT_NEAR(r.all_k_mean, mean, 1e-15);
    EXPECT_EQ(r.converged + r.unconverged, 8u);
    EXPECT_TRUE(rows[1].post_selected);
    EXPECT_LE(rows[1].realizations, 1u);
    EXPECT_TRUE(fs::exists(c.run_dir() / files::aggregate));

    std::ostringstream csv, gp;
    write_aggregate_table(csv, rows);
    write_aggregate_table(gp, rows, TableFormat::gnuplot);
    EXPECT_EQ(csv.str().rfind("L,W,", 0), 0u);
    EXPECT_EQ(gp.str().rfind("# ", 0), 0u);
    const std::string table = csv.str();
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);
}

TEST(Aggregate, EmptyDirectoryRaises) {
    const auto dir = fs::temp_directory_path() / "mblrevive_harness_empty";
    fs::remove_all(dir);
    fs::create_directories(dir);
    EXPECT_THROW((void)aggregate(dir), EmptyAggregateError);
}

TEST(Aggregate, CrossoverNeedsOneLength) {
    auto c      = small_config("cross");
    c.strengths = {8.0, 1.0};
    auto bad    = c;
    bad.lengths = {8, 10};
    EXPECT_THROW((void)crossover_scan(bad), ValidationError);
    const auto rows = crossover_scan(c);
    EXPECT_TRUE(fs::exists(c.run_dir() / "crossover.csv"));
    for(const auto &r : rows) EXPECT_EQ(r.L, 8u);
    EXPECT_GE(rows.size(), 2u);
}
