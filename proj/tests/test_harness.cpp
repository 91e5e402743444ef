// Copyright 2026 The qrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qrc/harness/report.hpp"
#include "qrc/harness/sweep.hpp"

using namespace qrc;
using namespace qrc::harness;

namespace {

SweepSpec tiny_spec() {
    SweepSpec s;
    s.j_s = {1.0};
    s.gamma = {0.01};
    s.frequency = {1.0};
    s.realizations = 1;
    s.protocol.n_train = 1;
    s.protocol.train_steps = 400;
    s.protocol.test_steps = 400;
    s.protocol.tau_max = 5;
    s.diagnostic_steps = 20;
    return s;
}

}  // namespace

TEST(Config, JsonRoundTripPreservesHash) {
    SweepSpec s = tiny_spec();
    s.frequency = {0.2, kInfiniteFrequency};
    s.pairs = {{0.01, 0.2}};
    s.jumps = JumpSet::lower;
    const SweepSpec back = sweep_spec_from_json(to_json(s));
    EXPECT_EQ(config_hash(back), config_hash(s));
    EXPECT_TRUE(std::isinf(back.frequency[1]));
    EXPECT_EQ(back.jumps, JumpSet::lower);
    EXPECT_EQ(back.plane().size(), 1u);
}

TEST(Config, HashIgnoresThreadsAndTracksParameters) {
    SweepSpec a = tiny_spec(), b = tiny_spec();
    b.threads = 8;
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.gamma = {0.05};
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, RejectsUnknownKeysAndEmptyGrids) {
    EXPECT_THROW(sweep_spec_from_json(nlohmann::json::parse(R"({"realisations": 3})")), ConfigError);
    EXPECT_THROW(sweep_spec_from_json(nlohmann::json::parse(R"({"grid": {"js": [1]}})")), ConfigError);
    EXPECT_THROW(sweep_spec_from_json(nlohmann::json::parse(R"({"jumps": "sideways"})")), ConfigError);
    EXPECT_THROW(sweep_spec_from_json(nlohmann::json::parse(R"({"grid": {"j_s": []}})")).validate(), ConfigError);
    SweepSpec s = tiny_spec();
    s.pairs = {{0.05, 5.0}};
    EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Config, GridShorthandAndComments) {
    const auto path = std::filesystem::temp_directory_path() / "qrc_cfg_test.json";
    {
        std::ofstream os(path);
        os << "// comment\n{\"grid\": {\"j_s\": {\"log\": [0.1, 10, 3]}, \"gamma\": {\"linear\": [0, 0.1, 3]}, \"frequency\": [1, \"inf\"]}}\n";
    }
    const SweepSpec s = load_sweep_spec(path.string());
    ASSERT_EQ(s.j_s.size(), 3u);
    EXPECT_NEAR(s.j_s[1], 1.0, 1e-12);
    EXPECT_NEAR(s.gamma[1], 0.05, 1e-15);
    EXPECT_TRUE(std::isinf(s.frequency[1]));
    std::filesystem::remove(path);
}

TEST(Sweep, SeedStreamsGiveCommonRandomNumbers) {
    EXPECT_EQ(coupling_seed(1, 2.0, 3), coupling_seed(1, 2.0, 3));
    EXPECT_NE(coupling_seed(1, 2.0, 3), coupling_seed(1, 2.0, 4));
    EXPECT_NE(coupling_seed(1, 2.0, 3), input_seed(1, 2.0, 3));
    const SweepSpec s = tiny_spec();
    // couplings do not depend on gamma, inputs do not depend on J_s
    EXPECT_EQ(make_run_config(s, 1.0, 0.0, 0).hamiltonian.couplings.j(1, 0), make_run_config(s, 1.0, 0.05, 0).hamiltonian.couplings.j(1, 0));
    EXPECT_EQ(make_input_spec(s, 1.0, 2).seed, input_seed(s.base_seed, 1.0, 2));
}

TEST(Sweep, GroupsCoverThePlane) {
    SweepSpec s = tiny_spec();
    s.j_s = {0.5, 1.0};
    s.gamma = {0.0, 0.01};
    s.frequency = {0.2, 1.0};
    s.pairs = {{0.0, 0.2}, {0.01, 0.2}, {0.01, 1.0}};
    s.realizations = 2;
    const auto groups = sweep_groups(s);
    ASSERT_EQ(groups.size(), 8u);
    std::size_t points = 0;
    for (const auto& g : groups) points += g.frequencies.size();
    EXPECT_EQ(points, 2u * 3u * 2u);
}

TEST(Sweep, SinglePointGivesOneRowPerTaskAndIsReproducible) {
    const SweepSpec s = tiny_spec();
    const auto a = run_sweep(s);
    const auto b = run_sweep(s);
    ASSERT_EQ(a.records.size(), 2u);
    EXPECT_EQ(a.failed, 0u);
    EXPECT_EQ(a.records[0].task, TaskKind::delay);
    EXPECT_EQ(a.records[1].task, TaskKind::narma);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_TRUE(a.records[i].ok) << a.records[i].error;
        EXPECT_EQ(csv_row(a.records[i], a.config_hash, false), csv_row(b.records[i], b.config_hash, false));
        EXPECT_TRUE(std::isfinite(a.records[i].en_all));
        EXPECT_TRUE(std::isfinite(a.records[i].cov_dim));
    }
    EXPECT_FALSE(a.records[1].capacity.contains(0));
    EXPECT_TRUE(a.records[0].capacity.contains(0));
}

TEST(Sweep, ThreadCountDoesNotChangeRows) {
    SweepSpec s = tiny_spec();
    s.j_s = {0.5, 2.0};
    s.tasks = {TaskKind::delay};
    s.pca_enabled = false;
    const auto one = run_sweep(s);
    s.threads = 3;
    const auto three = run_sweep(s);
    ASSERT_EQ(one.records.size(), three.records.size());
    for (std::size_t i = 0; i < one.records.size(); ++i)
        EXPECT_EQ(csv_row(one.records[i], one.config_hash, false), csv_row(three.records[i], three.config_hash, false));
}

TEST(Sweep, DiagnosticFailureIsIsolatedToItsRows) {
    SweepSpec s = tiny_spec();
    s.frequency = {1.0, 5.0};
    s.pca.d = 100000;  // more neighbours than sampled states; validate() would reject this
    const auto rows = evaluate_group(s, sweep_groups(s).front());
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& r : rows) {
        EXPECT_FALSE(r.ok);
        EXPECT_NE(r.error.find("diagnostics"), std::string::npos) << r.error;
        EXPECT_TRUE(std::isfinite(r.total));  // the capacity itself was still computed
        EXPECT_TRUE(std::isfinite(r.en_all));
    }
    EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Sweep, WritesMetaAndCsvThatReadBack) {
    const auto dir = std::filesystem::temp_directory_path() / "qrc_sweep_test";
    std::filesystem::remove_all(dir);
    const SweepSpec s = tiny_spec();
    const auto out = run_sweep(s, dir);
    std::ifstream meta_is(dir / "results.meta.json");
    const auto meta = nlohmann::json::parse(meta_is);
    EXPECT_EQ(meta["config_hash"].get<std::string>(), out.config_hash);
    EXPECT_EQ(meta["columns"].size(), csv_columns().size());
    EXPECT_EQ(sweep_spec_from_json(meta["config"]).j_s, s.j_s);

    const auto rows = read_results((dir / "results.csv").string());
    ASSERT_EQ(rows.size(), out.records.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(csv_row(rows[i], out.config_hash, false), csv_row(out.records[i], out.config_hash, false));
    }
    std::filesystem::remove_all(dir);
}

TEST(Report, CsvFieldsRoundTripExactly) {
    SweepRecord r;
    r.j_s = 0.1 + 0.2;
    r.gamma = 0.01;
    r.frequency = kInfiniteFrequency;
    r.realization = 4;
    r.coupling_seed = 0xFFFFFFFFFFFFFFFFULL;
    r.input_seed = 7;
    r.task = TaskKind::narma;
    r.ok = false;
    r.error = "bad, \"quoted\" value";
    r.total = 1.0 / 3.0;
    r.tau_max = 2;
    r.capacity = {{1, 0.25}, {2, 1.0 / 7.0}};
    r.lambda = {{1, 1e-5}, {2, 1e-3}};
    r.en = r.en_all = 0.123456789012345678;
    r.cov_dim = 3.0;
    std::stringstream ss;
    ss << csv_header() << '\n' << csv_row(r, "abc") << '\n';
    const auto back = read_results(ss);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(csv_row(back[0], "abc"), csv_row(r, "abc"));
    EXPECT_EQ(back[0].error, r.error);
    EXPECT_EQ(back[0].coupling_seed, r.coupling_seed);
    EXPECT_TRUE(std::isinf(back[0].frequency));
    EXPECT_TRUE(std::isnan(back[0].en_single));
    EXPECT_EQ(back[0].capacity.at(2), 1.0 / 7.0);
}

TEST(Report, MissingColumnsAreNamed) {
    std::stringstream ss("schema_version,j_s,gamma\n1,1,0\n");
    try {
        read_results(ss);
        FAIL() << "expected SchemaError";
    } catch (const SchemaError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("f"), std::string::npos);
        EXPECT_NE(msg.find("total"), std::string::npos);
    }
}

TEST(Report, SplitCsvLineHonoursQuotes) {
    const auto f = split_csv_line(R"(a,"b,c","d ""e""",)");
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[1], "b,c");
    EXPECT_EQ(f[2], "d \"e\"");
    EXPECT_EQ(f[3], "");
}

TEST(Report, SpearmanMatchesHandComputedRanks) {
    // ranks x: 1 2 3 4 5, y: 2 1 4 3 5 -> d^2 sum 4 -> rho = 1 - 6*4/(5*24) = 0.8
    EXPECT_NEAR(spearman({1, 2, 3, 4, 5}, {20, 10, 40, 30, 50}), 0.8, 1e-15);
    EXPECT_NEAR(spearman({1, 2, 3}, {3, 2, 1}), -1.0, 1e-15);
    // monotone transform invariance
    EXPECT_NEAR(spearman({0.1, 0.5, 0.2, 0.9}, {1, 5, 2, 9}), 1.0, 1e-15);
    EXPECT_TRUE(std::isnan(spearman({1, 2}, {1, 2})));
    EXPECT_TRUE(std::isnan(spearman({1, 1, 1}, {1, 2, 3})));
    const auto r = average_ranks({5, 1, 5, 3});
    EXPECT_EQ(r, (std::vector<double>{3.5, 1.0, 3.5, 2.0}));
}

TEST(Report, MeanAndStandardError) {
    const auto m = mean_se({1.0, 2.0, 3.0, 4.0, std::nan("")});
    EXPECT_EQ(m.n, 4);
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_NEAR(m.se, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}

TEST(Report, FrequencyScale) {
    EXPECT_EQ(frequency_scale(1.0, 0.6, 0.01), 1.0);
    EXPECT_EQ(2.0 * frequency_scale(5.0, 0.6, 0.01), 10.0);
    // random rate counted from a zig-zag: every interior point is a stationary point
    std::vector<double> zig(101), slow(101);
    for (int i = 0; i <= 100; ++i) {
        zig[i] = i % 2;
        slow[i] = std::sin(2.0 * M_PI * i / 50.0);
    }
    const double rz = stationary_point_rate(zig), rs = stationary_point_rate(slow);
    EXPECT_NEAR(frequency_scale(kInfiniteFrequency, rz, rs), 5.0 * rz / rs, 1e-15);
    EXPECT_GT(rz / rs, 10.0);
    EXPECT_TRUE(std::isnan(frequency_scale(kInfiniteFrequency, 0.5, 0.0)));
}

TEST(Report, AggregateAveragesRealizationsAndCountsFailures) {
    std::vector<SweepRecord> rows;
    for (int r = 0; r < 3; ++r) {
        SweepRecord x;
        x.j_s = 1.0;
        x.gamma = 0.01;
        x.frequency = 1.0;
        x.realization = r;
        x.ok = r < 2;
        x.total = 10.0 + r;
        x.en = x.en_all = 0.1 * r;
        rows.push_back(x);
    }
    const auto curves = aggregate(rows);
    const auto& c = curves.at({TaskKind::delay, 0.01, 1.0});
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].failed, 1);
    EXPECT_DOUBLE_EQ(c[0].total.mean, 10.5);
    EXPECT_DOUBLE_EQ(c[0].rescaled.mean, 10.5);
    EXPECT_EQ(c[0].total.n, 2);
}

TEST(Report, OrderedAppenderWritesInGroupOrder) {
    std::stringstream ss;
    OrderedAppender app(&ss, "h");
    auto rec = [](int realization) {
        SweepRecord r;
        r.realization = realization;
        r.ok = true;
        return std::vector<SweepRecord>{r};
    };
    app.submit(2, rec(2));
    app.submit(1, rec(1));
    EXPECT_TRUE(ss.str().empty());
    app.submit(0, rec(0));
    const auto all = app.take();
    ASSERT_EQ(all.size(), 3u);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(all[static_cast<std::size_t>(i)].realization, i);
    const std::string text = ss.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}
