#include "relanom/csv_io.hpp"
#include "relanom/model_file.hpp"
#include "relanom/pipeline.hpp"
#include "relanom/synth.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

using namespace relanom;

namespace {

FittedModel round_trip(const FittedModel& m) {
    std::stringstream buf;
    save_model(buf, m);
    return load_model(buf);
}

void check_same_scores(const FittedModel& a, const FittedModel& b, const RawDataset& probe) {
    const ScoredRows ta = score_training(a);
    const ScoredRows tb = score_training(b);
    CHECK(ta.native == tb.native);
    CHECK(ta.dora == tb.dora);
    const ScoredRows ra = score_raw(a, probe);
    const ScoredRows rb = score_raw(b, probe);
    CHECK(ra.native == rb.native);
    CHECK(ra.dora == rb.dora);
}

}  // namespace

TEST_CASE("model files round trip for every method") {
    const auto specs = scraping_analogue();
    const SyntheticData syn = generate_mixture(specs, 150, 1);
    RawDataset raw = syn.data;
    raw.values.array() += 10.0;
    const SyntheticData probe = generate_mixture(specs, 20, 2);
    RawDataset probe_raw = probe.data;
    probe_raw.values.array() += 10.0;

    for (Method method : {Method::vertex_degree, Method::popularity, Method::shortest_path}) {
        for (bool box_cox : {true, false}) {
            ModelConfig config;
            config.method = method;
            config.box_cox = box_cox;
            const FittedModel m = fit_model(raw, config);
            const FittedModel back = round_trip(m);
            CHECK(back.config.method == method);
            CHECK(back.transform.columns.size() == 2);
            check_same_scores(m, back, probe_raw);
        }
    }
}

TEST_CASE("stationary probabilities survive a round trip") {
    const std::vector<ClusterSpec> blob{{"blob", 1.0, {5.0, 5.0}, 1.0, ClusterLabel::normal}};
    const SyntheticData syn = generate_mixture(blob, 80, 3);
    ModelConfig config;
    config.method = Method::vertex_degree;
    config.gamma = 2.0;
    config.stationary = true;
    const FittedModel m = fit_model(syn.data, config);
    const FittedModel back = round_trip(m);
    const auto& a = std::get<VertexDegreeModel>(m.state);
    const auto& b = std::get<VertexDegreeModel>(back.state);
    REQUIRE(b.stationary);
    CHECK((*a.stationary - *b.stationary).cwiseAbs().maxCoeff() == 0.0);
    CHECK((*a.stationary - a.vd.vd / a.vd.vd.sum()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("sparsified and kNN models round trip") {
    const SyntheticData syn = generate_mixture(wifi_analogue(), 200, 4);
    ModelConfig pop;
    pop.sparsify = 0.5;
    pop.box_cox = false;
    const FittedModel a = fit_model(syn.data, pop);
    check_same_scores(a, round_trip(a), syn.data);

    ModelConfig sp;
    sp.method = Method::shortest_path;
    sp.k = 2;
    sp.box_cox = false;
    const FittedModel b = fit_model(syn.data, sp);
    const auto& state = std::get<ShortestPathModel>(b.state);
    const FittedModel back = round_trip(b);
    CHECK(std::get<ShortestPathModel>(back.state).ra_q == state.ra_q);
    CHECK(std::get<ShortestPathModel>(back.state).unreachable == state.unreachable);
}

TEST_CASE("non-finite values are stored as strings") {
    const SyntheticData syn = generate_mixture(wifi_analogue(), 200, 4);
    ModelConfig sp;
    sp.method = Method::shortest_path;
    sp.k = 1;
    sp.box_cox = false;
    const FittedModel m = fit_model(syn.data, sp);
    REQUIRE(std::get<ShortestPathModel>(m.state).unreachable > 0);
    std::stringstream buf;
    save_model(buf, m);
    CHECK(buf.str().find("\"inf\"") != std::string::npos);
    const FittedModel back = load_model(buf);
    for (double v : std::get<ShortestPathModel>(back.state).ra_q) {
        CHECK(!std::isnan(v));
    }
}

TEST_CASE("model file version and method checks") {
    const SyntheticData syn = generate_mixture(scraping_analogue(), 60, 0);
    ModelConfig config;
    config.box_cox = false;
    const FittedModel m = fit_model(syn.data, config);
    std::stringstream buf;
    save_model(buf, m);
    auto j = nlohmann::json::parse(buf.str());
    CHECK(j["format_version"] == kModelFormatVersion);
    j["format_version"] = kModelFormatVersion + 1;
    std::stringstream bumped(j.dump());
    CHECK_THROWS(load_model(bumped));
    std::stringstream garbage("{not json");
    CHECK_THROWS(load_model(garbage));
}

TEST_CASE("csv reading and atomic writes") {
    std::istringstream ok("a,b,label\n1,2,normal\n3.5,-4e-1,anomalous\n");
    const CsvTable t = read_csv(ok);
    CHECK(t.data.rows() == 2);
    CHECK(t.data.cols() == 2);
    CHECK(t.data.values(1, 1) == doctest::Approx(-0.4));
    REQUIRE(t.labels);
    CHECK((*t.labels)[1] == "anomalous");

    std::istringstream missing("a,b\n1,\n2,3\n");
    try {
        (void)read_csv(missing);
        FAIL("expected a parse error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    const auto dir = std::filesystem::temp_directory_path() / "relanom_csv_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.csv";
    write_file_atomically(path, [&](std::ostream& out) { write_csv(out, t.data, &*t.labels); });
    const CsvTable back = read_csv_file(path);
    CHECK(back.data.values == t.data.values);
    CHECK(back.labels == t.labels);
    CHECK_FALSE(std::filesystem::exists(dir / "out.csv.tmp"));
    CHECK_THROWS(write_file_atomically(path, [](std::ostream&) { throw std::runtime_error("boom"); }));
    CHECK(read_csv_file(path).data.rows() == 2);
    std::filesystem::remove_all(dir);
}
