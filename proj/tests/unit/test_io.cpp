#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "mpelab/io.hpp"

using namespace mpelab;
using io::json;

TEST_CASE("number encoding") {
    CHECK(io::number(1.5) == json(1.5));
    CHECK(io::number(kInfinity) == json("inf"));
    CHECK(io::number(-kInfinity) == json("-inf"));
    CHECK(io::number(std::nan("")) == json("nan"));
    CHECK(io::parse_number(json("inf")) == kInfinity);
    CHECK(io::parse_number(json(2)) == 2.0);
    CHECK_THROWS_AS(io::parse_number(json("x")), Error);
}

TEST_CASE("kernel json round trip") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto k = build_kernel(StateSpace::integers(5), fixtures::dirichlet_matrix(5, rng));
        const auto doc = json::parse(io::kernel_to_json(k).dump());
        const auto back = io::kernel_from_json(doc);
        // The text form is exact; build_kernel may renormalise rows by an ulp.
        for (Eigen::Index i = 0; i < 5; ++i) {
            for (Eigen::Index j = 0; j < 5; ++j) {
                CHECK(doc.at("matrix").at(i).at(j).get<double>() == k.matrix()(i, j));
            }
        }
        CHECK((back.matrix() - k.matrix()).cwiseAbs().maxCoeff() <= 4e-16);
        CHECK(back.space() == k.space());
        CHECK(doc.at("metric") == "abs-diff");
    }
    const auto named = io::kernel_from_json(json::parse(R"({"states":["a","b"],"matrix":[[0.5,0.5],[1,0]]})"));
    CHECK(named.space().label(1) == "b");
    CHECK_FALSE(named.space().has_metric());

    const auto explicit_metric = io::kernel_from_json(json::parse(
        R"({"states":["a","b"],"matrix":[[0.5,0.5],[1,0]],"metric":"explicit","distances":[[0,2],[2,0]]})"));
    CHECK(explicit_metric.space().distance(0, 1) == 2.0);
    CHECK(io::kernel_from_json(io::kernel_to_json(explicit_metric)).space().distance(1, 0) == 2.0);
}

TEST_CASE("kernel json errors") {
    auto code = [](const char* text) {
        try {
            io::kernel_from_json(json::parse(text));
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Io;
    };
    CHECK(code(R"({"matrix":[[0.5,0.6],[0.5,0.5]]})") == ErrorCode::NonStochasticRow);
    CHECK(code(R"({"matrix":[[1.5,-0.5],[0.5,0.5]]})") == ErrorCode::NegativeEntry);
    CHECK(code(R"({"matrix":[[1,0],[1]]})") == ErrorCode::DimensionMismatch);
    CHECK(code(R"({"states":[1,2,3],"matrix":[[1,0],[0,1]]})") == ErrorCode::DimensionMismatch);
    CHECK(code(R"({"states":["a","b"],"matrix":[[1,0],[0,1]],"metric":"abs-diff"})") == ErrorCode::BadParameters);
    CHECK(code(R"({"states":[1,2]})") == ErrorCode::Parse);
}

TEST_CASE("csv kernel with sidecar labels") {
    const std::string text = "0.5,0.5\n0.25,0.75\n";
    const auto plain = io::kernel_from_csv(text, nullptr);
    CHECK(plain.space().label(0) == "1");
    CHECK(plain(1, 1) == 0.75);
    const std::string labels = "low\nhigh\n";
    const auto named = io::kernel_from_csv(text, &labels);
    CHECK(named.space().label(1) == "high");
    const std::string short_labels = "only\n";
    CHECK_THROWS_AS(io::kernel_from_csv(text, &short_labels), Error);
    CHECK_THROWS_AS(io::kernel_from_csv("0.5,x\n", nullptr), Error);

    const auto dir = std::filesystem::temp_directory_path() / "mpelab_io_test";
    std::filesystem::create_directories(dir);
    io::write_file((dir / "k.csv").string(), text);
    io::write_file((dir / "k.csv.labels").string(), labels);
    CHECK(io::read_kernel((dir / "k.csv").string()).space().label(0) == "low");
    CHECK_THROWS_AS(io::read_kernel((dir / "missing.json").string()), Error);
}

TEST_CASE("reward files") {
    const auto g = io::reward_from_json(json::parse(R"({"values":[0, 1.5, -2]})"));
    CHECK(g.size() == 3);
    CHECK(g[1] == 1.5);
    CHECK_THROWS_AS(io::reward_from_json(json::parse(R"({"values":[0, "inf"]})")), Error);
    const auto dir = std::filesystem::temp_directory_path() / "mpelab_io_test";
    std::filesystem::create_directories(dir);
    io::write_file((dir / "g.csv").string(), "0\n1\n2\n");
    CHECK(io::read_reward((dir / "g.csv").string(), 3)[2] == 2.0);
    CHECK_THROWS_AS(io::read_reward((dir / "g.csv").string(), 4), Error);
}

TEST_CASE("mixing json uses the inf string") {
    const auto k = build_kernel(fixtures::two_state_matrix(0.5));
    const auto doc = io::mixing_json(mixing_report(k, 2));
    CHECK(doc.at("strong_ratio").at("1") == "inf");
    CHECK(doc.at("lambda").at("1") == 0.5);
    CHECK(doc.at("minorization").at("1").at("d") == 0.5);
}

TEST_CASE("sha256 and report envelope") {
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    const json config{{"tol", 1e-10}};
    auto a = io::make_report("solve", {"k", "g"}, config, {{"x", 1}});
    auto b = io::make_report("solve", {"k", "g"}, config, {{"x", 1}});
    CHECK(a.at("schema_version") == io::kSchemaVersion);
    CHECK(a.at("inputs_digest") == b.at("inputs_digest"));
    CHECK(a.at("inputs_digest") != io::make_report("solve", {"k", "h"}, config, {}).at("inputs_digest"));
    a.erase("generated_at");
    b.erase("generated_at");
    CHECK(a.dump() == b.dump());
}

TEST_CASE("corpus files carry truncation metadata") {
    const auto files = io::corpus_files(shift_chain(8));
    CHECK(files.metadata.at("truncation").at("size") == 8);
    CHECK(files.metadata.at("truncation").at("redirect_state") == "1");
    CHECK(io::kernel_from_json(files.kernel).matrix() == shift_chain(8).kernel.matrix());
    CHECK(io::corpus_files(recurrent_shift(8)).rewards.size() == 2);
}
