#include "doctest.h"

#include "invcert/network_io.hpp"
#include "json.hpp"

#include <filesystem>

using namespace invcert;

TEST_CASE("network documents round trip bit for bit") {
  const auto net = random_network<double>({2, 5, 3, 2}, std::nullopt, 17);
  const auto back = std::get<ReluMlp>(load_network(save_network(net)));
  REQUIRE(back.layers().size() == net.layers().size());
  for (std::size_t k = 0; k < net.layers().size(); ++k) {
    CHECK(back.layer(k).weight == net.layer(k).weight);
    CHECK(back.layer(k).bias == net.layer(k).bias);
  }
  CHECK(save_network(back) == save_network(net));
}

TEST_CASE("residual documents round trip and flatten on load") {
  const ResidualNet rnet({random_network<double>({2, 4, 2}, std::nullopt, 1),
                          random_network<double>({2, 3, 2}, std::nullopt, 2)});
  const auto path = std::filesystem::temp_directory_path() / "invcert_io_residual.json";
  save_network_file(path, rnet);
  const auto back = std::get<ResidualNet>(load_network_file(path));
  CHECK(back.blocks().size() == 2);
  const auto flat = load_mlp_file(path);
  const Eigen::Vector2d x(0.3, -0.8);
  CHECK((forward(flat, x) - forward(rnet, x)).cwiseAbs().maxCoeff() < 1e-12);
  std::filesystem::remove(path);
}

TEST_CASE("malformed documents are rejected") {
  CHECK_THROWS_AS(load_network("not json"), NetworkFormatError);
  CHECK_THROWS_AS(load_network(R"({"format": "other/1"})"), NetworkFormatError);
  auto doc = nlohmann::json::parse(save_network(random_network<double>({2, 3, 1}, std::nullopt, 1)));
  auto missing = doc;
  missing.erase("layers");
  CHECK_THROWS_AS(load_network(missing.dump()), NetworkFormatError);
  auto broken = doc;
  broken["layers"][1]["cols"] = 2;
  broken["layers"][1]["weight"] = {1.0, 2.0};
  CHECK_THROWS_AS(load_network(broken.dump()), DimensionError);
  auto short_bias = doc;
  short_bias["layers"][0]["bias"] = {0.0};
  CHECK_THROWS_AS(load_network(short_bias.dump()), DimensionError);
  auto text = doc;
  text["layers"][0]["bias"][0] = "abc";
  CHECK_THROWS_AS(load_network(text.dump()), NetworkFormatError);
  CHECK_THROWS_AS(load_network_file("/nonexistent/net.json"), std::exception);
}
