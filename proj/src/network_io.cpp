#include "invcert/network_io.hpp"

#include <json.hpp>

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace invcert {
namespace {

using nlohmann::json;

double parse_float(const json& value, const std::string& where) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    // accepted for hand-written documents; "inf"/"nan" are rejected by the finiteness check
    const auto& text = value.get_ref<const std::string&>();
    char* end = nullptr;
    errno = 0;
    const double parsed = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') throw NetworkFormatError(where + ": not a number: " + text);
    return parsed;
  }
  throw NetworkFormatError(where + ": expected a number");
}

json layer_to_json(const DenseLayer<double>& layer) {
  json weight = json::array();
  for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
    for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) weight.push_back(layer.weight(i, j));
  json bias = json::array();
  for (Eigen::Index i = 0; i < layer.bias.size(); ++i) bias.push_back(layer.bias(i));
  return json{{"rows", layer.weight.rows()}, {"cols", layer.weight.cols()}, {"weight", weight}, {"bias", bias}};
}

DenseLayer<double> layer_from_json(const json& node, const std::string& where) {
  if (!node.is_object()) throw NetworkFormatError(where + ": layer must be an object");
  for (const char* key : {"rows", "cols", "weight", "bias"})
    if (!node.contains(key)) throw NetworkFormatError(where + ": missing \"" + key + "\"");
  if (!node["rows"].is_number_integer() || !node["cols"].is_number_integer())
    throw NetworkFormatError(where + ": rows/cols must be integers");
  const auto rows = node["rows"].get<long long>();
  const auto cols = node["cols"].get<long long>();
  if (rows <= 0 || cols <= 0) throw DimensionError(where + ": rows and cols must be positive");
  const auto& weight = node["weight"];
  const auto& bias = node["bias"];
  if (!weight.is_array() || !bias.is_array()) throw NetworkFormatError(where + ": weight and bias must be arrays");
  if (static_cast<long long>(weight.size()) != rows * cols)
    throw DimensionError(where + ": weight has " + std::to_string(weight.size()) + " entries, expected " +
                         std::to_string(rows * cols));
  if (static_cast<long long>(bias.size()) != rows)
    throw DimensionError(where + ": bias has " + std::to_string(bias.size()) + " entries, expected " +
                         std::to_string(rows));
  DenseLayer<double> layer;
  layer.weight.resize(rows, cols);
  layer.bias.resize(rows);
  for (long long i = 0; i < rows; ++i)
    for (long long j = 0; j < cols; ++j) layer.weight(i, j) = parse_float(weight[i * cols + j], where + ".weight");
  for (long long i = 0; i < rows; ++i) layer.bias(i) = parse_float(bias[i], where + ".bias");
  return layer;
}

ReluMlp mlp_from_json(const json& layers, const std::string& where) {
  if (!layers.is_array() || layers.empty()) throw NetworkFormatError(where + ": \"layers\" must be a non-empty array");
  std::vector<DenseLayer<double>> parsed;
  for (std::size_t k = 0; k < layers.size(); ++k)
    parsed.push_back(layer_from_json(layers[k], where + ".layers[" + std::to_string(k) + "]"));
  return ReluMlp(std::move(parsed));
}

json mlp_layers(const ReluMlp& net) {
  json layers = json::array();
  for (const auto& layer : net.layers()) layers.push_back(layer_to_json(layer));
  return layers;
}

}  // namespace

AnyNetwork load_network(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw NetworkFormatError(std::string("malformed network document: ") + e.what());
  }
  if (!doc.is_object()) throw NetworkFormatError("network document must be a JSON object");
  if (!doc.contains("format") || !doc["format"].is_string() || doc["format"].get<std::string>() != kNetworkFormat)
    throw NetworkFormatError("unsupported or missing \"format\" (expected " + std::string(kNetworkFormat) + ")");
  const bool residual = doc.value("residual", false);
  if (!residual) {
    if (!doc.contains("layers")) throw NetworkFormatError("missing \"layers\"");
    return mlp_from_json(doc["layers"], "network");
  }
  if (!doc.contains("blocks") || !doc["blocks"].is_array() || doc["blocks"].empty())
    throw NetworkFormatError("residual document needs a non-empty \"blocks\" array");
  std::vector<ReluMlp> blocks;
  for (std::size_t i = 0; i < doc["blocks"].size(); ++i) {
    const auto& block = doc["blocks"][i];
    const std::string where = "blocks[" + std::to_string(i) + "]";
    if (!block.is_object() || !block.contains("layers")) throw NetworkFormatError(where + ": missing \"layers\"");
    blocks.push_back(mlp_from_json(block["layers"], where));
  }
  return ResidualNet(std::move(blocks));
}

std::string save_network(const ReluMlp& net) {
  json doc{{"format", kNetworkFormat}, {"residual", false}, {"layers", mlp_layers(net)}};
  return doc.dump(1);
}

std::string save_network(const ResidualNet& net) {
  json blocks = json::array();
  for (const auto& block : net.blocks()) blocks.push_back(json{{"layers", mlp_layers(block)}});
  json doc{{"format", kNetworkFormat}, {"residual", true}, {"blocks", blocks}};
  return doc.dump(1);
}

AnyNetwork load_network_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NetworkFormatError("cannot open network file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_network(buffer.str());
}

void save_network_file(const std::filesystem::path& path, const AnyNetwork& net) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write network file " + path.string());
  out << std::visit([](const auto& n) { return save_network(n); }, net) << '\n';
}

ReluMlp load_mlp_file(const std::filesystem::path& path) {
  auto net = load_network_file(path);
  if (auto* mlp = std::get_if<ReluMlp>(&net)) return *mlp;
  return flatten_residual(std::get<ResidualNet>(net));
}

}  // namespace invcert
