// Versioned JSON document for networks ("invertcert-net/1").
#pragma once

#include "invcert/network.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace invcert {

class NetworkFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kNetworkFormat = "invertcert-net/1";

using AnyNetwork = std::variant<ReluMlp, ResidualNet>;

/// Parses a network document. Throws NetworkFormatError for malformed
/// documents, DimensionError for broken shape chains and
/// std::invalid_argument for non-finite entries.
AnyNetwork load_network(std::string_view document);

std::string save_network(const ReluMlp& net);
std::string save_network(const ResidualNet& net);

AnyNetwork load_network_file(const std::filesystem::path& path);
void save_network_file(const std::filesystem::path& path, const AnyNetwork& net);

/// Loads either kind and flattens residual networks.
ReluMlp load_mlp_file(const std::filesystem::path& path);

}  // namespace invcert
