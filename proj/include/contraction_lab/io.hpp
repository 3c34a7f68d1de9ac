#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "contraction_lab/chain.hpp"
#include "contraction_lab/operator.hpp"

namespace contraction_lab {

using Json = nlohmann::ordered_json;

/// Shortest-safe decimal form: 17 significant digits, '.' separator,
/// independent of the global locale.
std::string format_double(double value);

/// {"dim": n, "entries": [[[re, im], ...], ...]} with rows in order.
Json operator_to_json(const Operator& op);
Operator operator_from_json(const Json& j);

Json vector_to_json(const Vector& v);

Json curve_to_json(const EigenCurve& curve);
EigenCurve curve_from_json(const Json& j);

Json chain_spec_to_json(const ChainSpec& spec);

/// Array of serialized operators T_1..T_horizon.
Json chain_to_json(const ContractionChain& chain);

/// Minimal CSV writer; every row must match the header width.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

/// JSON text with two-space indent and a trailing newline.
std::string dump_json(const Json& j);

}  // namespace contraction_lab
