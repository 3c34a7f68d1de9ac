#include "contraction_lab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "contraction_lab/errors.hpp"

namespace contraction_lab {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto result =
      std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
  return std::string(buffer, result.ptr);
}

Json operator_to_json(const Operator& op) {
  Json rows = Json::array();
  const Matrix& m = op.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return Json{{"dim", op.dim()}, {"entries", std::move(rows)}};
}

Operator operator_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
    throw MalformedOperator("operator JSON needs \"dim\" and \"entries\"");
  }
  const auto dim = j.at("dim").get<Eigen::Index>();
  const Json& rows = j.at("entries");
  if (dim < 1 || !rows.is_array() || static_cast<Eigen::Index>(rows.size()) != dim) {
    throw MalformedOperator("operator JSON: entries must have dim rows");
  }
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
      throw MalformedOperator("operator JSON: row " + std::to_string(i) + " has wrong length");
    }
    for (Eigen::Index k = 0; k < dim; ++k) {
      const Json& cell = row[static_cast<std::size_t>(k)];
      if (!cell.is_array() || cell.size() != 2) {
        throw MalformedOperator("operator JSON: entries are [re, im] pairs");
      }
      m(i, k) = Complex(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  return Operator(m);
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

Json curve_to_json(const EigenCurve& curve) {
  Json out = Json::array();
  out.push_back(std::string(family_name(curve.family())));
  switch (curve.family()) {
    case EigenCurve::Family::Piecewise: {
      Json steps = Json::array();
      for (const auto& [start, value] : curve.steps()) steps.push_back({start, value});
      out.push_back(std::move(steps));
      break;
    }
    case EigenCurve::Family::DyadicCrowd:
    case EigenCurve::Family::ReciprocalGap:
      out.push_back(static_cast<int>(curve.parameter()));
      break;
    case EigenCurve::Family::Custom:
      break;
    default:
      out.push_back(curve.parameter());
  }
  return out;
}

EigenCurve curve_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_string()) {
    throw SpecError({"curve must be [family, parameter]"});
  }
  const auto family = j[0].get<std::string>();
  const Json& p = j[1];
  const auto number = [&](double lo, double hi) {
    if (!p.is_number()) throw SpecError({"curve " + family + ": parameter must be a number"});
    const double v = p.get<double>();
    if (!(v >= lo && v <= hi)) {
      throw SpecError({"curve " + family + ": parameter out of [" + format_double(lo) + ", " +
                       format_double(hi) + "]"});
    }
    return v;
  };
  const auto index = [&]() {
    if (!p.is_number_integer() || p.get<int>() < 1) {
      throw SpecError({"curve " + family + ": parameter must be an integer >= 1"});
    }
    return p.get<int>();
  };
  if (family == "const") return EigenCurve::constant(number(0.0, 1.0));
  if (family == "harmonic_to") return EigenCurve::harmonic_to(number(0.0, 0.5));
  if (family == "geometric") return EigenCurve::geometric(number(0.0, 1.0));
  if (family == "dyadic_crowd") return EigenCurve::dyadic_crowd(index());
  if (family == "reciprocal_gap") return EigenCurve::reciprocal_gap(index());
  if (family == "piecewise") {
    if (!p.is_array() || p.empty()) throw SpecError({"curve piecewise: steps must be a non-empty array"});
    std::vector<std::pair<int, double>> steps;
    for (const auto& step : p) {
      if (!step.is_array() || step.size() != 2 || !step[0].is_number_integer() ||
          !step[1].is_number()) {
        throw SpecError({"curve piecewise: each step is [start, value]"});
      }
      steps.emplace_back(step[0].get<int>(), step[1].get<double>());
    }
    try {
      return EigenCurve::piecewise(std::move(steps));
    } catch (const PreconditionError& e) {
      throw SpecError({std::string("curve piecewise: ") + e.what()});
    }
  }
  throw SpecError({"unknown curve family \"" + family + "\""});
}

Json chain_spec_to_json(const ChainSpec& spec) {
  Json out{{"kind", std::string(kind_name(spec.kind))},
           {"dim", spec.dim},
           {"horizon", spec.horizon}};
  if (spec.seed) out["seed"] = *spec.seed;
  switch (spec.kind) {
    case ChainKind::Diagonal:
    case ChainKind::ConjugatedDiagonal: {
      Json curves = Json::array();
      for (const auto& c : spec.curves) curves.push_back(curve_to_json(c));
      out["curves"] = std::move(curves);
      break;
    }
    case ChainKind::GapEngineered:
      out["delta"] = spec.delta;
      out["fixed_rank"] = spec.fixed_rank;
      break;
    case ChainKind::SchurDecrement:
      out["t_max"] = spec.t_max;
      out["decay"] = spec.decay;
      out["fixed_rank"] = spec.fixed_rank;
      break;
    default:
      break;
  }
  return out;
}

Json chain_to_json(const ContractionChain& chain) {
  Json out = Json::array();
  for (int n = 1; n <= chain.horizon(); ++n) out.push_back(operator_to_json(chain.operator_at(n)));
  return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvWriter::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw PreconditionError(PreconditionError::Reason::InvalidArgument,
                            "CSV row width differs from header");
  }
  rows_.push_back(std::move(cells));
}

std::string CsvWriter::str() const {
  std::string out;
  const auto append = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  append(header_);
  for (const auto& row : rows_) append(row);
  return out;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw LabError("cannot open " + path.string() + " for writing");
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) throw LabError("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw LabError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace contraction_lab
