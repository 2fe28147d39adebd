#include "ou_irrev/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ou_irrev/error.hpp"

namespace ouirr {

namespace {

Mat matrix_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("model: missing key \"") + key + "\"");
  const auto& rows = j.at(key);
  if (!rows.is_array() || rows.empty()) {
    throw ValidationError(std::string("model: \"") + key + "\" must be a non-empty list of rows");
  }
  std::vector<std::vector<double>> data;
  for (const auto& row : rows) {
    if (!row.is_array()) throw ValidationError(std::string("model: \"") + key + "\" rows must be lists");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw ValidationError(std::string("model: \"") + key + "\" entries must be numbers");
      r.push_back(v.get<double>());
    }
    data.push_back(std::move(r));
  }
  try {
    return Mat::from_rows(data);
  } catch (const ArgumentError& e) {
    throw ValidationError(std::string("model: \"") + key + "\": " + e.what());
  }
}

void dump(const nlohmann::json& j, std::string& out) {
  using value_t = nlohmann::json::value_t;
  switch (j.type()) {
    case value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: keys already sorted
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(it.key()).dump();
        out += ':';
        dump(it.value(), out);
      }
      out += '}';
      break;
    }
    case value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ',';
        first = false;
        dump(v, out);
      }
      out += ']';
      break;
    }
    case value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        break;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      break;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

LinearModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ValidationError("model: expected a JSON object with \"B\" and \"Gamma\"");
  return LinearModel(matrix_from_json(j, "B"), matrix_from_json(j, "Gamma"));
}

LinearModel read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read model file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("model file " + path.string() + " is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

nlohmann::json matrix_to_json(const Mat& m) {
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    auto r = nlohmann::json::array();
    for (double v : m.row(i)) r.push_back(v);
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json model_to_json(const LinearModel& model) {
  return {{"B", matrix_to_json(model.B())}, {"Gamma", matrix_to_json(model.Gamma())}};
}

std::string canonical_json(const nlohmann::json& j) {
  std::string out;
  dump(j, out);
  return out;
}

std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << 't';
  for (std::size_t i = 1; i <= tr.n; ++i) os << ",x" << i;
  os << ",W\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    os << format_shortest(tr.time(k));
    for (double v : tr.state(k)) os << ',' << format_shortest(v);
    os << ',' << format_shortest(tr.heat[k]) << '\n';
  }
}

}  // namespace ouirr
