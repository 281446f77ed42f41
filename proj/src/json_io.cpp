#include "isospec/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace isospec {

namespace {

void write_number(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "\"nan\"";
    return;
  }
  if (std::isinf(v)) {
    out += v > 0 ? "\"inf\"" : "\"-inf\"";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
  // keep floats recognisable as floats on re-read
  std::string_view s(buf);
  if (s.find_first_of(".eEn") == std::string_view::npos) out += ".0";
}

void newline(std::string& out, int indent, int depth) {
  if (indent < 0) return;
  out += '\n';
  out.append(static_cast<std::size_t>(indent * depth), ' ');
}

void write_value(std::string& out, const json& v, int indent, int depth) {
  switch (v.type()) {
    case json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      // nlohmann::json objects are std::map backed, so iteration is key-sorted
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(out, indent, depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write_value(out, it.value(), indent, depth + 1);
      }
      newline(out, indent, depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // short arrays of scalars stay on one line
      const bool flat = std::all_of(v.begin(), v.end(), [](const json& e) {
        return e.is_primitive();
      }) && v.size() <= 8;
      out += '[';
      bool first = true;
      for (const auto& e : v) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(out, indent, depth + 1);
        write_value(out, e, indent, depth + 1);
      }
      if (!flat) newline(out, indent, depth);
      out += ']';
      return;
    }
    case json::value_t::number_float:
      write_number(out, v.get<double>());
      return;
    default:
      out += v.dump();
      return;
  }
}

}  // namespace

std::string dump_json(const json& value, int indent) {
  std::string out;
  write_value(out, value, indent, 0);
  return out;
}

double json_to_double(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
  }
  throw Error(ErrorKind::Config, "expected a number, got " + j.dump());
}

json operator_to_json(const Operator& op) {
  json entries = json::array();
  const Matrix& m = op.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      entries.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    }
  }
  return json{{"dim", op.dim()},
              {"entries", std::move(entries)},
              {"band", op.band()},
              {"truncated", op.truncated()}};
}

Operator operator_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
    throw Error(ErrorKind::Config, "operator JSON needs 'dim' and 'entries'");
  }
  const auto dim = j.at("dim").get<long long>();
  if (dim <= 0) throw Error(ErrorKind::Config, "operator JSON: dim must be positive");
  const json& entries = j.at("entries");
  if (!entries.is_array() || entries.size() != static_cast<std::size_t>(dim * dim)) {
    throw Error(ErrorKind::Config, "operator JSON: entries must hold dim*dim [re, im] pairs");
  }
  Matrix m(dim, dim);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index c = 0; c < dim; ++c, ++k) {
      const json& e = entries[k];
      if (!e.is_array() || e.size() != 2) {
        throw Error(ErrorKind::Config, "operator JSON: entry " + std::to_string(k) +
                                           " is not an [re, im] pair");
      }
      m(i, c) = cplx(json_to_double(e[0]), json_to_double(e[1]));
    }
  }
  Operator op(std::move(m), j.value("truncated", false));
  if (j.contains("band") && j.at("band").is_number_integer()) {
    const auto declared = j.at("band").get<long long>();
    if (declared < static_cast<long long>(op.band())) {
      throw Error(ErrorKind::Config, "operator JSON: declared band " + std::to_string(declared) +
                                         " is smaller than the entries' band " +
                                         std::to_string(op.band()));
    }
  }
  return op;
}

Operator load_operator(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open operator file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, path.string() + ": " + e.what());
  }
  return operator_from_json(j);
}

void save_operator(const Operator& op, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write operator file " + path.string());
  out << dump_json(operator_to_json(op)) << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace isospec
