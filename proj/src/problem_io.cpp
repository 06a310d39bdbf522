#include "ftopt/problem_io.hpp"

#include "ftopt/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace ftopt {

namespace {

using nlohmann::json;

std::size_t line_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

const json& require(const json& doc, const char* field) {
  auto it = doc.find(field);
  if (it == doc.end()) throw ParseError(std::string("missing field '") + field + "'");
  return *it;
}

double number_at(const json& value, const std::string& where) {
  if (!value.is_number()) {
    throw ParseError(where + ": expected a number, got " + std::string(value.type_name()));
  }
  return value.get<double>();
}

int read_dimension(const json& doc, const char* field) {
  const json& v = require(doc, field);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ParseError(std::string("field '") + field + "': expected a positive integer");
  }
  return static_cast<int>(v.get<long long>());
}

VectorXd read_vector(const json& doc, const char* field, int expected) {
  const json& v = require(doc, field);
  if (!v.is_array()) throw ParseError(std::string("field '") + field + "': expected an array");
  if (static_cast<int>(v.size()) != expected) {
    throw ParseError(std::string("field '") + field + "': expected " + std::to_string(expected) +
                     " entries, got " + std::to_string(v.size()));
  }
  VectorXd out(expected);
  for (int i = 0; i < expected; ++i) {
    out[i] = number_at(v[i], std::string("field '") + field + "' entry " + std::to_string(i));
  }
  return out;
}

MatrixXd read_matrix(const json& doc, const char* field, int rows, int cols) {
  const json& v = require(doc, field);
  if (!v.is_array()) throw ParseError(std::string("field '") + field + "': expected an array");
  if (static_cast<int>(v.size()) != rows) {
    throw ParseError(std::string("field '") + field + "': expected " + std::to_string(rows) +
                     " rows, got " + std::to_string(v.size()));
  }
  MatrixXd out(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const json& row = v[i];
    const std::string where = std::string("field '") + field + "' row " + std::to_string(i);
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw ParseError(where + ": expected an array of " + std::to_string(cols) + " numbers");
    }
    for (int j = 0; j < cols; ++j) {
      out(i, j) = number_at(row[j], where + " entry " + std::to_string(j));
    }
  }
  return out;
}

json to_json(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const MatrixXd& M) {
  json out = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

ConvexProgram parse_problem_file(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << "line " << line_of(text, e.byte) << ": " << e.what();
    throw ParseError(os.str());
  }
  if (!doc.is_object()) throw ParseError("problem file must contain a JSON object");

  const json& family_field = require(doc, "family");
  if (!family_field.is_string()) throw ParseError("field 'family': expected a string");
  const std::string family = family_field.get<std::string>();
  if (family != "lp" && family != "qp" && family != "expsum") {
    throw ParseError("field 'family': unknown family tag '" + family + "'");
  }

  const int n = read_dimension(doc, "n");
  const int m = read_dimension(doc, "m");
  MatrixXd A = read_matrix(doc, "A", m, n);
  VectorXd b = read_vector(doc, "b", m);

  try {
    if (family == "expsum") return make_expsum(std::move(A), std::move(b));
    VectorXd c = read_vector(doc, "c", n);
    if (family == "lp") return make_lp(std::move(c), std::move(A), std::move(b));
    MatrixXd Q = read_matrix(doc, "Q", n, n);
    return make_qp(std::move(Q), std::move(c), std::move(A), std::move(b));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string("invalid problem data: ") + e.what());
  }
}

ConvexProgram load_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open problem file '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_problem_file(buffer.str());
}

std::string serialize_program(const ConvexProgram& program) {
  if (!program.has_affine_constraints()) {
    throw UnsupportedError("generic oracle programs cannot be serialized");
  }
  json doc;
  doc["family"] = std::string(to_string(program.family()));
  doc["n"] = program.n();
  doc["m"] = program.m();
  if (program.family() != Family::ExpSum) doc["c"] = to_json(program.c());
  if (program.family() == Family::Qp) doc["Q"] = to_json(program.Q());
  doc["A"] = to_json(program.A());
  doc["b"] = to_json(program.b());
  return doc.dump(1) + "\n";
}

}  // namespace ftopt
