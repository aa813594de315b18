#include "blgram/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace blgram::io {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw InputError(msg); }

double number_from_json(const Json& j, const std::string& name) {
  if (!j.is_number()) {
    fail(name + ": expected a number, got " + std::string(j.type_name()));
  }
  const double x = j.get<double>();
  if (!std::isfinite(x)) {
    fail(name + ": value must be finite");
  }
  return x;
}

Index index_from_json(const Json& j, const std::string& name, Index min_value) {
  if (!j.is_number_integer()) {
    fail(name + ": expected an integer, got " + std::string(j.type_name()));
  }
  const auto v = j.get<long long>();
  if (v < min_value) {
    std::ostringstream os;
    os << name << ": value " << v << " below the minimum of " << min_value;
    fail(os.str());
  }
  return static_cast<Index>(v);
}

const Json& require_field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) {
    fail(where + ": expected a JSON object, got " + std::string(j.type_name()));
  }
  const auto it = j.find(key);
  if (it == j.end()) {
    fail(where + ": missing required field \"" + key + "\"");
  }
  return *it;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) {
    if (cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  return lines;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trimmed(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return s.substr(b, e - b);
}

void dump_value(const Json& j, std::string& out, int depth);

void dump_indent(std::string& out, int depth) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
}

void dump_array(const Json& j, std::string& out, int depth) {
  if (j.empty()) {
    out += "[]";
    return;
  }
  // Arrays of scalars stay on one line; nested structures get one row each.
  bool scalars_only = true;
  for (const Json& item : j) {
    if (item.is_array() || item.is_object()) {
      scalars_only = false;
      break;
    }
  }
  out += '[';
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (scalars_only) {
      if (i > 0) out += ", ";
    } else {
      if (i > 0) out += ',';
      out += '\n';
      dump_indent(out, depth + 1);
    }
    dump_value(j[i], out, depth + 1);
  }
  if (!scalars_only) {
    out += '\n';
    dump_indent(out, depth);
  }
  out += ']';
}

void dump_object(const Json& j, std::string& out, int depth) {
  if (j.empty()) {
    out += "{}";
    return;
  }
  out += '{';
  bool first = true;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!first) out += ',';
    first = false;
    out += '\n';
    dump_indent(out, depth + 1);
    out += Json(it.key()).dump();  // escaped key
    out += ": ";
    dump_value(it.value(), out, depth + 1);
  }
  out += '\n';
  dump_indent(out, depth);
  out += '}';
}

void dump_value(const Json& j, std::string& out, int depth) {
  switch (j.type()) {
    case Json::value_t::array:
      dump_array(j, out, depth);
      return;
    case Json::value_t::object:
      dump_object(j, out, depth);
      return;
    case Json::value_t::number_float:
      out += format_double(j.get<double>(), kJsonSigDigits);
      return;
    default:
      out += j.dump();  // integers, strings, booleans, null
      return;
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    fail("cannot open file for reading: " + path);
  }
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) {
    fail("failed while reading file: " + path);
  }
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    fail("cannot open file for writing: " + path);
  }
  out << text;
  out.flush();
  if (!out) {
    fail("failed while writing file: " + path);
  }
}

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(origin + ": invalid JSON: " + e.what());
  }
}

Matrix matrix_from_json(const Json& j, const std::string& name, Index rows,
                        Index cols) {
  if (!j.is_array()) {
    fail(name + ": expected an array of rows, got " + std::string(j.type_name()));
  }
  const Index r = static_cast<Index>(j.size());
  if (rows >= 0 && r != rows) {
    std::ostringstream os;
    os << name << ": expected " << rows << " rows, got " << r;
    fail(os.str());
  }
  if (r == 0) {
    if (cols > 0) fail(name + ": empty matrix cannot have columns");
    return Matrix(0, std::max<Index>(cols, 0));
  }
  Index c = -1;
  Matrix out;
  for (Index i = 0; i < r; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array()) {
      std::ostringstream os;
      os << name << ": row " << i << " is not an array";
      fail(os.str());
    }
    if (c < 0) {
      c = static_cast<Index>(row.size());
      if (cols >= 0 && c != cols) {
        std::ostringstream os;
        os << name << ": expected " << cols << " columns, got " << c;
        fail(os.str());
      }
      out.resize(r, c);
    } else if (static_cast<Index>(row.size()) != c) {
      std::ostringstream os;
      os << name << ": row " << i << " has " << row.size() << " entries, expected " << c;
      fail(os.str());
    }
    for (Index k = 0; k < c; ++k) {
      std::ostringstream os;
      os << name << "[" << i << "][" << k << "]";
      out(i, k) = number_from_json(row[static_cast<std::size_t>(k)], os.str());
    }
  }
  return out;
}

Vector vector_from_json(const Json& j, const std::string& name, Index size) {
  if (!j.is_array()) {
    fail(name + ": expected a flat array, got " + std::string(j.type_name()));
  }
  if (size >= 0 && static_cast<Index>(j.size()) != size) {
    std::ostringstream os;
    os << name << ": expected " << size << " entries, got " << j.size();
    fail(os.str());
  }
  Vector out(static_cast<Index>(j.size()));
  for (Index i = 0; i < out.size(); ++i) {
    std::ostringstream os;
    os << name << "[" << i << "]";
    out(i) = number_from_json(j[static_cast<std::size_t>(i)], os.str());
  }
  return out;
}

BilinearSystem system_from_json(const Json& j) {
  const Index n = index_from_json(require_field(j, "n", "system"), "system.n", 1);
  const Index m = index_from_json(require_field(j, "m", "system"), "system.m", 0);
  const Matrix a = matrix_from_json(require_field(j, "A", "system"), "system.A", n, n);
  const Json& f_json = require_field(j, "F", "system");
  if (!f_json.is_array() || static_cast<Index>(f_json.size()) != m) {
    std::ostringstream os;
    os << "system.F: expected an array of " << m << " matrices";
    fail(os.str());
  }
  std::vector<Matrix> f;
  f.reserve(static_cast<std::size_t>(m));
  for (Index idx = 0; idx < m; ++idx) {
    std::ostringstream os;
    os << "system.F[" << idx << "]";
    f.push_back(matrix_from_json(f_json[static_cast<std::size_t>(idx)], os.str(), n, n));
  }
  Matrix b;
  if (m == 0) {
    b = Matrix::Zero(n, 0);
    // An explicit B is still validated when present.
    if (j.contains("B") && !j["B"].is_null()) {
      const Json& bj = j["B"];
      if (!bj.is_array()) fail("system.B: expected an array of rows");
      for (const Json& row : bj) {
        if (!row.is_array() || !row.empty()) {
          fail("system.B: must have zero columns when m = 0");
        }
      }
    }
  } else {
    b = matrix_from_json(require_field(j, "B", "system"), "system.B", n, m);
  }
  try {
    return BilinearSystem(a, std::move(f), std::move(b));
  } catch (const ShapeError& e) {
    fail(std::string("system: ") + e.what());
  }
}

ActuatorLibrary library_from_json(const Json& j) {
  const Matrix a =
      matrix_from_json(require_field(j, "A", "library"), "library.A", -1, -1);
  if (a.rows() != a.cols() || a.rows() < 1) {
    fail("library.A: must be square and non-empty");
  }
  const Json& cands = require_field(j, "candidates", "library");
  if (!cands.is_array()) {
    fail("library.candidates: expected an array");
  }
  std::vector<ActuatorCandidate> out;
  out.reserve(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    std::ostringstream os;
    os << "library.candidates[" << i << "]";
    const std::string where = os.str();
    const Json& c = cands[i];
    ActuatorCandidate cand;
    cand.F = matrix_from_json(require_field(c, "F", where), where + ".F", a.rows(),
                              a.cols());
    cand.B = vector_from_json(require_field(c, "B", where), where + ".B", a.rows());
    out.push_back(std::move(cand));
  }
  try {
    return ActuatorLibrary(a, std::move(out));
  } catch (const ShapeError& e) {
    fail(std::string("library: ") + e.what());
  }
}

std::vector<Vector> inputs_from_csv(const std::string& text, Index m) {
  if (m < 0) {
    throw InputError("inputs_from_csv: channel count must be non-negative");
  }
  const std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) {
    fail("inputs: empty file; expected a header row");
  }
  std::string expected_header;
  for (Index j = 0; j < m; ++j) {
    if (j > 0) expected_header += ',';
    expected_header += "u" + std::to_string(j + 1);
  }
  if (trimmed(lines[0]) != expected_header) {
    fail("inputs: header \"" + lines[0] + "\" does not match the expected \"" +
         expected_header + "\" for " + std::to_string(m) + " input channels");
  }
  std::vector<Vector> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (trimmed(lines[li]).empty()) continue;
    const std::vector<std::string> fields = split_fields(lines[li]);
    if (static_cast<Index>(fields.size()) != m) {
      std::ostringstream os;
      os << "inputs: line " << li + 1 << " has " << fields.size() << " fields, expected "
         << m;
      fail(os.str());
    }
    Vector u(m);
    for (Index j = 0; j < m; ++j) {
      const std::string field = trimmed(fields[static_cast<std::size_t>(j)]);
      double value = 0.0;
      const char* begin = field.data();
      const char* end = begin + field.size();
      const auto res = std::from_chars(begin, end, value);
      if (res.ec != std::errc() || res.ptr != end || field.empty() ||
          !std::isfinite(value)) {
        std::ostringstream os;
        os << "inputs: line " << li + 1 << ", field " << j + 1 << ": cannot parse \""
           << field << "\" as a finite number";
        fail(os.str());
      }
      u(j) = value;
    }
    rows.push_back(std::move(u));
  }
  return rows;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json system_to_json(const BilinearSystem& sys) {
  Json out = Json::object();
  out["n"] = static_cast<long long>(sys.n());
  out["m"] = static_cast<long long>(sys.m());
  out["A"] = matrix_to_json(sys.A);
  Json f = Json::array();
  for (const Matrix& fj : sys.F) f.push_back(matrix_to_json(fj));
  out["F"] = std::move(f);
  out["B"] = matrix_to_json(sys.B);
  return out;
}

Json gramian_to_json(const GramianResult& g) {
  Json out = Json::object();
  out["W"] = matrix_to_json(g.W);
  out["method"] = g.method == GramianMethod::vec_solve ? "vec_solve" : "series";
  if (g.truncation_order.has_value()) {
    out["truncation_order"] = *g.truncation_order;
  } else {
    out["truncation_order"] = nullptr;
  }
  out["residual"] = g.residual;
  out["existence_rho"] = g.existence_rho;
  return out;
}

Json energy_bound_to_json(const EnergyBound& eb, bool include_psi) {
  Json out = Json::object();
  out["beta"] = eb.beta;
  if (std::isinf(eb.input_cap)) {
    out["input_cap"] = "inf";
  } else {
    out["input_cap"] = eb.input_cap;
  }
  out["G_negdef"] = eb.G_negdef;
  out["cross_norm_sum"] = eb.cross_norm_sum;
  out["gap_lambda_max"] = eb.gap_lambda_max;
  if (include_psi) out["Psi"] = matrix_to_json(eb.Psi);
  return out;
}

Json expansion_to_json(const LinearExpansion& e) {
  Json out = Json::object();
  out["A"] = matrix_to_json(e.A);
  out["B_ext"] = matrix_to_json(e.B_ext);
  Json map = Json::array();
  for (const ExpansionColumn& c : e.column_map) {
    Json entry = Json::object();
    entry["input"] = c.input;
    entry["row"] = c.row;
    entry["col"] = c.col;
    entry["weight"] = c.weight;
    map.push_back(std::move(entry));
  }
  out["column_map"] = std::move(map);
  out["appended_columns"] = static_cast<long long>(e.column_map.size());
  return out;
}

Json witness_to_json(double a, double f, double w, const RatioWitness& wit) {
  Json out = Json::object();
  out["a"] = a;
  out["f"] = f;
  out["w"] = w;
  out["u0"] = wit.u0;
  out["u1"] = wit.u1;
  out["x_f"] = wit.x_f;
  out["ratio"] = wit.ratio;
  return out;
}

std::string format_double(double x, int sig) {
  if (std::isnan(x) || std::isinf(x)) {
    throw NumericalError(
        "format_double: non-finite values must be encoded before emission");
  }
  if (x == 0.0) {
    return std::signbit(x) ? "-0.0" : "0";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", sig, x);
  return buf;
}

std::string dump_json(const Json& j) {
  std::string out;
  dump_value(j, out, 0);
  out += '\n';
  return out;
}

std::string energy_report_csv(const EnergyReport& r) {
  std::string out = "k,energy,bound,slack\n";
  for (const EnergyStep& st : r.steps) {
    out += std::to_string(st.k);
    out += ',';
    out += format_double(st.energy, kCsvSigDigits);
    out += ',';
    out += format_double(st.bound, kCsvSigDigits);
    out += ',';
    out += format_double(st.slack, kCsvSigDigits);
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRecord>& recs) {
  std::string out =
      "n,lambda_min_bilinear,lambda_min_linear,lambda_min_bound,assumptions_hold\n";
  for (const SweepRecord& rec : recs) {
    out += std::to_string(rec.n);
    out += ',';
    if (std::isfinite(rec.lambda_min_bilinear)) {
      out += format_double(rec.lambda_min_bilinear, kCsvSigDigits);
    }
    out += ',';
    if (std::isfinite(rec.lambda_min_linear)) {
      out += format_double(rec.lambda_min_linear, kCsvSigDigits);
    }
    out += ',';
    if (rec.lambda_min_bound.has_value()) {
      out += format_double(*rec.lambda_min_bound, kCsvSigDigits);
    }
    out += ',';
    out += rec.assumptions_hold ? "true" : "false";
    out += '\n';
  }
  return out;
}

}  // namespace blgram::io
