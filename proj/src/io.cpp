// SPDX-License-Identifier: Apache-2.0

#include "yosida/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace yosida::io {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

bool is_primitive(const json &j) { return !j.is_array() && !j.is_object(); }

void dump_into(const json &j, int indent, int depth, std::string &out) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case json::value_t::null: out += "null"; return;
    case json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; return;
    case json::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); return;
    case json::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); return;
    case json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    case json::value_t::string: out += json(j.get<std::string>()).dump(); return;
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), is_primitive);
      out += "[";
      bool first = true;
      for (const json &item : j) {
        if (!first) out += ",";
        first = false;
        if (flat) {
          if (out.back() == ',') out += " ";
        } else {
          out += "\n" + pad;
        }
        dump_into(item, indent, depth + 1, out);
      }
      if (!flat) out += "\n" + close_pad;
      out += "]";
      return;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",";
        first = false;
        out += "\n" + pad + json(it.key()).dump() + ": ";
        dump_into(it.value(), indent, depth + 1, out);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    default: out += "null"; return;
  }
}

}  // namespace

std::string dump(const json &j, int indent) {
  std::string out;
  dump_into(j, indent, 0, out);
  out += "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Matrices

json matrix_to_json(const OperatorMatrix &m) {
  const Eigen::Index n = m.dim();
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < n; ++i) {
    json rrow = json::array();
    json irow = json::array();
    for (Eigen::Index k = 0; k < n; ++k) {
      rrow.push_back(m(i, k).real());
      irow.push_back(m(i, k).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return json{{"dim", n}, {"re", std::move(re)}, {"im", std::move(im)}};
}

OperatorMatrix matrix_from_json(const json &j) {
  try {
    if (!j.is_object() || !j.contains("re")) {
      throw Error(ErrorKind::InvalidInput, "matrix JSON needs an \"re\" array");
    }
    const json &re = j.at("re");
    const auto n = static_cast<Eigen::Index>(re.size());
    if (j.contains("dim") && j.at("dim").get<Eigen::Index>() != n) {
      throw Error(ErrorKind::InvalidInput, "matrix JSON: dim does not match row count");
    }
    const json *im = j.contains("im") ? &j.at("im") : nullptr;
    if (im != nullptr && static_cast<Eigen::Index>(im->size()) != n) {
      throw Error(ErrorKind::InvalidInput, "matrix JSON: im has the wrong row count");
    }
    CMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const json &rrow = re.at(static_cast<std::size_t>(i));
      if (static_cast<Eigen::Index>(rrow.size()) != n) {
        throw Error(ErrorKind::InvalidInput, "matrix JSON: rows must have dim entries");
      }
      for (Eigen::Index k = 0; k < n; ++k) {
        const double x = rrow.at(static_cast<std::size_t>(k)).get<double>();
        double y = 0.0;
        if (im != nullptr) {
          const json &irow = im->at(static_cast<std::size_t>(i));
          if (static_cast<Eigen::Index>(irow.size()) != n) {
            throw Error(ErrorKind::InvalidInput, "matrix JSON: rows must have dim entries");
          }
          y = irow.at(static_cast<std::size_t>(k)).get<double>();
        }
        m(i, k) = cplx(x, y);
      }
    }
    return OperatorMatrix(std::move(m), j.value("label", std::string{}));
  } catch (const json::exception &e) {
    throw Error(ErrorKind::InvalidInput, std::string("matrix JSON: ") + e.what());
  }
}

std::string matrix_to_text(const OperatorMatrix &m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.dim(); ++i) {
    for (Eigen::Index k = 0; k < m.dim(); ++k) {
      if (k > 0) out += "  ";
      out += format_double(m(i, k).real()) + " " + format_double(m(i, k).imag());
    }
    out += "\n";
  }
  return out;
}

OperatorMatrix matrix_from_text(const std::string &text) {
  std::istringstream lines(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(lines, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::vector<double> row;
    std::string token;
    while (fields >> token) {
      char *end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0') {
        throw Error(ErrorKind::InvalidInput, "matrix text: bad number '" + token + "'");
      }
      row.push_back(v);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw Error(ErrorKind::InvalidInput, "matrix text: empty");
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != 2 * n) {
      throw Error(ErrorKind::InvalidInput, "matrix text: each row needs dim 're im' pairs");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      m(i, k) = cplx(row[static_cast<std::size_t>(2 * k)], row[static_cast<std::size_t>(2 * k + 1)]);
    }
  }
  return OperatorMatrix(std::move(m));
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const std::string &contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

OperatorMatrix load_matrix(const std::string &path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return matrix_from_json(json::parse(text));
    } catch (const json::exception &e) {
      throw Error(ErrorKind::InvalidInput, path + ": " + e.what());
    }
  }
  return matrix_from_text(text);
}

void save_matrix(const std::string &path, const OperatorMatrix &m, MatrixFormat format) {
  write_file(path, format == MatrixFormat::Json ? dump(matrix_to_json(m)) : matrix_to_text(m));
}

// ---------------------------------------------------------------------------
// TOML subset

namespace {

class TomlParser {
public:
  explicit TomlParser(const std::string &text) : s_(text) {}

  json parse() {
    json root = json::object();
    json *table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        const bool array_table = peek() == '[';
        if (array_table) ++pos_;
        const std::vector<std::string> path = parse_key_path();
        expect(']');
        if (array_table) expect(']');
        end_of_line();
        json *node = &root;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) node = &descend(*node, path[i]);
        json &leaf = (*node)[path.back()];
        if (array_table) {
          if (leaf.is_null()) leaf = json::array();
          if (!leaf.is_array()) fail("key redefined as array of tables: " + path.back());
          leaf.push_back(json::object());
          table = &leaf.back();
        } else {
          if (leaf.is_null()) leaf = json::object();
          if (!leaf.is_object()) fail("key redefined as table: " + path.back());
          table = &leaf;
        }
        continue;
      }
      assign(*table);
      end_of_line();
    }
    return root;
  }

private:
  const std::string &s_;
  std::size_t pos_ = 0;
  int line_ = 1;

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  [[noreturn]] void fail(const std::string &msg) const {
    throw Error(ErrorKind::InvalidInput, "TOML line " + std::to_string(line_) + ": " + msg);
  }

  void expect(char c) {
    skip_spaces();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }

  // Whitespace, newlines and comments (used between lines and inside arrays).
  void skip_blank_lines() {
    while (!eof()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\r') {
        ++pos_;
      } else if (peek() == '\n') {
        ++pos_;
        ++line_;
      } else {
        break;
      }
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    ++pos_;
    ++line_;
  }

  static json &descend(json &node, const std::string &key) {
    json &child = node[key];
    if (child.is_null()) child = json::object();
    if (child.is_array() && !child.empty()) return child.back();
    return child;
  }

  std::string parse_key() {
    skip_spaces();
    if (peek() == '"' || peek() == '\'') return parse_string();
    std::string key;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                      peek() == '-')) {
      key += s_[pos_++];
    }
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path{parse_key()};
    skip_spaces();
    while (peek() == '.') {
      ++pos_;
      path.push_back(parse_key());
      skip_spaces();
    }
    return path;
  }

  void assign(json &table) {
    const std::vector<std::string> path = parse_key_path();
    expect('=');
    json value = parse_value();
    json *node = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) node = &descend(*node, path[i]);
    if (node->contains(path.back())) fail("duplicate key " + path.back());
    (*node)[path.back()] = std::move(value);
  }

  std::string parse_string() {
    const char quote = s_[pos_++];
    std::string out;
    while (!eof() && peek() != quote) {
      char c = s_[pos_++];
      if (c == '\n') fail("unterminated string");
      if (quote == '"' && c == '\\') {
        if (eof()) fail("bad escape");
        const char e = s_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '\\': c = '\\'; break;
          case '"': c = '"'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out += c;
    }
    if (eof()) fail("unterminated string");
    ++pos_;
    return out;
  }

  json parse_value() {
    skip_spaces();
    const char c = peek();
    if (c == '"' || c == '\'') return parse_string();
    if (c == '[') {
      ++pos_;
      json arr = json::array();
      while (true) {
        skip_blank_lines();
        if (peek() == ']') {
          ++pos_;
          return arr;
        }
        arr.push_back(parse_value());
        skip_blank_lines();
        if (peek() == ',') {
          ++pos_;
        } else if (peek() != ']') {
          fail("expected ',' or ']' in array");
        }
      }
    }
    if (c == '{') {
      ++pos_;
      json obj = json::object();
      skip_spaces();
      if (peek() == '}') {
        ++pos_;
        return obj;
      }
      while (true) {
        assign(obj);
        skip_spaces();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        expect('}');
        return obj;
      }
    }
    std::string token;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' ||
                      peek() == '-' || peek() == '.' || peek() == '_')) {
      if (peek() != '_') token += peek();
      ++pos_;
    }
    if (token == "true") return true;
    if (token == "false") return false;
    if (token.empty()) fail("expected a value");
    const bool is_float = token.find_first_of(".eE") != std::string::npos;
    char *end = nullptr;
    if (is_float) {
      const double v = std::strtod(token.c_str(), &end);
      if (*end != '\0') fail("bad number " + token);
      return v;
    }
    const long long v = std::strtoll(token.c_str(), &end, 10);
    if (*end != '\0') fail("bad value " + token);
    return v;
  }
};

}  // namespace

json parse_toml(const std::string &text) { return TomlParser(text).parse(); }

json parse_config(const std::string &text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::exception &e) {
      throw Error(ErrorKind::InvalidInput, std::string("config JSON: ") + e.what());
    }
  }
  return parse_toml(text);
}

// ---------------------------------------------------------------------------
// Reports

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const std::vector<cplx> &zs) {
  json out = json::array();
  for (const cplx &z : zs) out.push_back(to_json(z));
  return out;
}

json to_json(const SemigroupBound &b) {
  return json{{"M", b.M}, {"omega", b.omega}, {"T_check", b.T_check}, {"grid", b.grid}};
}

json to_json(const YosidaDistanceEstimate &e) {
  return json{{"value", e.value},           {"mu_grid", e.mu_grid},
              {"samples", e.samples},       {"tail_slope", e.tail_slope},
              {"tail_spread", e.tail_spread}, {"converged", e.converged}};
}

json to_json(const BoundedPerturbationReport &r) {
  return json{{"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}, {"estimate", to_json(r.estimate)}};
}

json to_json(const ClassPReport &r) {
  return json{{"K", r.K},
              {"quadrature_error", r.quadrature_error},
              {"truncation_error", r.truncation_error},
              {"dY", r.dY},
              {"dY_converged", r.dY_converged},
              {"holds", r.holds}};
}

json to_json(const SemigroupDifferenceReport &r) {
  json rows = json::array();
  for (const auto &row : r.rows) {
    rows.push_back(json{{"t", row.t}, {"lhs", row.lhs}, {"rhs", row.rhs}, {"holds", row.holds}});
  }
  return json{{"M", r.M}, {"omega", r.omega}, {"dY", r.dY}, {"rows", rows}, {"all_hold", r.all_hold}};
}

json to_json(const DichotomyReport &r) {
  json out{{"hyperbolic", r.hyperbolic},
           {"gap", r.gap},
           {"rank", r.rank},
           {"N", r.N},
           {"alpha", r.alpha},
           {"t_grid_checked", r.t_grid_checked},
           {"t1_spectrum", to_json(r.t1_spectrum)},
           {"contour_points_used", r.contour_points_used},
           {"contour_deviation", r.contour_deviation},
           {"contour_verified", r.contour_verified}};
  out["projection"] = r.projection ? matrix_to_json(*r.projection) : json(nullptr);
  return out;
}

json to_json(const PersistenceReport &r) {
  return json{{"d_T1", r.d_T1},
              {"margin", r.margin},
              {"predicted_persist", r.predicted_persist},
              {"actual_hyperbolic", r.actual_hyperbolic},
              {"sound", r.sound}};
}

json to_json(const CharRoot &r) {
  return json{{"lambda", to_json(r.lambda)},
              {"mode_n", r.mode_n ? json(*r.mode_n) : json(nullptr)},
              {"residual", r.residual}};
}

json to_json(const DelaySystem &s) {
  json kernel = json::array();
  for (const KernelAtom &atom : s.kernel()) {
    kernel.push_back(json{{"theta", atom.theta}, {"weight", matrix_to_json(atom.weight)}});
  }
  return json{{"A", matrix_to_json(s.A())},
              {"B_point", matrix_to_json(s.B_point())},
              {"r", s.r()},
              {"kernel", kernel},
              {"functional_norm", s.functional_norm()}};
}

json to_json(const DelayDichotomyReport &r) {
  json per_mode = json::array();
  for (std::size_t i = 0; i < r.per_mode.size(); ++i) {
    json m = to_json(r.per_mode[i]);
    m.erase("projection");
    m["mode_n"] = r.mode_labels[i] ? json(*r.mode_labels[i]) : json(nullptr);
    per_mode.push_back(std::move(m));
  }
  json roots = json::array();
  for (const auto &list : r.roots) {
    json mode = json::array();
    for (const CharRoot &root : list) mode.push_back(to_json(root));
    roots.push_back(std::move(mode));
  }
  return json{{"combined", to_json(r.combined)},
              {"per_mode", per_mode},
              {"roots", roots},
              {"cross_checked", r.cross_checked},
              {"root_verdict", r.root_verdict},
              {"closest_root_re", r.cross_checked ? json(r.closest_root_re) : json(nullptr)}};
}

json to_json(const GeneratorDistanceReport &r) {
  return json{{"dY_G", r.dY_G},
              {"dY_A", r.dY_A},
              {"dY_B", r.dY_B},
              {"tol", r.tol},
              {"bound_holds", r.bound_holds},
              {"estimate_G", to_json(r.estimate_G)},
              {"estimate_A", to_json(r.estimate_A)}};
}

json to_json(const A0BoundReport &r) {
  return json{{"lhs_samples", r.lhs_samples},
              {"rhs_samples", r.rhs_samples},
              {"displayed_rhs_samples", r.displayed_rhs_samples},
              {"holds", r.holds},
              {"displayed_form_holds", r.displayed_form_holds},
              {"seed", r.seed}};
}

json to_json(const FunctionalBoundReport &r) {
  return json{{"dY_value", r.dY_value},
              {"bound", r.bound},
              {"holds", r.holds},
              {"sampled_lower", r.sampled_lower}};
}

}  // namespace yosida::io
