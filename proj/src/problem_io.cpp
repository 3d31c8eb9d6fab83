#include "laplace/problem_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

#include "laplace/error.hpp"

namespace laplace {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void parse_error(int line_no, const std::string& msg) {
  fail(ErrorCode::kParse, "line " + std::to_string(line_no) + ": " + msg);
}

double parse_real(std::string_view tok, int line_no) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) parse_error(line_no, "invalid number '" + std::string(tok) + "'");
  return v;
}

long parse_int(std::string_view tok, int line_no) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    parse_error(line_no, "invalid integer '" + std::string(tok) + "'");
  }
  return v;
}

PolyTerm parse_term(const std::vector<std::string_view>& toks, int dim, int line_no) {
  if (static_cast<int>(toks.size()) != dim + 1) {
    parse_error(line_no, "polynomial term needs 1 coefficient and " + std::to_string(dim) + " exponents");
  }
  std::vector<int> exps;
  for (int i = 1; i <= dim; ++i) {
    const long e = parse_int(toks[static_cast<size_t>(i)], line_no);
    if (e < 0 || e > kMaxDegree) parse_error(line_no, "exponent out of range");
    exps.push_back(static_cast<int>(e));
  }
  return PolyTerm{MultiIndex(std::move(exps)), parse_real(toks[0], line_no)};
}

struct Line {
  int number;
  std::vector<std::string_view> toks;
};

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++number;
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = split_ws(line);
    if (!toks.empty()) out.push_back(Line{number, std::move(toks)});
    pos = end + 1;
  }
  return out;
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_field(const ScalarField& f) {
  if (f.kind() == FieldKind::kBuiltin) return "builtin " + f.name() + "\n";
  if (f.kind() == FieldKind::kNumeric) {
    fail(ErrorCode::kInvalidArgument, "numeric fields cannot be written to problem files");
  }
  std::string out = "poly\n";
  for (const auto& t : f.terms()) {
    out += format_real(t.coeff);
    for (int e : t.exponent.entries()) out += " " + std::to_string(e);
    out += "\n";
  }
  return out + "end\n";
}

}  // namespace

ScalarField parse_polynomial(int dim, std::string_view lines) {
  std::vector<PolyTerm> terms;
  for (const auto& line : tokenize(lines)) terms.push_back(parse_term(line.toks, dim, line.number));
  return ScalarField::polynomial(dim, std::move(terms));
}

ProblemSpec parse_problem(std::string_view text) {
  static const std::set<std::string, std::less<>> kKeys = {"name", "dim", "box", "h", "sigma", "g", "p", "s", "k"};
  const auto lines = tokenize(text);
  std::set<std::string, std::less<>> seen;
  ProblemSpec prob;
  prob.p = std::numeric_limits<double>::infinity();
  int dim = 0;
  std::vector<double> box_values;

  for (size_t li = 0; li < lines.size(); ++li) {
    const Line& line = lines[li];
    const std::string key(line.toks[0]);
    if (!kKeys.contains(key)) parse_error(line.number, "unknown key '" + key + "'");
    if (!seen.insert(key).second) parse_error(line.number, "duplicate key '" + key + "'");
    const auto args = std::span(line.toks).subspan(1);
    auto need_args = [&](size_t count) {
      if (args.size() != count) {
        parse_error(line.number, "key '" + key + "' takes " + std::to_string(count) + " value(s)");
      }
    };

    if (key == "name") {
      need_args(1);
      prob.name = std::string(args[0]);
    } else if (key == "dim") {
      need_args(1);
      const long d = parse_int(args[0], line.number);
      if (d < 1 || d > kMaxDimension) parse_error(line.number, "dim must be in [1, 6]");
      dim = static_cast<int>(d);
    } else if (key == "box") {
      for (auto tok : args) box_values.push_back(parse_real(tok, line.number));
    } else if (key == "p") {
      need_args(1);
      prob.p = parse_real(args[0], line.number);
    } else if (key == "s") {
      need_args(1);
      prob.s = parse_real(args[0], line.number);
    } else if (key == "k") {
      need_args(1);
      prob.k = static_cast<int>(parse_int(args[0], line.number));
    } else {
      if (dim == 0) parse_error(line.number, "'dim' must precede field definitions");
      ScalarField* target = key == "h" ? &prob.h : key == "g" ? &prob.g : &prob.sigma;
      if (args.empty()) parse_error(line.number, "field '" + key + "' needs a definition");
      if (args[0] == "poly") {
        need_args(1);
        std::vector<PolyTerm> terms;
        bool closed = false;
        while (++li < lines.size()) {
          const Line& term = lines[li];
          if (term.toks.size() == 1 && term.toks[0] == "end") {
            closed = true;
            break;
          }
          terms.push_back(parse_term(term.toks, dim, term.number));
        }
        if (!closed) parse_error(line.number, "polynomial for '" + key + "' is missing 'end'");
        *target = ScalarField::polynomial(dim, std::move(terms));
      } else if (args[0] == "builtin") {
        need_args(2);
        *target = ScalarField::builtin(std::string(args[1]), dim);
      } else {
        need_args(1);
        *target = ScalarField::builtin(std::string(args[0]), dim);
      }
    }
  }

  for (const char* required : {"dim", "box", "h", "g", "k"}) {
    if (!seen.contains(required)) fail(ErrorCode::kParse, std::string("missing key '") + required + "'");
  }
  if (static_cast<int>(box_values.size()) != 2 * dim) {
    fail(ErrorCode::kParse, "box needs " + std::to_string(2 * dim) + " numbers");
  }
  for (int i = 0; i < dim; ++i) {
    prob.box.push_back(Interval{box_values[static_cast<size_t>(2 * i)], box_values[static_cast<size_t>(2 * i + 1)]});
  }
  if (!prob.sigma.valid()) prob.sigma = ScalarField::zero(dim);
  prob.validate();
  return prob;
}

ProblemSpec load_problem(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kParse, "cannot open problem file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  ProblemSpec prob = parse_problem(buf.str());
  if (prob.name.empty()) prob.name = path.stem().string();
  return prob;
}

std::string format_problem(const ProblemSpec& prob) {
  std::string out;
  if (!prob.name.empty()) out += "name " + prob.name + "\n";
  out += "dim " + std::to_string(prob.dim()) + "\n";
  out += "box";
  for (const auto& iv : prob.box) out += " " + format_real(iv.lo) + " " + format_real(iv.hi);
  out += "\n";
  out += "h " + format_field(prob.h);
  out += "sigma " + format_field(prob.sigma);
  out += "g " + format_field(prob.g);
  out += "p " + format_real(prob.p) + "\n";
  out += "s " + format_real(prob.s) + "\n";
  out += "k " + std::to_string(prob.k) + "\n";
  return out;
}

}  // namespace laplace
