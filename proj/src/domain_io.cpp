#include "biharm/domain_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <vector>

#include "biharm/error.hpp"

namespace biharm {
namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + msg);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(std::string_view s, int line) {
  s = trim(s);
  // std::from_chars for double is available in libstdc++ 11.
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail(line, "expected a real number, got '" + std::string(s) + "'");
  }
  return v;
}

long parse_integer(std::string_view s, int line) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail(line, "expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

// Splits "(a, b) (c, d)" into the comma lists inside each parenthesis pair.
std::vector<std::vector<std::string_view>> parse_tuples(std::string_view s, int line) {
  std::vector<std::vector<std::string_view>> out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == ' ' || s[i] == '\t' || s[i] == ',' || s[i] == ';') {
      ++i;
      continue;
    }
    if (s[i] != '(') fail(line, "expected '(' to open a tuple");
    const auto close = s.find(')', i);
    if (close == std::string_view::npos) fail(line, "unterminated tuple");
    std::string_view body = s.substr(i + 1, close - i - 1);
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
      const auto comma = body.find(',', start);
      parts.push_back(trim(body.substr(start, comma == std::string_view::npos ? body.npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    out.push_back(std::move(parts));
    i = close + 1;
  }
  return out;
}

}  // namespace

DomainDescription parse_domain_spec(std::string_view text) {
  DomainDescription spec;
  spec.cells.clear();
  bool have_dim = false;
  bool have_size = false;
  int offset_line = 0;
  std::vector<double> offset;
  struct PendingCell {
    std::vector<long> coords;
    int line;
  };
  std::vector<PendingCell> pending;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    const std::string key(trim(raw.substr(0, eq)));
    const std::string_view value = trim(raw.substr(eq + 1));

    if (key == "name") {
      spec.name = std::string(value);
    } else if (key == "dimension") {
      spec.dimension = static_cast<int>(parse_integer(value, line_no));
      if (spec.dimension != 2 && spec.dimension != 3) fail(line_no, "dimension must be 2 or 3");
      have_dim = true;
    } else if (key == "cell_size") {
      spec.cell_size = parse_real(value, line_no);
      if (!(spec.cell_size > 0.0)) fail(line_no, "cell_size must be positive");
      have_size = true;
    } else if (key == "offset") {
      const auto tuples = parse_tuples(value, line_no);
      if (tuples.size() != 1) fail(line_no, "offset must be a single tuple");
      offset.clear();
      for (auto part : tuples.front()) offset.push_back(parse_real(part, line_no));
      offset_line = line_no;
    } else if (key == "cells") {
      for (const auto& t : parse_tuples(value, line_no)) {
        PendingCell c{{}, line_no};
        for (auto part : t) c.coords.push_back(parse_integer(part, line_no));
        pending.push_back(std::move(c));
      }
    } else {
      fail(line_no, "unknown key '" + key + "'");
    }
  }

  if (!have_dim) fail(line_no, "missing key 'dimension'");
  if (!have_size) fail(line_no, "missing key 'cell_size'");
  if (pending.empty()) fail(line_no, "missing key 'cells'");
  if (!offset.empty()) {
    if (static_cast<int>(offset.size()) != spec.dimension) {
      fail(offset_line, "offset has " + std::to_string(offset.size()) + " components, expected " +
                            std::to_string(spec.dimension));
    }
    for (int a = 0; a < spec.dimension; ++a) spec.offset[a] = offset[a];
  }
  for (const auto& c : pending) {
    if (static_cast<int>(c.coords.size()) != spec.dimension) {
      fail(c.line, "cell tuple has " + std::to_string(c.coords.size()) + " entries, expected " +
                       std::to_string(spec.dimension));
    }
    LatticeIndex idx{0, 0, 0};
    for (int a = 0; a < spec.dimension; ++a) idx[a] = c.coords[a];
    spec.cells.push_back(idx);
  }
  return spec;
}

DomainDescription read_domain_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open domain file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  DomainDescription spec = parse_domain_spec(buf.str());
  if (spec.name.empty()) spec.name = path.stem().string();
  return spec;
}

std::string format_domain_spec(const DomainDescription& spec) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  if (!spec.name.empty()) out << "name = " << spec.name << '\n';
  out << "dimension = " << spec.dimension << '\n';
  out << "cell_size = " << spec.cell_size << '\n';
  out << "offset = (";
  for (int a = 0; a < spec.dimension; ++a) out << (a ? ", " : "") << spec.offset[a];
  out << ")\n";
  for (const auto& c : spec.cells) {
    out << "cells = (";
    for (int a = 0; a < spec.dimension; ++a) out << (a ? "," : "") << c[a];
    out << ")\n";
  }
  return out.str();
}

}  // namespace biharm
