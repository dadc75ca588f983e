#include "necklace/quiver.hpp"

#include <algorithm>
#include <cctype>

namespace necklace {

DoubleQuiver::DoubleQuiver(
    std::vector<std::string> vertices,
    std::vector<std::array<std::string, 3>> base_arrows) {
  std::sort(vertices.begin(), vertices.end());
  for (const auto& v : vertices) {
    if (vertex_idx_.count(v))
      throw InputError("duplicate vertex id '" + v + "'");
    vertex_idx_[v] = static_cast<int>(vertex_names_.size());
    vertex_names_.push_back(v);
  }

  struct Raw {
    std::string name;
    int s, t;
    int mate;  // filled after sorting
    bool base;
  };
  std::vector<Raw> raw;
  for (const auto& [name, s, t] : base_arrows) {
    auto is = vertex_idx_.find(s);
    auto it = vertex_idx_.find(t);
    if (is == vertex_idx_.end())
      throw InputError("undeclared vertex '" + s + "' in arrow '" + name +
                       "'");
    if (it == vertex_idx_.end())
      throw InputError("undeclared vertex '" + t + "' in arrow '" + name +
                       "'");
    raw.push_back({name, is->second, it->second, 0, true});
    raw.push_back({name + "*", it->second, is->second, 0, false});
  }
  std::sort(raw.begin(), raw.end(),
            [](const Raw& a, const Raw& b) { return a.name < b.name; });
  for (size_t i = 0; i < raw.size(); ++i) {
    if (arrow_idx_.count(raw[i].name))
      throw InputError("duplicate arrow id '" + raw[i].name + "'");
    arrow_idx_[raw[i].name] = static_cast<int>(i);
    arrow_names_.push_back(raw[i].name);
    src_.push_back(raw[i].s);
    tgt_.push_back(raw[i].t);
    is_base_.push_back(raw[i].base);
  }
  bar_.resize(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    const std::string& n = arrow_names_[i];
    std::string mate = is_base_[i] ? n + "*" : n.substr(0, n.size() - 1);
    bar_[i] = arrow_idx_.at(mate);
  }
}

int DoubleQuiver::vertex(std::string_view name) const {
  auto it = vertex_idx_.find(std::string(name));
  if (it == vertex_idx_.end())
    throw InputError("unknown vertex '" + std::string(name) + "'");
  return it->second;
}

int DoubleQuiver::arrow(std::string_view name) const {
  auto it = arrow_idx_.find(std::string(name));
  if (it == arrow_idx_.end())
    throw InputError("unknown arrow '" + std::string(name) + "'");
  return it->second;
}

bool DoubleQuiver::has_vertex(std::string_view name) const {
  return vertex_idx_.count(std::string(name)) > 0;
}

bool DoubleQuiver::has_arrow(std::string_view name) const {
  return arrow_idx_.count(std::string(name)) > 0;
}

bool operator==(const DoubleQuiver& a, const DoubleQuiver& b) {
  return a.vertex_names_ == b.vertex_names_ &&
         a.arrow_names_ == b.arrow_names_ && a.src_ == b.src_ &&
         a.tgt_ == b.tgt_;
}

static void check_range(const DoubleQuiver& q, int a) {
  if (a < 0 || a >= q.num_arrows()) throw InputError("arrow index range");
}

int pairing(const DoubleQuiver& q, int a, int b) {
  check_range(q, a);
  check_range(q, b);
  if (q.is_base(a) && b == q.bar(a)) return 1;
  if (q.is_base(b) && a == q.bar(b)) return -1;
  return 0;
}

int pairing(const DoubleQuiver& q, std::string_view a, std::string_view b) {
  return pairing(q, q.arrow(a), q.arrow(b));
}

int pairing_gr(const DoubleQuiver& q, int a, int b) {
  check_range(q, a);
  check_range(q, b);
  return b == q.bar(a) ? 1 : 0;
}

int pairing_gr(const DoubleQuiver& q, std::string_view a,
               std::string_view b) {
  return pairing_gr(q, q.arrow(a), q.arrow(b));
}

int arrow_parity(const DoubleQuiver& q, int a) {
  check_range(q, a);
  return q.is_base(a) ? 0 : 1;
}

int arrow_parity(const DoubleQuiver& q, std::string_view a) {
  return arrow_parity(q, q.arrow(a));
}

namespace {

struct Cursor {
  std::string_view text;
  size_t pos = 0;
  int line = 1;
  int col = 1;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

DoubleQuiver parse_quiver(std::string_view text) {
  std::vector<std::string> vertices;
  std::vector<std::array<std::string, 3>> arrows;

  int line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;

    size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);

    size_t p = 0;
    auto skip_ws = [&] {
      while (p < line.size() && (line[p] == ' ' || line[p] == '\t' ||
                                 line[p] == '\r'))
        ++p;
    };
    auto take_ident = [&](const char* what) {
      skip_ws();
      size_t b = p;
      while (p < line.size() && ident_char(line[p])) ++p;
      if (p == b)
        throw ParseError(std::string("expected ") + what, line_no,
                         static_cast<int>(b + 1));
      return std::string(line.substr(b, p - b));
    };
    auto expect = [&](std::string_view tok) {
      skip_ws();
      if (line.substr(p, tok.size()) != tok)
        throw ParseError("expected '" + std::string(tok) + "'", line_no,
                         static_cast<int>(p + 1));
      p += tok.size();
    };

    skip_ws();
    if (p < line.size()) {
      size_t kw_at = p;
      std::string kw = take_ident("'vertex' or 'arrow'");
      if (kw == "vertex") {
        vertices.push_back(take_ident("vertex id"));
      } else if (kw == "arrow") {
        std::string name = take_ident("arrow id");
        expect(":");
        std::string s = take_ident("source vertex");
        expect("->");
        std::string t = take_ident("target vertex");
        arrows.push_back({name, s, t});
      } else {
        throw ParseError("expected 'vertex' or 'arrow', got '" + kw + "'",
                         line_no, static_cast<int>(kw_at + 1));
      }
      skip_ws();
      if (p < line.size())
        throw ParseError("trailing characters", line_no,
                         static_cast<int>(p + 1));
    }

    if (end == text.size()) break;
    start = end + 1;
  }

  try {
    return DoubleQuiver(std::move(vertices), std::move(arrows));
  } catch (const InputError& e) {
    // construction-level validation has no single offending position
    throw ParseError(e.what(), line_no, 1);
  }
}

std::string format_quiver(const DoubleQuiver& q) {
  std::string out;
  for (int v = 0; v < q.num_vertices(); ++v)
    out += "vertex " + q.vertex_name(v) + "\n";
  for (int a = 0; a < q.num_arrows(); ++a)
    if (q.is_base(a))
      out += "arrow " + q.arrow_name(a) + ": " +
             q.vertex_name(q.src(a)) + " -> " + q.vertex_name(q.tgt(a)) +
             "\n";
  return out;
}

}  // namespace necklace
