#pragma once

#include <array>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "necklace/error.hpp"

namespace necklace {

// A double quiver: every declared base arrow a comes with a doubled arrow
// named "a*" running the opposite way, and bar() exchanges the two. Vertices
// and arrows are interned; indices follow lexicographic name order, and that
// order seeds every canonical rotation downstream.
class DoubleQuiver {
 public:
  // base arrow triple: (name, source vertex, target vertex)
  DoubleQuiver(std::vector<std::string> vertices,
               std::vector<std::array<std::string, 3>> base_arrows);

  int num_vertices() const { return static_cast<int>(vertex_names_.size()); }
  int num_arrows() const { return static_cast<int>(arrow_names_.size()); }

  const std::string& vertex_name(int v) const { return vertex_names_[v]; }
  const std::string& arrow_name(int a) const { return arrow_names_[a]; }
  int src(int a) const { return src_[a]; }
  int tgt(int a) const { return tgt_[a]; }
  int bar(int a) const { return bar_[a]; }
  bool is_base(int a) const { return is_base_[a]; }

  // name lookups; throw InputError on unknown ids
  int vertex(std::string_view name) const;
  int arrow(std::string_view name) const;
  bool has_vertex(std::string_view name) const;
  bool has_arrow(std::string_view name) const;

  friend bool operator==(const DoubleQuiver&, const DoubleQuiver&);

 private:
  std::vector<std::string> vertex_names_;
  std::vector<std::string> arrow_names_;
  std::vector<int> src_, tgt_, bar_;
  std::vector<bool> is_base_;
  std::unordered_map<std::string, int> vertex_idx_;
  std::unordered_map<std::string, int> arrow_idx_;
};

// antisymmetric pairing: 1 if a is base and b = bar(a); -1 if b is base and
// a = bar(b); 0 otherwise
int pairing(const DoubleQuiver& q, int a, int b);
int pairing(const DoubleQuiver& q, std::string_view a, std::string_view b);

// symmetric pairing: 1 iff a = bar(b) (equivalently b = bar(a))
int pairing_gr(const DoubleQuiver& q, int a, int b);
int pairing_gr(const DoubleQuiver& q, std::string_view a, std::string_view b);

// 0 for base arrows, 1 for doubled ones
int arrow_parity(const DoubleQuiver& q, int a);
int arrow_parity(const DoubleQuiver& q, std::string_view a);

// Text format, line oriented: "vertex <id>" lines, then
// "arrow <id>: <src> -> <tgt>" lines; '#' starts a comment. Ids are
// [A-Za-z0-9_]+ (the '*' suffix is reserved for doubled arrows). Only the
// base quiver is written; doubling happens on construction.
DoubleQuiver parse_quiver(std::string_view text);
std::string format_quiver(const DoubleQuiver& q);

}  // namespace necklace
