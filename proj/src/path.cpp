#include "necklace/path.hpp"

namespace necklace {

Path make_path(const DoubleQuiver& q, const std::vector<int>& arrows) {
  for (size_t i = 0; i + 1 < arrows.size(); ++i)
    if (q.tgt(arrows[i]) != q.src(arrows[i + 1]))
      throw InputError("path does not compose: t(" +
                       q.arrow_name(arrows[i]) + ") != s(" +
                       q.arrow_name(arrows[i + 1]) + ")");
  if (arrows.empty()) throw InputError("empty arrow word");
  return Path::word(arrows);
}

std::optional<Path> path_concat(const DoubleQuiver& q, const Path& p,
                                const Path& r) {
  if (p.tgt(q) != r.src(q)) return std::nullopt;
  if (p.is_constant()) return r;
  if (r.is_constant()) return p;
  std::vector<int> w = p.arrows;
  w.insert(w.end(), r.arrows.begin(), r.arrows.end());
  return Path::word(std::move(w));
}

PathAlgebraElement path_mul(const DoubleQuiver& q,
                            const PathAlgebraElement& p,
                            const PathAlgebraElement& r) {
  PathAlgebraElement out;
  for (const auto& [pp, pc] : p)
    for (const auto& [rp, rc] : r)
      if (auto w = path_concat(q, pp, rp)) add_term(out, *w, pc * rc);
  return out;
}

namespace {

// subword of w on positions [from, to), possibly empty
std::vector<int> slice(const std::vector<int>& w, int from, int to) {
  return std::vector<int>(w.begin() + from, w.begin() + to);
}

// leg = left ++ right, constant at v when both are empty
Path leg(const std::vector<int>& left, const std::vector<int>& right,
         int v) {
  if (left.empty() && right.empty()) return Path::constant(v);
  std::vector<int> w = left;
  w.insert(w.end(), right.begin(), right.end());
  return Path::word(std::move(w));
}

}  // namespace

PathTensorElement double_bracket(const DoubleQuiver& q, char sign,
                                 const Path& p, const Path& r) {
  PathTensorElement out;
  if (p.is_constant() || r.is_constant()) return out;
  const auto& a = p.arrows;
  const auto& b = r.arrows;
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      int c = pairing(q, a[i], b[j]);
      if (c == 0) continue;
      if (sign == '-') {
        Path l = leg(slice(b, 0, j), slice(a, i + 1, m), q.tgt(a[i]));
        Path rr = leg(slice(a, 0, i), slice(b, j + 1, n), q.src(a[i]));
        add_term(out, {l, rr}, Rational(c));
      } else {
        std::vector<int> l = slice(b, 0, j + 1);
        l.push_back(a[i]);
        auto tail = slice(a, i + 1, m);
        l.insert(l.end(), tail.begin(), tail.end());
        std::vector<int> rr = slice(a, 0, i + 1);
        rr.push_back(b[j]);
        auto tail2 = slice(b, j + 1, n);
        rr.insert(rr.end(), tail2.begin(), tail2.end());
        add_term(out, {Path::word(std::move(l)), Path::word(std::move(rr))},
                 Rational(c));
      }
    }
  }
  return out;
}

LinComb<std::tuple<Path, Path, Path>> triple_bracket(const DoubleQuiver& q,
                                                     char sign, int a, int b,
                                                     int c) {
  using Triple = std::tuple<Path, Path, Path>;
  LinComb<Triple> out;
  Path pa = Path::word({a}), pb = Path::word({b}), pc = Path::word({c});

  // {{x, u (x) v}}_L = {{x, u}} (x) v, then rotate tensor legs so the three
  // cyclic terms line up: rot sends (x1, x2, x3) to (x3, x1, x2).
  auto accumulate = [&](const Path& x, const Path& y, const Path& z,
                        int rot) {
    for (const auto& [uv, c1] : double_bracket(q, sign, y, z)) {
      const auto& [u, v] = uv;
      for (const auto& [st, c2] : double_bracket(q, sign, x, u)) {
        Triple t{st.first, st.second, v};
        for (int k = 0; k < rot; ++k)
          t = Triple{std::get<2>(t), std::get<0>(t), std::get<1>(t)};
        add_term(out, t, c1 * c2);
      }
    }
  };
  accumulate(pa, pb, pc, 0);
  accumulate(pb, pc, pa, 1);
  accumulate(pc, pa, pb, 2);
  return out;
}

}  // namespace necklace
