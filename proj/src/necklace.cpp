#include "necklace/necklace.hpp"

#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include "necklace/error.hpp"

namespace necklace {

namespace {

void validate_cycle(const DoubleQuiver& q, const std::vector<int>& w) {
  if (w.empty()) throw InputError("empty arrow sequence is not a cycle");
  const int n = static_cast<int>(w.size());
  for (int k = 0; k < n; ++k) {
    if (w[k] < 0 || w[k] >= q.num_arrows())
      throw InputError("arrow index out of range");
    const int next = w[(k + 1) % n];
    if (q.tgt(w[k]) != q.src(next))
      throw InputError("sequence is not composable/closed at position " +
                       std::to_string(k + 1));
  }
}

int min_rotation_index(const std::vector<int>& w) {
  const int n = static_cast<int>(w.size());
  int best = 0;
  for (int r = 1; r < n; ++r) {
    for (int k = 0; k < n; ++k) {
      const int a = w[(r + k) % n];
      const int b = w[(best + k) % n];
      if (a != b) {
        if (a < b) best = r;
        break;
      }
    }
  }
  return best;
}

std::vector<int> rotated(const std::vector<int>& w, int r) {
  const int n = static_cast<int>(w.size());
  std::vector<int> out(w.size());
  for (int k = 0; k < n; ++k) out[k] = w[(r + k) % n];
  return out;
}

}  // namespace

CyclicWord cyclic_normalize(const DoubleQuiver& q,
                            const std::vector<int>& arrows) {
  validate_cycle(q, arrows);
  return CyclicWord{-1, rotated(arrows, min_rotation_index(arrows))};
}

GradedNecklaceElement graded_normalize(const DoubleQuiver& q,
                                       const std::vector<int>& arrows,
                                       const Rational& sign) {
  validate_cycle(q, arrows);
  const int n = static_cast<int>(arrows.size());
  int total = 0;
  for (int a : arrows) total += arrow_parity(q, a);
  // cumulative Koszul sign of the rotation starting at position k
  std::vector<int> rot_sign(n, 1);
  for (int k = 1; k < n; ++k) {
    const int p = arrow_parity(q, arrows[k - 1]);
    rot_sign[k] = rot_sign[k - 1] * ((p * (total - p)) % 2 ? -1 : 1);
  }
  const int best = min_rotation_index(arrows);
  const std::vector<int> canon = rotated(arrows, best);
  for (int k = 0; k < n; ++k) {
    if (rot_sign[k] == rot_sign[best]) continue;
    if (rotated(arrows, k) == canon) return {};  // odd self-rotation
  }
  GradedNecklaceElement out;
  add_term(out, CyclicWord{-1, canon},
           rot_sign[best] == 1 ? sign : -sign);
  return out;
}

int word_parity(const DoubleQuiver& q, const CyclicWord& w) {
  int p = 0;
  for (int a : w.arrows) p += arrow_parity(q, a);
  return p % 2;
}

NecklaceElement br(const DoubleQuiver& q, char sign, const CyclicWord& x,
                   const CyclicWord& y) {
  NecklaceElement out;
  if (x.is_constant() || y.is_constant()) return out;
  const int m = x.length(), n = y.length();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const int c = pairing(q, x.arrows[i], y.arrows[j]);
      if (c == 0) continue;
      std::vector<int> w;
      if (sign == '-') {
        for (int k = 1; k < m; ++k) w.push_back(x.arrows[(i + k) % m]);
        for (int k = 1; k < n; ++k) w.push_back(y.arrows[(j + k) % n]);
        if (w.empty())
          add_term(out, CyclicWord::constant(q.tgt(x.arrows[i])),
                   Rational(c));
        else
          add_term(out, cyclic_normalize(q, w), Rational(c));
      } else {
        w.push_back(x.arrows[i]);
        for (int k = 1; k < m; ++k) w.push_back(x.arrows[(i + k) % m]);
        w.push_back(x.arrows[i]);
        w.push_back(y.arrows[j]);
        for (int k = 1; k < n; ++k) w.push_back(y.arrows[(j + k) % n]);
        w.push_back(y.arrows[j]);
        add_term(out, cyclic_normalize(q, w), Rational(c));
      }
    }
  }
  return out;
}

NecklaceElement br(const DoubleQuiver& q, char sign,
                   const NecklaceElement& x, const NecklaceElement& y) {
  NecklaceElement out;
  for (const auto& [gx, cx] : x)
    for (const auto& [gy, cy] : y) add_scaled(out, br(q, sign, gx, gy), cx * cy);
  return out;
}

NecklaceTensor delta(const DoubleQuiver& q, char sign, const CyclicWord& x) {
  NecklaceTensor out;
  if (x.is_constant()) return out;
  const int n = x.length();
  const Rational half(1, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int c = pairing(q, x.arrows[i], x.arrows[j]);
      if (c == 0) continue;
      std::vector<int> run_ij, run_ji;
      for (int k = (i + 1) % n; k != j; k = (k + 1) % n)
        run_ij.push_back(x.arrows[k]);
      for (int k = (j + 1) % n; k != i; k = (k + 1) % n)
        run_ji.push_back(x.arrows[k]);
      CyclicWord l1, l2;
      if (sign == '-') {
        l1 = run_ij.empty() ? CyclicWord::constant(q.tgt(x.arrows[i]))
                            : cyclic_normalize(q, run_ij);
        l2 = run_ji.empty() ? CyclicWord::constant(q.tgt(x.arrows[j]))
                            : cyclic_normalize(q, run_ji);
      } else {
        std::vector<int> w1, w2;
        w1.push_back(x.arrows[i]);
        w1.insert(w1.end(), run_ij.begin(), run_ij.end());
        w1.push_back(x.arrows[j]);
        w2.push_back(x.arrows[j]);
        w2.insert(w2.end(), run_ji.begin(), run_ji.end());
        w2.push_back(x.arrows[i]);
        l1 = cyclic_normalize(q, w1);
        l2 = cyclic_normalize(q, w2);
      }
      add_term(out, std::make_pair(l1, l2), half * Rational(c));
    }
  }
  return out;
}

NecklaceTensor delta(const DoubleQuiver& q, char sign,
                     const NecklaceElement& x) {
  NecklaceTensor out;
  for (const auto& [g, c] : x) add_scaled(out, delta(q, sign, g), c);
  return out;
}

GradedNecklaceElement br_gr(const DoubleQuiver& q, char sign,
                            const CyclicWord& x, const CyclicWord& y) {
  GradedNecklaceElement out;
  if (x.is_constant() || y.is_constant()) return out;
  const int m = x.length(), n = y.length();
  std::vector<int> px(m), py(n);
  int Px = 0, Py = 0;
  for (int k = 0; k < m; ++k) Px += px[k] = arrow_parity(q, x.arrows[k]);
  for (int k = 0; k < n; ++k) Py += py[k] = arrow_parity(q, y.arrows[k]);
  int PSx = 0;
  for (int i = 0; i < m; ++i, PSx += px[i - 1]) {
    int PSy = 0;
    for (int j = 0; j < n; ++j, PSy += py[j - 1]) {
      if (pairing_gr(q, x.arrows[i], y.arrows[j]) == 0) continue;
      const int runx = Px - px[i], runy = Py - py[j];
      int eps = PSx * (Px - PSx) + PSy * (Py - PSy);
      std::vector<int> w;
      if (sign == '-') {
        eps += runx * py[j];
        for (int k = 1; k < m; ++k) w.push_back(x.arrows[(i + k) % m]);
        for (int k = 1; k < n; ++k) w.push_back(y.arrows[(j + k) % n]);
      } else {
        eps += runx + runy * py[j];
        w.push_back(x.arrows[i]);
        for (int k = 1; k < m; ++k) w.push_back(x.arrows[(i + k) % m]);
        w.push_back(x.arrows[i]);
        w.push_back(y.arrows[j]);
        for (int k = 1; k < n; ++k) w.push_back(y.arrows[(j + k) % n]);
        w.push_back(y.arrows[j]);
      }
      const Rational coeff(eps % 2 ? -1 : 1);
      if (w.empty())
        add_term(out, CyclicWord::constant(q.tgt(x.arrows[i])), coeff);
      else
        add_scaled(out, graded_normalize(q, w, coeff), Rational(1));
    }
  }
  return out;
}

GradedNecklaceElement br_gr(const DoubleQuiver& q, char sign,
                            const GradedNecklaceElement& x,
                            const GradedNecklaceElement& y) {
  GradedNecklaceElement out;
  for (const auto& [gx, cx] : x)
    for (const auto& [gy, cy] : y)
      add_scaled(out, br_gr(q, sign, gx, gy), cx * cy);
  return out;
}

GradedNecklaceTensor delta_gr(const DoubleQuiver& q, char sign,
                              const CyclicWord& x) {
  GradedNecklaceTensor out;
  if (x.is_constant()) return out;
  const int n = x.length();
  std::vector<int> p(n);
  int P = 0;
  for (int k = 0; k < n; ++k) P += p[k] = arrow_parity(q, x.arrows[k]);
  std::vector<int> ps(n + 1, 0);
  for (int k = 0; k < n; ++k) ps[k + 1] = ps[k] + p[k];
  const Rational half(1, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (pairing_gr(q, x.arrows[i], x.arrows[j]) == 0) continue;
      std::vector<int> run_ij, run_ji;
      int par_ij = 0, par_ji = 0;
      for (int k = (i + 1) % n; k != j; k = (k + 1) % n) {
        run_ij.push_back(x.arrows[k]);
        par_ij += p[k];
      }
      for (int k = (j + 1) % n; k != i; k = (k + 1) % n) {
        run_ji.push_back(x.arrows[k]);
        par_ji += p[k];
      }
      int eps = ps[i] * (P - ps[i]);
      GradedNecklaceElement l1, l2;
      if (sign == '-') {
        eps += par_ij * p[j];
        l1 = run_ij.empty()
                 ? GradedNecklaceElement{
                       {CyclicWord::constant(q.tgt(x.arrows[i])), Rational(1)}}
                 : graded_normalize(q, run_ij);
        l2 = run_ji.empty()
                 ? GradedNecklaceElement{
                       {CyclicWord::constant(q.tgt(x.arrows[j])), Rational(1)}}
                 : graded_normalize(q, run_ji);
      } else {
        eps += par_ij + par_ji * p[i] + p[j];
        std::vector<int> w1, w2;
        w1.push_back(x.arrows[i]);
        w1.insert(w1.end(), run_ij.begin(), run_ij.end());
        w1.push_back(x.arrows[j]);
        w2.push_back(x.arrows[j]);
        w2.insert(w2.end(), run_ji.begin(), run_ji.end());
        w2.push_back(x.arrows[i]);
        l1 = graded_normalize(q, w1);
        l2 = graded_normalize(q, w2);
      }
      const Rational coeff = (eps % 2 ? -half : half);
      for (const auto& [g1, c1] : l1)
        for (const auto& [g2, c2] : l2)
          add_term(out, std::make_pair(g1, g2), coeff * c1 * c2);
    }
  }
  return out;
}

GradedNecklaceTensor delta_gr(const DoubleQuiver& q, char sign,
                              const GradedNecklaceElement& x) {
  GradedNecklaceTensor out;
  for (const auto& [g, c] : x) add_scaled(out, delta_gr(q, sign, g), c);
  return out;
}

std::string format_necklace(const DoubleQuiver& q, const CyclicWord& w) {
  if (w.is_constant()) return "[e(" + q.vertex_name(w.vertex) + ")]";
  std::string s = "[";
  for (size_t k = 0; k < w.arrows.size(); ++k) {
    if (k) s += ' ';
    s += q.arrow_name(w.arrows[k]);
  }
  return s + "]";
}

std::string format_element(const DoubleQuiver& q, const NecklaceElement& e) {
  if (e.empty()) return "0";
  std::string s;
  for (const auto& [g, c] : e) {
    if (!s.empty()) s += " + ";
    s += c.str() + "·" + format_necklace(q, g);
  }
  return s;
}

CyclicWord parse_necklace(const DoubleQuiver& q, std::string_view text) {
  size_t b = text.find_first_not_of(" \t");
  size_t e = text.find_last_not_of(" \t");
  if (b == std::string_view::npos || text[b] != '[' || text[e] != ']')
    throw InputError("necklace literal must be enclosed in [ ]");
  std::string_view body = text.substr(b + 1, e - b - 1);
  std::vector<std::string_view> tokens;
  size_t pos = 0;
  while (pos < body.size()) {
    if (body[pos] == ' ' || body[pos] == '\t') {
      ++pos;
      continue;
    }
    size_t end = body.find_first_of(" \t", pos);
    if (end == std::string_view::npos) end = body.size();
    tokens.push_back(body.substr(pos, end - pos));
    pos = end;
  }
  if (tokens.empty()) throw InputError("empty necklace literal");
  if (tokens.size() == 1 && tokens[0].size() > 3 &&
      tokens[0].substr(0, 2) == "e(" && tokens[0].back() == ')') {
    std::string_view v = tokens[0].substr(2, tokens[0].size() - 3);
    return CyclicWord::constant(q.vertex(v));
  }
  std::vector<int> arrows;
  for (std::string_view t : tokens) arrows.push_back(q.arrow(t));
  return cyclic_normalize(q, arrows);
}

std::string format_tensor(const DoubleQuiver& q, const NecklaceTensor& t) {
  if (t.empty()) return "0";
  std::string s;
  for (const auto& [g, c] : t) {
    if (!s.empty()) s += " + ";
    s += c.str() + "·" + format_necklace(q, g.first) + "⊗" +
         format_necklace(q, g.second);
  }
  return s;
}

namespace {

void extend(const DoubleQuiver& q, std::vector<int>& seq, int max_len,
            std::set<CyclicWord>& out) {
  if (q.tgt(seq.back()) == q.src(seq.front()))
    out.insert(cyclic_normalize(q, seq));
  if (static_cast<int>(seq.size()) == max_len) return;
  for (int a = 0; a < q.num_arrows(); ++a) {
    if (q.src(a) != q.tgt(seq.back())) continue;
    seq.push_back(a);
    extend(q, seq, max_len, out);
    seq.pop_back();
  }
}

}  // namespace

std::vector<CyclicWord> enumerate_necklaces(const DoubleQuiver& q,
                                            int max_len,
                                            bool include_constants) {
  std::set<CyclicWord> all;
  for (int a = 0; a < q.num_arrows() && max_len >= 1; ++a) {
    std::vector<int> seq{a};
    extend(q, seq, max_len, all);
  }
  std::vector<CyclicWord> out(all.begin(), all.end());
  if (include_constants && max_len >= 1)
    for (int v = 0; v < q.num_vertices(); ++v)
      out.push_back(CyclicWord::constant(v));
  return out;
}

std::vector<CyclicWord> enumerate_graded_necklaces(const DoubleQuiver& q,
                                                   int max_len,
                                                   bool include_constants) {
  std::vector<CyclicWord> out;
  for (const CyclicWord& w : enumerate_necklaces(q, max_len, include_constants))
    if (w.is_constant() || !graded_normalize(q, w.arrows).empty())
      out.push_back(w);
  return out;
}

PairBracket make_br(const DoubleQuiver& q, char sign) {
  return [&q, sign](const CyclicWord& x, const CyclicWord& y) {
    return br(q, sign, x, y);
  };
}

Cobracket make_delta(const DoubleQuiver& q, char sign) {
  return [&q, sign](const CyclicWord& x) { return delta(q, sign, x); };
}

PairBracket make_br_gr(const DoubleQuiver& q, char sign) {
  return [&q, sign](const CyclicWord& x, const CyclicWord& y) {
    return br_gr(q, sign, x, y);
  };
}

Cobracket make_delta_gr(const DoubleQuiver& q, char sign) {
  return [&q, sign](const CyclicWord& x) { return delta_gr(q, sign, x); };
}

PairBracket make_corrupt_br(const DoubleQuiver& q, char sign) {
  // identical double sum but with the pairing sign dropped
  return [&q, sign](const CyclicWord& x, const CyclicWord& y) {
    NecklaceElement out;
    if (x.is_constant() || y.is_constant()) return out;
    const int m = x.length(), n = y.length();
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        const int c = std::abs(pairing(q, x.arrows[i], y.arrows[j]));
        if (c == 0) continue;
        std::vector<int> w;
        if (sign == '-') {
          for (int k = 1; k < m; ++k) w.push_back(x.arrows[(i + k) % m]);
          for (int k = 1; k < n; ++k) w.push_back(y.arrows[(j + k) % n]);
          if (w.empty())
            add_term(out, CyclicWord::constant(q.tgt(x.arrows[i])),
                     Rational(c));
          else
            add_term(out, cyclic_normalize(q, w), Rational(c));
        } else {
          w.push_back(x.arrows[i]);
          for (int k = 1; k < m; ++k) w.push_back(x.arrows[(i + k) % m]);
          w.push_back(x.arrows[i]);
          w.push_back(y.arrows[j]);
          for (int k = 1; k < n; ++k) w.push_back(y.arrows[(j + k) % n]);
          w.push_back(y.arrows[j]);
          add_term(out, cyclic_normalize(q, w), Rational(c));
        }
      }
    }
    return out;
  };
}

namespace {

using Triple = std::array<CyclicWord, 3>;
using TripleComb = LinComb<Triple>;

struct Ctx {
  const DoubleQuiver& q;
  const PairBracket& B;
  const Cobracket& D;
  std::map<std::pair<CyclicWord, CyclicWord>, NecklaceElement> bcache;
  std::map<CyclicWord, NecklaceTensor> dcache;

  const NecklaceElement& cbr(const CyclicWord& a, const CyclicWord& b) {
    auto key = std::make_pair(a, b);
    auto it = bcache.find(key);
    if (it == bcache.end()) it = bcache.emplace(key, B(a, b)).first;
    return it->second;
  }
  const NecklaceTensor& cdelta(const CyclicWord& a) {
    auto it = dcache.find(a);
    if (it == dcache.end()) it = dcache.emplace(a, D(a)).first;
    return it->second;
  }
  NecklaceElement ebr(const NecklaceElement& e, const CyclicWord& g) {
    NecklaceElement out;
    for (const auto& [h, c] : e) add_scaled(out, cbr(h, g), c);
    return out;
  }
};

std::string format_triples(const DoubleQuiver& q, const TripleComb& t) {
  if (t.empty()) return "0";
  std::string s;
  for (const auto& [g, c] : t) {
    if (!s.empty()) s += " + ";
    s += c.str() + "·" + format_necklace(q, g[0]) + "⊗" +
         format_necklace(q, g[1]) + "⊗" + format_necklace(q, g[2]);
  }
  return s;
}

int effective_threads(int threads, size_t total) {
  if (threads <= 0) {
    unsigned hc = std::thread::hardware_concurrency();
    threads = hc ? static_cast<int>(hc) : 1;
  }
  if (static_cast<size_t>(threads) > total && total > 0)
    threads = static_cast<int>(total);
  return threads < 1 ? 1 : threads;
}

// Runs check(ctx, i) for i in [0, total); on failure fills `rep` with the
// smallest failing index's message. Returns true when the phase passed.
template <class Check>
bool run_phase(const DoubleQuiver& q, const PairBracket& B, const Cobracket& D,
               size_t total, int threads, const char* axiom,
               const Check& check, AxiomReport& rep) {
  const int T = effective_threads(threads, total);
  std::vector<std::optional<std::pair<size_t, std::string>>> found(T);
  auto worker = [&](int t) {
    Ctx ctx{q, B, D, {}, {}};
    const size_t lo = total * t / T, hi = total * (t + 1) / T;
    for (size_t i = lo; i < hi; ++i) {
      auto bad = check(ctx, i);
      if (bad) {
        found[t] = std::make_pair(i, *bad);
        return;
      }
    }
  };
  if (T == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(T);
    for (int t = 0; t < T; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  std::optional<std::pair<size_t, std::string>> first;
  for (const auto& f : found)
    if (f && (!first || f->first < first->first)) first = f;
  if (first) {
    rep.ok = false;
    rep.axiom = axiom;
    rep.counterexample = first->second;
    return false;
  }
  return true;
}

std::vector<std::pair<int, int>> sorted_pairs(int n) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) out.emplace_back(i, j);
  return out;
}

std::vector<std::array<int, 3>> sorted_triples(int n) {
  std::vector<std::array<int, 3>> out;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      for (int k = j; k < n; ++k) out.push_back({i, j, k});
  return out;
}

}  // namespace

AxiomReport verify_ibl(const DoubleQuiver& q, const PairBracket& B,
                       const Cobracket& D,
                       const std::vector<CyclicWord>& sample, int threads) {
  AxiomReport rep;
  const int n = static_cast<int>(sample.size());
  const auto pairs = sorted_pairs(n);
  const auto triples = sorted_triples(n);

  auto witness2 = [&](const CyclicWord& x, const CyclicWord& y,
                      const std::string& res) {
    return "x=" + format_necklace(q, x) + ", y=" + format_necklace(q, y) +
           ", residual " + res;
  };

  // Jacobi runs first: a perturbed bracket is reported against it.
  if (!run_phase(q, B, D, triples.size(), threads, "Jacobi",
                 [&](Ctx& ctx, size_t idx) -> std::optional<std::string> {
                   const auto& [i, j, k] = triples[idx];
                   const CyclicWord &x = sample[i], &y = sample[j],
                                    &z = sample[k];
                   NecklaceElement r = ctx.ebr(ctx.cbr(x, y), z);
                   add_scaled(r, ctx.ebr(ctx.cbr(y, z), x), Rational(1));
                   add_scaled(r, ctx.ebr(ctx.cbr(z, x), y), Rational(1));
                   if (r.empty()) return std::nullopt;
                   return "x=" + format_necklace(q, x) +
                          ", y=" + format_necklace(q, y) +
                          ", z=" + format_necklace(q, z) + ", residual " +
                          format_element(q, r);
                 },
                 rep))
    return rep;

  if (!run_phase(q, B, D, pairs.size(), threads, "bracket antisymmetry",
                 [&](Ctx& ctx, size_t idx) -> std::optional<std::string> {
                   const auto& [i, j] = pairs[idx];
                   NecklaceElement r = ctx.cbr(sample[i], sample[j]);
                   add_scaled(r, ctx.cbr(sample[j], sample[i]), Rational(1));
                   if (r.empty()) return std::nullopt;
                   return witness2(sample[i], sample[j], format_element(q, r));
                 },
                 rep))
    return rep;

  if (!run_phase(q, B, D, sample.size(), threads, "cobracket leg antisymmetry",
                 [&](Ctx& ctx, size_t i) -> std::optional<std::string> {
                   NecklaceTensor r = ctx.cdelta(sample[i]);
                   for (const auto& [g, c] : ctx.cdelta(sample[i]))
                     add_term(r, std::make_pair(g.second, g.first), c);
                   if (r.empty()) return std::nullopt;
                   return "x=" + format_necklace(q, sample[i]) +
                          ", residual " + format_tensor(q, r);
                 },
                 rep))
    return rep;

  if (!run_phase(q, B, D, sample.size(), threads, "coJacobi",
                 [&](Ctx& ctx, size_t i) -> std::optional<std::string> {
                   TripleComb t;
                   for (const auto& [uv, c] : ctx.cdelta(sample[i]))
                     for (const auto& [u12, c2] : ctx.cdelta(uv.first))
                       add_term(t, Triple{u12.first, u12.second, uv.second},
                                c * c2);
                   TripleComb r;
                   for (const auto& [g, c] : t) {
                     add_term(r, g, c);
                     add_term(r, Triple{g[2], g[0], g[1]}, c);
                     add_term(r, Triple{g[1], g[2], g[0]}, c);
                   }
                   if (r.empty()) return std::nullopt;
                   return "x=" + format_necklace(q, sample[i]) +
                          ", residual " + format_triples(q, r);
                 },
                 rep))
    return rep;

  if (!run_phase(q, B, D, sample.size(), threads, "involutivity",
                 [&](Ctx& ctx, size_t i) -> std::optional<std::string> {
                   NecklaceElement r;
                   for (const auto& [uv, c] : ctx.cdelta(sample[i]))
                     add_scaled(r, ctx.cbr(uv.first, uv.second), c);
                   if (r.empty()) return std::nullopt;
                   return "x=" + format_necklace(q, sample[i]) +
                          ", residual " + format_element(q, r);
                 },
                 rep))
    return rep;

  if (!run_phase(
          q, B, D, pairs.size(), threads, "cocycle",
          [&](Ctx& ctx, size_t idx) -> std::optional<std::string> {
            const auto& [i, j] = pairs[idx];
            const CyclicWord &x = sample[i], &y = sample[j];
            NecklaceTensor r;
            for (const auto& [g, c] : ctx.cbr(x, y))
              add_scaled(r, ctx.cdelta(g), c);
            auto ad = [&](const CyclicWord& a, const NecklaceTensor& t,
                          const Rational& s) {
              for (const auto& [uv, c] : t) {
                for (const auto& [h, c2] : ctx.cbr(a, uv.first))
                  add_term(r, std::make_pair(h, uv.second), s * c * c2);
                for (const auto& [h, c2] : ctx.cbr(a, uv.second))
                  add_term(r, std::make_pair(uv.first, h), s * c * c2);
              }
            };
            ad(x, ctx.cdelta(y), Rational(-1));
            ad(y, ctx.cdelta(x), Rational(1));
            if (r.empty()) return std::nullopt;
            return witness2(x, y, format_tensor(q, r));
          },
          rep))
    return rep;

  return rep;
}

AxiomReport verify_odd_ibl(const DoubleQuiver& q, const PairBracket& B,
                           const Cobracket& D,
                           const std::vector<CyclicWord>& sample,
                           int threads) {
  AxiomReport rep;
  const int n = static_cast<int>(sample.size());
  const auto pairs = sorted_pairs(n);
  const auto triples = sorted_triples(n);
  std::vector<int> par(sample.size());
  for (size_t i = 0; i < sample.size(); ++i)
    par[i] = word_parity(q, sample[i]);
  auto sgn = [](int e) { return Rational(e % 2 ? -1 : 1); };

  if (!run_phase(
          q, B, D, triples.size(), threads, "Jacobi",
          [&](Ctx& ctx, size_t idx) -> std::optional<std::string> {
            const auto& [i, j, k] = triples[idx];
            const CyclicWord &x = sample[i], &y = sample[j], &z = sample[k];
            NecklaceElement r = ctx.ebr(ctx.cbr(x, y), z);
            add_scaled(r, ctx.ebr(ctx.cbr(y, z), x),
                       sgn(par[i] * (par[j] + par[k])));
            add_scaled(r, ctx.ebr(ctx.cbr(z, x), y),
                       sgn(par[k] * (par[i] + par[j])));
            if (r.empty()) return std::nullopt;
            return "x=" + format_necklace(q, x) + ", y=" + format_necklace(q, y) +
                   ", z=" + format_necklace(q, z) + ", residual " +
                   format_element(q, r);
          },
          rep))
    return rep;

  if (!run_phase(q, B, D, pairs.size(), threads, "bracket symmetry",
                 [&](Ctx& ctx, size_t idx) -> std::optional<std::string> {
                   const auto& [i, j] = pairs[idx];
                   NecklaceElement r = ctx.cbr(sample[i], sample[j]);
                   add_scaled(r, ctx.cbr(sample[j], sample[i]),
                              -sgn(par[i] * par[j]));
                   if (r.empty()) return std::nullopt;
                   return "x=" + format_necklace(q, sample[i]) +
                          ", y=" + format_necklace(q, sample[j]) +
                          ", residual " + format_element(q, r);
                 },
                 rep))
    return rep;

  if (!run_phase(q, B, D, sample.size(), threads, "cobracket leg symmetry",
                 [&](Ctx& ctx, size_t i) -> std::optional<std::string> {
                   NecklaceTensor r = ctx.cdelta(sample[i]);
                   for (const auto& [g, c] : ctx.cdelta(sample[i]))
                     add_term(r, std::make_pair(g.second, g.first),
                              -sgn(word_parity(q, g.first) *
                                   word_parity(q, g.second)) *
                                  c);
                   if (r.empty()) return std::nullopt;
                   return "x=" + format_necklace(q, sample[i]) +
                          ", residual " + format_tensor(q, r);
                 },
                 rep))
    return rep;

  if (!run_phase(
          q, B, D, sample.size(), threads, "coJacobi",
          [&](Ctx& ctx, size_t i) -> std::optional<std::string> {
            TripleComb t;
            for (const auto& [uv, c] : ctx.cdelta(sample[i]))
              for (const auto& [u12, c2] : ctx.cdelta(uv.first))
                add_term(t, Triple{u12.first, u12.second, uv.second}, c * c2);
            TripleComb r;
            for (const auto& [g, c] : t) {
              const int p0 = word_parity(q, g[0]), p1 = word_parity(q, g[1]),
                        p2 = word_parity(q, g[2]);
              add_term(r, g, c);
              add_term(r, Triple{g[2], g[0], g[1]}, sgn(p2 * (p0 + p1)) * c);
              add_term(r, Triple{g[1], g[2], g[0]}, sgn(p0 * (p1 + p2)) * c);
            }
            if (r.empty()) return std::nullopt;
            return "x=" + format_necklace(q, sample[i]) + ", residual " +
                   format_triples(q, r);
          },
          rep))
    return rep;

  if (!run_phase(q, B, D, sample.size(), threads, "involutivity",
                 [&](Ctx& ctx, size_t i) -> std::optional<std::string> {
                   NecklaceElement r;
                   for (const auto& [uv, c] : ctx.cdelta(sample[i]))
                     add_scaled(r, ctx.cbr(uv.first, uv.second), c);
                   if (r.empty()) return std::nullopt;
                   return "x=" + format_necklace(q, sample[i]) +
                          ", residual " + format_element(q, r);
                 },
                 rep))
    return rep;

  if (!run_phase(
          q, B, D, pairs.size(), threads, "cocycle",
          [&](Ctx& ctx, size_t idx) -> std::optional<std::string> {
            const auto& [i, j] = pairs[idx];
            const CyclicWord &x = sample[i], &y = sample[j];
            const int px = par[i], py = par[j];
            NecklaceTensor r;
            for (const auto& [g, c] : ctx.cbr(x, y))
              add_scaled(r, ctx.cdelta(g), c);
            auto ad = [&](const CyclicWord& a, int pa, const NecklaceTensor& t,
                          const Rational& s) {
              for (const auto& [uv, c] : t) {
                for (const auto& [h, c2] : ctx.cbr(a, uv.first))
                  add_term(r, std::make_pair(h, uv.second), s * c * c2);
                const Rational leg =
                    s * sgn(word_parity(q, uv.first) * (pa + 1));
                for (const auto& [h, c2] : ctx.cbr(a, uv.second))
                  add_term(r, std::make_pair(uv.first, h), leg * c * c2);
              }
            };
            // minus the claimed right-hand side
            ad(x, px, ctx.cdelta(y), -sgn(px + 1));
            ad(y, py, ctx.cdelta(x), -sgn((px + 1) * py + 1));
            if (r.empty()) return std::nullopt;
            return "x=" + format_necklace(q, x) + ", y=" + format_necklace(q, y) +
                   ", residual " + format_tensor(q, r);
          },
          rep))
    return rep;

  return rep;
}

}  // namespace necklace
