#include "necklace/flavored.hpp"

#include <algorithm>
#include <functional>

#include "necklace/diffop.hpp"
#include "necklace/error.hpp"

namespace necklace {

namespace {

inline int ep(int slot, int end) { return slot * 2 + end; }
inline int ep_slot(int e) { return e / 2; }
inline int ep_end(int e) { return e % 2; }

int end_color(const DoubleQuiver& q, int arrow, int end) {
  return end == 0 ? q.src(arrow) : q.tgt(arrow);
}

int slot_parity(const RawFlavSlot& s) { return (s.mu + s.nu) & 1; }

// Local flavor relations: each flavor pair rewrites to its mu = 0 orbit
// representative with these signs. The values are pinned by the validation
// suite (otr rotation invariance, delta_tilde^2 = 0, the kernel check).
constexpr int kFlip11 = -1;  // (1,1) -> kFlip11 * (0,0)
constexpr int kFlip10 = +1;  // (1,0) -> kFlip10 * (0,1)

// The junction coefficients of the contraction kernel. Term 1 places the
// flavor flip on the junction joining p's source end to q's target end,
// term 2 on the other junction; both junctions enforce the chain constraint.
constexpr int kMinusTerm1 = +1;
constexpr int kMinusTerm2 = +1;
// The insertion kernel sums the flip over the two new cups.
constexpr int kPlusTerm1 = -1;
constexpr int kPlusTerm2 = +1;

int reduce_flavors(std::vector<RawFlavSlot>& slots) {
  int sign = 1;
  for (RawFlavSlot& s : slots) {
    if (s.mu == 1 && s.nu == 1) {
      s.mu = 0;
      s.nu = 0;
      sign *= kFlip11;
    } else if (s.mu == 1 && s.nu == 0) {
      s.mu = 0;
      s.nu = 1;
      sign *= kFlip10;
    }
  }
  return sign;
}

std::vector<int> partner_map(const DoubleQuiver& q, const RawFlavored& raw) {
  const int n = static_cast<int>(raw.slots.size());
  for (const RawFlavSlot& s : raw.slots) {
    if (s.arrow < 0 || s.arrow >= q.num_arrows())
      throw InputError("unknown arrow in flavored slot");
    if (s.mu < 0 || s.mu > 1 || s.nu < 0 || s.nu > 1)
      throw InputError("flavor bit out of range");
  }
  for (int v : raw.loops)
    if (v < 0 || v >= q.num_vertices())
      throw InputError("unknown vertex in flavored loop");
  std::vector<int> M(2 * n, -1);
  for (const auto& [e1, e2] : raw.arcs) {
    for (const DiagEndpoint& e : {e1, e2}) {
      if (e.slot < 0 || e.slot >= n || e.end < 0 || e.end > 1)
        throw InputError("arc endpoint out of range");
    }
    int a = ep(e1.slot, e1.end), b = ep(e2.slot, e2.end);
    if (a == b) throw InputError("arc joins an endpoint to itself");
    if (M[a] != -1 || M[b] != -1)
      throw InputError("endpoint lies on two arcs");
    if (end_color(q, raw.slots[e1.slot].arrow, e1.end) !=
        end_color(q, raw.slots[e2.slot].arrow, e2.end))
      throw InputError("arc endpoints have different colors");
    M[a] = b;
    M[b] = a;
  }
  for (int e = 0; e < 2 * n; ++e)
    if (M[e] < 0) throw InputError("dangling endpoint");
  return M;
}

struct Walk {
  std::vector<FlavStep> steps;
  std::vector<int> order;  // raw slot index per step
};

Walk walk_from(const RawFlavored& raw, const std::vector<int>& M,
               int start_slot, int enter_end) {
  Walk w;
  int slot = start_slot, enter = enter_end;
  do {
    const RawFlavSlot& s = raw.slots[slot];
    w.steps.push_back(FlavStep{s.arrow, enter, s.mu, s.nu});
    w.order.push_back(slot);
    int nxt = M[ep(slot, 1 - enter)];
    slot = ep_slot(nxt);
    enter = ep_end(nxt);
  } while (slot != start_slot || enter != enter_end);
  return w;
}

struct CanonComponent {
  FlavComponent comp;
  std::vector<int> order;
  std::vector<std::vector<int>> stab;  // slot orders of all tied walks
  int odd_count = 0;
};

// Minimizes the step sequence over all rotations of the walk and of its
// reversal. Reversal flips dir and keeps the end-attached flavors.
CanonComponent canon_component(const Walk& w) {
  const int n = static_cast<int>(w.steps.size());
  std::vector<FlavStep> rev_steps(n);
  std::vector<int> rev_order(n);
  for (int i = 0; i < n; ++i) {
    FlavStep s = w.steps[n - 1 - i];
    s.dir = 1 - s.dir;
    rev_steps[i] = s;
    rev_order[i] = w.order[n - 1 - i];
  }
  CanonComponent out;
  bool have = false;
  auto consider = [&](const std::vector<FlavStep>& steps,
                      const std::vector<int>& order, int k) {
    std::vector<FlavStep> cand(n);
    for (int i = 0; i < n; ++i) cand[i] = steps[(k + i) % n];
    if (!have || cand < out.comp.steps) {
      have = true;
      out.comp.steps = cand;
      out.stab.clear();
    } else if (cand != out.comp.steps) {
      return;
    }
    std::vector<int> ord(n);
    for (int i = 0; i < n; ++i) ord[i] = order[(k + i) % n];
    out.stab.push_back(std::move(ord));
  };
  for (int k = 0; k < n; ++k) {
    consider(w.steps, w.order, k);
    consider(rev_steps, rev_order, k);
  }
  out.order = out.stab.front();
  for (const FlavStep& s : out.comp.steps) out.odd_count += (s.mu + s.nu) & 1;
  return out;
}

struct FlavCanon {
  FlavoredDiagram d;
  int sign = 0;  // 0 means the zero element
};

FlavCanon canonicalize(const DoubleQuiver& q, const RawFlavored& input) {
  std::vector<int> M = partner_map(q, input);
  RawFlavored raw = input;
  int rsign = reduce_flavors(raw.slots);
  const int n = static_cast<int>(raw.slots.size());
  std::vector<bool> seen(n, false);
  std::vector<CanonComponent> comps;
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    Walk w = walk_from(raw, M, s, 0);
    for (int idx : w.order) seen[idx] = true;
    comps.push_back(canon_component(w));
  }
  std::sort(comps.begin(), comps.end(),
            [](const CanonComponent& a, const CanonComponent& b) {
              return a.comp < b.comp;
            });

  FlavCanon res;
  std::vector<int> order;  // canonical position -> raw slot index
  for (size_t c = 0; c < comps.size(); ++c) {
    res.d.comps.push_back(comps[c].comp);
    order.insert(order.end(), comps[c].order.begin(), comps[c].order.end());
    // A slot symmetry of odd Koszul sign kills the diagram.
    if (c > 0 && comps[c].comp == comps[c - 1].comp && (comps[c].odd_count % 2))
      return FlavCanon{};
    for (const auto& tied : comps[c].stab) {
      if (tied == comps[c].order) continue;
      const auto& base = comps[c].order;
      const int m = static_cast<int>(base.size());
      std::vector<int> pos(n, -1);
      for (int i = 0; i < m; ++i) pos[tied[i]] = i;
      int inv = 0;
      for (int i = 0; i < m; ++i) {
        if (!slot_parity(raw.slots[base[i]])) continue;
        for (int j = i + 1; j < m; ++j)
          if (slot_parity(raw.slots[base[j]]) && pos[base[i]] > pos[base[j]])
            ++inv;
      }
      if (inv % 2) return FlavCanon{};
    }
  }
  res.d.loops = raw.loops;
  std::sort(res.d.loops.begin(), res.d.loops.end());

  int inv = 0;
  for (int i = 0; i < n; ++i) {
    if (!slot_parity(raw.slots[order[i]])) continue;
    for (int j = i + 1; j < n; ++j)
      if (slot_parity(raw.slots[order[j]]) && order[i] > order[j]) ++inv;
  }
  res.sign = (inv % 2) ? -rsign : rsign;
  return res;
}

void emit(const DoubleQuiver& q, FlavoredElement& out, const RawFlavored& raw,
          const Rational& coeff) {
  if (coeff.is_zero()) return;
  FlavCanon c = canonicalize(q, raw);
  if (c.sign == 0) return;
  add_term(out, c.d, coeff * Rational(c.sign));
}

// Koszul sign of extracting slots p < qq (in that order) to the front.
int kappa_pair(const std::vector<int>& parities, int p, int qq) {
  int s = 1;
  if (parities[p]) {
    int cnt = 0;
    for (int k = 0; k < p; ++k) cnt += parities[k];
    if (cnt % 2) s = -s;
  }
  if (parities[qq]) {
    int cnt = -parities[p];
    for (int k = 0; k < qq; ++k) cnt += parities[k];
    if (cnt % 2) s = -s;
  }
  return s;
}

// Deletes slots p and qq, joining p's source end to qq's target end and
// p's target end to qq's source end. Surviving slots keep their original
// order; deleted arc cycles become loops.
RawFlavored surgery_minus(const DoubleQuiver& q, const RawFlavored& raw,
                          const std::vector<int>& M, int p, int qq) {
  const int n = static_cast<int>(raw.slots.size());
  std::vector<int> J(2 * n, -1);
  J[ep(p, 0)] = ep(qq, 1);
  J[ep(qq, 1)] = ep(p, 0);
  J[ep(p, 1)] = ep(qq, 0);
  J[ep(qq, 0)] = ep(p, 1);
  auto deleted = [&](int e) {
    int s = ep_slot(e);
    return s == p || s == qq;
  };
  RawFlavored out;
  std::vector<int> reindex(n, -1);
  for (int k = 0; k < n; ++k) {
    if (k == p || k == qq) continue;
    reindex[k] = static_cast<int>(out.slots.size());
    out.slots.push_back(raw.slots[k]);
  }
  std::vector<char> seen(2 * n, 0);
  for (int k = 0; k < n; ++k) {
    if (k == p || k == qq) continue;
    for (int e = 0; e < 2; ++e) {
      int a = ep(k, e);
      if (seen[a]) continue;
      int cur = M[a];
      while (deleted(cur)) cur = M[J[cur]];
      seen[a] = 1;
      seen[cur] = 1;
      out.arcs.push_back({DiagEndpoint{reindex[k], e},
                          DiagEndpoint{reindex[ep_slot(cur)], ep_end(cur)}});
    }
  }
  out.loops = raw.loops;
  std::vector<char> visited(2 * n, 0);
  for (int e0 : {ep(p, 0), ep(p, 1), ep(qq, 0), ep(qq, 1)}) {
    if (visited[e0]) continue;
    std::vector<int> cycle;
    int cur = e0;
    bool closed = true;
    while (std::find(cycle.begin(), cycle.end(), cur) == cycle.end()) {
      cycle.push_back(cur);
      int nxt = M[cur];
      if (!deleted(nxt)) {
        closed = false;
        break;
      }
      cycle.push_back(nxt);
      cur = J[nxt];
    }
    if (!closed) continue;
    for (int e : cycle) visited[e] = 1;
    out.loops.push_back(
        end_color(q, raw.slots[ep_slot(cycle[0])].arrow, ep_end(cycle[0])));
  }
  return out;
}

std::string format_product(const DoubleQuiver& q,
                           const std::vector<CyclicWord>& factors) {
  if (factors.empty()) return "1";
  std::string out;
  for (size_t i = 0; i < factors.size(); ++i) {
    if (i) out += "·";
    out += format_necklace(q, factors[i]);
  }
  return out;
}

// Square-free monomials over the odd necklace generators: factors strictly
// increasing, at most max_factors of them (no cap when max_factors < 0),
// total length at most total_bound (constants count 1).
std::vector<std::vector<CyclicWord>> odd_monomials(const DoubleQuiver& q,
                                                   int max_len,
                                                   int max_factors,
                                                   int total_bound) {
  std::vector<CyclicWord> words = enumerate_necklaces(q, max_len);
  std::vector<std::vector<CyclicWord>> out;
  std::vector<CyclicWord> cur;
  std::function<void(size_t, int)> rec = [&](size_t from, int left) {
    out.push_back(cur);
    if (max_factors >= 0 && static_cast<int>(cur.size()) == max_factors)
      return;
    for (size_t i = from; i < words.size(); ++i) {
      int len = words[i].is_constant() ? 1 : words[i].length();
      if (len > left) continue;
      cur.push_back(words[i]);
      rec(i + 1, left - len);
      cur.pop_back();
    }
  };
  rec(0, total_bound);
  return out;
}

SuperPolynomial odd_monomial_poly(const DoubleQuiver& q,
                                  const std::vector<CyclicWord>& factors) {
  std::vector<GradedGenerator> gens;
  gens.reserve(factors.size());
  for (const CyclicWord& w : factors) gens.push_back(necklace_gen(q, w));
  return make_monomial(gens);
}

}  // namespace

int FlavoredDiagram::slot_count() const {
  int n = 0;
  for (const auto& c : comps) n += static_cast<int>(c.steps.size());
  return n;
}

int FlavoredDiagram::weight() const {
  int w = 0;
  for (const auto& c : comps)
    for (const FlavStep& s : c.steps) w += (s.mu + s.nu) & 1;
  return w;
}

FlavoredElement flavor_canonicalize(const DoubleQuiver& q,
                                    const RawFlavored& raw) {
  FlavoredElement out;
  emit(q, out, raw, Rational(1));
  return out;
}

RawFlavored to_raw(const FlavoredDiagram& d) {
  RawFlavored raw;
  for (const auto& c : d.comps) {
    const int base = static_cast<int>(raw.slots.size());
    const int n = static_cast<int>(c.steps.size());
    for (const FlavStep& s : c.steps)
      raw.slots.push_back(RawFlavSlot{s.arrow, s.mu, s.nu});
    for (int i = 0; i < n; ++i) {
      int j = (i + 1) % n;
      raw.arcs.push_back({DiagEndpoint{base + i, 1 - c.steps[i].dir},
                          DiagEndpoint{base + j, c.steps[j].dir}});
    }
  }
  raw.loops = d.loops;
  return raw;
}

std::string format_flavored(const DoubleQuiver& q, const FlavoredDiagram& d) {
  if (d.comps.empty() && d.loops.empty()) return "1";
  std::string out;
  auto sep = [&] {
    if (!out.empty()) out += "+";
  };
  for (const auto& c : d.comps) {
    sep();
    out += "comp(";
    for (size_t i = 0; i < c.steps.size(); ++i) {
      if (i) out += ",";
      out += q.arrow_name(c.steps[i].arrow);
      out += "[";
      out += static_cast<char>('0' + c.steps[i].mu);
      out += static_cast<char>('0' + c.steps[i].nu);
      out += "]";
      out += (c.steps[i].dir == 0) ? ">" : "<";
    }
    out += ")";
  }
  for (int v : d.loops) {
    sep();
    out += "loop(" + q.vertex_name(v) + ")";
  }
  return out;
}

std::string format_flavored_element(const DoubleQuiver& q,
                                    const FlavoredElement& x) {
  if (x.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [d, c] : x) {
    std::string cs = c.str();
    if (first) {
      out = cs;
      first = false;
    } else if (!cs.empty() && cs[0] == '-') {
      out += " - " + cs.substr(1);
    } else {
      out += " + " + cs;
    }
    out += "·" + format_flavored(q, d);
  }
  return out;
}

FlavoredDiagram parse_flavored(const DoubleQuiver& q, std::string_view text) {
  RawFlavored raw;
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && text[pos] == ' ') ++pos;
  };
  skip_ws();
  if (text.substr(pos) == "1") return FlavoredDiagram{};
  while (pos < text.size()) {
    skip_ws();
    size_t open = text.find('(', pos);
    if (open == std::string_view::npos)
      throw InputError("flavored literal: expected comp(...) or loop(...)");
    std::string_view head = text.substr(pos, open - pos);
    size_t close = text.find(')', open);
    if (close == std::string_view::npos)
      throw InputError("flavored literal: unbalanced parentheses");
    std::string_view body = text.substr(open + 1, close - open - 1);
    if (head == "loop") {
      raw.loops.push_back(q.vertex(body));
    } else if (head == "comp") {
      const int base = static_cast<int>(raw.slots.size());
      std::vector<int> dirs;
      size_t b = 0;
      while (b < body.size()) {
        size_t e = body.find(',', b);
        if (e == std::string_view::npos) e = body.size();
        std::string_view step = body.substr(b, e - b);
        if (step.size() < 6)
          throw InputError("flavored literal: malformed step");
        char tail = step.back();
        if (tail != '>' && tail != '<')
          throw InputError("flavored literal: step needs a direction");
        size_t br = step.find('[');
        if (br == std::string_view::npos || step.size() - br != 5 ||
            step[step.size() - 2] != ']')
          throw InputError("flavored literal: step needs [mn] flavor bits");
        auto bit = [&](char c) -> int {
          if (c != '0' && c != '1')
            throw InputError("flavored literal: flavor bit must be 0 or 1");
          return c - '0';
        };
        raw.slots.push_back(RawFlavSlot{q.arrow(step.substr(0, br)),
                                        bit(step[br + 1]), bit(step[br + 2])});
        dirs.push_back(tail == '>' ? 0 : 1);
        b = e + 1;
      }
      const int n = static_cast<int>(dirs.size());
      if (n == 0) throw InputError("flavored literal: empty component");
      for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        raw.arcs.push_back({DiagEndpoint{base + i, 1 - dirs[i]},
                            DiagEndpoint{base + j, dirs[j]}});
      }
    } else {
      throw InputError("flavored literal: unknown element");
    }
    pos = close + 1;
    skip_ws();
    if (pos < text.size()) {
      if (text[pos] != '+')
        throw InputError("flavored literal: expected '+'");
      ++pos;
    }
  }
  FlavCanon c = canonicalize(q, raw);
  if (c.sign == 0)
    throw InputError("flavored literal: diagram is the zero element");
  return c.d;
}

FlavoredElement flavored_mul(const DoubleQuiver& q, const FlavoredElement& x,
                             const FlavoredElement& y) {
  FlavoredElement out;
  for (const auto& [d1, c1] : x) {
    RawFlavored r1 = to_raw(d1);
    const int n1 = static_cast<int>(r1.slots.size());
    for (const auto& [d2, c2] : y) {
      RawFlavored uni = r1;
      RawFlavored r2 = to_raw(d2);
      uni.slots.insert(uni.slots.end(), r2.slots.begin(), r2.slots.end());
      for (auto [e1, e2] : r2.arcs) {
        e1.slot += n1;
        e2.slot += n1;
        uni.arcs.push_back({e1, e2});
      }
      uni.loops.insert(uni.loops.end(), r2.loops.begin(), r2.loops.end());
      emit(q, out, uni, c1 * c2);
    }
  }
  return out;
}

FlavoredElement otr(const DoubleQuiver& q, const CyclicWord& w) {
  FlavoredElement out;
  if (w.is_constant()) return out;
  const int n = w.length();
  RawFlavored raw;
  raw.slots.resize(n);
  for (int k = 0; k < n; ++k) {
    int j = (k + 1) % n;
    raw.arcs.push_back({DiagEndpoint{k, 1}, DiagEndpoint{j, 0}});
  }
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> mu(n), nu(n);
    for (int k = 0; k < n; ++k) mu[k] = (mask >> k) & 1;
    for (int k = 0; k + 1 < n; ++k) nu[k] = mu[k + 1];
    nu[n - 1] = 1 - mu[0];
    int m1 = 0, tot = 0;
    for (int k = 0; k + 1 < n; ++k) m1 += nu[k];
    for (int k = 0; k < n; ++k) tot += mu[k] + nu[k];
    int e2 = nu[n - 1] * (tot - mu[0] - nu[n - 1]);
    for (int k = 0; k < n; ++k)
      raw.slots[k] = RawFlavSlot{w.arrows[k], mu[k], nu[k]};
    emit(q, out, raw, Rational(((m1 + e2) % 2) ? -1 : 1));
  }
  return out;
}

FlavoredElement otr(const DoubleQuiver& q, const SuperPolynomial& x) {
  FlavoredElement out;
  for (const auto& [mono, c] : x) {
    FlavoredElement acc;
    add_term(acc, FlavoredDiagram{}, Rational(1));
    for (const GradedGenerator& g : mono) {
      CyclicWord w = parse_necklace(q, g.key);
      if (w.is_constant()) {
        acc.clear();
        break;
      }
      acc = flavored_mul(q, acc, otr(q, w));
      if (acc.empty()) break;
    }
    add_scaled(out, acc, c);
  }
  return out;
}

FlavoredElement iota_insert(const DoubleQuiver& q, const FlavoredDiagram& d,
                            int slot, int end) {
  RawFlavored raw = to_raw(d);
  if (slot < 0 || slot >= static_cast<int>(raw.slots.size()))
    throw InputError("insertion slot out of range");
  if (end < 0 || end > 1) throw InputError("insertion end out of range");
  int& bit = (end == 0) ? raw.slots[slot].mu : raw.slots[slot].nu;
  const int old = bit;
  bit = 1 - bit;
  FlavoredElement out;
  emit(q, out, raw, Rational(old ? -1 : 1));
  return out;
}

FlavoredElement delta_tilde(const DoubleQuiver& q, char sign,
                            const FlavoredElement& x) {
  if (sign != '-' && sign != '+')
    throw InputError("delta_tilde sign must be '-' or '+'");
  FlavoredElement out;
  for (const auto& [d, c] : x) {
    RawFlavored raw = to_raw(d);
    const int n = static_cast<int>(raw.slots.size());
    std::vector<int> M = partner_map(q, raw);
    std::vector<int> par(n);
    for (int k = 0; k < n; ++k) par[k] = slot_parity(raw.slots[k]);
    for (int p = 0; p < n; ++p) {
      for (int qq = p + 1; qq < n; ++qq) {
        int pv = pairing(q, raw.slots[p].arrow, raw.slots[qq].arrow);
        if (pv == 0) continue;
        int kap = kappa_pair(par, p, qq);
        const int mp = raw.slots[p].mu, np = raw.slots[p].nu;
        const int mq = raw.slots[qq].mu, nq = raw.slots[qq].nu;
        if (sign == '-') {
          // Canonical slots have mu = 0, so at most one term fires.
          int tv = 0;
          if (mp != nq && np == mq) tv += kMinusTerm1 * (nq ? -1 : 1);
          if (mp == nq && np != mq) tv += kMinusTerm2;
          if (tv == 0) continue;
          RawFlavored res = surgery_minus(q, raw, M, p, qq);
          emit(q, out, res, c * Rational(tv * pv * kap));
        } else {
          // The deleted arcs reattach to four new slots placed up front:
          // p1 keeps p's target arc, p2 p's source arc, q1 qq's target arc,
          // q2 qq's source arc; two new cups close the square.
          std::vector<std::pair<DiagEndpoint, DiagEndpoint>> base_arcs;
          std::vector<int> rest;
          std::vector<int> reindex(n, -1);
          for (int k = 0; k < n; ++k) {
            if (k == p || k == qq) continue;
            reindex[k] = 4 + static_cast<int>(rest.size());
            rest.push_back(k);
          }
          auto ep_map = [&](DiagEndpoint e) -> DiagEndpoint {
            if (e.slot == p)
              return e.end == 0 ? DiagEndpoint{1, 0} : DiagEndpoint{0, 1};
            if (e.slot == qq)
              return e.end == 0 ? DiagEndpoint{3, 0} : DiagEndpoint{2, 1};
            return DiagEndpoint{reindex[e.slot], e.end};
          };
          for (const auto& [e1, e2] : raw.arcs)
            base_arcs.push_back({ep_map(e1), ep_map(e2)});
          base_arcs.push_back({DiagEndpoint{1, 1}, DiagEndpoint{2, 0}});
          base_arcs.push_back({DiagEndpoint{3, 1}, DiagEndpoint{0, 0}});
          const int ap = raw.slots[p].arrow, aq = raw.slots[qq].arrow;
          for (int term = 1; term <= 2; ++term) {
            const int tc = (term == 1) ? kPlusTerm1 : kPlusTerm2;
            for (int xA = 0; xA < 2; ++xA) {
              for (int yB = 0; yB < 2; ++yB) {
                int xA8, yB5, e;
                if (term == 1) {
                  xA8 = 1 - xA;
                  yB5 = yB;
                  e = yB + xA8 * (mp + np + mq + nq) + mp * np + mq * nq;
                } else {
                  xA8 = xA;
                  yB5 = 1 - yB;
                  e = xA * (1 + mp + np + mq + nq) + mp + np + mp * np +
                      mq * nq;
                }
                RawFlavored res;
                res.slots = {RawFlavSlot{ap, xA, np}, RawFlavSlot{ap, mp, yB},
                             RawFlavSlot{aq, yB5, nq},
                             RawFlavSlot{aq, mq, xA8}};
                for (int k : rest) res.slots.push_back(raw.slots[k]);
                res.arcs = base_arcs;
                res.loops = raw.loops;
                int tv = tc * ((e % 2) ? -1 : 1);
                emit(q, out, res, c * Rational(tv * pv * kap));
              }
            }
          }
        }
      }
    }
  }
  return out;
}

AxiomReport check_otr_kernel(const DoubleQuiver& q, int bound) {
  AxiomReport rep;
  rep.axiom = "otr kernel";
  std::map<FlavoredDiagram, FlavoredElement> rows;  // pivot -> reduced row
  for (const auto& mono : odd_monomials(q, bound, -1, bound)) {
    bool has_const = false;
    for (const CyclicWord& w : mono) has_const |= w.is_constant();
    FlavoredElement im = otr(q, odd_monomial_poly(q, mono));
    if (has_const) {
      if (!im.empty()) {
        rep.ok = false;
        rep.counterexample =
            "otr(" + format_product(q, mono) + ") should vanish";
        return rep;
      }
      continue;
    }
    FlavoredElement row = im;
    while (!row.empty()) {
      auto it = rows.find(row.begin()->first);
      if (it == rows.end()) break;
      add_scaled(row, it->second, -(row.begin()->second));
    }
    if (row.empty()) {
      rep.ok = false;
      rep.counterexample = "otr(" + format_product(q, mono) +
                           ") depends linearly on earlier images";
      return rep;
    }
    Rational pivot = row.begin()->second;
    rows.emplace(row.begin()->first, scaled(row, Rational(1) / pivot));
  }
  return rep;
}

AxiomReport check_otr_intertwine(const DoubleQuiver& q, char sign,
                                 int max_len, int max_factors) {
  AxiomReport rep;
  rep.axiom = std::string("otr intertwine ") + sign;
  DiffOp bv = necklace_bv(q, sign);
  for (const auto& mono :
       odd_monomials(q, max_len, max_factors, max_len * max_factors)) {
    SuperPolynomial mp = odd_monomial_poly(q, mono);
    FlavoredElement lhs = delta_tilde(q, sign, otr(q, mp));
    FlavoredElement rhs = otr(q, apply_diffop(bv, mp));
    if (lhs != rhs) {
      rep.ok = false;
      rep.counterexample = format_product(q, mono);
      return rep;
    }
  }
  return rep;
}

}  // namespace necklace
