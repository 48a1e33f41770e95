#include "modalab/controls.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "modalab/theories.hpp"

namespace modalab {

namespace {

constexpr size_t kMaxHostWorlds = 4096;
constexpr size_t kMaxIndependencePatterns = 16;  // switches per independence check

PropFormula conj_fold(const std::vector<PropFormula>& parts) {
  if (parts.empty()) return PropFormula::truth();
  PropFormula out = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) out = PropFormula::conj(out, parts[i]);
  return out;
}

PropFormula disj_fold(const std::vector<PropFormula>& parts) {
  if (parts.empty()) return PropFormula::falsity();
  PropFormula out = parts[0];
  for (size_t i = 1; i < parts.size(); ++i) out = PropFormula::disj(out, parts[i]);
  return out;
}

// Conjunction asserting ss[i] / ~ss[i] according to bit i of `pattern`. The
// 2^|ss| pattern formulas partition any model's worlds.
PropFormula pattern_formula(const std::vector<PropFormula>& ss, uint64_t pattern) {
  std::vector<PropFormula> parts;
  parts.reserve(ss.size());
  for (size_t i = 0; i < ss.size(); ++i) {
    parts.push_back((pattern >> i) & 1 ? ss[i] : PropFormula::negation(ss[i]));
  }
  return conj_fold(parts);
}

}  // namespace

ControlReport classify(const Model& m, const std::string& w, const PropFormula& s) {
  const Frame& fr = m.frame();
  const size_t wi = fr.index_of(w);

  // Switch test, relative to w: both <>s and <>~s hold at every world
  // reachable from w (w included).
  const WorldSet can_on = truth_set(m, PropFormula::diamond(s));
  const WorldSet can_off = truth_set(m, PropFormula::diamond(PropFormula::negation(s)));
  const WorldSet reach = fr.reachable_from(wi);
  size_t sw_bad = fr.size();
  for (size_t u = reach.next(); u < fr.size(); u = reach.next(u + 1)) {
    if (!can_on.test(u) || !can_off.test(u)) {
      sw_bad = u;
      break;
    }
  }

  // Button test, global: <>[]s holds at every world of the model.
  const WorldSet pushed_set = truth_set(m, PropFormula::box(s));
  const WorldSet pushable = truth_set(m, PropFormula::diamond(PropFormula::box(s)));
  size_t bt_bad = fr.size();
  for (size_t u = 0; u < fr.size(); ++u) {
    if (!pushable.test(u)) {
      bt_bad = u;
      break;
    }
  }

  ControlReport rep;
  std::vector<std::string> pushed;
  for (size_t u = pushed_set.next(); u < fr.size(); u = pushed_set.next(u + 1)) {
    pushed.push_back(fr.world_name(u));
  }

  if (sw_bad == fr.size()) {
    rep.role = ControlReport::Role::Switch;
    rep.also_button = bt_bad == fr.size();
    if (rep.also_button) rep.pushed = std::move(pushed);
    return rep;
  }
  if (bt_bad == fr.size()) {
    rep.role = ControlReport::Role::Button;
    rep.pushed = std::move(pushed);
    return rep;
  }
  rep.role = ControlReport::Role::Neither;
  rep.world = fr.world_name(sw_bad);
  std::ostringstream why;
  why << "not a switch: " << (can_on.test(sw_bad) ? "<>~(" : "<>(") << render(s)
      << ") fails at '" << fr.world_name(sw_bad) << "'; not a button: <>[](" << render(s)
      << ") fails at '" << fr.world_name(bt_bad) << "'";
  rep.reason = why.str();
  return rep;
}

DialCheck is_dial(const Model& m, const DialFamily& dial) {
  if (dial.statements.empty()) {
    throw std::invalid_argument("a dial needs at least one statement");
  }
  const Frame& fr = m.frame();
  std::vector<WorldSet> ts;
  ts.reserve(dial.statements.size());
  for (const auto& d : dial.statements) ts.push_back(truth_set(m, d));

  DialCheck out;
  for (const auto& id : dial.scope) {
    const size_t u = fr.index_of(id);
    size_t matches = 0, first = 0, second = 0;
    for (size_t i = 0; i < ts.size(); ++i) {
      if (ts[i].test(u)) {
        (matches == 0 ? first : second) = i;
        if (++matches > 1) break;
      }
    }
    if (matches == 0) {
      out.ok = false;
      out.world = id;
      out.value = 0;
      out.reason = "no dial statement holds at '" + id + "'";
      return out;
    }
    if (matches > 1) {
      out.ok = false;
      out.world = id;
      out.value = second;
      out.reason = "dial statements " + std::to_string(first) + " and " +
                   std::to_string(second) + " both hold at '" + id + "'";
      return out;
    }
    const WorldSet ru = fr.reachable_from(u);
    for (size_t i = 0; i < ts.size(); ++i) {
      if (!ru.intersects(ts[i])) {
        out.ok = false;
        out.world = id;
        out.value = i;
        out.reason = "dial value " + std::to_string(i) + " is unreachable from '" + id + "'";
        return out;
      }
    }
  }
  return out;
}

SwitchIndependence independent_switches(const Model& m, const std::string& w,
                                        const std::vector<PropFormula>& ss) {
  if (ss.size() > kMaxIndependencePatterns) {
    throw CapError("switch independence is capped at " +
                   std::to_string(kMaxIndependencePatterns) + " statements");
  }
  const Frame& fr = m.frame();
  const size_t wi = fr.index_of(w);

  std::vector<WorldSet> ts;
  ts.reserve(ss.size());
  for (const auto& s : ss) ts.push_back(truth_set(m, s));
  std::vector<uint64_t> pat(fr.size(), 0);
  for (size_t u = 0; u < fr.size(); ++u) {
    for (size_t i = 0; i < ss.size(); ++i) {
      if (ts[i].test(u)) pat[u] |= uint64_t{1} << i;
    }
  }

  const uint64_t npat = uint64_t{1} << ss.size();
  const WorldSet reach = fr.reachable_from(wi);
  std::vector<char> seen(npat);
  for (size_t u = reach.next(); u < fr.size(); u = reach.next(u + 1)) {
    std::fill(seen.begin(), seen.end(), 0);
    const WorldSet ru = fr.reachable_from(u);
    uint64_t found = 0;
    for (size_t v = ru.next(); v < fr.size() && found < npat; v = ru.next(v + 1)) {
      if (!seen[pat[v]]) {
        seen[pat[v]] = 1;
        ++found;
      }
    }
    if (found < npat) {
      uint64_t missing = 0;
      while (seen[missing]) ++missing;
      SwitchIndependence out;
      out.ok = false;
      out.world = fr.world_name(u);
      out.pattern = missing;
      out.detail = "pattern " + render(pattern_formula(ss, missing)) +
                   " is unreachable from '" + out.world + "'";
      return out;
    }
  }
  return {};
}

ButtonDialIndependence independent_buttons_dial(const Model& m,
                                                const std::vector<PropFormula>& bs,
                                                const DialFamily& dial) {
  if (dial.statements.empty()) {
    throw std::invalid_argument("a dial needs at least one statement");
  }
  const Frame& fr = m.frame();
  std::vector<WorldSet> pushed;
  pushed.reserve(bs.size());
  for (const auto& b : bs) pushed.push_back(truth_set(m, PropFormula::box(b)));
  std::vector<WorldSet> ts;
  ts.reserve(dial.statements.size());
  for (const auto& d : dial.statements) ts.push_back(truth_set(m, d));

  // (i) Somewhere everything is still unpushed.
  WorldSet any_pushed(fr.size());
  for (const auto& p : pushed) any_pushed |= p;
  if (any_pushed.all()) {
    ButtonDialIndependence out;
    out.ok = false;
    out.detail = "every world already has some button pushed";
    return out;
  }

  // (ii) From each scope world, each single unpushed button can be pushed to
  // any dial value while the other unpushed buttons stay unpushed.
  for (const auto& id : dial.scope) {
    const size_t u = fr.index_of(id);
    const WorldSet ru = fr.reachable_from(u);
    for (size_t i = 0; i < bs.size(); ++i) {
      if (pushed[i].test(u)) continue;
      for (size_t j = 0; j < ts.size(); ++j) {
        bool found = false;
        for (size_t v = ru.next(); v < fr.size() && !found; v = ru.next(v + 1)) {
          if (!pushed[i].test(v) || !ts[j].test(v)) continue;
          bool clean = true;
          for (size_t o = 0; o < bs.size() && clean; ++o) {
            if (o != i && !pushed[o].test(u) && pushed[o].test(v)) clean = false;
          }
          found = clean;
        }
        if (!found) {
          ButtonDialIndependence out;
          out.ok = false;
          out.world = id;
          out.detail = "cannot push " + render(bs[i]) + " alone to dial value " +
                       std::to_string(j) + " from '" + id + "'";
          return out;
        }
      }
    }
  }
  return {};
}

WitnessResult s5_cap_witness(const Model& m, const std::string& w,
                             const std::vector<PropFormula>& ss, const PropFormula& f) {
  const SwitchIndependence ind = independent_switches(m, w, ss);
  if (!ind.ok) {
    throw std::invalid_argument("switches are not independent from '" + w + "': " + ind.detail);
  }
  const Verdict v = decide(f, Theory::S5, 12);
  if (v.kind == Verdict::Kind::Valid) {
    throw std::invalid_argument("formula is valid over equivalence frames; nothing to capture");
  }
  if (v.kind == Verdict::Kind::Inconclusive) {
    throw std::invalid_argument("no countermodel found within the search cap");
  }

  const Model& cm = *v.model;
  const size_t c = cm.size();
  const size_t k = ss.size();
  if ((uint64_t{1} << k) < c) {
    throw std::invalid_argument(std::to_string(k) + " switches give " +
                                std::to_string(uint64_t{1} << k) +
                                " patterns, fewer than the countermodel's " + std::to_string(c) +
                                " worlds");
  }

  // Route pattern p to countermodel world p mod c; each atom becomes the
  // disjunction of the patterns routed to worlds where it holds.
  const uint64_t npat = uint64_t{1} << k;
  Substitution sigma;
  for (const auto& a : atoms_of(f)) {
    std::vector<PropFormula> terms;
    for (uint64_t p = 0; p < npat; ++p) {
      if (cm.atom_true(p % c, a)) terms.push_back(pattern_formula(ss, p));
    }
    sigma.set(a, disj_fold(terms));
  }
  PropFormula instance = substitute(f, sigma);

  // First reachable host world whose pattern routes to the failing world.
  const Frame& fr = m.frame();
  std::vector<WorldSet> ts;
  ts.reserve(k);
  for (const auto& s : ss) ts.push_back(truth_set(m, s));
  const size_t target = cm.frame().index_of(v.world);
  const WorldSet reach = fr.reachable_from(fr.index_of(w));
  size_t where = fr.size();
  for (size_t u = reach.next(); u < fr.size(); u = reach.next(u + 1)) {
    uint64_t p = 0;
    for (size_t i = 0; i < k; ++i) {
      if (ts[i].test(u)) p |= uint64_t{1} << i;
    }
    if (p % c == target) {
      where = u;
      break;
    }
  }
  if (where == fr.size()) {
    throw std::logic_error("independent switches left a pattern unrealized");
  }
  if (model_check(m, fr.world_name(where), instance)) {
    throw std::logic_error("capture construction failed certification");
  }
  return {std::move(sigma), fr.world_name(where), std::move(instance)};
}

namespace {

struct QuotientStats {
  size_t chain = 0;        // longest chain of distinct clusters
  size_t width = 0;        // largest antichain of clusters
  size_t max_cluster = 0;  // largest cluster
};

// Cluster structure of the part of a preorder model reachable from `root`.
QuotientStats quotient_stats(const Model& cm, size_t root) {
  const Frame& fr = cm.frame();
  const WorldSet keep = fr.reachable_from(root);
  std::vector<size_t> ws;
  for (size_t u = keep.next(); u < fr.size(); u = keep.next(u + 1)) ws.push_back(u);
  const size_t n = ws.size();

  std::vector<int> cls(n, -1);
  size_t nc = 0;
  for (size_t a = 0; a < n; ++a) {
    if (cls[a] >= 0) continue;
    cls[a] = static_cast<int>(nc);
    for (size_t b = a + 1; b < n; ++b) {
      if (cls[b] < 0 && fr.related(ws[a], ws[b]) && fr.related(ws[b], ws[a])) {
        cls[b] = static_cast<int>(nc);
      }
    }
    ++nc;
  }
  std::vector<size_t> csize(nc, 0);
  for (size_t a = 0; a < n; ++a) ++csize[cls[a]];
  std::vector<std::vector<char>> le(nc, std::vector<char>(nc, 0));
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = 0; b < n; ++b) {
      if (fr.related(ws[a], ws[b])) le[cls[a]][cls[b]] = 1;
    }
  }

  QuotientStats st;
  st.max_cluster = *std::max_element(csize.begin(), csize.end());
  std::vector<size_t> best(nc, 1);
  for (size_t round = 0; round < nc; ++round) {
    for (size_t a = 0; a < nc; ++a) {
      for (size_t b = 0; b < nc; ++b) {
        if (a != b && le[a][b] && best[a] + 1 > best[b]) best[b] = best[a] + 1;
      }
    }
  }
  st.chain = *std::max_element(best.begin(), best.end());
  for (uint32_t mask = 1; mask < (uint32_t{1} << nc); ++mask) {
    bool anti = true;
    for (size_t a = 0; a < nc && anti; ++a) {
      if (!((mask >> a) & 1)) continue;
      for (size_t b = a + 1; b < nc && anti; ++b) {
        if (((mask >> b) & 1) && (le[a][b] || le[b][a])) anti = false;
      }
    }
    if (anti) st.width = std::max<size_t>(st.width, std::popcount(mask));
  }
  return st;
}

}  // namespace

WitnessResult s42_cap_witness(const Model& m, const std::string& w,
                              const std::vector<PropFormula>& bs, const DialFamily& dial,
                              const PropFormula& f) {
  const ButtonDialIndependence ind = independent_buttons_dial(m, bs, dial);
  if (!ind.ok) {
    throw std::invalid_argument("buttons and dial are not independent: " + ind.detail);
  }
  const Verdict v = decide(f, Theory::S4_2, 12);
  if (v.kind == Verdict::Kind::Valid) {
    throw std::invalid_argument("formula is valid over directed preorders; nothing to capture");
  }
  if (v.kind == Verdict::Kind::Inconclusive) {
    throw std::invalid_argument("no countermodel found within the search cap");
  }

  // Size the controls against the reference countermodel: a chain of q
  // clusters consumes q-1 buttons, and the dial must cover both the widest
  // antichain and the largest cluster.
  const Model& cm = *v.model;
  const QuotientStats st = quotient_stats(cm, cm.frame().index_of(v.world));
  if (st.chain > bs.size() + 1) {
    throw std::invalid_argument("countermodel has a chain of " + std::to_string(st.chain) +
                                " clusters; " + std::to_string(bs.size()) +
                                " buttons support at most " + std::to_string(bs.size() + 1));
  }
  const size_t need_dial = std::max(st.width, st.max_cluster);
  if (dial.statements.size() < need_dial) {
    throw std::invalid_argument("countermodel needs " + std::to_string(need_dial) +
                                " dial values; only " + std::to_string(dial.statements.size()) +
                                " are available");
  }

  // Re-shape the countermodel onto a frame the controls can realize: worlds
  // are (button subset, dial value) pairs related by subset inclusion, so k
  // buttons and c dial values give a boolean lattice of c-clusters. Smallest
  // world count first, then fewest buttons.
  const std::vector<std::string> atoms = atoms_of(f);
  const size_t na = atoms.size();
  const CompiledFormula cf(f, atoms);
  struct Shape {
    size_t k, c, worlds;
  };
  std::vector<Shape> shapes;
  for (size_t k = 0; k <= std::min<size_t>(bs.size(), 6); ++k) {
    for (size_t c = 1; c <= dial.statements.size(); ++c) {
      shapes.push_back({k, c, (size_t{1} << k) * c});
    }
  }
  std::sort(shapes.begin(), shapes.end(), [](const Shape& a, const Shape& b) {
    return std::tie(a.worlds, a.k, a.c) < std::tie(b.worlds, b.k, b.c);
  });

  bool found = false, skipped = false;
  size_t bk = 0, bc = 0, bfail = 0;
  uint64_t bvm = 0;
  for (const Shape& sh : shapes) {
    const size_t nw = sh.worlds;
    if (nw > 16 || nw * na > 22) {
      skipped = true;
      continue;
    }
    std::vector<uint64_t> succ(nw, 0);
    for (size_t a = 0; a < nw; ++a) {
      const size_t sa = a / sh.c;
      for (size_t b = 0; b < nw; ++b) {
        if ((sa & (b / sh.c)) == sa) succ[a] |= uint64_t{1} << b;
      }
    }
    const uint64_t universe = (uint64_t{1} << nw) - 1;
    const uint64_t nvm = uint64_t{1} << (nw * na);
    std::vector<uint64_t> am(na);
    for (uint64_t vm = 0; vm < nvm && !found; ++vm) {
      std::fill(am.begin(), am.end(), 0);
      for (size_t ww = 0; ww < nw; ++ww) {
        for (size_t a = 0; a < na; ++a) {
          if ((vm >> (ww * na + a)) & 1) am[a] |= uint64_t{1} << ww;
        }
      }
      const uint64_t res = cf.eval(succ.data(), nw, am.data());
      if (res != universe) {
        found = true;
        bk = sh.k;
        bc = sh.c;
        bvm = vm;
        bfail = static_cast<size_t>(std::countr_one(res));
      }
    }
    if (found) break;
  }
  if (!found) {
    if (skipped) throw CapError("countermodel re-shaping exceeded the search budget");
    throw std::invalid_argument(
        "the available buttons and dial realize no countermodel of this formula");
  }

  // sigma: each atom becomes the disjunction of exact descriptions of the
  // re-shaped worlds where it holds. A subset is described by which of the
  // first bk buttons are pushed; dial value d reads as its statement, except
  // the last used value, which is the catch-all "none of the earlier ones" so
  // that every host world matches exactly one description.
  const size_t nw = (size_t{1} << bk) * bc;
  const auto world_desc = [&](size_t idx) {
    std::vector<PropFormula> parts;
    const size_t sub = idx / bc, d = idx % bc;
    for (size_t i = 0; i < bk; ++i) {
      PropFormula p = PropFormula::box(bs[i]);
      parts.push_back((sub >> i) & 1 ? p : PropFormula::negation(p));
    }
    if (bc > 1) {
      if (d + 1 < bc) {
        parts.push_back(dial.statements[d]);
      } else {
        for (size_t j = 0; j + 1 < bc; ++j) {
          parts.push_back(PropFormula::negation(dial.statements[j]));
        }
      }
    }
    return conj_fold(parts);
  };

  Substitution sigma;
  for (size_t a = 0; a < na; ++a) {
    std::vector<PropFormula> terms;
    for (size_t idx = 0; idx < nw; ++idx) {
      if ((bvm >> (idx * na + a)) & 1) terms.push_back(world_desc(idx));
    }
    sigma.set(atoms[a], disj_fold(terms));
  }
  PropFormula instance = substitute(f, sigma);

  // First reachable host world realizing the failing re-shaped world.
  const Frame& fr = m.frame();
  const WorldSet ok = truth_set(m, world_desc(bfail));
  const WorldSet reach = fr.reachable_from(fr.index_of(w));
  size_t where = fr.size();
  for (size_t u = reach.next(); u < fr.size(); u = reach.next(u + 1)) {
    if (ok.test(u)) {
      where = u;
      break;
    }
  }
  if (where == fr.size()) {
    throw std::invalid_argument("no world reachable from '" + w +
                                "' realizes the countermodel's root state");
  }
  if (model_check(m, fr.world_name(where), instance)) {
    throw std::logic_error("capture construction failed certification");
  }
  return {std::move(sigma), fr.world_name(where), std::move(instance)};
}

MpReport mp_check(const Model& m, const std::string& w, const std::vector<PropFormula>& pool,
                  size_t depth) {
  const std::vector<PropFormula> gs = formula_pool(pool, depth);
  const size_t wi = m.frame().index_of(w);
  for (const PropFormula& g : gs) {
    PropFormula inst = PropFormula::implies(PropFormula::diamond(PropFormula::box(g)), g);
    if (!truth_set(m, inst).test(wi)) {
      MpReport rep;
      rep.ok = false;
      rep.witness = g;
      rep.instance = render(inst);
      return rep;
    }
  }
  return {};
}

Model make_switch_model(size_t n, size_t depth) {
  if (depth < 1) throw std::invalid_argument("switch model needs at least one level");
  if (n > 12) throw CapError("too many switch atoms");
  const size_t npat = size_t{1} << n;
  const size_t nw = npat * depth;
  if (nw > kMaxHostWorlds) throw CapError("switch model exceeds the world cap");

  std::vector<std::string> ids;
  ids.reserve(nw);
  std::map<std::string, std::vector<std::string>> val;
  for (size_t l = 0; l < depth; ++l) {
    for (size_t p = 0; p < npat; ++p) {
      std::string id = "l" + std::to_string(l) + "_p" + std::to_string(p);
      std::vector<std::string> atoms;
      for (size_t i = 0; i < n; ++i) {
        if ((p >> i) & 1) atoms.push_back("s" + std::to_string(i));
      }
      val.emplace(id, std::move(atoms));
      ids.push_back(std::move(id));
    }
  }
  std::vector<WorldSet> succ(nw, WorldSet(nw));
  for (size_t a = 0; a < nw; ++a) {
    for (size_t b = (a / npat) * npat; b < nw; ++b) succ[a].set(b);
  }
  return Model(frame_from_successors(std::move(ids), std::move(succ)), val);
}

Model make_button_dial_model(size_t nb, size_t nd, size_t depth) {
  if (nd < 1) throw std::invalid_argument("dial needs at least one value");
  if (depth < 1) throw std::invalid_argument("button model needs at least one level");
  if (nb > 12) throw CapError("too many buttons");
  const size_t nsub = size_t{1} << nb;
  const size_t nw = depth * nsub * nd;
  if (nw > kMaxHostWorlds) throw CapError("button model exceeds the world cap");

  std::vector<std::string> ids;
  ids.reserve(nw);
  std::map<std::string, std::vector<std::string>> val;
  for (size_t l = 0; l < depth; ++l) {
    for (size_t sub = 0; sub < nsub; ++sub) {
      for (size_t d = 0; d < nd; ++d) {
        std::string id =
            "l" + std::to_string(l) + "_b" + std::to_string(sub) + "_d" + std::to_string(d);
        std::vector<std::string> atoms;
        for (size_t i = 0; i < nb; ++i) {
          if ((sub >> i) & 1) atoms.push_back("b" + std::to_string(i));
        }
        atoms.push_back("d" + std::to_string(d));
        val.emplace(id, std::move(atoms));
        ids.push_back(std::move(id));
      }
    }
  }
  std::vector<WorldSet> succ(nw, WorldSet(nw));
  for (size_t a = 0; a < nw; ++a) {
    const size_t la = a / (nsub * nd);
    const size_t suba = (a / nd) % nsub;
    for (size_t b = 0; b < nw; ++b) {
      const size_t lb = b / (nsub * nd);
      const size_t subb = (b / nd) % nsub;
      if (la <= lb && (suba & subb) == suba) succ[a].set(b);
    }
  }
  return Model(frame_from_successors(std::move(ids), std::move(succ)), val);
}

}  // namespace modalab
