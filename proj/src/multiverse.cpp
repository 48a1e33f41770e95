#include "modalab/multiverse.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <utility>

#include "json.hpp"

namespace modalab {

namespace {

constexpr size_t kMaxSystemWorlds = 4096;

bool domain_contains(const std::vector<HfSet>& dom, const HfSet& x) {
  return std::binary_search(dom.begin(), dom.end(), x);
}

std::vector<HfSet> normalized_domain(std::vector<HfSet> dom) {
  std::sort(dom.begin(), dom.end());
  dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
  return dom;
}

size_t computed_height(const std::vector<HfSet>& dom) {
  size_t h = 0;
  while (domain_contains(dom, HfSet::ordinal(h))) ++h;
  return h;
}

}  // namespace

ToySystem::ToySystem(std::vector<ToyWorld> worlds) : worlds_(std::move(worlds)) {
  if (worlds_.size() > kMaxSystemWorlds) {
    throw CapError("toy systems cap at " + std::to_string(kMaxSystemWorlds) + " worlds");
  }
  for (size_t i = 0; i < worlds_.size(); ++i) {
    ToyWorld& w = worlds_[i];
    w.domain = normalized_domain(std::move(w.domain));
    for (const HfSet& e : w.domain) {
      for (const HfSet& c : e.elements()) {
        if (!domain_contains(w.domain, c)) {
          throw std::invalid_argument("domain of '" + w.id + "' is not transitive: missing " +
                                      c.pretty());
        }
      }
    }
    w.height = computed_height(w.domain);
    if (!index_.emplace(w.id, i).second) {
      throw std::invalid_argument("duplicate world id '" + w.id + "'");
    }
  }
  for (const ToyWorld& w : worlds_) {
    union_.insert(union_.end(), w.domain.begin(), w.domain.end());
  }
  union_ = normalized_domain(std::move(union_));
  for (size_t i = 0; i < worlds_.size(); ++i) {
    if (worlds_[i].domain.size() == union_.size()) top_ = i;
  }
}

size_t ToySystem::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::invalid_argument("unknown world id '" + id + "'");
  return it->second;
}

bool ToySystem::has_world(const std::string& id) const { return index_.count(id) > 0; }

bool ToySystem::accessible(size_t i, size_t j) const {
  const auto& a = worlds_.at(i).domain;
  const auto& b = worlds_.at(j).domain;
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

size_t ToySystem::top() const {
  if (!top_) throw std::invalid_argument("system has no top world");
  return *top_;
}

ToySystem make_toy_system(size_t max_height, const std::vector<size_t>& multipliers, size_t K) {
  if (K < 1) throw std::invalid_argument("K must be positive");
  if (max_height < 7) throw std::invalid_argument("max_height must be at least 7");
  if (max_height > 32) throw CapError("max_height caps at 32");
  std::vector<size_t> mult = multipliers;
  std::sort(mult.begin(), mult.end());
  mult.erase(std::unique(mult.begin(), mult.end()), mult.end());
  for (size_t m : mult) {
    if (m < 2) throw std::invalid_argument("multipliers must be at least 2");
  }
  if (mult.size() > 8) throw CapError("multiplier families cap at 8");
  // Least height at which every truncated multiple-set is transitive-closed
  // into the ordinal part, floored at 7 so the small pure-ordinal worlds are
  // always present.
  size_t base = 7;
  for (size_t m : mult) base = std::max(base, m * (K - 1) + 1);
  if (base > max_height) {
    throw std::invalid_argument("max_height " + std::to_string(max_height) +
                                " leaves no room for the multiplier sets (need " +
                                std::to_string(base) + ")");
  }
  const size_t heights = max_height - base + 1;
  if ((size_t{1} << mult.size()) * heights > kMaxSystemWorlds) {
    throw CapError("toy systems cap at " + std::to_string(kMaxSystemWorlds) + " worlds");
  }
  std::vector<HfSet> ordinals;
  for (size_t k = 0; k <= max_height; ++k) ordinals.push_back(HfSet::ordinal(k));
  std::vector<ToyWorld> worlds;
  for (size_t sub = 0; sub < (size_t{1} << mult.size()); ++sub) {
    std::vector<HfSet> extra;
    std::ostringstream subname;
    subname << "{";
    bool first = true;
    for (size_t b = 0; b < mult.size(); ++b) {
      if (!((sub >> b) & 1)) continue;
      extra.push_back(HfSet::multiples(mult[b], K));
      if (!first) subname << ",";
      subname << mult[b];
      first = false;
    }
    subname << "}";
    for (size_t h = base; h <= max_height; ++h) {
      std::vector<HfSet> dom(ordinals.begin(), ordinals.begin() + static_cast<long>(h));
      dom.insert(dom.end(), extra.begin(), extra.end());
      std::ostringstream id;
      id << "T(" << subname.str() << "," << h << ")";
      worlds.push_back(ToyWorld{id.str(), std::move(dom), 0});
    }
  }
  return ToySystem(std::move(worlds));
}

namespace {

// Shared evaluator for Tarskian and potentialist truth. Composite nodes are
// memoized on (node, world, values of the node's free variables); button
// sentences are exponentially self-similar, so the memo is what keeps their
// evaluation polynomial. Values are indexed into the union of all domains.
struct Interp {
  std::vector<std::vector<HfSet>> domains;   // per world, canonically sorted
  std::vector<std::vector<size_t>> succ;     // inclusion-successors
  std::unordered_map<const HfSet::Node*, uint32_t> elem_index;
  std::map<std::string, HfSet> scope;
  bool packable = true;  // small enough to pack memo keys into one word

  std::unordered_map<const FoFormula::Node*, std::vector<std::string>> fv_cache;

  struct PackedHash {
    size_t operator()(const std::pair<const void*, uint64_t>& k) const noexcept {
      return std::hash<const void*>{}(k.first) ^ (std::hash<uint64_t>{}(k.second) * 0x9e3779b97f4a7c15ULL);
    }
  };
  std::unordered_map<std::pair<const void*, uint64_t>, bool, PackedHash> memo_packed;
  std::map<std::tuple<const void*, size_t, std::vector<uint32_t>>, bool> memo_wide;
  // Every root ever evaluated, held alive so node addresses stay unique for
  // as long as the caches that key on them exist.
  std::vector<FoFormula> roots;
  std::set<const void*> root_ids;

  explicit Interp(const ToyWorld& w) {
    domains.push_back(normalized_domain(w.domain));
    succ.push_back({0});
    index_elements(domains[0]);
  }

  explicit Interp(const ToySystem& sys) {
    domains.reserve(sys.size());
    succ.resize(sys.size());
    for (size_t i = 0; i < sys.size(); ++i) {
      domains.push_back(sys.world(i).domain);
      for (size_t j = 0; j < sys.size(); ++j) {
        if (sys.accessible(i, j)) succ[i].push_back(j);
      }
    }
    index_elements(sys.union_domain());
  }

  void index_elements(const std::vector<HfSet>& universe) {
    for (size_t i = 0; i < universe.size(); ++i) {
      elem_index.emplace(universe[i].raw(), static_cast<uint32_t>(i));
    }
    packable = universe.size() <= 4096 && domains.size() <= 4096;
  }

  bool run(const FoFormula& f, size_t w) {
    if (root_ids.insert(f.raw()).second) roots.push_back(f);
    return eval(f.raw(), w);
  }

  const HfSet& value(const std::string& name) const {
    auto it = scope.find(name);
    if (it == scope.end()) throw std::invalid_argument("unbound variable '" + name + "'");
    return it->second;
  }

  const std::vector<std::string>& fv(const FoFormula::Node* n) {
    auto hit = fv_cache.find(n);
    if (hit != fv_cache.end()) return hit->second;
    std::vector<std::string> out;
    switch (n->kind) {
      case FoKind::True:
      case FoKind::False:
        break;
      case FoKind::Mem:
      case FoKind::Eq:
        out = {n->v1, n->v2};
        break;
      case FoKind::Not:
      case FoKind::Box:
      case FoKind::Diamond:
        out = fv(n->lhs.get());
        break;
      case FoKind::And:
      case FoKind::Or:
      case FoKind::Implies:
      case FoKind::Iff: {
        out = fv(n->lhs.get());
        const auto& r = fv(n->rhs.get());
        out.insert(out.end(), r.begin(), r.end());
        break;
      }
      case FoKind::Forall:
      case FoKind::Exists: {
        out = fv(n->lhs.get());
        out.erase(std::remove(out.begin(), out.end(), n->v1), out.end());
        break;
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return fv_cache.emplace(n, std::move(out)).first->second;
  }

  bool eval(const FoFormula::Node* n, size_t w) {
    switch (n->kind) {
      case FoKind::True:
        return true;
      case FoKind::False:
        return false;
      case FoKind::Mem:
        return value(n->v2).contains(value(n->v1));
      case FoKind::Eq:
        return value(n->v1) == value(n->v2);
      default:
        break;
    }
    const std::vector<std::string>& vars = fv(n);
    bool use_packed = packable && vars.size() <= 4;
    std::pair<const void*, uint64_t> pkey{n, 0};
    std::tuple<const void*, size_t, std::vector<uint32_t>> wkey;
    if (use_packed) {
      uint64_t bits = static_cast<uint64_t>(w);
      for (const std::string& v : vars) {
        bits = (bits << 12) | elem_index.at(value(v).raw());
      }
      pkey.second = bits;
      auto it = memo_packed.find(pkey);
      if (it != memo_packed.end()) return it->second;
    } else {
      std::vector<uint32_t> vals;
      vals.reserve(vars.size());
      for (const std::string& v : vars) vals.push_back(elem_index.at(value(v).raw()));
      wkey = std::make_tuple(n, w, std::move(vals));
      auto it = memo_wide.find(wkey);
      if (it != memo_wide.end()) return it->second;
    }
    bool r = false;
    switch (n->kind) {
      case FoKind::Not:
        r = !eval(n->lhs.get(), w);
        break;
      case FoKind::And:
        r = eval(n->lhs.get(), w) && eval(n->rhs.get(), w);
        break;
      case FoKind::Or:
        r = eval(n->lhs.get(), w) || eval(n->rhs.get(), w);
        break;
      case FoKind::Implies:
        r = !eval(n->lhs.get(), w) || eval(n->rhs.get(), w);
        break;
      case FoKind::Iff:
        r = eval(n->lhs.get(), w) == eval(n->rhs.get(), w);
        break;
      case FoKind::Box: {
        r = true;
        for (size_t u : succ[w]) {
          if (!eval(n->lhs.get(), u)) {
            r = false;
            break;
          }
        }
        break;
      }
      case FoKind::Diamond: {
        r = false;
        for (size_t u : succ[w]) {
          if (eval(n->lhs.get(), u)) {
            r = true;
            break;
          }
        }
        break;
      }
      case FoKind::Forall:
      case FoKind::Exists: {
        const bool all = n->kind == FoKind::Forall;
        std::optional<HfSet> saved;
        auto sit = scope.find(n->v1);
        if (sit != scope.end()) saved = sit->second;
        r = all;
        for (const HfSet& d : domains[w]) {
          scope.insert_or_assign(n->v1, d);
          if (eval(n->lhs.get(), w) != all) {
            r = !all;
            break;
          }
        }
        if (saved) {
          scope.insert_or_assign(n->v1, *saved);
        } else {
          scope.erase(n->v1);
        }
        break;
      }
      default:
        break;
    }
    if (use_packed) {
      memo_packed.emplace(pkey, r);
    } else {
      memo_wide.emplace(std::move(wkey), r);
    }
    return r;
  }
};

void check_parameters(const std::vector<HfSet>& dom, const FoFormula& f,
                      const std::map<std::string, HfSet>& env) {
  for (const auto& [name, v] : env) {
    if (!domain_contains(dom, v)) {
      throw std::invalid_argument("parameter '" + name + "' is outside the domain");
    }
  }
  for (const std::string& v : free_vars(f)) {
    if (!env.count(v)) throw std::invalid_argument("unbound variable '" + v + "'");
  }
}

}  // namespace

bool eval_fo(const ToyWorld& w, const FoFormula& f, const std::map<std::string, HfSet>& env) {
  if (!is_first_order(f)) {
    throw std::invalid_argument("eval_fo requires a first-order formula");
  }
  Interp in(w);
  check_parameters(in.domains[0], f, env);
  in.scope = env;
  return in.run(f, 0);
}

bool eval_potentialist(const ToySystem& sys, size_t w, const FoFormula& f,
                       const std::map<std::string, HfSet>& env) {
  if (w >= sys.size()) throw std::invalid_argument("world index out of range");
  Interp in(sys);
  check_parameters(in.domains[w], f, env);
  in.scope = env;
  return in.run(f, w);
}

CorollaryReport corollary_check(const ToySystem& sys, const std::vector<FoFormula>& corpus) {
  if (sys.size() == 0 || !sys.has_top()) {
    throw std::invalid_argument("corollary check requires a system with a top world");
  }
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (!is_first_order(corpus[i])) {
      throw std::invalid_argument("corpus formula " + std::to_string(i) +
                                  " is not first-order");
    }
  }
  Interp in(sys);
  const size_t t = sys.top();
  CorollaryReport rep;
  rep.sentences = corpus.size();
  for (size_t i = 0; i < corpus.size(); ++i) {
    const FoFormula& f = corpus[i];
    std::vector<std::string> vars = free_vars(f);
    if (vars.size() > 3) throw CapError("corollary check caps free variables at 3");
    const FoFormula tf = potentialist_translate(f);
    for (size_t w = 0; w < sys.size(); ++w) {
      const std::vector<HfSet>& dom = sys.world(w).domain;
      if (!vars.empty() && dom.empty()) continue;  // no admissible tuples
      std::vector<size_t> pick(vars.size(), 0);
      while (true) {
        for (size_t j = 0; j < vars.size(); ++j) {
          in.scope.insert_or_assign(vars[j], dom[pick[j]]);
        }
        const bool at_top = in.run(f, t);
        const bool everywhere = in.run(tf, w);
        ++rep.checks;
        if (at_top != everywhere) {
          std::ostringstream env;
          for (size_t j = 0; j < vars.size(); ++j) {
            if (j) env << ", ";
            env << vars[j] << "=" << dom[pick[j]].pretty();
          }
          rep.violations.push_back({i, sys.world(w).id, env.str()});
        }
        size_t j = 0;
        for (; j < pick.size(); ++j) {
          if (++pick[j] < dom.size()) break;
          pick[j] = 0;
        }
        if (j == pick.size()) break;
      }
      for (const std::string& v : vars) in.scope.erase(v);
    }
  }
  rep.ok = rep.violations.empty();
  return rep;
}

bool account_check(const ToySystem& sys) {
  if (sys.size() == 0 || !sys.has_top()) return false;
  // Inclusion is reflexive and transitive by construction, and the top world
  // witnesses directedness; the content left to check is that every set in
  // the union shows up in some extension of every world.
  for (size_t w = 0; w < sys.size(); ++w) {
    for (const HfSet& a : sys.union_domain()) {
      bool found = false;
      for (size_t u = 0; u < sys.size() && !found; ++u) {
        found = sys.accessible(w, u) && domain_contains(sys.world(u).domain, a);
      }
      if (!found) return false;
    }
  }
  return true;
}

AtomSpec AtomSpec::sentence(FoFormula f) {
  if (!is_first_order(f)) {
    throw std::invalid_argument("observable sentences must be first-order");
  }
  if (!free_vars(f).empty()) {
    throw std::invalid_argument("observable sentences must be closed");
  }
  AtomSpec s;
  s.kind_ = Kind::Sentence;
  s.sentence_ = std::move(f);
  return s;
}

AtomSpec AtomSpec::height_mod(size_t m, size_t i) {
  if (m < 1) throw std::invalid_argument("height_mod modulus must be positive");
  if (i >= m) throw std::invalid_argument("height_mod residue must be below the modulus");
  AtomSpec s;
  s.kind_ = Kind::HeightMod;
  s.m_ = m;
  s.arg_ = i;
  return s;
}

AtomSpec AtomSpec::button(size_t m, size_t count) {
  if (m < 1 || count < 1) throw std::invalid_argument("button observables need m, K >= 1");
  if (m * (count - 1) > 4096) throw CapError("button observables cap at ordinal 4096");
  AtomSpec s;
  s.kind_ = Kind::Button;
  s.m_ = m;
  s.arg_ = count;
  return s;
}

bool AtomSpec::holds_at(const ToyWorld& w) const {
  switch (kind_) {
    case Kind::Sentence:
      return eval_fo(w, sentence_, {});
    case Kind::HeightMod:
      return w.height % m_ == arg_;
    case Kind::Button: {
      const HfSet target = HfSet::multiples(m_, arg_);
      return std::find(w.domain.begin(), w.domain.end(), target) != w.domain.end();
    }
  }
  return false;
}

AtomSpec parse_atom_spec(const std::string& text) {
  std::istringstream in(text);
  std::string head;
  in >> head;
  auto no_tail = [&in]() {
    std::string tail;
    return !(in >> tail);
  };
  if (head == "height_mod") {
    size_t m = 0, i = 0;
    std::string eq;
    if ((in >> m >> eq >> i) && eq == "=" && no_tail()) return AtomSpec::height_mod(m, i);
    throw std::invalid_argument("unknown observable: " + text);
  }
  if (head == "button") {
    size_t m = 0, k = 0;
    if ((in >> m >> k) && no_tail()) return AtomSpec::button(m, k);
    throw std::invalid_argument("unknown observable: " + text);
  }
  try {
    return AtomSpec::sentence(parse_fo(text));
  } catch (const ParseError&) {
    throw std::invalid_argument("unknown observable: " + text);
  }
}

Model induce_model(const ToySystem& sys, const std::map<std::string, AtomSpec>& atoms) {
  if (sys.size() == 0) {
    throw std::invalid_argument("cannot induce a model from an empty system");
  }
  std::vector<std::string> ids;
  std::vector<WorldSet> succ(sys.size(), WorldSet(sys.size()));
  for (size_t i = 0; i < sys.size(); ++i) {
    ids.push_back(sys.world(i).id);
    for (size_t j = 0; j < sys.size(); ++j) {
      if (sys.accessible(i, j)) succ[i].set(j);
    }
  }
  std::map<std::string, std::vector<std::string>> valuation;
  for (size_t i = 0; i < sys.size(); ++i) {
    const ToyWorld& w = sys.world(i);
    std::vector<std::string>& at = valuation[w.id];
    for (const auto& [name, spec] : atoms) {
      if (spec.holds_at(w)) at.push_back(name);
    }
  }
  return Model(frame_from_successors(std::move(ids), std::move(succ)), valuation);
}

FoFormula button_sentence(size_t m, size_t K) {
  if (m < 1 || K < 1) throw std::invalid_argument("button sentences need m, K >= 1");
  if (m * (K - 1) > 64) throw CapError("button sentences cap at ordinal 64");
  const HfSet target = HfSet::multiples(m, K);
  auto var = [](size_t d) { return "v" + std::to_string(d); };
  // desc(s, d) pins var(d) to s extensionally: members of var(d) are exactly
  // the sets matching some member description. Variables are fresh per
  // nesting depth, and identical (set, depth) descriptions share one node.
  std::map<std::pair<const HfSet::Node*, size_t>, FoFormula> cache;
  std::function<FoFormula(const HfSet&, size_t)> desc = [&](const HfSet& s,
                                                            size_t d) -> FoFormula {
    const auto key = std::make_pair(s.raw(), d);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    FoFormula members = FoFormula::falsity();
    bool first = true;
    for (const HfSet& c : s.elements()) {
      FoFormula dc = desc(c, d + 1);
      members = first ? dc : FoFormula::disj(std::move(members), std::move(dc));
      first = false;
    }
    FoFormula f = FoFormula::forall(
        var(d + 1), FoFormula::iff(FoFormula::mem(var(d + 1), var(d)), std::move(members)));
    cache.emplace(key, f);
    return f;
  };
  return FoFormula::exists(var(0), desc(target, 0));
}

namespace {

nlohmann::ordered_json hf_to_array(const HfSet& s) {
  auto arr = nlohmann::ordered_json::array();
  for (const HfSet& e : s.elements()) arr.push_back(hf_to_array(e));
  return arr;
}

HfSet hf_from_array(const nlohmann::json& j) {
  if (!j.is_array()) {
    throw std::invalid_argument("system JSON: set literals must be nested arrays");
  }
  std::vector<HfSet> elems;
  elems.reserve(j.size());
  for (const auto& e : j) elems.push_back(hf_from_array(e));
  HfSet s = HfSet::from_children(elems);
  if (s.size() != elems.size()) {
    throw std::invalid_argument("system JSON: duplicate element in set literal");
  }
  return s;
}

}  // namespace

std::string system_to_json(const ToySystem& sys) {
  nlohmann::ordered_json j;
  auto worlds = nlohmann::ordered_json::array();
  for (const ToyWorld& w : sys.worlds()) {
    nlohmann::ordered_json jw;
    jw["id"] = w.id;
    jw["height"] = w.height;
    auto dom = nlohmann::ordered_json::array();
    for (const HfSet& e : w.domain) dom.push_back(hf_to_array(e));
    jw["domain"] = std::move(dom);
    worlds.push_back(std::move(jw));
  }
  j["worlds"] = std::move(worlds);
  if (sys.has_top()) j["top"] = sys.world(sys.top()).id;
  return j.dump();
}

ToySystem system_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("system JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("system JSON: expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "worlds" && key != "top") {
      throw std::invalid_argument("system JSON: unknown key '" + key + "'");
    }
  }
  if (!j.contains("worlds") || !j["worlds"].is_array()) {
    throw std::invalid_argument("system JSON: \"worlds\" must be an array");
  }
  std::vector<ToyWorld> worlds;
  std::vector<size_t> declared;
  for (const auto& jw : j["worlds"]) {
    if (!jw.is_object()) throw std::invalid_argument("system JSON: worlds must be objects");
    for (const auto& [key, value] : jw.items()) {
      (void)value;
      if (key != "id" && key != "height" && key != "domain") {
        throw std::invalid_argument("system JSON: unknown world key '" + key + "'");
      }
    }
    if (!jw.contains("id") || !jw["id"].is_string()) {
      throw std::invalid_argument("system JSON: world \"id\" must be a string");
    }
    if (!jw.contains("height") || !jw["height"].is_number_unsigned()) {
      throw std::invalid_argument("system JSON: world \"height\" must be a non-negative integer");
    }
    if (!jw.contains("domain") || !jw["domain"].is_array()) {
      throw std::invalid_argument("system JSON: world \"domain\" must be an array");
    }
    ToyWorld w;
    w.id = jw["id"].get<std::string>();
    for (const auto& e : jw["domain"]) w.domain.push_back(hf_from_array(e));
    std::vector<HfSet> sorted = w.domain;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("system JSON: duplicate domain entry in world '" + w.id + "'");
    }
    declared.push_back(jw["height"].get<size_t>());
    worlds.push_back(std::move(w));
  }
  ToySystem sys(std::move(worlds));
  for (size_t i = 0; i < sys.size(); ++i) {
    if (sys.world(i).height != declared[i]) {
      throw std::invalid_argument("system JSON: declared height of '" + sys.world(i).id +
                                  "' does not match its domain");
    }
  }
  if (j.contains("top")) {
    if (!j["top"].is_string()) {
      throw std::invalid_argument("system JSON: \"top\" must be a world id");
    }
    const size_t idx = sys.index_of(j["top"].get<std::string>());
    if (sys.world(idx).domain.size() != sys.union_domain().size()) {
      throw std::invalid_argument("system JSON: declared top is not a top world");
    }
  }
  return sys;
}

}  // namespace modalab
