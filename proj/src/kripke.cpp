#include "modalab/kripke.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "json.hpp"

namespace modalab {

size_t WorldSet::count() const {
  size_t c = 0;
  for (uint64_t word : bits_) c += static_cast<size_t>(std::popcount(word));
  return c;
}

bool WorldSet::none() const {
  for (uint64_t word : bits_) {
    if (word) return false;
  }
  return true;
}

bool WorldSet::subset_of(const WorldSet& o) const {
  for (size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] & ~o.bits_[i]) return false;
  }
  return true;
}

bool WorldSet::intersects(const WorldSet& o) const {
  for (size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] & o.bits_[i]) return true;
  }
  return false;
}

WorldSet& WorldSet::operator&=(const WorldSet& o) {
  for (size_t i = 0; i < bits_.size(); ++i) bits_[i] &= o.bits_[i];
  return *this;
}

WorldSet& WorldSet::operator|=(const WorldSet& o) {
  for (size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
  return *this;
}

WorldSet WorldSet::complement() const {
  WorldSet out(n_);
  for (size_t i = 0; i < bits_.size(); ++i) out.bits_[i] = ~bits_[i];
  size_t tail = n_ & 63;
  if (tail && !out.bits_.empty()) out.bits_.back() &= (uint64_t{1} << tail) - 1;
  return out;
}

size_t WorldSet::next(size_t from) const {
  for (size_t i = from; i < n_; ++i) {
    if (test(i)) return i;
  }
  return n_;
}

const char* frame_property_name(FrameProperty p) {
  switch (p) {
    case FrameProperty::Reflexive: return "Reflexive";
    case FrameProperty::Transitive: return "Transitive";
    case FrameProperty::Directed: return "Directed";
    case FrameProperty::Symmetric: return "Symmetric";
    default: return "Equivalence";
  }
}

Frame::Frame(std::vector<std::string> worlds,
             const std::vector<std::pair<std::string, std::string>>& relation)
    : worlds_(std::move(worlds)) {
  for (size_t i = 0; i < worlds_.size(); ++i) {
    if (!index_.emplace(worlds_[i], i).second) {
      throw std::invalid_argument("duplicate world id '" + worlds_[i] + "'");
    }
  }
  succ_.assign(worlds_.size(), WorldSet(worlds_.size()));
  for (const auto& [a, b] : relation) succ_[index_of(a)].set(index_of(b));
}

size_t Frame::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::invalid_argument("unknown world id '" + id + "'");
  return it->second;
}

bool Frame::has_world(const std::string& id) const { return index_.count(id) != 0; }

std::vector<std::pair<std::string, std::string>> Frame::relation_pairs() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (size_t i = 0; i < size(); ++i) {
    for (size_t j = succ_[i].next(0); j < size(); j = succ_[i].next(j + 1)) {
      out.emplace_back(worlds_[i], worlds_[j]);
    }
  }
  return out;
}

Frame Frame::rt_closure() const {
  Frame out = *this;
  for (size_t i = 0; i < size(); ++i) out.succ_[i].set(i);
  // Warshall with k outermost.
  for (size_t k = 0; k < size(); ++k) {
    for (size_t i = 0; i < size(); ++i) {
      if (out.succ_[i].test(k)) out.succ_[i] |= out.succ_[k];
    }
  }
  return out;
}

WorldSet Frame::reachable_from(size_t w) const {
  WorldSet seen(size());
  std::vector<size_t> stack = {w};
  seen.set(w);
  while (!stack.empty()) {
    size_t i = stack.back();
    stack.pop_back();
    for (size_t j = succ_[i].next(0); j < size(); j = succ_[i].next(j + 1)) {
      if (!seen.test(j)) {
        seen.set(j);
        stack.push_back(j);
      }
    }
  }
  return seen;
}

Frame frame_from_mask(size_t n, uint64_t relation_mask) {
  if (n > 8) throw std::invalid_argument("frame_from_mask: at most 8 worlds");
  Frame fr;
  fr.worlds_.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    fr.worlds_.push_back("w" + std::to_string(i));
    fr.index_.emplace(fr.worlds_.back(), i);
  }
  fr.succ_.assign(n, WorldSet(n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if ((relation_mask >> (i * n + j)) & 1) fr.succ_[i].set(j);
    }
  }
  return fr;
}

Frame frame_from_successors(std::vector<std::string> worlds, std::vector<WorldSet> succ) {
  if (worlds.size() != succ.size())
    throw std::invalid_argument("frame_from_successors: one successor set per world");
  for (const auto& s : succ) {
    if (s.size() != worlds.size())
      throw std::invalid_argument("frame_from_successors: successor set size mismatch");
  }
  Frame fr;
  fr.worlds_ = std::move(worlds);
  fr.succ_ = std::move(succ);
  for (size_t i = 0; i < fr.worlds_.size(); ++i) {
    if (!fr.index_.emplace(fr.worlds_[i], i).second)
      throw std::invalid_argument("duplicate world id '" + fr.worlds_[i] + "'");
  }
  return fr;
}

uint64_t mask_of_frame(const Frame& fr) {
  size_t n = fr.size();
  if (n > 8) throw std::invalid_argument("mask_of_frame: at most 8 worlds");
  uint64_t mask = 0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (fr.related(i, j)) mask |= uint64_t{1} << (i * n + j);
    }
  }
  return mask;
}

namespace {

bool is_atom_name(const std::string& s) {
  if (s.empty() || s == "true" || s == "false") return false;
  if (s[0] < 'a' || s[0] > 'z') return false;
  for (char c : s) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

Model::Model(Frame fr, const std::map<std::string, std::vector<std::string>>& valuation)
    : frame_(std::move(fr)) {
  for (const auto& [w, atoms] : valuation) {
    size_t i = frame_.index_of(w);
    for (const std::string& a : atoms) {
      if (!is_atom_name(a)) throw std::invalid_argument("invalid atom name '" + a + "'");
      auto [it, inserted] = val_.try_emplace(a, WorldSet(frame_.size()));
      (void)inserted;
      it->second.set(i);
    }
  }
}

bool Model::atom_true(size_t world, const std::string& atom) const {
  auto it = val_.find(atom);
  return it != val_.end() && it->second.test(world);
}

WorldSet Model::atom_set(const std::string& atom) const {
  auto it = val_.find(atom);
  return it != val_.end() ? it->second : WorldSet(frame_.size());
}

std::vector<std::string> Model::atom_names() const {
  std::vector<std::string> out;
  for (const auto& [a, s] : val_) out.push_back(a);
  return out;
}

std::vector<std::string> Model::atoms_at(size_t world) const {
  std::vector<std::string> out;
  for (const auto& [a, s] : val_) {
    if (s.test(world)) out.push_back(a);
  }
  return out;
}

Model model_from_mask(const Frame& fr, const std::vector<std::string>& atoms,
                      uint64_t val_mask) {
  std::map<std::string, std::vector<std::string>> val;
  size_t na = atoms.size();
  for (size_t w = 0; w < fr.size(); ++w) {
    for (size_t a = 0; a < na; ++a) {
      if ((val_mask >> (w * na + a)) & 1) val[fr.world_name(w)].push_back(atoms[a]);
    }
  }
  return Model(fr, val);
}

PropertyCheck frame_property(const Frame& fr, FrameProperty p) {
  size_t n = fr.size();
  auto name = [&](size_t i) { return fr.world_name(i); };
  PropertyCheck out;
  switch (p) {
    case FrameProperty::Reflexive:
      for (size_t i = 0; i < n; ++i) {
        if (!fr.related(i, i)) {
          out.holds = false;
          out.witness = {name(i)};
          out.detail = "not reflexive: missing " + name(i) + " R " + name(i);
          return out;
        }
      }
      return out;
    case FrameProperty::Transitive:
      for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
          if (!fr.related(i, j)) continue;
          for (size_t k = 0; k < n; ++k) {
            if (fr.related(j, k) && !fr.related(i, k)) {
              out.holds = false;
              out.witness = {name(i), name(j), name(k)};
              out.detail = "not transitive: " + name(i) + " R " + name(j) + " and " +
                           name(j) + " R " + name(k) + " but not " + name(i) + " R " +
                           name(k);
              return out;
            }
          }
        }
      }
      return out;
    case FrameProperty::Symmetric:
      for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
          if (fr.related(i, j) && !fr.related(j, i)) {
            out.holds = false;
            out.witness = {name(i), name(j)};
            out.detail = "not symmetric: " + name(i) + " R " + name(j) + " but not " +
                         name(j) + " R " + name(i);
            return out;
          }
        }
      }
      return out;
    case FrameProperty::Directed:
      for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
          if (!fr.related(i, j)) continue;
          for (size_t k = 0; k < n; ++k) {
            if (!fr.related(i, k)) continue;
            if (!fr.successors(j).intersects(fr.successors(k))) {
              out.holds = false;
              out.witness = {name(i), name(j), name(k)};
              out.detail = "not directed: " + name(j) + " and " + name(k) +
                           " (both successors of " + name(i) +
                           ") have no common successor";
              return out;
            }
          }
        }
      }
      return out;
    default: {  // Equivalence
      for (FrameProperty q :
           {FrameProperty::Reflexive, FrameProperty::Symmetric, FrameProperty::Transitive}) {
        PropertyCheck c = frame_property(fr, q);
        if (!c.holds) return c;
      }
      return out;
    }
  }
}

WorldSet truth_set(const Model& m, const PropFormula& f) {
  size_t n = m.size();
  std::unordered_map<PropFormula, WorldSet> ts;
  for (const PropFormula& g : subformula_closure(f)) {
    WorldSet s(n);
    switch (g.kind()) {
      case Conn::True: s = WorldSet(n).complement(); break;
      case Conn::False: break;
      case Conn::Atom: s = m.atom_set(g.atom_name()); break;
      case Conn::Not: s = ts.at(g.lhs()).complement(); break;
      case Conn::And:
        s = ts.at(g.lhs());
        s &= ts.at(g.rhs());
        break;
      case Conn::Or:
        s = ts.at(g.lhs());
        s |= ts.at(g.rhs());
        break;
      case Conn::Implies:
        s = ts.at(g.lhs()).complement();
        s |= ts.at(g.rhs());
        break;
      case Conn::Iff: {
        const WorldSet& a = ts.at(g.lhs());
        const WorldSet& b = ts.at(g.rhs());
        s = a;
        s &= b;
        WorldSet both_false = a.complement();
        both_false &= b.complement();
        s |= both_false;
        break;
      }
      case Conn::Box: {
        const WorldSet& x = ts.at(g.lhs());
        for (size_t w = 0; w < n; ++w) {
          if (m.frame().successors(w).subset_of(x)) s.set(w);
        }
        break;
      }
      case Conn::Diamond: {
        const WorldSet& x = ts.at(g.lhs());
        for (size_t w = 0; w < n; ++w) {
          if (m.frame().successors(w).intersects(x)) s.set(w);
        }
        break;
      }
    }
    ts.emplace(g, std::move(s));
  }
  return ts.at(f);
}

bool model_check(const Model& m, const std::string& world, const PropFormula& f) {
  size_t i = m.frame().index_of(world);
  return truth_set(m, f).test(i);
}

ModelValidity valid_on_model(const Model& m, const PropFormula& f) {
  WorldSet ts = truth_set(m, f);
  ModelValidity out;
  for (size_t w = 0; w < m.size(); ++w) {
    if (!ts.test(w)) {
      out.valid = false;
      out.failing_world = m.frame().world_name(w);
      return out;
    }
  }
  return out;
}

FrameValidity valid_on_frame(const Frame& fr, const PropFormula& f, size_t atom_cap) {
  std::vector<std::string> atoms = atoms_of(f);
  if (atoms.size() > atom_cap) {
    throw CapError("valid_on_frame: formula has " + std::to_string(atoms.size()) +
                   " atoms, cap is " + std::to_string(atom_cap));
  }
  size_t n = fr.size();
  size_t na = atoms.size();
  size_t bits = n * na;
  if (bits > 24) {
    throw CapError("valid_on_frame: 2^" + std::to_string(bits) +
                   " valuations is past the practical bound (24 bits)");
  }
  FrameValidity out;
  if (n == 0) return out;

  CompiledFormula cf(f, atoms);
  std::vector<uint64_t> succ(n, 0);
  for (size_t w = 0; w < n; ++w) {
    for (size_t j = 0; j < n; ++j) {
      if (fr.related(w, j)) succ[w] |= uint64_t{1} << j;
    }
  }
  uint64_t universe = (n == 64) ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
  std::vector<uint64_t> av(std::max<size_t>(na, 1), 0);
  for (uint64_t mask = 0; mask < (uint64_t{1} << bits); ++mask) {
    std::fill(av.begin(), av.end(), 0);
    for (size_t w = 0; w < n; ++w) {
      for (size_t a = 0; a < na; ++a) {
        if ((mask >> (w * na + a)) & 1) av[a] |= uint64_t{1} << w;
      }
    }
    uint64_t res = cf.eval(succ.data(), n, av.data());
    if (res != universe) {
      size_t w = static_cast<size_t>(std::countr_one(res));
      out.valid = false;
      out.failing_world = fr.world_name(w);
      for (size_t v = 0; v < n; ++v) {
        std::vector<std::string> here;
        for (size_t a = 0; a < na; ++a) {
          if ((mask >> (v * na + a)) & 1) here.push_back(atoms[a]);
        }
        out.valuation.emplace(fr.world_name(v), std::move(here));
      }
      return out;
    }
  }
  return out;
}

namespace {

void unpack_rows(uint64_t m, size_t n, uint64_t rows[8]) {
  uint64_t row_mask = (n == 0) ? 0 : (uint64_t{1} << n) - 1;
  for (size_t i = 0; i < n; ++i) rows[i] = (m >> (i * n)) & row_mask;
}

}  // namespace

bool mask_reflexive(uint64_t m, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    if (!((m >> (i * n + i)) & 1)) return false;
  }
  return true;
}

bool mask_symmetric(uint64_t m, size_t n) {
  uint64_t rows[8];
  unpack_rows(m, n, rows);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if (((rows[i] >> j) & 1) != ((rows[j] >> i) & 1)) return false;
    }
  }
  return true;
}

bool mask_transitive(uint64_t m, size_t n) {
  uint64_t rows[8];
  unpack_rows(m, n, rows);
  for (size_t i = 0; i < n; ++i) {
    uint64_t reach = 0;
    uint64_t r = rows[i];
    while (r) {
      size_t j = static_cast<size_t>(std::countr_zero(r));
      r &= r - 1;
      reach |= rows[j];
    }
    if (reach & ~rows[i]) return false;
  }
  return true;
}

bool mask_directed(uint64_t m, size_t n) {
  uint64_t rows[8];
  unpack_rows(m, n, rows);
  for (size_t i = 0; i < n; ++i) {
    uint64_t r = rows[i];
    for (uint64_t rj = r; rj;) {
      size_t j = static_cast<size_t>(std::countr_zero(rj));
      rj &= rj - 1;
      for (uint64_t rk = r; rk;) {
        size_t k = static_cast<size_t>(std::countr_zero(rk));
        rk &= rk - 1;
        if (!(rows[j] & rows[k])) return false;
      }
    }
  }
  return true;
}

namespace {

struct MaskProps {
  size_t n;
  bool need_reflexive = false, need_transitive = false, need_symmetric = false,
       need_directed = false;

  explicit MaskProps(size_t n_, const std::vector<FrameProperty>& props) : n(n_) {
    for (FrameProperty p : props) {
      switch (p) {
        case FrameProperty::Reflexive: need_reflexive = true; break;
        case FrameProperty::Transitive: need_transitive = true; break;
        case FrameProperty::Symmetric: need_symmetric = true; break;
        case FrameProperty::Directed: need_directed = true; break;
        case FrameProperty::Equivalence:
          need_reflexive = need_transitive = need_symmetric = true;
          break;
      }
    }
  }

  bool pass(uint64_t m) const {
    if (need_reflexive && !mask_reflexive(m, n)) return false;
    if (need_symmetric && !mask_symmetric(m, n)) return false;
    if (need_transitive && !mask_transitive(m, n)) return false;
    if (need_directed && !mask_directed(m, n)) return false;
    return true;
  }
};

void enumerate_masks(size_t n, const std::vector<FrameProperty>& props,
                     const std::function<bool(uint64_t)>& yield, size_t cap) {
  if (n > cap) {
    throw CapError("enumerate_frames: n=" + std::to_string(n) + " exceeds cap " +
                   std::to_string(cap));
  }
  if (n * n > 62) throw CapError("enumerate_frames: n too large for mask enumeration");
  MaskProps mp(n, props);
  if (n == 0) {
    yield(0);
    return;
  }
  if (mp.need_reflexive) {
    // Diagonal bits forced; iterate the off-diagonal bits only.
    uint64_t diag = 0;
    std::vector<size_t> free_bits;
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        if (i == j) {
          diag |= uint64_t{1} << (i * n + j);
        } else {
          free_bits.push_back(i * n + j);
        }
      }
    }
    for (uint64_t sub = 0; sub < (uint64_t{1} << free_bits.size()); ++sub) {
      uint64_t m = diag;
      for (size_t b = 0; b < free_bits.size(); ++b) {
        if ((sub >> b) & 1) m |= uint64_t{1} << free_bits[b];
      }
      if (mp.pass(m) && !yield(m)) return;
    }
    return;
  }
  for (uint64_t m = 0; m < (uint64_t{1} << (n * n)); ++m) {
    if (mp.pass(m) && !yield(m)) return;
  }
}

}  // namespace

void enumerate_frames(size_t n, const std::vector<FrameProperty>& props,
                      const std::function<bool(const Frame&)>& yield, size_t cap) {
  enumerate_masks(
      n, props, [&](uint64_t m) { return yield(frame_from_mask(n, m)); }, cap);
}

size_t count_frames(size_t n, const std::vector<FrameProperty>& props, size_t cap) {
  size_t count = 0;
  enumerate_masks(
      n, props,
      [&](uint64_t) {
        ++count;
        return true;
      },
      cap);
  return count;
}

Model model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("model JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("model JSON: expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "worlds" && key != "relation" && key != "valuation" && key != "close") {
      throw std::invalid_argument("model JSON: unknown key '" + key + "'");
    }
  }
  if (!j.contains("worlds") || !j["worlds"].is_array()) {
    throw std::invalid_argument("model JSON: \"worlds\" must be an array of strings");
  }
  std::vector<std::string> worlds;
  for (const auto& w : j["worlds"]) {
    if (!w.is_string()) {
      throw std::invalid_argument("model JSON: \"worlds\" must be an array of strings");
    }
    worlds.push_back(w.get<std::string>());
  }
  std::vector<std::pair<std::string, std::string>> relation;
  if (j.contains("relation")) {
    if (!j["relation"].is_array()) {
      throw std::invalid_argument("model JSON: \"relation\" must be an array of pairs");
    }
    for (const auto& pr : j["relation"]) {
      if (!pr.is_array() || pr.size() != 2 || !pr[0].is_string() || !pr[1].is_string()) {
        throw std::invalid_argument(
            "model JSON: \"relation\" entries must be [\"a\",\"b\"] pairs");
      }
      relation.emplace_back(pr[0].get<std::string>(), pr[1].get<std::string>());
    }
  }
  std::map<std::string, std::vector<std::string>> valuation;
  if (j.contains("valuation")) {
    if (!j["valuation"].is_object()) {
      throw std::invalid_argument("model JSON: \"valuation\" must be an object");
    }
    for (const auto& [w, atoms] : j["valuation"].items()) {
      if (!atoms.is_array()) {
        throw std::invalid_argument("model JSON: valuation of '" + w +
                                    "' must be an array of atom names");
      }
      std::vector<std::string>& lst = valuation[w];
      for (const auto& a : atoms) {
        if (!a.is_string()) {
          throw std::invalid_argument("model JSON: valuation of '" + w +
                                      "' must be an array of atom names");
        }
        lst.push_back(a.get<std::string>());
      }
    }
  }
  bool close_rt = false;
  if (j.contains("close")) {
    if (!j["close"].is_string() || j["close"].get<std::string>() != "rt") {
      throw std::invalid_argument("model JSON: \"close\" only supports \"rt\"");
    }
    close_rt = true;
  }
  Frame fr(std::move(worlds), relation);
  if (close_rt) fr = fr.rt_closure();
  return Model(std::move(fr), valuation);
}

std::string model_to_json(const Model& m) {
  nlohmann::ordered_json j;
  j["worlds"] = m.frame().worlds();
  auto rel = nlohmann::ordered_json::array();
  for (const auto& [a, b] : m.frame().relation_pairs()) {
    rel.push_back({a, b});
  }
  j["relation"] = std::move(rel);
  auto val = nlohmann::ordered_json::object();
  for (size_t w = 0; w < m.size(); ++w) {
    val[m.frame().world_name(w)] = m.atoms_at(w);
  }
  j["valuation"] = std::move(val);
  return j.dump();
}

CompiledFormula::CompiledFormula(const PropFormula& f,
                                 const std::vector<std::string>& atom_order) {
  natoms_ = atom_order.size();
  std::unordered_map<std::string, uint32_t> idx;
  for (size_t i = 0; i < atom_order.size(); ++i) {
    idx.emplace(atom_order[i], static_cast<uint32_t>(i));
  }
  // Leaves push one slot, binaries pop two and push one; unaries are in-place.
  size_t depth = 0;
  std::function<void(const PropFormula&)> emit = [&](const PropFormula& g) {
    if (is_unary(g.kind())) {
      emit(g.lhs());
      Op op = g.kind() == Conn::Not ? Op::Not
              : g.kind() == Conn::Box ? Op::Box
                                      : Op::Diamond;
      prog_.push_back({op, 0});
      return;
    }
    if (is_binary(g.kind())) {
      emit(g.lhs());
      emit(g.rhs());
      Op op = g.kind() == Conn::And       ? Op::And
              : g.kind() == Conn::Or      ? Op::Or
              : g.kind() == Conn::Implies ? Op::Implies
                                          : Op::Iff;
      prog_.push_back({op, 0});
      --depth;
      return;
    }
    if (g.kind() == Conn::Atom) {
      auto it = idx.find(g.atom_name());
      if (it == idx.end()) {
        throw std::logic_error("CompiledFormula: atom '" + g.atom_name() +
                               "' missing from atom order");
      }
      prog_.push_back({Op::Atom, it->second});
    } else {
      prog_.push_back({g.kind() == Conn::True ? Op::True : Op::False, 0});
    }
    ++depth;
    max_stack_ = std::max(max_stack_, depth);
  };
  emit(f);
  if (max_stack_ > 64) {
    throw CapError("CompiledFormula: formula nests too deep for the fixed stack");
  }
}

uint64_t CompiledFormula::eval(const uint64_t* succ, size_t n, const uint64_t* atoms) const {
  uint64_t st[64];
  size_t sp = 0;
  for (const Ins& ins : prog_) {
    switch (ins.op) {
      case Op::True: st[sp++] = ~uint64_t{0}; break;
      case Op::False: st[sp++] = 0; break;
      case Op::Atom: st[sp++] = atoms[ins.arg]; break;
      case Op::Not: st[sp - 1] = ~st[sp - 1]; break;
      case Op::And:
        st[sp - 2] &= st[sp - 1];
        --sp;
        break;
      case Op::Or:
        st[sp - 2] |= st[sp - 1];
        --sp;
        break;
      case Op::Implies:
        st[sp - 2] = ~st[sp - 2] | st[sp - 1];
        --sp;
        break;
      case Op::Iff:
        st[sp - 2] = ~(st[sp - 2] ^ st[sp - 1]);
        --sp;
        break;
      case Op::Box: {
        uint64_t x = st[sp - 1];
        uint64_t out = 0;
        for (size_t w = 0; w < n; ++w) {
          if (!(succ[w] & ~x)) out |= uint64_t{1} << w;
        }
        st[sp - 1] = out;
        break;
      }
      case Op::Diamond: {
        uint64_t x = st[sp - 1];
        uint64_t out = 0;
        for (size_t w = 0; w < n; ++w) {
          if (succ[w] & x) out |= uint64_t{1} << w;
        }
        st[sp - 1] = out;
        break;
      }
    }
  }
  uint64_t universe = (n >= 64) ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
  return st[0] & universe;
}

}  // namespace modalab
