#include "modalab/theories.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <mutex>
#include <unordered_set>

namespace modalab {

const char* theory_name(Theory t) {
  switch (t) {
    case Theory::K: return "K";
    case Theory::S4: return "S4";
    case Theory::S4_2: return "S4.2";
    default: return "S5";
  }
}

std::optional<Theory> theory_from_string(const std::string& s) {
  if (s == "k" || s == "K") return Theory::K;
  if (s == "s4" || s == "S4") return Theory::S4;
  if (s == "s4.2" || s == "S4.2") return Theory::S4_2;
  if (s == "s5" || s == "S5") return Theory::S5;
  return std::nullopt;
}

std::vector<FrameProperty> theory_frame_class(Theory t) {
  switch (t) {
    case Theory::K: return {};
    case Theory::S4: return {FrameProperty::Reflexive, FrameProperty::Transitive};
    case Theory::S4_2:
      return {FrameProperty::Reflexive, FrameProperty::Transitive, FrameProperty::Directed};
    default: return {FrameProperty::Equivalence};
  }
}

const std::vector<AxiomScheme>& all_axiom_schemes() {
  static const std::vector<AxiomScheme> schemes = [] {
    std::vector<AxiomScheme> v;
    v.push_back({"K", parse_prop("[](p -> q) -> ([]p -> []q)")});
    v.push_back({"Dual", parse_prop("~<>p <-> []~p")});
    v.push_back({"S", parse_prop("[]p -> p")});
    v.push_back({"4", parse_prop("[]p -> [][]p")});
    v.push_back({".2", parse_prop("<>[]p -> []<>p")});
    v.push_back({"5", parse_prop("<>[]p -> p")});
    return v;
  }();
  return schemes;
}

std::vector<AxiomScheme> axioms(Theory t) {
  const auto& all = all_axiom_schemes();
  std::vector<AxiomScheme> out = {all[0], all[1]};  // K and Dual ground every theory
  if (t == Theory::K) return out;
  out.push_back(all[2]);
  out.push_back(all[3]);
  if (t == Theory::S4) return out;
  out.push_back(t == Theory::S4_2 ? all[4] : all[5]);
  return out;
}

namespace {

// Closure indexed for the type procedures: a "type" is a bitmask over closure
// indices giving the truth value of each subformula at one world. Atoms and
// modal nodes are the free bits; boolean nodes derive from them.
struct ClosureInfo {
  std::vector<PropFormula> cl;  // children before parents
  std::vector<Conn> kind;
  std::vector<int> lhs, rhs;
  std::vector<int> atom_pos, modal_pos;  // per index: position in its group, or -1
  std::vector<int> atom_idx, modal_idx;  // closure indices, ascending
  std::vector<int> box_idx, dia_idx;
  uint32_t box_mask = 0, dia_mask = 0;
  int top = -1;

  explicit ClosureInfo(const PropFormula& g) {
    cl = subformula_closure(g);
    std::unordered_map<PropFormula, int> index;
    for (int i = 0; i < static_cast<int>(cl.size()); ++i) index.emplace(cl[i], i);
    kind.resize(cl.size());
    lhs.assign(cl.size(), -1);
    rhs.assign(cl.size(), -1);
    atom_pos.assign(cl.size(), -1);
    modal_pos.assign(cl.size(), -1);
    for (int i = 0; i < static_cast<int>(cl.size()); ++i) {
      const PropFormula& h = cl[i];
      kind[i] = h.kind();
      if (is_unary(h.kind())) lhs[i] = index.at(h.lhs());
      if (is_binary(h.kind())) {
        lhs[i] = index.at(h.lhs());
        rhs[i] = index.at(h.rhs());
      }
      switch (h.kind()) {
        case Conn::Atom:
          atom_pos[i] = static_cast<int>(atom_idx.size());
          atom_idx.push_back(i);
          break;
        case Conn::Box:
          modal_pos[i] = static_cast<int>(modal_idx.size());
          modal_idx.push_back(i);
          box_idx.push_back(i);
          box_mask |= uint32_t{1} << i;
          break;
        case Conn::Diamond:
          modal_pos[i] = static_cast<int>(modal_idx.size());
          modal_idx.push_back(i);
          dia_idx.push_back(i);
          dia_mask |= uint32_t{1} << i;
          break;
        default:
          break;
      }
    }
    top = index.at(g);
  }

  size_t size() const { return cl.size(); }
  size_t atoms() const { return atom_idx.size(); }
  size_t modals() const { return modal_idx.size(); }

  bool has(uint32_t type, int i) const { return (type >> i) & 1u; }

  uint32_t type_of(uint32_t amask, uint32_t pmask) const {
    uint32_t bits = 0;
    auto b = [&](int i) { return (bits >> i) & 1u; };
    for (int i = 0; i < static_cast<int>(cl.size()); ++i) {
      uint32_t v = 0;
      switch (kind[i]) {
        case Conn::True: v = 1; break;
        case Conn::False: v = 0; break;
        case Conn::Atom: v = (amask >> atom_pos[i]) & 1u; break;
        case Conn::Box:
        case Conn::Diamond: v = (pmask >> modal_pos[i]) & 1u; break;
        case Conn::Not: v = 1u - b(lhs[i]); break;
        case Conn::And: v = b(lhs[i]) & b(rhs[i]); break;
        case Conn::Or: v = b(lhs[i]) | b(rhs[i]); break;
        case Conn::Implies: v = (1u - b(lhs[i])) | b(rhs[i]); break;
        case Conn::Iff: v = b(lhs[i]) == b(rhs[i]) ? 1u : 0u; break;
      }
      bits |= v << i;
    }
    return bits;
  }

  // Reflexive coherence (preorder classes): □h → h and h → ◇h at a world.
  bool coherent(uint32_t type) const {
    for (int b : box_idx) {
      if (has(type, b) && !has(type, lhs[b])) return false;
    }
    for (int d : dia_idx) {
      if (has(type, lhs[d]) && !has(type, d)) return false;
    }
    return true;
  }
};

constexpr size_t kFreeBitGuard = 16;       // at most 2^16 candidate types
constexpr size_t kEliminationOps = 200'000'000;

// Fixpoint elimination for K and S4. A type survives while every unfulfilled
// box (□h ∉ S) has an accessible surviving type without h and every diamond
// (◇h ∈ S) has one with h. Witnesses are cached and re-scanned only when the
// cached witness dies.
SatResult eliminate_and_check(const ClosureInfo& ci, const std::vector<uint32_t>& types,
                              Theory t) {
  size_t nt = types.size();
  std::vector<char> alive(nt, 1);
  std::vector<uint32_t> req(nt, 0), forb(nt, 0);
  if (t == Theory::K) {
    for (size_t i = 0; i < nt; ++i) {
      for (int b : ci.box_idx) {
        if (ci.has(types[i], b)) req[i] |= uint32_t{1} << ci.lhs[b];
      }
      for (int d : ci.dia_idx) {
        if (!ci.has(types[i], d)) forb[i] |= uint32_t{1} << ci.lhs[d];
      }
    }
  }
  auto related = [&](size_t i, size_t j) {
    if (t == Theory::K) {
      return (req[i] & ~types[j]) == 0 && (forb[i] & types[j]) == 0;
    }
    return (types[i] & ci.box_mask & ~types[j]) == 0 &&
           (types[j] & ci.dia_mask & ~types[i]) == 0;
  };

  struct Demand {
    int body;
    bool want;  // required truth value of body at the witness
  };
  std::vector<std::vector<Demand>> demands(nt);
  for (size_t i = 0; i < nt; ++i) {
    for (int b : ci.box_idx) {
      if (!ci.has(types[i], b)) demands[i].push_back({ci.lhs[b], false});
    }
    for (int d : ci.dia_idx) {
      if (ci.has(types[i], d)) demands[i].push_back({ci.lhs[d], true});
    }
  }
  std::vector<std::vector<int>> witness(nt);
  for (size_t i = 0; i < nt; ++i) witness[i].assign(demands[i].size(), -1);

  size_t ops = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < nt; ++i) {
      if (!alive[i]) continue;
      bool ok = true;
      for (size_t k = 0; k < demands[i].size() && ok; ++k) {
        int w = witness[i][k];
        if (w >= 0 && alive[static_cast<size_t>(w)]) continue;
        const Demand& dm = demands[i][k];
        int found = -1;
        for (size_t j = 0; j < nt; ++j) {
          ++ops;
          if (alive[j] && related(i, j) && ci.has(types[j], dm.body) == dm.want) {
            found = static_cast<int>(j);
            break;
          }
        }
        if (found < 0) {
          ok = false;
        } else {
          witness[i][k] = found;
        }
      }
      if (!ok) {
        alive[i] = 0;
        changed = true;
      }
      if (ops > kEliminationOps) return SatResult::Unknown;
    }
  }
  for (size_t i = 0; i < nt; ++i) {
    if (alive[i] && ci.has(types[i], ci.top)) return SatResult::Sat;
  }
  return SatResult::Unsat;
}

// S5: a satisfying model generates a single universal cluster, so modal
// subformulas take one value across all worlds (the profile). A profile is
// realizable when some atom assignment is consistent with it, every □h ∉ P
// has a refuting cluster world, and every ◇h ∈ P has a witnessing one.
SatResult s5_satisfiable(const ClosureInfo& ci) {
  size_t na = ci.atoms(), nm = ci.modals();
  for (uint32_t pm = 0; pm < (uint32_t{1} << nm); ++pm) {
    std::vector<uint32_t> cluster;
    for (uint32_t am = 0; am < (uint32_t{1} << na); ++am) {
      uint32_t ty = ci.type_of(am, pm);
      bool ok = true;
      for (int b : ci.box_idx) {
        if (ci.has(ty, b) && !ci.has(ty, ci.lhs[b])) { ok = false; break; }
      }
      if (ok) {
        for (int d : ci.dia_idx) {
          if (!ci.has(ty, d) && ci.has(ty, ci.lhs[d])) { ok = false; break; }
        }
      }
      if (ok) cluster.push_back(ty);
    }
    if (cluster.empty()) continue;
    auto some = [&](int body, bool want) {
      for (uint32_t ty : cluster) {
        if (ci.has(ty, body) == want) return true;
      }
      return false;
    };
    bool ok = true;
    for (int b : ci.box_idx) {
      if (!ci.has(cluster[0], b) && !some(ci.lhs[b], false)) { ok = false; break; }
    }
    if (ok) {
      for (int d : ci.dia_idx) {
        if (ci.has(cluster[0], d) && !some(ci.lhs[d], true)) { ok = false; break; }
      }
    }
    if (ok && some(ci.top, true)) return SatResult::Sat;
  }
  return SatResult::Unsat;
}

// S4.2: a rooted finite directed preorder has a final cluster every world
// sees. Enumerate the final cluster's modal profile P; worlds elsewhere are
// coherent types whose boxes all lie in P and that inherit P's diamonds.
// Eliminate those types with the S4 relation, letting the cluster itself
// serve as a witness; the formula may land at a cluster world or a survivor.
SatResult s42_satisfiable(const ClosureInfo& ci) {
  size_t na = ci.atoms(), nm = ci.modals();
  std::vector<uint32_t> all_coherent;
  for (uint32_t fm = 0; fm < (uint32_t{1} << (na + nm)); ++fm) {
    uint32_t ty = ci.type_of(fm & ((uint32_t{1} << na) - 1), fm >> na);
    if (ci.coherent(ty)) all_coherent.push_back(ty);
  }
  for (uint32_t pm = 0; pm < (uint32_t{1} << nm); ++pm) {
    std::vector<uint32_t> cluster;
    for (uint32_t am = 0; am < (uint32_t{1} << na); ++am) {
      uint32_t ty = ci.type_of(am, pm);
      bool ok = true;
      for (int b : ci.box_idx) {
        if (ci.has(ty, b) && !ci.has(ty, ci.lhs[b])) { ok = false; break; }
      }
      if (ok) {
        for (int d : ci.dia_idx) {
          if (!ci.has(ty, d) && ci.has(ty, ci.lhs[d])) { ok = false; break; }
        }
      }
      if (ok) cluster.push_back(ty);
    }
    if (cluster.empty()) continue;
    auto cluster_some = [&](int body, bool want) {
      for (uint32_t ty : cluster) {
        if (ci.has(ty, body) == want) return true;
      }
      return false;
    };
    bool ok = true;
    for (int b : ci.box_idx) {
      if (!ci.has(cluster[0], b) && !cluster_some(ci.lhs[b], false)) { ok = false; break; }
    }
    if (ok) {
      for (int d : ci.dia_idx) {
        if (ci.has(cluster[0], d) && !cluster_some(ci.lhs[d], true)) { ok = false; break; }
      }
    }
    if (!ok) continue;
    if (cluster_some(ci.top, true)) return SatResult::Sat;

    uint32_t pbox = cluster[0] & ci.box_mask;
    uint32_t pdia = cluster[0] & ci.dia_mask;
    std::vector<uint32_t> types;
    for (uint32_t ty : all_coherent) {
      if ((ty & ci.box_mask & ~pbox) == 0 && (pdia & ~ty) == 0) types.push_back(ty);
    }
    size_t nt = types.size();
    std::vector<char> alive(nt, 1);
    auto related = [&](size_t i, size_t j) {
      return (types[i] & ci.box_mask & ~types[j]) == 0 &&
             (types[j] & ci.dia_mask & ~types[i]) == 0;
    };
    struct Demand {
      int body;
      bool want;
      bool cluster_ok;  // cluster worlds already provide the witness
    };
    std::vector<std::vector<Demand>> demands(nt);
    for (size_t i = 0; i < nt; ++i) {
      for (int b : ci.box_idx) {
        if (!ci.has(types[i], b)) {
          demands[i].push_back({ci.lhs[b], false, cluster_some(ci.lhs[b], false)});
        }
      }
      for (int d : ci.dia_idx) {
        if (ci.has(types[i], d)) {
          demands[i].push_back({ci.lhs[d], true, cluster_some(ci.lhs[d], true)});
        }
      }
    }
    std::vector<std::vector<int>> witness(nt);
    for (size_t i = 0; i < nt; ++i) witness[i].assign(demands[i].size(), -1);
    size_t ops = 0;
    bool changed = true;
    bool budget_hit = false;
    while (changed && !budget_hit) {
      changed = false;
      for (size_t i = 0; i < nt; ++i) {
        if (!alive[i]) continue;
        bool met = true;
        for (size_t k = 0; k < demands[i].size() && met; ++k) {
          const Demand& dm = demands[i][k];
          if (dm.cluster_ok) continue;
          int w = witness[i][k];
          if (w >= 0 && alive[static_cast<size_t>(w)]) continue;
          int found = -1;
          for (size_t j = 0; j < nt; ++j) {
            ++ops;
            if (alive[j] && related(i, j) && ci.has(types[j], dm.body) == dm.want) {
              found = static_cast<int>(j);
              break;
            }
          }
          if (found < 0) {
            met = false;
          } else {
            witness[i][k] = found;
          }
        }
        if (!met) {
          alive[i] = 0;
          changed = true;
        }
        if (ops > kEliminationOps) { budget_hit = true; break; }
      }
    }
    if (budget_hit) return SatResult::Unknown;
    for (size_t i = 0; i < nt; ++i) {
      if (alive[i] && ci.has(types[i], ci.top)) return SatResult::Sat;
    }
  }
  return SatResult::Unsat;
}

}  // namespace

SatResult theory_satisfiable(const PropFormula& g, Theory t) {
  ClosureInfo ci(g);
  if (ci.size() > 31) return SatResult::Unknown;
  if (ci.atoms() + ci.modals() > kFreeBitGuard) return SatResult::Unknown;
  switch (t) {
    case Theory::K:
    case Theory::S4: {
      size_t na = ci.atoms(), nm = ci.modals();
      std::vector<uint32_t> types;
      types.reserve(size_t{1} << (na + nm));
      for (uint32_t fm = 0; fm < (uint32_t{1} << (na + nm)); ++fm) {
        uint32_t ty = ci.type_of(fm & ((uint32_t{1} << na) - 1), fm >> na);
        if (t == Theory::S4 && !ci.coherent(ty)) continue;
        types.push_back(ty);
      }
      return eliminate_and_check(ci, types, t);
    }
    case Theory::S4_2: return s42_satisfiable(ci);
    default: return s5_satisfiable(ci);
  }
}

namespace {

constexpr uint64_t kPairBudget = 40'000'000;
constexpr uint64_t kLabeledPreorders[6] = {1, 1, 4, 29, 355, 6942};

// Can a full deterministic sweep of size-n models be afforded?
bool extraction_feasible(Theory t, size_t n, size_t na) {
  uint64_t val_bits = n * na;
  if (val_bits > 40) return false;
  switch (t) {
    case Theory::K:
      // 2^(n² + n·na) relation/valuation pairs.
      return n <= 5 && n * n + val_bits <= 25;
    case Theory::S4:
    case Theory::S4_2:
      // 2^(n²−n) masks to filter; surviving preorders × valuations to check.
      return n <= 5 && (kLabeledPreorders[n] << std::min<uint64_t>(val_bits, 40)) <= kPairBudget;
    default:
      return val_bits <= 25 && n <= 62;
  }
}

Frame universal_frame(size_t n) {
  std::vector<std::string> worlds;
  std::vector<std::pair<std::string, std::string>> rel;
  for (size_t i = 0; i < n; ++i) worlds.push_back("w" + std::to_string(i));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) rel.emplace_back(worlds[i], worlds[j]);
  }
  return Frame(std::move(worlds), rel);
}

}  // namespace

SearchOutcome bounded_countermodel(const PropFormula& f, Theory t, size_t max_worlds) {
  SearchOutcome out;
  std::vector<std::string> atoms = atoms_of(f);
  size_t na = atoms.size();
  CompiledFormula cf(f, atoms);
  for (size_t n = 1; n <= max_worlds; ++n) {
    if (!extraction_feasible(t, n, na)) {
      out.status = SearchOutcome::Status::BudgetExceeded;
      out.searched_to = n - 1;
      return out;
    }
    uint64_t vcount = uint64_t{1} << (n * na);
    uint64_t universe = (n >= 64) ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
    std::vector<uint64_t> succ(n, 0);
    std::vector<uint64_t> av(std::max<size_t>(na, 1), 0);

    auto unpack_succ = [&](uint64_t rm) {
      for (size_t i = 0; i < n; ++i) succ[i] = (rm >> (i * n)) & universe;
    };
    auto scan_valuations = [&](const std::function<Frame()>& make_frame) {
      for (uint64_t vm = 0; vm < vcount; ++vm) {
        std::fill(av.begin(), av.end(), 0);
        for (size_t w = 0; w < n; ++w) {
          for (size_t a = 0; a < na; ++a) {
            if ((vm >> (w * na + a)) & 1) av[a] |= uint64_t{1} << w;
          }
        }
        uint64_t res = cf.eval(succ.data(), n, av.data());
        if (res != universe) {
          Frame fr = make_frame();
          out.status = SearchOutcome::Status::Found;
          out.world = fr.world_name(static_cast<size_t>(std::countr_one(res)));
          out.model = model_from_mask(fr, atoms, vm);
          return true;
        }
      }
      return false;
    };

    if (t == Theory::S5) {
      uint64_t full = universe;
      for (size_t i = 0; i < n; ++i) succ[i] = full;
      if (scan_valuations([&] { return universal_frame(n); })) return out;
    } else if (t == Theory::K) {
      for (uint64_t rm = 0; rm < (uint64_t{1} << (n * n)); ++rm) {
        unpack_succ(rm);
        if (scan_valuations([&] { return frame_from_mask(n, rm); })) return out;
      }
    } else {
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
        uint64_t rm = diag;
        for (size_t b = 0; b < free_bits.size(); ++b) {
          if ((sub >> b) & 1) rm |= uint64_t{1} << free_bits[b];
        }
        if (!mask_transitive(rm, n)) continue;
        if (t == Theory::S4_2 && !mask_directed(rm, n)) continue;
        unpack_succ(rm);
        if (scan_valuations([&] { return frame_from_mask(n, rm); })) return out;
      }
    }
  }
  out.status = SearchOutcome::Status::Exhausted;
  out.searched_to = max_worlds;
  return out;
}

Verdict decide(const PropFormula& f, Theory t, size_t cap) {
  if (cap < 1) throw std::invalid_argument("decide: cap must be at least 1");
  Verdict out;
  size_t closure = subformula_closure(f).size();
  if (closure > 30) {
    out.kind = Verdict::Kind::Inconclusive;
    out.cap = cap;
    return out;
  }
  size_t bound = size_t{1} << closure;
  SatResult sat = theory_satisfiable(PropFormula::negation(f), t);
  if (sat == SatResult::Unsat) {
    out.kind = Verdict::Kind::Valid;
    out.searched_bound = bound;
    return out;
  }
  if (sat == SatResult::Sat) {
    SearchOutcome so = bounded_countermodel(f, t, std::min(cap, bound));
    if (so.status == SearchOutcome::Status::Found) {
      out.kind = Verdict::Kind::Countermodel;
      out.model = std::move(so.model);
      out.world = std::move(so.world);
      return out;
    }
  }
  out.kind = Verdict::Kind::Inconclusive;
  out.cap = cap;
  return out;
}

namespace {

// Canonical (minimal under world relabeling) relation masks per frame class;
// validity is relabeling-invariant, so existence checks only need these.
std::vector<uint64_t> canonical_masks(Theory t, size_t n) {
  std::vector<std::vector<size_t>> perms;
  std::vector<size_t> p(n);
  for (size_t i = 0; i < n; ++i) p[i] = i;
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  auto apply = [&](uint64_t m, const std::vector<size_t>& perm) {
    uint64_t out = 0;
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        if ((m >> (i * n + j)) & 1) out |= uint64_t{1} << (perm[i] * n + perm[j]);
      }
    }
    return out;
  };
  std::vector<uint64_t> reps;
  auto consider = [&](uint64_t m) {
    uint64_t canon = m;
    for (const auto& perm : perms) canon = std::min(canon, apply(m, perm));
    if (canon == m) reps.push_back(m);
  };
  if (t == Theory::K) {
    for (uint64_t m = 0; m < (uint64_t{1} << (n * n)); ++m) consider(m);
  } else {
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
      if (!mask_transitive(m, n)) continue;
      if (t == Theory::S4_2 && !mask_directed(m, n)) continue;
      consider(m);
    }
  }
  return reps;
}

const std::vector<uint64_t>& cached_canonical_masks(Theory t, size_t n) {
  static std::mutex mu;
  static std::map<std::pair<int, size_t>, std::vector<uint64_t>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(static_cast<int>(t), n);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, canonical_masks(t, n)).first;
  return it->second;
}

}  // namespace

bool exists_countermodel_upto(const PropFormula& f, Theory t, size_t max_worlds) {
  if (t == Theory::K && max_worlds > 4) {
    throw CapError("exists_countermodel_upto: K search is capped at 4 worlds");
  }
  if ((t == Theory::S4 || t == Theory::S4_2) && max_worlds > 5) {
    throw CapError("exists_countermodel_upto: preorder search is capped at 5 worlds");
  }
  std::vector<std::string> atoms = atoms_of(f);
  size_t na = atoms.size();
  CompiledFormula cf(f, atoms);
  for (size_t n = 1; n <= max_worlds; ++n) {
    if (n * std::max<size_t>(na, 1) > 30) {
      throw CapError("exists_countermodel_upto: valuation space too large");
    }
    uint64_t vcount = uint64_t{1} << (n * na);
    uint64_t universe = (uint64_t{1} << n) - 1;
    std::vector<uint64_t> succ(n, 0);
    std::vector<uint64_t> av(std::max<size_t>(na, 1), 0);
    auto scan = [&]() {
      for (uint64_t vm = 0; vm < vcount; ++vm) {
        std::fill(av.begin(), av.end(), 0);
        for (size_t w = 0; w < n; ++w) {
          for (size_t a = 0; a < na; ++a) {
            if ((vm >> (w * na + a)) & 1) av[a] |= uint64_t{1} << w;
          }
        }
        if (cf.eval(succ.data(), n, av.data()) != universe) return true;
      }
      return false;
    };
    if (t == Theory::S5) {
      for (size_t i = 0; i < n; ++i) succ[i] = universe;
      if (scan()) return true;
    } else {
      for (uint64_t rm : cached_canonical_masks(t, n)) {
        for (size_t i = 0; i < n; ++i) succ[i] = (rm >> (i * n)) & universe;
        if (scan()) return true;
      }
    }
  }
  return false;
}

std::vector<PropFormula> formula_pool(const std::vector<PropFormula>& seeds, size_t depth,
                                      size_t max_pool) {
  std::vector<PropFormula> pool;
  std::unordered_set<PropFormula> seen;
  auto add = [&](PropFormula g) {
    if (seen.insert(g).second) {
      if (pool.size() >= max_pool) {
        throw CapError("formula_pool: pool exceeds " + std::to_string(max_pool) +
                       " formulas");
      }
      pool.push_back(std::move(g));
    }
  };
  for (const PropFormula& s : seeds) add(s);
  for (size_t d = 0; d < depth; ++d) {
    size_t end = pool.size();
    for (size_t i = 0; i < end; ++i) {
      add(PropFormula::negation(pool[i]));
      add(PropFormula::box(pool[i]));
      add(PropFormula::diamond(pool[i]));
    }
    for (size_t i = 0; i < end; ++i) {
      for (size_t j = 0; j < end; ++j) {
        add(PropFormula::conj(pool[i], pool[j]));
        add(PropFormula::disj(pool[i], pool[j]));
        add(PropFormula::implies(pool[i], pool[j]));
        add(PropFormula::iff(pool[i], pool[j]));
      }
    }
  }
  return pool;
}

namespace {

// Truth-set algebra shared by the two fingerprint paths.
struct U64Ops {
  size_t n;
  const uint64_t* succ;
  uint64_t universe;
  using Set = uint64_t;
  Set tt() const { return universe; }
  Set ff() const { return 0; }
  Set neg(Set a) const { return ~a & universe; }
  Set conj(Set a, Set b) const { return a & b; }
  Set disj(Set a, Set b) const { return a | b; }
  Set impl(Set a, Set b) const { return (~a | b) & universe; }
  Set iff(Set a, Set b) const { return ~(a ^ b) & universe; }
  Set box(Set x) const {
    Set out = 0;
    for (size_t w = 0; w < n; ++w) {
      if (!(succ[w] & ~x)) out |= uint64_t{1} << w;
    }
    return out;
  }
  Set dia(Set x) const {
    Set out = 0;
    for (size_t w = 0; w < n; ++w) {
      if (succ[w] & x) out |= uint64_t{1} << w;
    }
    return out;
  }
  bool all(Set a) const { return a == universe; }
  bool at(Set a, size_t w) const { return (a >> w) & 1; }
};

struct WorldSetOps {
  const Frame* frame;
  using Set = WorldSet;
  size_t n() const { return frame->size(); }
  Set tt() const { return WorldSet(n()).complement(); }
  Set ff() const { return WorldSet(n()); }
  Set neg(const Set& a) const { return a.complement(); }
  Set conj(Set a, const Set& b) const {
    a &= b;
    return a;
  }
  Set disj(Set a, const Set& b) const {
    a |= b;
    return a;
  }
  Set impl(const Set& a, const Set& b) const { return disj(a.complement(), b); }
  Set iff(const Set& a, const Set& b) const {
    Set both = conj(a, b);
    Set neither = conj(a.complement(), b.complement());
    return disj(std::move(both), neither);
  }
  Set box(const Set& x) const {
    Set out(n());
    for (size_t w = 0; w < n(); ++w) {
      if (frame->successors(w).subset_of(x)) out.set(w);
    }
    return out;
  }
  Set dia(const Set& x) const {
    Set out(n());
    for (size_t w = 0; w < n(); ++w) {
      if (frame->successors(w).intersects(x)) out.set(w);
    }
    return out;
  }
  bool all(const Set& a) const { return a.all(); }
  bool at(const Set& a, size_t w) const { return a.test(w); }
};

template <class Ops>
typename Ops::Set eval_scheme(const Ops& ops, const PropFormula& g,
                              const typename Ops::Set& p, const typename Ops::Set& q) {
  switch (g.kind()) {
    case Conn::True: return ops.tt();
    case Conn::False: return ops.ff();
    case Conn::Atom: return g.atom_name() == "p" ? p : q;
    case Conn::Not: return ops.neg(eval_scheme(ops, g.lhs(), p, q));
    case Conn::Box: return ops.box(eval_scheme(ops, g.lhs(), p, q));
    case Conn::Diamond: return ops.dia(eval_scheme(ops, g.lhs(), p, q));
    case Conn::And:
      return ops.conj(eval_scheme(ops, g.lhs(), p, q), eval_scheme(ops, g.rhs(), p, q));
    case Conn::Or:
      return ops.disj(eval_scheme(ops, g.lhs(), p, q), eval_scheme(ops, g.rhs(), p, q));
    case Conn::Implies:
      return ops.impl(eval_scheme(ops, g.lhs(), p, q), eval_scheme(ops, g.rhs(), p, q));
    default:
      return ops.iff(eval_scheme(ops, g.lhs(), p, q), eval_scheme(ops, g.rhs(), p, q));
  }
}

template <class Ops>
typename Ops::Set eval_closed(const Ops& ops, const PropFormula& g, const Model& m) {
  switch (g.kind()) {
    case Conn::True: return ops.tt();
    case Conn::False: return ops.ff();
    case Conn::Atom: {
      WorldSet s = m.atom_set(g.atom_name());
      if constexpr (std::is_same_v<typename Ops::Set, uint64_t>) {
        uint64_t out = 0;
        for (size_t w = 0; w < m.size(); ++w) {
          if (s.test(w)) out |= uint64_t{1} << w;
        }
        return out;
      } else {
        return s;
      }
    }
    case Conn::Not: return ops.neg(eval_closed(ops, g.lhs(), m));
    case Conn::Box: return ops.box(eval_closed(ops, g.lhs(), m));
    case Conn::Diamond: return ops.dia(eval_closed(ops, g.lhs(), m));
    case Conn::And:
      return ops.conj(eval_closed(ops, g.lhs(), m), eval_closed(ops, g.rhs(), m));
    case Conn::Or:
      return ops.disj(eval_closed(ops, g.lhs(), m), eval_closed(ops, g.rhs(), m));
    case Conn::Implies:
      return ops.impl(eval_closed(ops, g.lhs(), m), eval_closed(ops, g.rhs(), m));
    default:
      return ops.iff(eval_closed(ops, g.lhs(), m), eval_closed(ops, g.rhs(), m));
  }
}

template <class Ops>
FingerprintReport fingerprint_with(const Ops& ops, const Model& m,
                                   const std::vector<PropFormula>& pool,
                                   const FingerprintOptions& opts) {
  FingerprintReport report;
  report.pool_size = pool.size();
  std::vector<typename Ops::Set> ts;
  ts.reserve(pool.size());
  for (const PropFormula& g : pool) ts.push_back(eval_closed(ops, g, m));

  for (const AxiomScheme& ax : all_axiom_schemes()) {
    SchemeReport rep;
    rep.name = ax.name;
    rep.scheme = render(ax.scheme);
    std::vector<std::string> vars = atoms_of(ax.scheme);
    bool two = vars.size() == 2;
    auto record = [&](size_t ia, size_t ib, const typename Ops::Set& res) {
      if (rep.failures.size() >= opts.max_failures_per_scheme) {
        rep.failures_truncated = true;
        return;
      }
      SchemeFailure fail;
      fail.args.push_back(render(pool[ia]));
      Substitution sub{{"p", pool[ia]}};
      if (two) {
        fail.args.push_back(render(pool[ib]));
        sub.set("q", pool[ib]);
      }
      fail.instance = render(substitute(ax.scheme, sub));
      for (size_t w = 0; w < m.size(); ++w) {
        if (ops.at(res, w)) continue;
        if (fail.failing_worlds.size() >= opts.max_worlds_per_failure) {
          fail.worlds_truncated = true;
          break;
        }
        fail.failing_worlds.push_back(m.frame().world_name(w));
      }
      rep.failures.push_back(std::move(fail));
    };
    if (two) {
      for (size_t ia = 0; ia < pool.size(); ++ia) {
        for (size_t ib = 0; ib < pool.size(); ++ib) {
          typename Ops::Set res = eval_scheme(ops, ax.scheme, ts[ia], ts[ib]);
          ++rep.instances;
          if (ops.all(res)) {
            ++rep.valid;
          } else {
            record(ia, ib, res);
          }
        }
      }
    } else {
      for (size_t ia = 0; ia < pool.size(); ++ia) {
        typename Ops::Set res = eval_scheme(ops, ax.scheme, ts[ia], ts[ia]);
        ++rep.instances;
        if (ops.all(res)) {
          ++rep.valid;
        } else {
          record(ia, ia, res);
        }
      }
    }
    report.schemes.push_back(std::move(rep));
  }
  return report;
}

}  // namespace

FingerprintReport logic_fingerprint(const Model& m, const std::vector<PropFormula>& seeds,
                                    size_t depth, const FingerprintOptions& opts) {
  if (depth > 3) throw CapError("logic_fingerprint: depth is capped at 3");
  std::vector<PropFormula> pool = formula_pool(seeds, depth, opts.max_pool);
  size_t total = 0;
  for (const AxiomScheme& ax : all_axiom_schemes()) {
    total += atoms_of(ax.scheme).size() == 2 ? pool.size() * pool.size() : pool.size();
  }
  if (total > opts.max_instances) {
    throw CapError("logic_fingerprint: " + std::to_string(total) +
                   " instances exceeds the cap of " + std::to_string(opts.max_instances));
  }
  size_t n = m.size();
  if (n <= 64) {
    std::vector<uint64_t> succ(n, 0);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        if (m.frame().related(i, j)) succ[i] |= uint64_t{1} << j;
      }
    }
    U64Ops ops{n, succ.data(), n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1};
    return fingerprint_with(ops, m, pool, opts);
  }
  WorldSetOps ops{&m.frame()};
  return fingerprint_with(ops, m, pool, opts);
}

}  // namespace modalab
