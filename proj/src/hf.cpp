#include "modalab/hf.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace modalab {

namespace {
constexpr size_t kNotOrdinal = std::numeric_limits<size_t>::max();
}  // namespace

struct HfSet::Node {
  std::vector<const Node*> kids;  // canonically sorted, duplicate-free
  size_t rank = 0;
  size_t ordv = kNotOrdinal;      // ordinal value, or kNotOrdinal
};

namespace {

// Canonical strict order: rank first, then lexicographic on the element
// lists. Distinct interned nodes always compare strictly, so equality under
// this order coincides with pointer equality.
bool node_less(const HfSet::Node* a, const HfSet::Node* b) {
  if (a == b) return false;
  if (a->rank != b->rank) return a->rank < b->rank;
  const size_t n = std::min(a->kids.size(), b->kids.size());
  for (size_t i = 0; i < n; ++i) {
    if (a->kids[i] != b->kids[i]) return node_less(a->kids[i], b->kids[i]);
  }
  return a->kids.size() < b->kids.size();
}

struct KidsHash {
  size_t operator()(const std::vector<const HfSet::Node*>& v) const noexcept {
    size_t h = 0xcbf29ce484222325ULL;
    for (const HfSet::Node* p : v) {
      h ^= std::hash<const void*>{}(p);
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

std::mutex& table_mutex() {
  static std::mutex mu;
  return mu;
}

using InternTable =
    std::unordered_map<std::vector<const HfSet::Node*>, std::unique_ptr<HfSet::Node>, KidsHash>;

InternTable& intern_table() {
  static InternTable table;
  return table;
}

const HfSet::Node* intern(std::vector<const HfSet::Node*> kids) {
  std::sort(kids.begin(), kids.end(), node_less);
  kids.erase(std::unique(kids.begin(), kids.end()), kids.end());
  std::lock_guard<std::mutex> lock(table_mutex());
  InternTable& table = intern_table();
  auto it = table.find(kids);
  if (it != table.end()) return it->second.get();
  auto node = std::make_unique<HfSet::Node>();
  node->kids = kids;
  node->rank = kids.empty() ? 0 : kids.back()->rank + 1;
  bool ordinal = true;
  for (size_t i = 0; i < kids.size() && ordinal; ++i) ordinal = kids[i]->ordv == i;
  if (ordinal) node->ordv = kids.size();
  const HfSet::Node* raw = node.get();
  table.emplace(std::move(kids), std::move(node));
  return raw;
}

}  // namespace

HfSet::HfSet() : node_(intern({})) {}

HfSet HfSet::empty() { return HfSet(intern({})); }

HfSet HfSet::from_children(const std::vector<HfSet>& children) {
  std::vector<const Node*> kids;
  kids.reserve(children.size());
  for (const HfSet& c : children) kids.push_back(c.node_);
  return HfSet(intern(std::move(kids)));
}

HfSet HfSet::ordinal(size_t n) {
  std::vector<const Node*> below;
  below.reserve(n);
  const Node* cur = intern({});
  for (size_t k = 0; k < n; ++k) {
    below.push_back(cur);
    cur = intern(below);
  }
  return HfSet(cur);
}

HfSet HfSet::multiples(size_t m, size_t count) {
  std::vector<HfSet> elems;
  elems.reserve(count);
  for (size_t k = 0; k < count; ++k) elems.push_back(ordinal(m * k));
  return from_children(elems);
}

size_t HfSet::rank() const { return node_->rank; }

size_t HfSet::size() const { return node_->kids.size(); }

HfSet HfSet::element(size_t i) const {
  if (i >= node_->kids.size()) throw std::out_of_range("HfSet element index");
  return HfSet(node_->kids[i]);
}

std::vector<HfSet> HfSet::elements() const {
  std::vector<HfSet> out;
  out.reserve(node_->kids.size());
  for (const Node* k : node_->kids) out.push_back(HfSet(k));
  return out;
}

bool HfSet::contains(const HfSet& x) const {
  return std::binary_search(node_->kids.begin(), node_->kids.end(), x.node_, node_less);
}

bool HfSet::is_ordinal() const { return node_->ordv != kNotOrdinal; }

size_t HfSet::ordinal_value() const {
  if (!is_ordinal()) throw std::logic_error("ordinal_value of a non-ordinal set");
  return node_->ordv;
}

std::string HfSet::pretty() const {
  if (is_ordinal()) return std::to_string(node_->ordv);
  std::ostringstream out;
  out << '{';
  for (size_t i = 0; i < node_->kids.size(); ++i) {
    if (i) out << ',';
    out << HfSet(node_->kids[i]).pretty();
  }
  out << '}';
  return out.str();
}

bool HfSet::operator<(const HfSet& o) const { return node_less(node_, o.node_); }

}  // namespace modalab
