#pragma once

// A slow evaluator written straight from the flip rules, used as a
// test-side oracle. Hypotheses are vectors of bools over the sorted node
// set; reachability is plain forward search from each hypothesis.

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "selfref/engine.hpp"

namespace reference {

using selfref::TruthValue4;

class Evaluator {
 public:
  explicit Evaluator(const selfref::Proposition& p) {
    for (const auto& id : p.formula.node_set()) ids_.push_back(id);
    for (std::size_t i = 0; i < ids_.size(); ++i) index_[ids_[i]] = static_cast<int>(i);
    for (const auto& id : ids_) {
      nodes_.push_back(&p.formula.universe().at(id));
      auto it = p.evaluation.find(id);
      bound_.push_back(it == p.evaluation.end() ? std::nullopt : std::optional<TruthValue4>(it->second));
    }
    star_ = index_.at(p.formula.star());
  }

  int size() const { return static_cast<int>(ids_.size()); }
  int index(const std::string& id) const { return index_.at(id); }

  bool licensed(const std::vector<bool>& h, int c) const {
    if (bound_[c]) {
      switch (bound_[c]->kind()) {
        case TruthValue4::Kind::T: return !h[c];
        case TruthValue4::Kind::F: return h[c];
        case TruthValue4::Kind::L: return true;
        case TruthValue4::Kind::V: return false;
      }
    }
    const selfref::Node& n = *nodes_[c];
    if (n.table && n.children.empty() && n.table->output(0) != h[c]) return true;
    if (n.table && clause(h, c, -1)) return true;
    for (int d = 0; d < size(); ++d) {
      const auto& ch = nodes_[d]->children;
      if (std::find(ch.begin(), ch.end(), ids_[c]) != ch.end() && clause(h, d, c)) return true;
    }
    return false;
  }

  std::vector<std::vector<bool>> successors(const std::vector<bool>& h) const {
    std::vector<std::vector<bool>> out;
    for (int c = 0; c < size(); ++c)
      if (licensed(h, c)) {
        auto k = h;
        k[c] = !k[c];
        out.push_back(k);
      }
    return out;
  }

  TruthValue4 value() const {
    bool stuck_t = false, stuck_f = false;
    const std::uint32_t states = 1u << size();
    for (std::uint32_t s = 0; s < states; ++s) {
      std::vector<bool> h(size());
      for (int i = 0; i < size(); ++i) h[i] = (s >> i) & 1u;
      bool start = h[star_];
      if (start ? stuck_t : stuck_f) continue;
      if (!reaches(h, !start)) (start ? stuck_t : stuck_f) = true;
    }
    return TruthValue4::from_flags(stuck_t, stuck_f);
  }

 private:
  // Rule (d) when toggled < 0 (parent d is the flipping node), rule (e)
  // for child `toggled` of parent d otherwise.
  bool clause(const std::vector<bool>& h, int d, int toggled) const {
    const selfref::Node& n = *nodes_[d];
    std::vector<int> distinct;
    for (const auto& c : n.children) {
      int i = index_.at(c);
      if (std::find(distinct.begin(), distinct.end(), i) == distinct.end()) distinct.push_back(i);
    }
    for (std::uint32_t mask = 1; mask < (1u << distinct.size()); ++mask) {
      std::set<int> subset;
      for (std::size_t j = 0; j < distinct.size(); ++j)
        if ((mask >> j) & 1u) subset.insert(distinct[j]);
      if (toggled >= 0 && !subset.count(toggled)) continue;
      // The restriction: inputs at positions wired into the subset, then the output.
      std::vector<int> positions;
      for (std::size_t j = 0; j < n.children.size(); ++j)
        if (subset.count(index_.at(n.children[j]))) positions.push_back(static_cast<int>(j));
      std::vector<bool> mine, flipped;
      for (int j : positions) {
        bool v = h[index_.at(n.children[j])];
        mine.push_back(v);
        flipped.push_back(index_.at(n.children[j]) == toggled ? !v : v);
      }
      mine.push_back(h[d]);
      flipped.push_back(toggled < 0 ? !h[d] : h[d]);
      bool any_mine = false, any_flipped = false;
      for (std::uint64_t row = 0; row < n.table->rows(); ++row) {
        std::vector<bool> r;
        for (int j : positions) r.push_back(n.table->input(row, j));
        r.push_back(n.table->output(row));
        any_mine |= r == mine;
        any_flipped |= r == flipped;
      }
      if (!any_mine && any_flipped) return true;
    }
    return false;
  }

  bool reaches(const std::vector<bool>& from, bool goal) const {
    std::set<std::vector<bool>> seen{from};
    std::deque<std::vector<bool>> queue{from};
    while (!queue.empty()) {
      auto h = queue.front();
      queue.pop_front();
      if (h[star_] == goal) return true;
      for (auto& k : successors(h))
        if (seen.insert(k).second) queue.push_back(std::move(k));
    }
    return false;
  }

  std::vector<std::string> ids_;
  std::map<std::string, int> index_;
  std::vector<const selfref::Node*> nodes_;
  std::vector<std::optional<TruthValue4>> bound_;
  int star_ = 0;
};

inline TruthValue4 truth_value(const selfref::Proposition& p) { return Evaluator(p).value(); }

}  // namespace reference
