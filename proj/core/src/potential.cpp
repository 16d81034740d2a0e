#include "melab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace melab {

LocallyConstantFn LocallyConstantFn::constant(double value, int depth) {
  if (depth < 1) throw PreconditionError("depth must be positive");
  if (!std::isfinite(value)) throw PreconditionError("value must be finite");
  LocallyConstantFn f;
  f.depth_ = depth;
  f.constant_ = true;
  f.value_ = value;
  return f;
}

LocallyConstantFn LocallyConstantFn::from_table(int depth,
                                                std::map<std::vector<int>, double> table) {
  if (depth < 1) throw PreconditionError("depth must be positive");
  if (table.empty()) throw PreconditionError("empty word table");
  for (const auto& [w, v] : table) {
    if (static_cast<int>(w.size()) != depth)
      throw PreconditionError("table word " + to_string(Word(w)) +
                              " does not have the declared depth");
    if (!std::isfinite(v)) throw PreconditionError("table value must be finite");
  }
  LocallyConstantFn f;
  f.depth_ = depth;
  f.constant_ = false;
  f.table_ = std::move(table);
  return f;
}

double LocallyConstantFn::operator()(std::span<const int> w) const {
  if (static_cast<int>(w.size()) < depth_)
    throw PreconditionError("word shorter than function depth");
  if (constant_) return value_;
  std::vector<int> key(w.begin(), w.begin() + depth_);
  auto it = table_.find(key);
  if (it == table_.end())
    throw PreconditionError("function not defined on word " + to_string(Word(key)));
  return it->second;
}

double LocallyConstantFn::max_abs() const {
  if (constant_) return std::abs(value_);
  double m = 0.0;
  for (const auto& [w, v] : table_) m = std::max(m, std::abs(v));
  return m;
}

double LocallyConstantFn::min_value() const {
  if (constant_) return value_;
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [w, v] : table_) m = std::min(m, v);
  return m;
}

bool LocallyConstantFn::defined_on(const Truncation& t) const {
  if (constant_) return true;
  bool ok = true;
  for_admissible_words(t, depth_, [&](std::span<const int> w) {
    std::vector<int> key(w.begin(), w.end());
    if (table_.find(key) == table_.end()) {
      ok = false;
      return false;
    }
    return true;
  });
  return ok;
}

LocallyConstantFn LocallyConstantFn::refined(const Truncation& t, int new_depth) const {
  if (new_depth < depth_)
    throw PreconditionError("refinement must not decrease the depth");
  if (new_depth == depth_) return *this;
  std::map<std::vector<int>, double> table;
  for_admissible_words(t, new_depth, [&](std::span<const int> w) {
    table[std::vector<int>(w.begin(), w.end())] = (*this)(w);
    return true;
  });
  return from_table(new_depth, std::move(table));
}

bool LocallyConstantFn::operator==(const LocallyConstantFn& o) const {
  if (depth_ != o.depth_ || constant_ != o.constant_) return false;
  return constant_ ? value_ == o.value_ : table_ == o.table_;
}

RoofFunction::RoofFunction(LocallyConstantFn fn) : fn_(std::move(fn)) {
  tau_min_ = fn_.min_value();
  if (!(tau_min_ > 0.0))
    throw PreconditionError("roof function must be bounded away from zero");
}

bool for_admissible_words(const Truncation& t, int length,
                          const std::function<bool(std::span<const int>)>& f) {
  if (length < 1) throw PreconditionError("word length must be positive");
  std::vector<int> word;
  word.reserve(static_cast<std::size_t>(length));
  bool keep_going = true;
  std::function<void()> go = [&]() {
    if (!keep_going) return;
    if (static_cast<int>(word.size()) == length) {
      keep_going = f(std::span<const int>(word));
      return;
    }
    if (word.empty()) {
      for (int v = 0; v < t.size() && keep_going; ++v) {
        word.push_back(v);
        go();
        word.pop_back();
      }
      return;
    }
    t.for_neighbors(word.back(), [&](int j) {
      word.push_back(j);
      go();
      word.pop_back();
      return keep_going;
    });
  };
  go();
  return keep_going;
}

std::vector<std::vector<int>> admissible_words(const Truncation& t, int length,
                                               std::size_t budget) {
  std::vector<std::vector<int>> out;
  bool finished = for_admissible_words(t, length, [&](std::span<const int> w) {
    if (out.size() >= budget) return false;
    out.emplace_back(w.begin(), w.end());
    return true;
  });
  if (!finished)
    throw PreconditionError("admissible word enumeration exceeds budget of " +
                            std::to_string(budget));
  return out;
}

}  // namespace melab
