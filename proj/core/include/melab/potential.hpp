#ifndef MELAB_POTENTIAL_HPP
#define MELAB_POTENTIAL_HPP

#include <map>
#include <span>
#include <vector>

#include "melab/shift.hpp"

namespace melab {

// A function on the shift that only reads the first `depth` symbols. Stored
// either as a constant or as a table over admissible depth-d words. Locally
// constant functions have zero variation beyond their depth, so they are
// bounded with summable variations for free.
class LocallyConstantFn {
 public:
  static LocallyConstantFn constant(double value, int depth = 1);
  static LocallyConstantFn from_table(int depth, std::map<std::vector<int>, double> table);

  int depth() const { return depth_; }
  bool is_constant() const { return constant_; }

  // Evaluates on the first depth() symbols of w; w must be at least that long.
  double operator()(std::span<const int> w) const;
  double operator()(const Word& w) const { return (*this)(std::span<const int>(w.symbols)); }

  double max_abs() const;
  double min_value() const;

  // True when the function is defined on every admissible depth-d word of t.
  bool defined_on(const Truncation& t) const;

  // Exact refinement to a deeper depth: the table over admissible
  // new_depth-words of t, each reading its length-depth() prefix.
  LocallyConstantFn refined(const Truncation& t, int new_depth) const;

  const std::map<std::vector<int>, double>& table() const { return table_; }
  bool operator==(const LocallyConstantFn& o) const;

 private:
  int depth_ = 1;
  bool constant_ = true;
  double value_ = 0.0;
  std::map<std::vector<int>, double> table_;
};

// Bounded locally constant potential (the integrand of free energies and the
// weight of pressure matrices).
class Potential {
 public:
  explicit Potential(LocallyConstantFn fn) : fn_(std::move(fn)) {}
  static Potential constant(double value, int depth = 1) {
    return Potential(LocallyConstantFn::constant(value, depth));
  }
  static Potential from_table(int depth, std::map<std::vector<int>, double> table) {
    return Potential(LocallyConstantFn::from_table(depth, std::move(table)));
  }

  int depth() const { return fn_.depth(); }
  double bound() const { return fn_.max_abs(); }
  double operator()(std::span<const int> w) const { return fn_(w); }
  double operator()(const Word& w) const { return fn_(w); }
  const LocallyConstantFn& fn() const { return fn_; }
  Potential refined(const Truncation& t, int new_depth) const {
    return Potential(fn_.refined(t, new_depth));
  }

 private:
  LocallyConstantFn fn_;
};

// Positive locally constant roof, bounded away from zero.
class RoofFunction {
 public:
  explicit RoofFunction(LocallyConstantFn fn);
  static RoofFunction constant(double value, int depth = 1) {
    return RoofFunction(LocallyConstantFn::constant(value, depth));
  }
  static RoofFunction from_table(int depth, std::map<std::vector<int>, double> table) {
    return RoofFunction(LocallyConstantFn::from_table(depth, std::move(table)));
  }

  int depth() const { return fn_.depth(); }
  double tau_min() const { return tau_min_; }
  double operator()(std::span<const int> w) const { return fn_(w); }
  double operator()(const Word& w) const { return fn_(w); }
  const LocallyConstantFn& fn() const { return fn_; }
  RoofFunction refined(const Truncation& t, int new_depth) const {
    return RoofFunction(fn_.refined(t, new_depth));
  }
  bool operator==(const RoofFunction& o) const { return fn_ == o.fn_; }

 private:
  LocallyConstantFn fn_;
  double tau_min_ = 0.0;
};

// Enumerates admissible words of the given length in lexicographic order,
// invoking f(word) for each; f returns false to stop early. Returns false if
// stopped early.
bool for_admissible_words(const Truncation& t, int length,
                          const std::function<bool(std::span<const int>)>& f);

// All admissible words of the given length (budgeted).
std::vector<std::vector<int>> admissible_words(const Truncation& t, int length,
                                               std::size_t budget = 1'000'000);

}  // namespace melab

#endif  // MELAB_POTENTIAL_HPP
