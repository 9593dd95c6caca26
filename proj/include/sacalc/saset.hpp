#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sacalc/interval.hpp"
#include "sacalc/polynomial.hpp"

namespace sacalc {

enum class Relation { Eq, Gt, Ge, Lt, Le };

std::string to_string(Relation r);
Relation parse_relation(const std::string& text);

struct SignCondition {
  Polynomial poly;
  Relation rel;

  SignCondition(Polynomial p, Relation r);
  /// Exact sign test on the rational value of x.
  bool holds(std::span<const double> x) const;
  bool holds_for_sign(int sign) const;
};

enum class BoxClass { AllIn, AllOut, Mixed };

using Box = std::vector<Interval>;

/// Boolean formula over polynomial sign conditions on R^dim, optionally with a
/// declared bounding box that contains the set.
class SAFormula {
 public:
  enum class Kind { Leaf, And, Or, Not };

  static SAFormula leaf(Polynomial p, Relation rel);
  static SAFormula all_of(std::vector<SAFormula> parts);
  static SAFormula any_of(std::vector<SAFormula> parts);
  static SAFormula negate(const SAFormula& f);

  std::size_t dim() const;
  Kind kind() const;
  const SignCondition& condition() const;  // Leaf only
  std::vector<SAFormula> children() const;

  const std::optional<Box>& box() const { return box_; }
  /// Declares a bounding box; throws when a sampled member point lies outside it.
  SAFormula with_box(Box box) const;
  /// Intersection with a box, which becomes the declared box (truncation of
  /// sets that are only locally bounded).
  SAFormula restricted_to(Box box) const;

  bool contains(std::span<const double> x) const;
  BoxClass classify_box(std::span<const Interval> box) const;

  /// Equivalent formula with NOT pushed onto leaves by relation dualization
  /// (NOT(p >= 0) is p < 0, NOT(p = 0) is p < 0 or p > 0).
  SAFormula negation_normal_form() const;

  /// Leaves in depth-first order.
  std::vector<SignCondition> leaves() const;

 private:
  struct Node;
  explicit SAFormula(std::shared_ptr<const Node> node, std::optional<Box> box = std::nullopt);

  std::shared_ptr<const Node> node_;
  std::optional<Box> box_;
};

/// Member/nonmember, the classify_point operation.
inline bool classify_point(const SAFormula& f, std::span<const double> x) { return f.contains(x); }

}  // namespace sacalc
