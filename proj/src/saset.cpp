#include "sacalc/saset.hpp"

#include <cmath>
#include <sstream>

#include "sacalc/errors.hpp"

namespace sacalc {

std::string to_string(Relation r) {
  switch (r) {
    case Relation::Eq: return "=0";
    case Relation::Gt: return ">0";
    case Relation::Ge: return ">=0";
    case Relation::Lt: return "<0";
    case Relation::Le: return "<=0";
  }
  return "?";
}

Relation parse_relation(const std::string& text) {
  std::string t;
  for (char c : text) {
    if (c != ' ') t.push_back(c);
  }
  if (t == "=0" || t == "==0") return Relation::Eq;
  if (t == ">0") return Relation::Gt;
  if (t == ">=0") return Relation::Ge;
  if (t == "<0") return Relation::Lt;
  if (t == "<=0") return Relation::Le;
  throw ParseError("rel", "unknown relation '" + text + "' (expected =0, >0, >=0, <0, <=0)");
}

SignCondition::SignCondition(Polynomial p, Relation r) : poly(std::move(p)), rel(r) {
  if (poly.is_zero()) throw InvalidArgument("sign condition on the zero polynomial");
}

bool SignCondition::holds_for_sign(int s) const {
  switch (rel) {
    case Relation::Eq: return s == 0;
    case Relation::Gt: return s > 0;
    case Relation::Ge: return s >= 0;
    case Relation::Lt: return s < 0;
    case Relation::Le: return s <= 0;
  }
  return false;
}

bool SignCondition::holds(std::span<const double> x) const {
  return holds_for_sign(sgn(poly.eval_exact(x)));
}

namespace {

BoxClass classify_leaf(const SignCondition& c, std::span<const Interval> box) {
  const Interval v = c.poly.eval(box);
  switch (c.rel) {
    case Relation::Eq:
      if (v.lo == 0.0 && v.hi == 0.0) return BoxClass::AllIn;
      if (v.lo > 0.0 || v.hi < 0.0) return BoxClass::AllOut;
      return BoxClass::Mixed;
    case Relation::Gt:
      if (v.lo > 0.0) return BoxClass::AllIn;
      if (v.hi <= 0.0) return BoxClass::AllOut;
      return BoxClass::Mixed;
    case Relation::Ge:
      if (v.lo >= 0.0) return BoxClass::AllIn;
      if (v.hi < 0.0) return BoxClass::AllOut;
      return BoxClass::Mixed;
    case Relation::Lt:
      if (v.hi < 0.0) return BoxClass::AllIn;
      if (v.lo >= 0.0) return BoxClass::AllOut;
      return BoxClass::Mixed;
    case Relation::Le:
      if (v.hi <= 0.0) return BoxClass::AllIn;
      if (v.lo > 0.0) return BoxClass::AllOut;
      return BoxClass::Mixed;
  }
  return BoxClass::Mixed;
}

}  // namespace

struct SAFormula::Node {
  Kind kind;
  std::optional<SignCondition> leaf;
  std::vector<std::shared_ptr<const Node>> children;
  std::size_t dim;

  bool contains(std::span<const double> x) const {
    switch (kind) {
      case Kind::Leaf: return leaf->holds(x);
      case Kind::And:
        for (const auto& c : children) {
          if (!c->contains(x)) return false;
        }
        return true;
      case Kind::Or:
        for (const auto& c : children) {
          if (c->contains(x)) return true;
        }
        return false;
      case Kind::Not: return !children.front()->contains(x);
    }
    return false;
  }

  BoxClass classify(std::span<const Interval> box) const {
    switch (kind) {
      case Kind::Leaf: return classify_leaf(*leaf, box);
      case Kind::And: {
        bool all_in = true;
        for (const auto& c : children) {
          const BoxClass b = c->classify(box);
          if (b == BoxClass::AllOut) return BoxClass::AllOut;
          if (b != BoxClass::AllIn) all_in = false;
        }
        return all_in ? BoxClass::AllIn : BoxClass::Mixed;
      }
      case Kind::Or: {
        bool all_out = true;
        for (const auto& c : children) {
          const BoxClass b = c->classify(box);
          if (b == BoxClass::AllIn) return BoxClass::AllIn;
          if (b != BoxClass::AllOut) all_out = false;
        }
        return all_out ? BoxClass::AllOut : BoxClass::Mixed;
      }
      case Kind::Not: {
        const BoxClass b = children.front()->classify(box);
        if (b == BoxClass::AllIn) return BoxClass::AllOut;
        if (b == BoxClass::AllOut) return BoxClass::AllIn;
        return BoxClass::Mixed;
      }
    }
    return BoxClass::Mixed;
  }
};

SAFormula::SAFormula(std::shared_ptr<const Node> node, std::optional<Box> box)
    : node_(std::move(node)), box_(std::move(box)) {}

SAFormula SAFormula::leaf(Polynomial p, Relation rel) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Leaf;
  n->dim = p.num_vars();
  n->leaf.emplace(std::move(p), rel);
  return SAFormula(std::move(n));
}

namespace {

std::size_t common_dim(const std::vector<SAFormula>& parts) {
  if (parts.empty()) throw InvalidArgument("Boolean node without operands");
  const std::size_t d = parts.front().dim();
  for (const auto& p : parts) {
    if (p.dim() != d) throw DimensionMismatch("formula operands live in different dimensions");
  }
  return d;
}

}  // namespace

SAFormula SAFormula::all_of(std::vector<SAFormula> parts) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::And;
  n->dim = common_dim(parts);
  for (auto& p : parts) n->children.push_back(p.node_);
  return SAFormula(std::move(n));
}

SAFormula SAFormula::any_of(std::vector<SAFormula> parts) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Or;
  n->dim = common_dim(parts);
  for (auto& p : parts) n->children.push_back(p.node_);
  return SAFormula(std::move(n));
}

SAFormula SAFormula::negate(const SAFormula& f) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Not;
  n->dim = f.dim();
  n->children.push_back(f.node_);
  return SAFormula(std::move(n));
}

std::size_t SAFormula::dim() const { return node_->dim; }
SAFormula::Kind SAFormula::kind() const { return node_->kind; }

const SignCondition& SAFormula::condition() const {
  if (node_->kind != Kind::Leaf) throw InvalidArgument("condition() on a non-leaf formula");
  return *node_->leaf;
}

std::vector<SAFormula> SAFormula::children() const {
  std::vector<SAFormula> out;
  for (const auto& c : node_->children) out.push_back(SAFormula(c));
  return out;
}

bool SAFormula::contains(std::span<const double> x) const {
  if (x.size() != dim()) {
    throw DimensionMismatch("point of dimension " + std::to_string(x.size()) + " for a set in R^" +
                            std::to_string(dim()));
  }
  return node_->contains(x);
}

BoxClass SAFormula::classify_box(std::span<const Interval> box) const {
  if (box.size() != dim()) throw DimensionMismatch("box dimension mismatch");
  return node_->classify(box);
}

SAFormula SAFormula::with_box(Box box) const {
  if (box.size() != dim()) throw DimensionMismatch("bounding box dimension mismatch");
  for (const auto& side : box) {
    if (!(side.lo <= side.hi)) throw InvalidArgument("bounding box side with lo > hi");
  }
  // Lattice over the box enlarged by half its width on each side; lattice
  // points strictly outside the declared box must be nonmembers.
  const std::size_t m = dim();
  const int per_axis = m <= 3 ? 9 : 5;
  std::vector<int> idx(m, 0);
  std::vector<double> x(m);
  while (true) {
    bool outside = false;
    for (std::size_t i = 0; i < m; ++i) {
      const double w = box[i].hi - box[i].lo;
      const double lo = box[i].lo - 0.5 * w;
      x[i] = lo + (2.0 * w) * idx[i] / (per_axis - 1);
      if (x[i] < box[i].lo || x[i] > box[i].hi) outside = true;
    }
    if (outside && contains(x)) {
      std::ostringstream os;
      os << "member point (";
      for (std::size_t i = 0; i < m; ++i) os << (i ? ", " : "") << x[i];
      os << ") lies outside the declared bounding box";
      throw InvalidArgument(os.str());
    }
    std::size_t k = 0;
    while (k < m && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == m) break;
  }
  return SAFormula(node_, std::move(box));
}

SAFormula SAFormula::restricted_to(Box box) const {
  const std::size_t m = dim();
  if (box.size() != m) throw DimensionMismatch("bounding box dimension mismatch");
  for (const auto& side : box) {
    if (!(side.lo <= side.hi)) throw InvalidArgument("bounding box side with lo > hi");
  }
  std::vector<SAFormula> parts{SAFormula(node_)};
  for (std::size_t i = 0; i < m; ++i) {
    Polynomial xi = Polynomial::variable(m, i);
    parts.push_back(leaf(Polynomial::constant(m, Rational(box[i].lo)) - xi, Relation::Le));
    parts.push_back(leaf(xi - Polynomial::constant(m, Rational(box[i].hi)), Relation::Le));
  }
  SAFormula out = all_of(std::move(parts));
  out.box_ = std::move(box);
  return out;
}

SAFormula SAFormula::negation_normal_form() const {
  struct Builder {
    static SAFormula build(const SAFormula& f, bool neg) {
      switch (f.kind()) {
        case Kind::Leaf: {
          const auto& c = f.condition();
          if (!neg) return f;
          switch (c.rel) {
            case Relation::Eq:
              return any_of({leaf(c.poly, Relation::Lt), leaf(c.poly, Relation::Gt)});
            case Relation::Gt: return leaf(c.poly, Relation::Le);
            case Relation::Ge: return leaf(c.poly, Relation::Lt);
            case Relation::Lt: return leaf(c.poly, Relation::Ge);
            case Relation::Le: return leaf(c.poly, Relation::Gt);
          }
          return f;
        }
        case Kind::And:
        case Kind::Or: {
          std::vector<SAFormula> parts;
          for (const auto& c : f.children()) parts.push_back(build(c, neg));
          const bool conj = (f.kind() == Kind::And) != neg;
          return conj ? all_of(std::move(parts)) : any_of(std::move(parts));
        }
        case Kind::Not: return build(f.children().front(), !neg);
      }
      return f;
    }
  };
  SAFormula out = Builder::build(SAFormula(node_), false);
  out.box_ = box_;
  return out;
}

std::vector<SignCondition> SAFormula::leaves() const {
  std::vector<SignCondition> out;
  std::vector<std::shared_ptr<const Node>> stack{node_};
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    if (n->kind == Kind::Leaf) {
      out.push_back(*n->leaf);
    } else {
      for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(*it);
    }
  }
  return out;
}

}  // namespace sacalc
