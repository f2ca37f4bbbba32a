#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "hslab/complex_matrix.hpp"
#include "hslab/errors.hpp"

namespace hslab {

namespace detail {
inline std::string fmt_num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace detail

// Borel subsets of the plane, closed under complement/union/intersection.
// Primitives are closed sets; open sets arise through complements.
class Region {
 public:
  struct Annulus {
    double r, s;  // r <= |z| <= s, s may be +inf
    bool closed;
  };
  struct Disk {
    Complex center;
    double radius;
    bool closed;
  };
  struct HalfPlane {
    Complex normal;  // unit; membership: Re(conj(normal) z) <= offset
    double offset;
    bool closed;
  };
  struct PointSet {
    std::vector<Complex> points;
    double match_tol;
  };
  struct All {};
  struct Empty {};
  struct Complement {
    std::shared_ptr<const Region> inner;
  };
  struct Union {
    std::shared_ptr<const Region> lhs, rhs;
  };
  struct Intersection {
    std::shared_ptr<const Region> lhs, rhs;
  };

  static Region annulus(double r, double s, bool closed = true) {
    if (!(r >= 0) || !(s >= r)) throw DomainError("annulus: need 0 <= r <= s");
    return Region(Annulus{r, s, closed});
  }
  static Region disk(Complex center, double radius, bool closed = true) {
    if (!(radius >= 0)) throw DomainError("disk: radius must be >= 0");
    return Region(Disk{center, radius, closed});
  }
  static Region halfplane(Complex normal, double offset, bool closed = true) {
    double n = std::abs(normal);
    if (!(n > 0)) throw DomainError("halfplane: zero normal");
    return Region(HalfPlane{normal / n, offset / n, closed});
  }
  static Region points(std::vector<Complex> pts, double match_tol) {
    if (pts.empty()) throw DomainError("points: need at least one point");
    if (!(match_tol >= 0)) throw DomainError("points: match_tol must be >= 0");
    std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return Region(PointSet{std::move(pts), match_tol});
  }
  static Region all() { return Region(All{}); }
  static Region empty_set() { return Region(Empty{}); }
  static Region complement(Region r) {
    return Region(Complement{std::make_shared<const Region>(std::move(r))});
  }
  static Region union_of(Region a, Region b) {
    return Region(Union{std::make_shared<const Region>(std::move(a)),
                        std::make_shared<const Region>(std::move(b))});
  }
  static Region intersection(Region a, Region b) {
    return Region(Intersection{std::make_shared<const Region>(std::move(a)),
                               std::make_shared<const Region>(std::move(b))});
  }

  bool contains(Complex z) const { return contains_with_slack(z, 0.0); }

  // Membership with the boundary displaced outward by `slack` (inward when
  // negative). Complements flip the sign, so closure/interior tests compose.
  bool contains_with_slack(Complex z, double slack) const {
    return std::visit(
        [&](const auto& node) -> bool { return eval(node, z, slack); }, node_);
  }

  // True when z sits inside the ambiguity band around a PointSet boundary
  // anywhere in the expression tree.
  bool point_boundary_ambiguous(Complex z, double guard_rel) const {
    if (const auto* p = std::get_if<PointSet>(&node_)) {
      for (Complex q : p->points) {
        double d = std::abs(z - q);
        if (std::abs(d - p->match_tol) < guard_rel * std::max(p->match_tol, 1e-300))
          return true;
      }
      return false;
    }
    if (const auto* c = std::get_if<Complement>(&node_))
      return c->inner->point_boundary_ambiguous(z, guard_rel);
    if (const auto* u = std::get_if<Union>(&node_))
      return u->lhs->point_boundary_ambiguous(z, guard_rel) ||
             u->rhs->point_boundary_ambiguous(z, guard_rel);
    if (const auto* i = std::get_if<Intersection>(&node_))
      return i->lhs->point_boundary_ambiguous(z, guard_rel) ||
             i->rhs->point_boundary_ambiguous(z, guard_rel);
    return false;
  }

  bool near_boundary(Complex z, double delta) const {
    return contains_with_slack(z, delta) != contains_with_slack(z, -delta);
  }

  std::string to_string() const {
    using detail::fmt_num;
    if (const auto* a = std::get_if<Annulus>(&node_)) {
      std::string s = std::isinf(a->s) ? "inf" : fmt_num(a->s);
      return "annulus(" + fmt_num(a->r) + "," + s + ")";
    }
    if (const auto* d = std::get_if<Disk>(&node_))
      return "disk(" + fmt_num(d->center.real()) + "," + fmt_num(d->center.imag()) +
             "," + fmt_num(d->radius) + ")";
    if (const auto* h = std::get_if<HalfPlane>(&node_))
      return "halfplane(" + fmt_num(h->normal.real()) + "," +
             fmt_num(h->normal.imag()) + "," + fmt_num(h->offset) + ")";
    if (const auto* p = std::get_if<PointSet>(&node_)) {
      std::string s = "points(";
      for (std::size_t i = 0; i < p->points.size(); ++i) {
        if (i) s += ";";
        s += fmt_num(p->points[i].real());
        double im = p->points[i].imag();
        if (im != 0) s += (im > 0 ? "+" : "") + fmt_num(im) + "i";
      }
      return s + ")";
    }
    if (std::holds_alternative<All>(node_)) return "all";
    if (std::holds_alternative<Empty>(node_)) return "empty";
    if (const auto* c = std::get_if<Complement>(&node_))
      return "!" + c->inner->to_string();
    if (const auto* u = std::get_if<Union>(&node_))
      return "(" + u->lhs->to_string() + "|" + u->rhs->to_string() + ")";
    const auto& i = std::get<Intersection>(node_);
    return "(" + i.lhs->to_string() + "&" + i.rhs->to_string() + ")";
  }

  const PointSet* as_point_set() const { return std::get_if<PointSet>(&node_); }
  const Annulus* as_annulus() const { return std::get_if<Annulus>(&node_); }

 private:
  using Node = std::variant<Annulus, Disk, HalfPlane, PointSet, All, Empty,
                            Complement, Union, Intersection>;
  explicit Region(Node n) : node_(std::move(n)) {}

  static bool le(double lhs, double rhs, bool closed) {
    return closed ? lhs <= rhs : lhs < rhs;
  }
  static bool eval(const Annulus& a, Complex z, double slack) {
    double m = std::abs(z);
    return le(a.r - slack, m, a.closed) && le(m, a.s + slack, a.closed);
  }
  static bool eval(const Disk& d, Complex z, double slack) {
    return le(std::abs(z - d.center), d.radius + slack, d.closed);
  }
  static bool eval(const HalfPlane& h, Complex z, double slack) {
    return le((std::conj(h.normal) * z).real(), h.offset + slack, h.closed);
  }
  static bool eval(const PointSet& p, Complex z, double slack) {
    for (Complex q : p.points)
      if (std::abs(z - q) <= p.match_tol + slack) return true;
    return false;
  }
  static bool eval(const All&, Complex, double) { return true; }
  static bool eval(const Empty&, Complex, double) { return false; }
  static bool eval(const Complement& c, Complex z, double slack) {
    return !c.inner->contains_with_slack(z, -slack);
  }
  static bool eval(const Union& u, Complex z, double slack) {
    return u.lhs->contains_with_slack(z, slack) ||
           u.rhs->contains_with_slack(z, slack);
  }
  static bool eval(const Intersection& i, Complex z, double slack) {
    return i.lhs->contains_with_slack(z, slack) &&
           i.rhs->contains_with_slack(z, slack);
  }

  Node node_;
};

}  // namespace hslab
