#pragma once

#include <cctype>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#include "hslab/errors.hpp"
#include "hslab/region.hpp"
#include "hslab/tolerance.hpp"

namespace hslab {
namespace detail {

// Recursive-descent parser for the region expression grammar:
//   expr      := term ('|' term)*
//   term      := factor ('&' factor)*
//   factor    := '!' factor | '(' expr ')' | primitive
//   primitive := annulus(num, num | "inf") | disk(num, num, num)
//              | halfplane(num, num, num) | points(cplx (';' cplx)*)
//              | all | empty
//   cplx      := num [('+'|'-') num 'i']
class RegionParser {
 public:
  RegionParser(std::string src, double point_tol)
      : src_(std::move(src)), point_tol_(point_tol) {}

  Region parse() {
    Region r = parse_expr();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError("unexpected trailing input in region expression", pos_);
    return r;
  }

 private:
  std::string src_;
  std::size_t pos_ = 0;
  double point_tol_;

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  bool accept(char c) {
    if (!peek_is(c)) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!accept(c))
      throw ParseError(std::string("expected '") + c + "' in region expression",
                       pos_);
  }

  Region parse_expr() {
    Region r = parse_term();
    while (accept('|')) r = Region::union_of(r, parse_term());
    return r;
  }

  Region parse_term() {
    Region r = parse_factor();
    while (accept('&')) r = Region::intersection(r, parse_factor());
    return r;
  }

  Region parse_factor() {
    if (accept('!')) return Region::complement(parse_factor());
    if (accept('(')) {
      Region r = parse_expr();
      expect(')');
      return r;
    }
    return parse_primitive();
  }

  std::string parse_word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           std::isalpha(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    if (start == pos_)
      throw ParseError("expected a region primitive", pos_);
    return src_.substr(start, pos_ - start);
  }

  double parse_number() {
    skip_ws();
    const char* begin = src_.c_str() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("expected a number", pos_);
    pos_ += std::size_t(end - begin);
    return v;
  }

  Complex parse_complex() {
    double re = parse_number();
    skip_ws();
    if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
      std::size_t mark = pos_;
      char sign = src_[pos_];
      ++pos_;
      double im = parse_number();
      skip_ws();
      if (pos_ < src_.size() && src_[pos_] == 'i') {
        ++pos_;
        return {re, sign == '-' ? -im : im};
      }
      pos_ = mark;  // not an imaginary part; leave for the caller
    }
    return {re, 0.0};
  }

  Region parse_primitive() {
    std::size_t word_pos = pos_;
    std::string word = parse_word();
    if (word == "all") return Region::all();
    if (word == "empty") return Region::empty_set();
    expect('(');
    Region out = Region::empty_set();
    if (word == "annulus") {
      double r = parse_number();
      expect(',');
      skip_ws();
      double s;
      if (pos_ + 3 <= src_.size() && src_.compare(pos_, 3, "inf") == 0) {
        pos_ += 3;
        s = std::numeric_limits<double>::infinity();
      } else {
        s = parse_number();  // strtod also accepts "inf" spellings
      }
      out = Region::annulus(r, s);
    } else if (word == "disk") {
      double cx = parse_number();
      expect(',');
      double cy = parse_number();
      expect(',');
      double r = parse_number();
      out = Region::disk(Complex(cx, cy), r);
    } else if (word == "halfplane") {
      double nx = parse_number();
      expect(',');
      double ny = parse_number();
      expect(',');
      double c = parse_number();
      out = Region::halfplane(Complex(nx, ny), c);
    } else if (word == "points") {
      std::vector<Complex> pts;
      pts.push_back(parse_complex());
      while (accept(';')) pts.push_back(parse_complex());
      out = Region::points(pts, point_tol_);
    } else {
      throw ParseError("unknown region primitive '" + word + "'", word_pos);
    }
    expect(')');
    return out;
  }
};

}  // namespace detail

inline Region parse_region(const std::string& text,
                           const ToleranceConfig& tol = {}) {
  detail::RegionParser p(text, tol.point_match_tol);
  try {
    return p.parse();
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid region: ") + e.what());
  }
}

}  // namespace hslab
