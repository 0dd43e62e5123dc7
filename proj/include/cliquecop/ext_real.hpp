#ifndef CLIQUECOP_EXT_REAL_HPP
#define CLIQUECOP_EXT_REAL_HPP

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace cliquecop {

// Extended real value: a finite double or +infinity.  Used for objective
// diagonal coefficients that absorb subproblem optima; the product with a
// scalar follows the convention 0 * inf = 0.
class ExtReal {
 public:
  ExtReal() : value_(0.0), inf_(false) {}
  ExtReal(double v) : value_(v), inf_(false) {
    if (std::isnan(v)) throw std::invalid_argument("ExtReal: NaN");
    if (std::isinf(v)) {
      if (v < 0) throw std::invalid_argument("ExtReal: -inf not representable");
      value_ = 0.0;
      inf_ = true;
    }
  }

  static ExtReal infinity() {
    ExtReal e;
    e.inf_ = true;
    return e;
  }

  bool is_infinite() const { return inf_; }
  bool is_finite() const { return !inf_; }

  // Finite value; throws on +inf.
  double finite() const {
    if (inf_) throw std::logic_error("ExtReal: value is +inf");
    return value_;
  }

  // As a plain double, mapping +inf to HUGE_VAL (for reporting only).
  double as_double() const {
    return inf_ ? std::numeric_limits<double>::infinity() : value_;
  }

  ExtReal operator+(const ExtReal& o) const {
    if (inf_ || o.inf_) return infinity();
    return ExtReal(value_ + o.value_);
  }
  ExtReal& operator+=(const ExtReal& o) { return *this = *this + o; }

  // scale * x with 0 * inf = 0.
  friend ExtReal operator*(double s, const ExtReal& x) {
    if (x.inf_) {
      if (s == 0.0) return ExtReal(0.0);
      if (s < 0.0) throw std::logic_error("ExtReal: negative * inf");
      return infinity();
    }
    return ExtReal(s * x.value_);
  }

  bool operator==(const ExtReal& o) const {
    return inf_ == o.inf_ && (inf_ || value_ == o.value_);
  }
  bool operator!=(const ExtReal& o) const { return !(*this == o); }
  bool operator<(const ExtReal& o) const {
    if (inf_) return false;
    if (o.inf_) return true;
    return value_ < o.value_;
  }
  bool operator<=(const ExtReal& o) const { return *this < o || *this == o; }
  bool operator>(const ExtReal& o) const { return o < *this; }
  bool operator>=(const ExtReal& o) const { return o <= *this; }

  friend std::ostream& operator<<(std::ostream& os, const ExtReal& x) {
    if (x.inf_) return os << "inf";
    return os << x.value_;
  }

 private:
  double value_;
  bool inf_;
};

}  // namespace cliquecop

#endif
