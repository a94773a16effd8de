#include "nmpz/rational.hpp"

#include "nmpz/error.hpp"

#include <cmath>

namespace nmpz {

namespace {
constexpr double kPoleRel = 1e-12;
}

RationalFunction::RationalFunction() : num_(), den_(Polynomial::constant(1.0)) {}

RationalFunction::RationalFunction(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) fail_input("RationalFunction: denominator is the zero polynomial");
}

RationalFunction RationalFunction::constant(Complex c) {
    return RationalFunction(Polynomial::constant(c), Polynomial::constant(1.0));
}

bool RationalFunction::is_pole(Complex s) const {
    const double bound = den_.eval_magnitude_bound(s);
    return std::abs(den_.eval(s)) <= kPoleRel * std::max(bound, 1e-300);
}

Complex RationalFunction::eval(Complex s) const {
    const Complex d = den_.eval(s);
    const double bound = den_.eval_magnitude_bound(s);
    if (std::abs(d) <= kPoleRel * std::max(bound, 1e-300))
        fail_numerical("RationalFunction::eval: evaluation at a pole");
    return num_.eval(s) / d;
}

RationalFunction RationalFunction::operator+(const RationalFunction& o) const {
    return RationalFunction(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RationalFunction RationalFunction::operator-(const RationalFunction& o) const {
    return RationalFunction(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}

RationalFunction RationalFunction::operator*(const RationalFunction& o) const {
    return RationalFunction(num_ * o.num_, den_ * o.den_);
}

RationalFunction RationalFunction::operator/(const RationalFunction& o) const {
    if (o.num_.is_zero()) fail_input("RationalFunction: division by the zero function");
    return RationalFunction(num_ * o.den_, den_ * o.num_);
}

RationalFunction RationalFunction::operator-() const { return RationalFunction(-num_, den_); }

} // namespace nmpz
