#pragma once

// Scalar backends.
//
// The exact backend works in Q(sqrt3, i): complex numbers whose real and
// imaginary parts are a + b*sqrt3 with a, b rational. This contains the
// Gaussian rationals and every 12th root of unity, so the characters of Z/2,
// Z/3, Z/4, Z/6, Z/12 and S3 are exact. The float backend is
// std::complex<double> compared within ncg::epsilon().

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <concepts>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncg/config.hpp"

namespace ncg {

using Rational = mpq_class;
using Float = std::complex<double>;

inline const double kSqrt3 = std::sqrt(3.0);

/// p/q in canonical form.
inline Rational make_rational(long p, long q) {
    if (q == 0) throw DomainError("zero denominator");
    Rational r(p, q);
    r.canonicalize();
    return r;
}

/// a + b*sqrt3 with a, b rational.
class QuadSqrt3 {
public:
    QuadSqrt3() = default;
    QuadSqrt3(long v) : a_(v) {}
    QuadSqrt3(Rational a, Rational b = 0) : a_(std::move(a)), b_(std::move(b)) {}

    static QuadSqrt3 sqrt3() { return {Rational(0), Rational(1)}; }

    const Rational& rational_part() const { return a_; }
    const Rational& sqrt3_part() const { return b_; }

    bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
    bool is_rational() const { return sgn(b_) == 0; }

    int sign() const {
        int sa = sgn(a_), sb = sgn(b_);
        if (sb == 0) return sa;
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        // opposite signs: compare a^2 with 3 b^2
        Rational a2 = a_ * a_;
        Rational b2 = 3 * b_ * b_;
        int c = cmp(a2, b2);
        if (c == 0) return 0;
        return c > 0 ? sa : sb;
    }

    double to_double() const { return a_.get_d() + b_.get_d() * kSqrt3; }

    QuadSqrt3 operator-() const { return {Rational(-a_), Rational(-b_)}; }
    QuadSqrt3& operator+=(const QuadSqrt3& o) {
        a_ += o.a_;
        b_ += o.b_;
        return *this;
    }
    QuadSqrt3& operator-=(const QuadSqrt3& o) {
        a_ -= o.a_;
        b_ -= o.b_;
        return *this;
    }
    QuadSqrt3& operator*=(const QuadSqrt3& o) {
        if (o.is_rational()) {
            a_ *= o.a_;
            b_ *= o.a_;
            return *this;
        }
        Rational na = a_ * o.a_ + 3 * b_ * o.b_;
        Rational nb = a_ * o.b_ + b_ * o.a_;
        a_ = std::move(na);
        b_ = std::move(nb);
        return *this;
    }
    QuadSqrt3& operator*=(const Rational& r) {
        a_ *= r;
        b_ *= r;
        return *this;
    }
    QuadSqrt3 inverse() const {
        Rational n = a_ * a_ - 3 * b_ * b_;
        if (sgn(n) == 0) throw DomainError("division by zero in Q(sqrt3)");
        return {Rational(a_ / n), Rational(-b_ / n)};
    }
    QuadSqrt3& operator/=(const QuadSqrt3& o) {
        if (o.is_rational()) {
            if (sgn(o.a_) == 0) throw DomainError("division by zero in Q(sqrt3)");
            a_ /= o.a_;
            b_ /= o.a_;
            return *this;
        }
        return *this *= o.inverse();
    }

    friend QuadSqrt3 operator+(QuadSqrt3 x, const QuadSqrt3& y) { return x += y; }
    friend QuadSqrt3 operator-(QuadSqrt3 x, const QuadSqrt3& y) { return x -= y; }
    friend QuadSqrt3 operator*(QuadSqrt3 x, const QuadSqrt3& y) { return x *= y; }
    friend QuadSqrt3 operator/(QuadSqrt3 x, const QuadSqrt3& y) { return x /= y; }
    friend bool operator==(const QuadSqrt3& x, const QuadSqrt3& y) {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend int compare(const QuadSqrt3& x, const QuadSqrt3& y) { return (x - y).sign(); }
    friend bool operator<(const QuadSqrt3& x, const QuadSqrt3& y) { return compare(x, y) < 0; }

    /// floor(x) as an integer.
    mpz_class floor() const {
        if (is_rational()) {
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), a_.get_num_mpz_t(), a_.get_den_mpz_t());
            return q;
        }
        mpz_class k(std::floor(to_double()));
        while (compare(*this, QuadSqrt3(Rational(k))) < 0) k -= 1;
        while (compare(*this, QuadSqrt3(Rational(k + 1))) >= 0) k += 1;
        return k;
    }

    std::string to_string() const;
    static QuadSqrt3 parse(const std::string& text);

private:
    Rational a_{0};
    Rational b_{0};
};

int compare(const QuadSqrt3& x, const QuadSqrt3& y);

namespace detail {

inline std::string strip(std::string s) {
    size_t b = s.find_first_not_of(" \t");
    size_t e = s.find_last_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

inline Rational parse_rational(std::string s) {
    s = strip(s);
    if (!s.empty() && s[0] == '+') s = s.substr(1);
    if (s.empty()) throw ValidationError("empty rational literal");
    for (char c : s)
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-'))
            throw ValidationError("malformed rational literal '" + s + "'");
    Rational r;
    if (r.set_str(s, 10) != 0) throw ValidationError("malformed rational literal '" + s + "'");
    if (r.get_den() == 0) throw ValidationError("zero denominator in '" + s + "'");
    r.canonicalize();
    return r;
}

// Coefficient of a term like "3/2*sqrt3", "sqrt3", "-sqrt3", "sqrt3/2".
inline Rational parse_sqrt3_coefficient(std::string s) {
    s = strip(s);
    size_t pos = s.find("sqrt3");
    std::string before = strip(s.substr(0, pos));
    std::string after = strip(s.substr(pos + 5));
    Rational coef = 1;
    if (!before.empty()) {
        if (before.back() == '*') before.pop_back();
        before = strip(before);
        if (before == "-")
            coef = -1;
        else if (before == "+" || before.empty())
            coef = 1;
        else
            coef = parse_rational(before);
    }
    if (!after.empty()) {
        if (after[0] != '/') throw ValidationError("malformed sqrt3 term '" + s + "'");
        coef /= parse_rational(after.substr(1));
    }
    return coef;
}

}  // namespace detail

inline QuadSqrt3 QuadSqrt3::parse(const std::string& raw) {
    std::string s = detail::strip(raw);
    if (s.find("sqrt3") == std::string::npos) return {detail::parse_rational(s), Rational(0)};
    // split into at most two signed terms
    size_t split = std::string::npos;
    for (size_t i = 1; i < s.size(); ++i)
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != '/' && s[i - 1] != '*') split = i;
    std::vector<std::string> terms;
    if (split == std::string::npos)
        terms = {s};
    else
        terms = {s.substr(0, split), s.substr(split)};
    Rational a = 0, b = 0;
    for (const auto& t : terms) {
        if (t.find("sqrt3") != std::string::npos)
            b += detail::parse_sqrt3_coefficient(t);
        else
            a += detail::parse_rational(t);
    }
    return {a, b};
}

inline std::string QuadSqrt3::to_string() const {
    if (is_rational()) return a_.get_str();
    std::string tail = abs(b_) == 1 ? std::string("sqrt3") : Rational(abs(b_)).get_str() + "*sqrt3";
    if (sgn(a_) == 0) return (sgn(b_) < 0 ? "-" : "") + tail;
    return a_.get_str() + (sgn(b_) < 0 ? "-" : "+") + tail;
}

/// Complex number with real and imaginary parts in Q(sqrt3).
class ExactComplex {
public:
    ExactComplex() = default;
    ExactComplex(long v) : re_(v) {}
    ExactComplex(QuadSqrt3 re, QuadSqrt3 im = {}) : re_(std::move(re)), im_(std::move(im)) {}
    ExactComplex(const Rational& re, const Rational& im = 0) : re_(re), im_(im) {}

    static ExactComplex i() { return {QuadSqrt3(0), QuadSqrt3(1)}; }

    const QuadSqrt3& re() const { return re_; }
    const QuadSqrt3& im() const { return im_; }

    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    bool is_real() const { return im_.is_zero(); }
    bool is_gaussian_rational() const { return re_.is_rational() && im_.is_rational(); }

    ExactComplex conj() const { return {re_, -im_}; }
    QuadSqrt3 norm2() const { return re_ * re_ + im_ * im_; }
    Float to_complex() const { return {re_.to_double(), im_.to_double()}; }

    ExactComplex operator-() const { return {-re_, -im_}; }
    ExactComplex& operator+=(const ExactComplex& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    ExactComplex& operator-=(const ExactComplex& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    ExactComplex& operator*=(const ExactComplex& o) {
        if (o.im_.is_zero()) {
            re_ *= o.re_;
            im_ *= o.re_;
            return *this;
        }
        if (im_.is_zero()) {
            QuadSqrt3 r = re_;
            re_ = r * o.re_;
            im_ = r * o.im_;
            return *this;
        }
        QuadSqrt3 nr = re_ * o.re_ - im_ * o.im_;
        QuadSqrt3 ni = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(nr);
        im_ = std::move(ni);
        return *this;
    }
    ExactComplex& operator*=(const Rational& r) {
        re_ *= r;
        im_ *= r;
        return *this;
    }
    ExactComplex inverse() const {
        QuadSqrt3 n = norm2();
        if (n.is_zero()) throw DomainError("division by zero");
        QuadSqrt3 inv = n.inverse();
        return {re_ * inv, -(im_ * inv)};
    }
    ExactComplex& operator/=(const ExactComplex& o) {
        if (o.im_.is_zero()) {
            re_ /= o.re_;
            im_ /= o.re_;
            return *this;
        }
        return *this *= o.inverse();
    }

    friend ExactComplex operator+(ExactComplex x, const ExactComplex& y) { return x += y; }
    friend ExactComplex operator-(ExactComplex x, const ExactComplex& y) { return x -= y; }
    friend ExactComplex operator*(ExactComplex x, const ExactComplex& y) { return x *= y; }
    friend ExactComplex operator*(ExactComplex x, const Rational& r) { return x *= r; }
    friend ExactComplex operator/(ExactComplex x, const ExactComplex& y) { return x /= y; }
    friend bool operator==(const ExactComplex& x, const ExactComplex& y) {
        return x.re_ == y.re_ && x.im_ == y.im_;
    }

    std::string to_string() const {
        if (im_.is_zero()) return re_.to_string();
        return "(" + re_.to_string() + ", " + im_.to_string() + ")";
    }

private:
    QuadSqrt3 re_;
    QuadSqrt3 im_;
};

namespace detail {

// Best rational approximation with denominator <= max_den (continued fractions).
inline std::optional<Rational> best_rational(double x, long max_den, double tol) {
    if (!std::isfinite(x)) return std::nullopt;
    double v = x;
    long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int it = 0; it < 64; ++it) {
        double a = std::floor(v);
        if (std::abs(a) > 1e15) break;
        long ai = static_cast<long>(a);
        long p2 = ai * p1 + p0;
        long q2 = ai * q1 + q0;
        if (q2 > max_den) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        if (std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= tol)
            return make_rational(p1, q1);
        double frac = v - a;
        if (frac < 1e-300) break;
        v = 1.0 / frac;
    }
    if (q1 != 0 && std::abs(x - static_cast<double>(p1) / static_cast<double>(q1)) <= tol) {
        return make_rational(p1, q1);
    }
    return std::nullopt;
}

}  // namespace detail

/// Recognize a float as a + b*sqrt3 with small denominators, or nothing.
/// Low-height forms are tried first so a value like sqrt3/2 is not mistaken
/// for a rational convergent with a huge denominator.
inline std::optional<QuadSqrt3> recognize_quad(double x, double tol = 1e-10) {
    double t = tol * std::max(1.0, std::abs(x));
    if (auto r = detail::best_rational(x, 1000, t)) return QuadSqrt3(*r, Rational(0));
    if (auto r = detail::best_rational(x / kSqrt3, 1000, t)) return QuadSqrt3(Rational(0), *r);
    for (long q : {2L, 3L, 4L, 6L, 12L}) {
        for (long k = -8 * q; k <= 8 * q; ++k) {
            if (k == 0) continue;
            Rational b = make_rational(k, q);
            double rem = x - b.get_d() * kSqrt3;
            if (auto r = detail::best_rational(rem, 1000, t)) return QuadSqrt3(*r, b);
        }
    }
    if (auto r = detail::best_rational(x, 10000, t)) return QuadSqrt3(*r, Rational(0));
    return std::nullopt;
}

inline std::optional<ExactComplex> recognize_exact(Float z, double tol = 1e-10) {
    auto re = recognize_quad(z.real(), tol);
    if (!re) return std::nullopt;
    auto im = recognize_quad(z.imag(), tol);
    if (!im) return std::nullopt;
    return ExactComplex(*re, *im);
}

// exp(2 pi i k / n) for n dividing 12.
inline std::optional<ExactComplex> exact_root_of_unity(long k, long n) {
    if (n <= 0 || 12 % n != 0) return std::nullopt;
    long j = ((k * (12 / n)) % 12 + 12) % 12;  // multiples of 30 degrees
    // cos(30 j) = cos_half/2 + (cos_sqrt_half/2) * sqrt3
    static const long cos_half[12] = {2, 0, 1, 0, -1, 0, -2, 0, -1, 0, 1, 0};
    static const long cos_sqrt_half[12] = {0, 1, 0, 0, 0, -1, 0, -1, 0, 0, 0, 1};
    auto cosv = [&](long idx) {
        return QuadSqrt3(make_rational(cos_half[idx], 2), make_rational(cos_sqrt_half[idx], 2));
    };
    QuadSqrt3 c = cosv(j);
    QuadSqrt3 s = cosv(((3 - j) % 12 + 12) % 12);  // sin(x) = cos(90 - x)
    return ExactComplex(c, s);
}

/// Uniform interface over the scalar backends.
template <class S>
struct scalar_traits;

template <>
struct scalar_traits<ExactComplex> {
    static constexpr bool is_exact = true;
    static constexpr const char* name = "exact";
    static ExactComplex zero() { return {}; }
    static ExactComplex one() { return ExactComplex(1L); }
    static ExactComplex from_int(long v) { return ExactComplex(v); }
    static ExactComplex from_rational(const Rational& re, const Rational& im = 0) { return {re, im}; }
    static ExactComplex from_quad(const QuadSqrt3& re, const QuadSqrt3& im = {}) { return {re, im}; }
    static ExactComplex imag_unit() { return ExactComplex::i(); }
    static ExactComplex conj(const ExactComplex& x) { return x.conj(); }
    static bool is_zero(const ExactComplex& x) { return x.is_zero(); }
    static bool equal(const ExactComplex& a, const ExactComplex& b) { return a == b; }
    static Float to_complex(const ExactComplex& x) { return x.to_complex(); }
    static double abs(const ExactComplex& x) { return std::abs(x.to_complex()); }
    static ExactComplex scale(ExactComplex x, const Rational& r) { return x *= r; }
    static int compare(const ExactComplex& a, const ExactComplex& b) {
        int c = ncg::compare(a.re(), b.re());
        return c != 0 ? c : ncg::compare(a.im(), b.im());
    }
    // (floor(re * 2^n), floor(im * 2^n))
    static std::pair<long long, long long> dyadic_cell(const ExactComplex& x, unsigned n) {
        Rational scale = 1;
        mpq_mul_2exp(scale.get_mpq_t(), scale.get_mpq_t(), n);
        QuadSqrt3 r = x.re(), i = x.im();
        r *= scale;
        i *= scale;
        return {r.floor().get_si(), i.floor().get_si()};
    }
    static std::optional<ExactComplex> root_of_unity(long k, long n) { return exact_root_of_unity(k, n); }
    static std::string to_string(const ExactComplex& x) { return x.to_string(); }
};

template <>
struct scalar_traits<Float> {
    static constexpr bool is_exact = false;
    static constexpr const char* name = "float";
    static Float zero() { return {}; }
    static Float one() { return {1.0, 0.0}; }
    static Float from_int(long v) { return {static_cast<double>(v), 0.0}; }
    static Float from_rational(const Rational& re, const Rational& im = 0) { return {re.get_d(), im.get_d()}; }
    static Float from_quad(const QuadSqrt3& re, const QuadSqrt3& im = {}) {
        return {re.to_double(), im.to_double()};
    }
    static Float imag_unit() { return {0.0, 1.0}; }
    static Float conj(const Float& x) { return std::conj(x); }
    static bool is_zero(const Float& x) { return std::abs(x) <= epsilon(); }
    static bool equal(const Float& a, const Float& b) { return std::abs(a - b) <= epsilon(); }
    static Float to_complex(const Float& x) { return x; }
    static double abs(const Float& x) { return std::abs(x); }
    static Float scale(const Float& x, const Rational& r) { return x * r.get_d(); }
    static int compare(const Float& a, const Float& b) {
        if (a.real() < b.real()) return -1;
        if (a.real() > b.real()) return 1;
        if (a.imag() < b.imag()) return -1;
        if (a.imag() > b.imag()) return 1;
        return 0;
    }
    static std::pair<long long, long long> dyadic_cell(const Float& x, unsigned n) {
        double s = std::ldexp(1.0, static_cast<int>(n));
        return {static_cast<long long>(std::floor(x.real() * s)),
                static_cast<long long>(std::floor(x.imag() * s))};
    }
    static std::optional<Float> root_of_unity(long k, long n) {
        if (n <= 0) return std::nullopt;
        return std::polar(1.0, 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(n));
    }
    static std::string to_string(const Float& x) {
        return "(" + std::to_string(x.real()) + ", " + std::to_string(x.imag()) + ")";
    }
};

// Rationals are used internally for the cyclic complexes, which are defined over Q.
template <>
struct scalar_traits<Rational> {
    static constexpr bool is_exact = true;
    static constexpr const char* name = "rational";
    static Rational zero() { return 0; }
    static Rational one() { return 1; }
    static Rational from_int(long v) { return v; }
    static Rational conj(const Rational& x) { return x; }
    static bool is_zero(const Rational& x) { return sgn(x) == 0; }
    static bool equal(const Rational& a, const Rational& b) { return a == b; }
    static Float to_complex(const Rational& x) { return {x.get_d(), 0.0}; }
    static double abs(const Rational& x) { return std::abs(x.get_d()); }
    static Rational scale(const Rational& x, const Rational& r) { return x * r; }
    static int compare(const Rational& a, const Rational& b) { return cmp(a, b); }
    static std::string to_string(const Rational& x) { return x.get_str(); }
};

template <class S>
concept ComplexScalar = std::same_as<S, ExactComplex> || std::same_as<S, Float>;

template <class S>
inline S sign_power(long k) {
    return scalar_traits<S>::from_int(k % 2 == 0 ? 1 : -1);
}

}  // namespace ncg
