#pragma once

#include <initializer_list>
#include <ostream>
#include <vector>

#include "ncg/ncg.hpp"

namespace th {

using E = ncg::ExactComplex;
using F = ncg::Float;

template <class S>
ncg::Matrix<S> mat(std::initializer_list<std::initializer_list<long>> rows) {
    size_t r = rows.size(), c = r ? rows.begin()->size() : 0;
    ncg::Matrix<S> m(r, c);
    size_t i = 0;
    for (const auto& row : rows) {
        size_t j = 0;
        for (long v : row) m(i, j++) = ncg::scalar_traits<S>::from_int(v);
        ++i;
    }
    return m;
}

template <class S>
ncg::Matrix<S> diag(std::initializer_list<long> d) {
    std::vector<S> v;
    for (long x : d) v.push_back(ncg::scalar_traits<S>::from_int(x));
    return ncg::Matrix<S>::diagonal(v);
}

template <class S>
ncg::AlgebraElement<S> elem(std::vector<size_t> blocks, size_t m, std::vector<ncg::Matrix<S>> mats) {
    return ncg::AlgebraElement<S>(ncg::MultiMatrixAlgebra(std::move(blocks)), m, std::move(mats));
}

template <class S>
S num(long v) {
    return ncg::scalar_traits<S>::from_int(v);
}

template <class S>
S cplx(long re, long im) {
    return ncg::scalar_traits<S>::from_rational(ncg::Rational(re), ncg::Rational(im));
}

template <class S>
ncg::K0TensorC<S> k0c(std::initializer_list<long> v) {
    ncg::K0TensorC<S> out;
    for (long x : v) out.coeffs.push_back(num<S>(x));
    return out;
}

}  // namespace th

namespace ncg {

// readable gtest output
template <class S>
void PrintTo(const HCClass<S>& c, std::ostream* os) {
    *os << "HC_" << c.degree << "[";
    for (size_t i = 0; i < c.coords.size(); ++i) *os << (i ? ", " : "") << scalar_traits<S>::to_string(c.coords[i]);
    *os << "]";
}

}  // namespace ncg
