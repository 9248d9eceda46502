#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

namespace sqg {

using Int = boost::multiprecision::cpp_int;
using Vec = std::vector<Int>;

// n(n-1)/2, valid for negative n as well.
inline Int binom2(const Int& n) { return n * (n - 1) / 2; }

inline Vec zero_vec(std::size_t n) { return Vec(n, Int(0)); }

inline bool is_zero_vec(const Vec& v) {
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

inline Vec add_vec(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec sub_vec(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec neg_vec(const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

inline Vec scale_vec(const Int& c, const Vec& a) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

}  // namespace sqg
