#pragma once

#include <doctest.h>

#include <initializer_list>

#include "coreprune/error.hpp"
#include "coreprune/point_set.hpp"

namespace support {

inline coreprune::Matrix rows(std::initializer_list<std::initializer_list<double>> values) {
  coreprune::Matrix m(static_cast<coreprune::Index>(values.size()),
                      static_cast<coreprune::Index>(values.begin()->size()));
  coreprune::Index i = 0;
  for (const auto& row : values) {
    coreprune::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

inline coreprune::Vector vec(std::initializer_list<double> values) {
  coreprune::Vector v(static_cast<coreprune::Index>(values.size()));
  coreprune::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

template <class F>
coreprune::ErrorKind error_of(F&& f) {
  try {
    f();
  } catch (const coreprune::Error& e) {
    return e.kind();
  }
  FAIL("expected coreprune::Error");
  return coreprune::ErrorKind::Io;
}

}  // namespace support
