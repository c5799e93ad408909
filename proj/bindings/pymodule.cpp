#include <pybind11/pybind11.h>

#include "quatheta/version.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_quatheta, m) {
  m.doc() = "quaternionic theta elements and anticyclotomic p-adic L-values";
  m.def("version", &qth::version);
}
