#pragma once

// Reference computations that share no code path with the solvers they check.

#include "masplit/matfield.hpp"

namespace masplit::oracles {

struct HyperbolaMinimum {
  double x = 0.0;
  double y = 0.0;
  double distance = 0.0;
};

/// Closest point to (m1, m2) on {(t, f/t)}: dense log-spaced search over
/// t in [t_min, t_max] followed by golden-section refinement around the best
/// sample.
HyperbolaMinimum hyperbola_search(double m1, double m2, double f, int samples = 1'000'000,
                                  double t_min = 1e-3, double t_max = 1e3);

struct MatrixMinimum {
  Sym2 m;  // the minimizing spd matrix with det m = f
  double distance = 0.0;
};

/// Closest spd M with det M = f to the matrix target, searched directly over
/// matrix entries M = [[p, q], [q, (f + q^2) / p]], p > 0: coarse grid then
/// compass search.
MatrixMinimum matrix_entry_search(const Sym2& target, double f, int grid = 300);

/// Central finite difference of project_point(., f) at y along h.
Sym2 fd_projection_derivative(const Sym2& y, double f, const Sym2& h, double step = 1e-5);

}  // namespace masplit::oracles
