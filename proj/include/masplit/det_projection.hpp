#pragma once

#include "masplit/matfield.hpp"

namespace masplit {

/// Closest point on the branch {x*y = f, x, y > 0} to the eigenvalue pair (m1, m2).
struct HyperbolaProjection {
  double x = 0.0;
  double y = 0.0;
  double mu = 0.0;  // Lagrange multiplier: x - m1 = mu*y, y - m2 = mu*x
  int iterations = 0;
  double residual = 0.0;  // |x*y - f|
  bool tie_broken = false;
};

enum class TiePolicy {
  Reject,  // throw AmbiguousProjection on the medial axis
  Break,   // pick the minimizer aligned with the canonical eigenbasis
};

struct ProjectionOptions {
  TiePolicy ties = TiePolicy::Reject;
  int max_iterations = 100;
};

/// Projects eigenvalues m1 <= m2 of I + A onto the positive hyperbola branch.
///
/// Writing x = s - d, y = s + d with s = sqrt(f + d^2), the distance is
/// minimized over d >= 0 by the root of h(d) = 2d - a d / s(d) - b, where
/// a, b are the mean and half-gap of (m1, m2). h is convex on d >= 0 with
/// h(0) = -b <= 0, so the root is unique and Newton from the upper bracket
/// end converges monotonically. With b = 0 and a > 2 sqrt(f) both signs of d
/// are optimal: that is the medial axis.
HyperbolaProjection project_eigenvalues(double m1, double m2, double f,
                                        ProjectionOptions options = {});

struct PointProjection {
  Sym2 q;
  HyperbolaProjection detail;
};

/// Frobenius-closest Q with det(I + Q) = f and I + Q spd.
PointProjection project_point_detail(const Sym2& a, double f, ProjectionOptions options = {});
Sym2 project_point(const Sym2& a, double f, ProjectionOptions options = {});

struct FieldProjectionReport {
  int max_iterations = 0;
  double max_residual = 0.0;  // max |det(I + Q) - f| over nodes
  int ties_broken = 0;
};

struct FieldProjection {
  SymMatrixField q;
  FieldProjectionReport report;
};

/// Nodewise project_point; failures are collected into FieldOperationError.
FieldProjection project_field(const SymMatrixField& x, const ScalarField& f,
                              ProjectionOptions options = {});

/// Projector onto the tangent plane ker(cof(I + Q)) of the constraint set at Q.
class TangentProjector {
 public:
  /// Throws InvalidArgument when cof(I + base) vanishes.
  explicit TangentProjector(const Sym2& base);

  const Sym2& base() const noexcept { return base_; }
  const Sym2& normal() const noexcept { return normal_; }

  Sym2 operator()(const Sym2& h) const noexcept { return h - frobenius(h, normal_) * normal_; }

 private:
  Sym2 base_;
  Sym2 normal_;
};

/// Shape operator L_Q(H) = Pi_T((I+Q)^-1 H (I+Q)^-1) / |(I+Q)^-1|.
Sym2 shape_operator(const Sym2& q, const Sym2& h);

struct DerivativeDetail {
  Sym2 value;
  Sym2 projection;       // Pi(Y)
  double distance = 0.0; // signed: > 0 when det(I + Y) > f
  double shape_norm = 0.0;
};

/// Directional derivative of the pointwise projection at Y along H:
/// (I - t L)^-1 Pi_T H with L the shape operator at Pi(Y) and t the signed
/// distance from Pi(Y) to Y (positive on the det(I + Y) > f side). The
/// resolvent is inverted exactly on the two-dimensional tangent plane.
/// Throws ContractivityViolated if t * |L| >= 1.
DerivativeDetail gateaux_dM_detail(const Sym2& y, double f, const Sym2& h,
                                   ProjectionOptions options = {});
Sym2 gateaux_dM(const Sym2& y, double f, const Sym2& h, ProjectionOptions options = {});

/// Nodewise lift of gateaux_dM.
SymMatrixField gateaux_dM_field(const SymMatrixField& y, const ScalarField& f,
                                const SymMatrixField& h, ProjectionOptions options = {});

/// Finite-difference derivative of the projection with respect to f:
/// (Pi_{f+step}(A) - Pi_{f-step}(A)) / (2 step).
Sym2 fd_derivative_in_f(const Sym2& a, double f, double step = 1e-6,
                        ProjectionOptions options = {});

}  // namespace masplit
