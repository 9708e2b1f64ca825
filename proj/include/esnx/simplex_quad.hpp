#pragma once

#include <functional>
#include <vector>

#include "esnx/skew_hr.hpp"

namespace esnx {

// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Total mass and first moments of the angular measure by quadrature:
// d = 2 uses the Phi-substitution w = Phi(s) against the endpoint decay,
// d = 3 a Duffy-transformed tensor Gauss-Legendre grid over the triangle.
// The paper-normalized density integrates to d with moments 1.
double angular_mass_d2(const SkewHrModel& model, int panels = 100);
double angular_moment_d2(const SkewHrModel& model, int coord, int panels = 100);
double angular_mass_d3(const SkewHrModel& model, int n = 256);
double angular_moment_d3(const SkewHrModel& model, int coord, int n = 256);

}  // namespace esnx
