#pragma once

// Human-written closed-form derivatives used as the runtime reference for the
// benchmark cases. Each kernel takes the evaluation point and an optional
// parameter block, and produces the same bits as the staged derivative (same
// floating-point operations in the same order; repeated subterms are computed
// once, which does not change the result).

namespace stagediff::hand {

using Kernel = double (*)(const double* x, const double* params);

/// N-th derivative of exp(x) + exp(2x) + exp(3x); params = {2^N, 3^N}.
double sumexp_order(const double* x, const double* params);
/// First derivative of sum_{j=1..n} exp(jx); params = {n}.
double sumexp_terms(const double* x, const double* params);

double mv_f_dx0(const double* x, const double*);
double mv_f_dx1(const double* x, const double*);
double mv_f_dx2(const double* x, const double*);
double mv_f_dx3(const double* x, const double*);

double mv_g_dx0(const double* x, const double*);
double mv_g_dx1(const double* x, const double*);
double mv_g_dx2(const double* x, const double*);
double mv_g_dx3(const double* x, const double*);

// Gradient components of the two-variable functions (x = x1, y = x0).
double nehmeier1_dx0(const double* x, const double*);
double nehmeier1_dx1(const double* x, const double*);
double nehmeier2_dx0(const double* x, const double*);
double nehmeier2_dx1(const double* x, const double*);
double nehmeier3_dx0(const double* x, const double*);
double nehmeier3_dx1(const double* x, const double*);

}  // namespace stagediff::hand
