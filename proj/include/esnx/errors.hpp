#pragma once

#include <stdexcept>
#include <string>

namespace esnx {

// Invalid scalar argument (probability outside (0,1), point off the simplex, ...).
class domain_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Bad index set passed to a partition operation.
class index_error : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Cholesky / PSD failure beyond the jitter tolerance.
class singular_matrix : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested accuracy could not be certified within the point budget.
class accuracy_not_reached : public std::runtime_error {
public:
    accuracy_not_reached(const std::string& what, double value, double error_estimate)
        : std::runtime_error(what), value(value), error_estimate(error_estimate) {}
    double value;           // best available estimate
    double error_estimate;  // honest 3-sigma bound for it
};

// Iterative solver ran out of iterations.
class no_convergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parameters sit exactly on a case boundary the theory leaves undefined.
class boundary_case : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A lambda matrix whose induced context matrix is not a valid correlation matrix.
class invalid_lambda : public std::runtime_error {
public:
    invalid_lambda(const std::string& what, int i = -1, int k = -1, int j = -1)
        : std::runtime_error(what), i(i), k(k), j(j) {}
    int i, k, j;  // offending triple, -1 when not applicable
};

// Violated model constraint (e.g. skewness directions must sum to zero).
class constraint_violation : public std::runtime_error {
public:
    constraint_violation(const std::string& what, double residual = 0.0)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

}  // namespace esnx
