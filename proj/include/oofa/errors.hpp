#pragma once

#include <stdexcept>
#include <string>

namespace oofa {

//! Invalid argument / precondition violation (bad label, length mismatch, ...).
struct invalid_input : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

//! Exact integer arithmetic would overflow (factorial products).
struct overflow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

//! An enumeration guard refused to expand a feasible set.
struct enumeration_refused : std::runtime_error {
    using std::runtime_error::runtime_error;
};

//! A moment matrix was singular where an inverse was required.
struct singular_matrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

//! Model matrix is rank deficient; message names the offending columns.
struct rank_deficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};

//! Nonsingular initialization failed (run size too small or degenerate spec).
struct init_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace oofa
