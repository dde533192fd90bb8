#pragma once

#include <stdexcept>
#include <string>

namespace crforge {

// All engine failures derive from error so callers can catch one type.
// The kind string feeds the CLI exit-code contract: config-shaped problems
// (parse/schema/validation) exit 2, evaluation problems exit 3.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape or arity contract broken (mismatched jet spaces, wrong tuple sizes).
struct structural_error : error {
    using error::error;
};

// Degree-0 data singular where invertibility is required.
struct singular_error : error {
    explicit singular_error(const std::string& msg, double cond_estimate = 0.0)
        : error(msg), cond_estimate(cond_estimate) {}
    double cond_estimate;
};

// Analytic function evaluated outside its domain (log 0, 1/0, sqrt 0 jets).
struct domain_error : error {
    using error::error;
};

// Requested derivative order exceeds the truncation order carried by a jet.
struct truncation_error : error {
    using error::error;
};

// Text failed to parse; line/column are 1-based.
struct parse_error : error {
    parse_error(const std::string& msg, int line, int col)
        : error(msg + " (line " + std::to_string(line) + ", column " +
                std::to_string(col) + ")"),
          line(line), col(col) {}
    int line;
    int col;
};

// Model file parsed but violates the schema (missing key, arity mismatch).
struct schema_error : error {
    using error::error;
};

// Model is schema-valid but geometrically inconsistent at the basepoint.
struct validation_error : error {
    using error::error;
};

// An operation's mathematical hypothesis fails at the evaluation point
// (e.g. the differential does not map the complement into the complement).
struct hypothesis_error : error {
    using error::error;
};

}  // namespace crforge
