#ifndef RECTINT_ERRORS_HPP
#define RECTINT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rectint {

// Base class for all engine errors. Subclasses mirror the failure modes of
// the public operations so callers can catch them selectively.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

struct division_by_zero : error {
    explicit division_by_zero(const std::string& msg) : error(msg) {}
};

// Raised when an operation cannot certify a single output digit at the
// working precision, or when a decision needs more digits than are known.
struct precision_exhausted : error {
    explicit precision_exhausted(const std::string& msg) : error(msg) {}
};

struct hypothesis_failed : error {
    explicit hypothesis_failed(const std::string& msg) : error(msg) {}
};

struct not_in_range : error {
    explicit not_in_range(const std::string& msg) : error(msg) {}
};

struct zero_input : error {
    explicit zero_input(const std::string& msg) : error(msg) {}
};

struct schema_error : error {
    std::string path;  // JSON pointer of the offending node
    schema_error(const std::string& msg, std::string json_path)
        : error(msg + " (at " + json_path + ")"), path(std::move(json_path)) {}
};

struct non_triangular_region : error {
    explicit non_triangular_region(const std::string& msg) : error(msg) {}
};

struct unbound_symbol : error {
    explicit unbound_symbol(const std::string& msg) : error(msg) {}
};

struct domain_violation : error {
    explicit domain_violation(const std::string& msg) : error(msg) {}
};

struct certificate_mismatch : error {
    explicit certificate_mismatch(const std::string& msg) : error(msg) {}
};

struct not_monomializable : error {
    explicit not_monomializable(const std::string& msg) : error(msg) {}
};

struct unsupported_spec : error {
    explicit unsupported_spec(const std::string& msg) : error(msg) {}
};

struct divergent : error {
    explicit divergent(const std::string& msg) : error(msg) {}
};

struct negative_degree : error {
    explicit negative_degree(const std::string& msg) : error(msg) {}
};

struct pole_at : error {
    explicit pole_at(const std::string& msg) : error(msg) {}
};

struct not_convergent : error {
    explicit not_convergent(const std::string& msg) : error(msg) {}
};

struct instance_required : error {
    explicit instance_required(const std::string& msg) : error(msg) {}
};

struct undecidable_at_depth : error {
    explicit undecidable_at_depth(const std::string& msg) : error(msg) {}
};

}  // namespace rectint

#endif
