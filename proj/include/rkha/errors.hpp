#pragma once

#include <stdexcept>
#include <string>

namespace rkha {

// Failure kinds surfaced by the toolkit. Each maps to one named error
// condition of an operation contract.
enum class errc {
    radius_mismatch,
    lattice_kind_mismatch,
    weight_mismatch,
    non_positive_weight,
    probe_out_of_range,
    no_convergence,
    grid_too_coarse,
    zero_element,
    point_set_mismatch,
    phi_out_of_range,
    singular_gram,
    dimension_mismatch,
    infeasible_constraints,
    duplicate_label,
    size_limit,
    parse_error,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::radius_mismatch: return "RadiusMismatch";
        case errc::lattice_kind_mismatch: return "LatticeKindMismatch";
        case errc::weight_mismatch: return "WeightMismatch";
        case errc::non_positive_weight: return "NonPositiveWeight";
        case errc::probe_out_of_range: return "ProbeOutOfRange";
        case errc::no_convergence: return "NoConvergence";
        case errc::grid_too_coarse: return "GridTooCoarse";
        case errc::zero_element: return "ZeroElement";
        case errc::point_set_mismatch: return "PointSetMismatch";
        case errc::phi_out_of_range: return "PhiOutOfRange";
        case errc::singular_gram: return "SingularGram";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::infeasible_constraints: return "InfeasibleConstraints";
        case errc::duplicate_label: return "DuplicateLabel";
        case errc::size_limit: return "SizeLimit";
        case errc::parse_error: return "ParseError";
    }
    return "UnknownError";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool cond, errc code, const std::string& what) {
    if (!cond) fail(code, what);
}

} // namespace rkha
