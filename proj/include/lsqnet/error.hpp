#ifndef LSQNET_ERROR_HPP
#define LSQNET_ERROR_HPP

#include <stdexcept>
#include <string>

namespace lsqnet {

enum class ErrorCode {
    singular_matrix,
    non_symmetric,
    eigen_non_convergence,
    dimension_mismatch,
    asymmetric_weights,
    negative_weight,
    zero_self_weight,
    disconnected_graph,
    missing_neighbor_message,
    unexpected_message,
    invalid_argument,
    insufficient_data,
    parse_error,
    io_error,
    too_large,
};

/// All library failures carry a machine-checkable code plus a human message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace lsqnet

#endif
