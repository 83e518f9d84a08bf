#pragma once

#include <stdexcept>
#include <string>

namespace drst {

// Every recoverable failure in the pipeline carries one of these codes so
// callers can branch on the kind without parsing message text.
enum class Errc {
    malformed_record,
    non_finite_value,
    inconsistent_feature_set,
    degenerate_feature,
    missing_feature,
    non_monotonic_timestamp,
    invalid_spec,
    constant_input,
    length_mismatch,
    missing_kpi,
    arity_mismatch,
    non_finite_parameter,
    empty_data,
    diverged_training,
    empty_grid,
    window_length_mismatch,
    chain_arity_mismatch,
    window_not_full,
    insufficient_data,
    training_failed,
    too_many_features,
    empty_background,
    storage_failure,
    empty_registry,
    unknown_version,
    constant_truth,
    non_positive_value,
    zero_truth,
    horizon_out_of_range,
    alignment_gap,
    parse_error,
    unknown_key,
    stream_closed,
    io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg)
        : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace drst
