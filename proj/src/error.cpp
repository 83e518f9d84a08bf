#include "drst/error.hpp"

namespace drst {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::malformed_record: return "MalformedRecord";
        case Errc::non_finite_value: return "NonFiniteValue";
        case Errc::inconsistent_feature_set: return "InconsistentFeatureSet";
        case Errc::degenerate_feature: return "DegenerateFeature";
        case Errc::missing_feature: return "MissingFeature";
        case Errc::non_monotonic_timestamp: return "NonMonotonicTimestamp";
        case Errc::invalid_spec: return "InvalidSpec";
        case Errc::constant_input: return "ConstantInput";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::missing_kpi: return "MissingKpi";
        case Errc::arity_mismatch: return "ArityMismatch";
        case Errc::non_finite_parameter: return "NonFiniteParameter";
        case Errc::empty_data: return "EmptyData";
        case Errc::diverged_training: return "DivergedTraining";
        case Errc::empty_grid: return "EmptyGrid";
        case Errc::window_length_mismatch: return "WindowLengthMismatch";
        case Errc::chain_arity_mismatch: return "ChainArityMismatch";
        case Errc::window_not_full: return "WindowNotFull";
        case Errc::insufficient_data: return "InsufficientData";
        case Errc::training_failed: return "TrainingFailed";
        case Errc::too_many_features: return "TooManyFeatures";
        case Errc::empty_background: return "EmptyBackground";
        case Errc::storage_failure: return "StorageFailure";
        case Errc::empty_registry: return "EmptyRegistry";
        case Errc::unknown_version: return "UnknownVersion";
        case Errc::constant_truth: return "ConstantTruth";
        case Errc::non_positive_value: return "NonPositiveValue";
        case Errc::zero_truth: return "ZeroTruth";
        case Errc::horizon_out_of_range: return "HorizonOutOfRange";
        case Errc::alignment_gap: return "AlignmentGap";
        case Errc::parse_error: return "ParseError";
        case Errc::unknown_key: return "UnknownKey";
        case Errc::stream_closed: return "StreamClosed";
        case Errc::io_error: return "IoError";
    }
    return "Error";
}

}  // namespace drst
