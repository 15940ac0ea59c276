#include "tkg/errors.hpp"

namespace tkg {

const char* errc_name(Errc c) {
    switch (c) {
        case Errc::empty_source: return "EmptySource";
        case Errc::malformed_heading: return "MalformedHeading";
        case Errc::unknown_chunk: return "UnknownChunk";
        case Errc::syntax_error: return "SyntaxError";
        case Errc::duplicate_concept: return "DuplicateConcept";
        case Errc::empty_class: return "EmptyClass";
        case Errc::endpoint_missing: return "EndpointMissing";
        case Errc::kind_mismatch: return "KindMismatch";
        case Errc::unknown_node: return "UnknownNode";
        case Errc::io_error: return "IoError";
        case Errc::format_version_mismatch: return "FormatVersionMismatch";
        case Errc::corrupt_record: return "CorruptRecord";
        case Errc::dimension_mismatch: return "DimensionMismatch";
        case Errc::zero_vector: return "ZeroVector";
        case Errc::missing_embedding: return "MissingEmbedding";
        case Errc::empty_samples: return "EmptySamples";
        case Errc::unknown_object: return "UnknownObject";
        case Errc::missing_distribution: return "MissingDistribution";
        case Errc::unclassified_object: return "UnclassifiedObject";
        case Errc::unknown_concept: return "UnknownConcept";
        case Errc::empty_gold: return "EmptyGold";
        case Errc::marker_collision: return "MarkerCollision";
        case Errc::backend_unavailable: return "BackendUnavailable";
        case Errc::backend_malformed_reply: return "BackendMalformedReply";
        case Errc::transport: return "Transport";
        case Errc::http_status: return "HttpStatus";
        case Errc::malformed_body: return "MalformedBody";
        case Errc::replay_miss: return "ReplayMiss";
        case Errc::dimension_drift: return "DimensionDrift";
        case Errc::invalid_config: return "InvalidConfig";
        case Errc::missing_artifact: return "MissingArtifact";
        case Errc::lock_held: return "LockHeld";
    }
    return "UnknownError";
}

bool is_backend_error(Errc c) {
    switch (c) {
        case Errc::backend_unavailable:
        case Errc::backend_malformed_reply:
        case Errc::transport:
        case Errc::http_status:
        case Errc::malformed_body:
        case Errc::replay_miss:
        case Errc::dimension_drift:
            return true;
        default:
            return false;
    }
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

} // namespace tkg
