#pragma once
// Error codes and the exception type used across the library.
//
// Codes are grouped by the subsystem that raises them. The CLI maps
// backend-side codes to exit code 2 and everything else to exit code 1.

#include <stdexcept>
#include <string>

namespace tkg {

enum class Errc {
    // corpus
    empty_source,
    malformed_heading,
    unknown_chunk,
    // ontology
    syntax_error,
    duplicate_concept,
    empty_class,
    // graph store
    endpoint_missing,
    kind_mismatch,
    unknown_node,
    io_error,
    format_version_mismatch,
    corrupt_record,
    // scoring
    dimension_mismatch,
    zero_vector,
    missing_embedding,
    empty_samples,
    // classification
    unknown_object,
    missing_distribution,
    // prompt
    unclassified_object,
    unknown_concept,
    // baseline
    empty_gold,
    // synthetic generator
    marker_collision,
    // backends
    backend_unavailable,
    backend_malformed_reply,
    transport,
    http_status,
    malformed_body,
    replay_miss,
    dimension_drift,
    // config / pipeline
    invalid_config,
    missing_artifact,
    lock_held,
};

const char* errc_name(Errc c);

// True for failures of an annotator/embedder backend (transport, protocol).
bool is_backend_error(Errc c);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace tkg
