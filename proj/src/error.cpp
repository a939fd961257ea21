#include "methlib/error.hpp"

namespace methlib {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "syntax_error";
    case ErrorCode::UnknownFactor: return "unknown_factor";
    case ErrorCode::UnknownProperty: return "unknown_property";
    case ErrorCode::OutOfDomain: return "out_of_domain";
    case ErrorCode::EmptyName: return "empty_name";
    case ErrorCode::UnknownId: return "unknown_id";
    case ErrorCode::SelfLoop: return "self_loop";
    case ErrorCode::DuplicateRelation: return "duplicate_relation";
    case ErrorCode::DuplicateId: return "duplicate_id";
    case ErrorCode::InvalidSituation: return "invalid_situation";
    case ErrorCode::InvalidDefinition: return "invalid_definition";
    case ErrorCode::InvalidAnswer: return "invalid_answer";
    case ErrorCode::NotAtLeaf: return "not_at_leaf";
    case ErrorCode::WalkFinished: return "walk_finished";
    case ErrorCode::DanglingReference: return "dangling_reference";
    case ErrorCode::InvalidLibrary: return "invalid_library";
    case ErrorCode::MissingAnswer: return "missing_answer";
    case ErrorCode::UnscreenedDocument: return "unscreened_document";
    case ErrorCode::RejectedDocument: return "rejected_document";
    case ErrorCode::MalformedFile: return "malformed_file";
    case ErrorCode::UnsupportedVersion: return "unsupported_version";
    case ErrorCode::InvalidRequest: return "invalid_request";
    case ErrorCode::IoError: return "io_error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, std::string message, std::optional<Position> where)
    : std::runtime_error(std::move(message)), code_(code), where_(where) {}

}  // namespace methlib
