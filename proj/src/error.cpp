#include "textscape/error.hpp"

namespace textscape {

std::string_view machine_code(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_format: return "invalid_format";
    case Errc::empty_corpus: return "empty_corpus";
    case Errc::token_count_mismatch: return "token_count_mismatch";
    case Errc::duplicate_id: return "duplicate_id";
    case Errc::non_finite_value: return "non_finite_value";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::invalid_region: return "invalid_region";
    case Errc::unknown_label: return "unknown_label";
    case Errc::unknown_metric: return "unknown_metric";
    case Errc::dataset_not_found: return "dataset_not_found";
    case Errc::sample_not_found: return "sample_not_found";
    case Errc::no_candidate: return "no_candidate";
    case Errc::empty_group: return "empty_group";
    case Errc::degenerate_input: return "degenerate_input";
    case Errc::dataset_exists: return "dataset_exists";
    case Errc::route_not_found: return "route_not_found";
    case Errc::io_error: return "io_error";
  }
  return "unknown";
}

bool is_validation_error(Errc code) noexcept {
  switch (code) {
    case Errc::io_error:
    case Errc::no_candidate:
    case Errc::degenerate_input:
    case Errc::dataset_exists:
      return false;
    default:
      return true;
  }
}

}  // namespace textscape
