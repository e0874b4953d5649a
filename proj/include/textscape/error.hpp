#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace textscape {

enum class Errc {
  invalid_format,
  empty_corpus,
  token_count_mismatch,
  duplicate_id,
  non_finite_value,
  invalid_argument,
  invalid_region,
  unknown_label,
  unknown_metric,
  dataset_not_found,
  sample_not_found,
  no_candidate,
  empty_group,
  degenerate_input,
  dataset_exists,
  route_not_found,
  io_error,
};

/// Stable machine-readable name, e.g. "dataset_not_found".
std::string_view machine_code(Errc code) noexcept;

/// Input-validation failures (bad files, bad parameters) as opposed to
/// runtime failures (I/O, missing candidates).
bool is_validation_error(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace textscape
