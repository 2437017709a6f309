#pragma once

#include <stdexcept>
#include <string>

namespace autostyle {

enum class Errc {
  file_not_found,
  unsupported_format,
  corrupt_image,
  io_error,
  invalid_format,
  degenerate_luminance,
  not_symmetric,
  negative_eigenvalue,
  singular_covariance,
  dimension_mismatch,
  corrupt_feature_file,
  missing_entry,
  too_few_points,
  version_mismatch,
  checksum_mismatch,
  unknown_cluster,
  invalid_config,
};

/// All recoverable failures surface as this exception; code() identifies the
/// condition so callers can branch without parsing the message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace autostyle
