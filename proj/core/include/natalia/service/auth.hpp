#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "natalia/service/study.hpp"
#include "natalia/service/study_service.hpp"

namespace natalia::service {

struct Credential {
  std::string token;
  User user;
};

/// Static bearer tokens. File format:
///   {"users": [{"id": "op1", "role": "operator", "email": "...", "token": "..."}]}
class Authenticator {
 public:
  explicit Authenticator(std::vector<Credential> credentials);

  /// Throws Error{NotFound} or Error{SchemaViolation}.
  static Authenticator from_file(const std::filesystem::path& path);

  /// Accepts an Authorization header value ("Bearer <token>").
  std::optional<Principal> authenticate(std::string_view authorization) const;

  const std::vector<Credential>& credentials() const noexcept { return credentials_; }

  /// Registers every credential's user with the service.
  void register_users(StudyService& service) const;

 private:
  std::vector<Credential> credentials_;
};

}  // namespace natalia::service
