#include "natalia/service/auth.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "natalia/common/error.hpp"

namespace natalia::service {

namespace {

bool same_token(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  unsigned char diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff |= static_cast<unsigned char>(a[i] ^ b[i]);
  }
  return diff == 0;
}

}  // namespace

Authenticator::Authenticator(std::vector<Credential> credentials)
    : credentials_(std::move(credentials)) {
  std::set<std::string> ids, tokens;
  for (const auto& c : credentials_) {
    if (c.token.size() < 8) {
      throw Error(ErrorCode::SchemaViolation, "token for '" + c.user.id + "' is shorter than 8 characters");
    }
    if (!is_valid_name(c.user.id)) {
      throw Error(ErrorCode::SchemaViolation, "invalid user id '" + c.user.id + "'");
    }
    if (!ids.insert(c.user.id).second) {
      throw Error(ErrorCode::SchemaViolation, "duplicate user '" + c.user.id + "'");
    }
    if (!tokens.insert(c.token).second) {
      throw Error(ErrorCode::SchemaViolation, "duplicate token for '" + c.user.id + "'");
    }
  }
}

Authenticator Authenticator::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open credential file " + path.string());
  std::vector<Credential> creds;
  try {
    const auto j = nlohmann::json::parse(in);
    for (const auto& u : j.at("users")) {
      creds.push_back(Credential{u.at("token").get<std::string>(), u.get<User>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, path.string() + ": " + e.what());
  }
  return Authenticator(std::move(creds));
}

std::optional<Principal> Authenticator::authenticate(std::string_view authorization) const {
  constexpr std::string_view scheme = "Bearer ";
  if (!authorization.starts_with(scheme)) return std::nullopt;
  auto token = authorization.substr(scheme.size());
  while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
  while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
  if (token.empty()) return std::nullopt;
  std::optional<Principal> found;
  for (const auto& c : credentials_) {
    if (same_token(c.token, token)) found = Principal{c.user.id, c.user.role};
  }
  return found;
}

void Authenticator::register_users(StudyService& service) const {
  for (const auto& c : credentials_) service.register_user(c.user);
}

}  // namespace natalia::service
