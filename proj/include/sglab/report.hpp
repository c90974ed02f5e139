#pragma once

#include <string>

#include <json.hpp>

namespace sglab {

/// Outcome of an inequality or identity check: lhs is compared against rhs.
struct CheckReport {
  std::string check;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
  nlohmann::json grid = nlohmann::json::array();
  nlohmann::json detail = nlohmann::json::object();
};

inline void to_json(nlohmann::json& j, const CheckReport& r) {
  j = nlohmann::json{{"check", r.check}, {"lhs", r.lhs},   {"rhs", r.rhs},
                     {"pass", r.pass},   {"grid", r.grid}, {"detail", r.detail}};
}

}  // namespace sglab
