#pragma once

#include <string>
#include <string_view>

namespace methlib {

enum class ViolationKind { DanglingReference, DomainViolation, Duplicate, Invalid };
std::string_view violation_kind_name(ViolationKind k);

struct Violation {
  ViolationKind kind;
  std::string subject;  // e.g. "relation r3"
  std::string detail;

  bool operator==(const Violation&) const = default;
};

}  // namespace methlib
