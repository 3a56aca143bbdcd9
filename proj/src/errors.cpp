#include "masplit/errors.hpp"

#include <sstream>

namespace masplit {

namespace {

std::string describe(const std::vector<NodeFailure>& failures) {
  std::ostringstream os;
  os << failures.size() << " node(s) failed";
  if (!failures.empty()) {
    const auto& f = failures.front();
    os << "; first at node (" << f.i << ", " << f.j << ") x=(" << f.x << ", " << f.y
       << "): " << f.kind << ": " << f.message;
  }
  return os.str();
}

}  // namespace

FieldOperationError::FieldOperationError(std::vector<NodeFailure> failures)
    : Error(describe(failures)), failures_(std::move(failures)) {}

}  // namespace masplit
