#pragma once

#include <string_view>

namespace cpd {

// `git describe` of the source tree the library was built from.
std::string_view git_describe();

}  // namespace cpd
