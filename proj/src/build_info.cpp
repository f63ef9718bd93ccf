#include "cpd/build_info.hpp"

namespace cpd {

std::string_view git_describe() {
#ifdef CPD_GIT_DESCRIBE
    return CPD_GIT_DESCRIBE;
#else
    return "unknown";
#endif
}

}  // namespace cpd
