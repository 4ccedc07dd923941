#include "fibosc/params.hpp"

#include <sstream>

namespace fibosc {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

} // namespace

std::string region_diagnostic(const DeformationParams& p, char region) {
    // region_A pieces first; B and C add their extra inequality.
    if (p.q < -1.0)
        return "q >= -1 required, got " + fmt(p.q);
    if (p.q > 1.0)
        return "q <= 1 required, got " + fmt(p.q);
    if (!(p.r > 1.0))
        return "r > 1 required, got " + fmt(p.r);
    if (p.r + p.q < 1.0)
        return "r+q >= 1 required, got " + fmt(p.r + p.q);
    if ((region == 'B' || region == 'C') && p.r + p.q < 2.0)
        return "r+q >= 2 required, got " + fmt(p.r + p.q);
    if (region == 'C' && p.q < -2.0 / 3.0)
        return "q >= -2/3 required, got " + fmt(p.q);
    return "";
}

} // namespace fibosc
