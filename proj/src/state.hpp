#ifndef DISP_STATE_HPP
#define DISP_STATE_HPP

#include <vector>

namespace disp {

/// Discrete solution values at the interior grid nodes at one time stamp.
struct StateVector {
    std::vector<double> values;
    double t = 0.0;
};

} // namespace disp

#endif
