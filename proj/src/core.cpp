#include "abrsim/core.h"

namespace abrsim {

double cell_transmission_time_us(Rate link_rate_mbps) {
    if (!(link_rate_mbps > 0.0)) {
        throw std::invalid_argument("link rate must be positive");
    }
    return kCellBits / link_rate_mbps;
}

double propagation_delay_us(double length_km) {
    if (length_km < 0.0) {
        throw std::invalid_argument("link length must be non-negative");
    }
    return length_km * kUsPerKm;
}

}  // namespace abrsim
