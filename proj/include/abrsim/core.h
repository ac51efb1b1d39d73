#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

// Shared vocabulary for the ABR simulator. Rates are Mbps throughout;
// one Mbps is one bit per microsecond, so cell times in microseconds
// fall straight out of the 424-bit cell size with no unit juggling.

namespace abrsim {

using Rate = double;     // Mbps
using SimTime = double;  // microseconds
using VcId = int;

inline constexpr double kCellBits = 424.0;  // 53-byte ATM cell
inline constexpr double kUsPerKm = 5.0;     // propagation in fiber
inline constexpr Rate kOc3Mbps = 155.52;

inline constexpr Rate kUnboundedRate = std::numeric_limits<double>::infinity();
inline constexpr SimTime kNoStop = std::numeric_limits<double>::infinity();

// A cell arrived for a VC the receiving object was never configured with.
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad scenario/config input, rejected before any event runs.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CellKind { Data, ForwardRm, BackwardRm };

struct RmPayload {
    Rate ccr = 0.0;
    Rate er = 0.0;
    bool ci = false;
    bool ni = false;
};

struct Cell {
    VcId vc = 0;
    CellKind kind = CellKind::Data;
    std::optional<RmPayload> rm;  // present iff kind != Data
    SimTime emitted_at = 0.0;
    std::uint64_t seq = 0;        // per-source, strictly increasing
};

// 424 bits at link_rate Mbps, in microseconds.
double cell_transmission_time_us(Rate link_rate_mbps);

// 5 us per km of fiber.
double propagation_delay_us(double length_km);

}  // namespace abrsim
