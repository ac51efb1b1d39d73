#include "doctest.h"

#include "abrsim/core.h"

using namespace abrsim;

TEST_CASE("cell transmission time") {
    // 424 bits / 155.52 Mbps, by hand: 2.72633744855967...
    CHECK(cell_transmission_time_us(155.52) ==
          doctest::Approx(2.7263374485596708).epsilon(1e-12));
    CHECK(cell_transmission_time_us(10.0) ==
          doctest::Approx(42.4).epsilon(1e-12));
    CHECK(cell_transmission_time_us(424.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(cell_transmission_time_us(0.0), std::invalid_argument);
    CHECK_THROWS_AS(cell_transmission_time_us(-5.0), std::invalid_argument);
}

TEST_CASE("propagation delay") {
    CHECK(propagation_delay_us(1000.0) == doctest::Approx(5000.0));
    CHECK(propagation_delay_us(0.0) == 0.0);
    CHECK(propagation_delay_us(2000.0) == doctest::Approx(10000.0));
    CHECK_THROWS_AS(propagation_delay_us(-1.0), std::invalid_argument);
}
