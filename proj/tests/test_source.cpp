#include "doctest.h"

#include "abrsim/source.h"

using namespace abrsim;

namespace {

SourceState make_source(Rate acr, Rate app_cap = kUnboundedRate) {
    SourceState s;
    s.vc = 0;
    s.acr = acr;
    s.icr = acr;
    s.app_cap = app_cap;
    s.windows = {{0.0, kNoStop}};
    s.cells_since_rm = s.nrm - 1;  // first cell carries the RM payload
    return s;
}

}  // namespace

TEST_CASE("pacing follows the application-limited rate") {
    SourceState s = make_source(100.0, 10.0);
    emit_next(s, 0.0);
    CHECK(s.next_emit_us == doctest::Approx(42.4).epsilon(1e-12));

    SourceState fast = make_source(155.52);
    emit_next(fast, 0.0);
    CHECK(fast.next_emit_us ==
          doctest::Approx(2.7263374485596708).epsilon(1e-12));
}

TEST_CASE("every nrm-th cell is a forward RM cell carrying the ACR") {
    SourceState s = make_source(50.0);
    Cell first = emit_next(s, 0.0);
    CHECK(first.kind == CellKind::ForwardRm);
    CHECK(first.rm->ccr == 50.0);
    CHECK(first.rm->er == s.pcr);
    CHECK_FALSE(first.rm->ci);
    CHECK_FALSE(first.rm->ni);

    int data_between = 0;
    std::uint64_t prev_seq = first.seq;
    for (int i = 0; i < 200; ++i) {
        Cell c = emit_next(s, s.next_emit_us);
        CHECK(c.seq == prev_seq + 1);
        prev_seq = c.seq;
        if (c.kind == CellKind::ForwardRm) {
            CHECK(data_between == s.nrm - 1);
            data_between = 0;
        } else {
            ++data_between;
        }
    }
}

TEST_CASE("emission rate matches min(acr, app_cap) over a long window") {
    SourceState s = make_source(80.0, 25.0);
    SimTime t = 0.0;
    const int cells = 500;
    for (int i = 0; i < cells; ++i) {
        emit_next(s, t);
        t = s.next_emit_us;
    }
    const double rate = cells * kCellBits / t;
    CHECK(rate == doctest::Approx(25.0).epsilon(0.02));
}

TEST_CASE("emitting outside a window is a contract violation") {
    SourceState s = make_source(50.0);
    s.windows = {{1000.0, 2000.0}};
    CHECK_THROWS_AS(emit_next(s, 500.0), std::logic_error);
    CHECK_THROWS_AS(emit_next(s, 2000.0), std::logic_error);  // stop excluded
    CHECK_NOTHROW(emit_next(s, 1000.0));
}

TEST_CASE("BRM adoption under RIF = 1") {
    SourceState s = make_source(50.0);
    on_brm(s, {0.0, 70.0, false, false});
    CHECK(s.acr == 70.0);
    on_brm(s, {0.0, 200.0, false, false});
    CHECK(s.acr == s.pcr);
    on_brm(s, {0.0, 40.0, false, false});
    CHECK(s.acr == 40.0);
}

TEST_CASE("destination turnaround copies the payload") {
    SourceState s = make_source(50.0);
    Cell frm = emit_next(s, 0.0);
    REQUIRE(frm.kind == CellKind::ForwardRm);
    Cell brm = turn_around(frm);
    CHECK(brm.kind == CellKind::BackwardRm);
    CHECK(brm.vc == frm.vc);
    CHECK(brm.seq == frm.seq);
    CHECK(brm.rm->ccr == frm.rm->ccr);
    CHECK(brm.rm->er == frm.rm->er);

    Cell d;
    d.kind = CellKind::Data;
    CHECK_THROWS_AS(turn_around(d), std::logic_error);
}
