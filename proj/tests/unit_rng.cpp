#include <doctest.h>

#include <cmath>

#include "spe/rng.hpp"

using namespace spe;

// Known-answer values computed with an independent implementation of the
// published splitmix64 and xoshiro256++ 1.0 algorithms. These pin the
// generator bit for bit across platforms and compilers.

TEST_CASE("xoshiro256++: reference output streams") {
    {
        Xoshiro256pp g(0);
        CHECK(g.next() == 0x53175D61490B23DFULL);
        CHECK(g.next() == 0x61DA6F3DC380D507ULL);
        CHECK(g.next() == 0x5C0FDF91EC9A7BFCULL);
        CHECK(g.next() == 0x02EEBF8C3BBE5E1AULL);
    }
    {
        Xoshiro256pp g(1);
        CHECK(g.next() == 0xCFC5D07F6F03C29BULL);
        CHECK(g.next() == 0xBF424132963FE08DULL);
    }
    {
        Xoshiro256pp g(42);
        CHECK(g.next() == 0xD0764D4F4476689FULL);
        CHECK(g.next() == 0x519E4174576F3791ULL);
    }
    {
        Xoshiro256pp g(0xDEADBEEFULL);
        CHECK(g.next() == 0x0C520EB8FEA98EDEULL);
        CHECK(g.next() == 0x2B74A6338B80E0E2ULL);
    }
}

TEST_CASE("splitmix64: state expansion values") {
    SplitMix64 sm(0);
    CHECK(sm.next() == 0xE220A8397B1DCDAFULL);
    CHECK(sm.next() == 0x6E789E6AA1B965F4ULL);
}

TEST_CASE("uniform01: 53-bit mantissa in [0, 1)") {
    Xoshiro256pp g(42);
    const double u = g.uniform01();
    CHECK(u == doctest::Approx(0.8143051451229099).epsilon(1e-15));
    Xoshiro256pp h(7);
    for (int i = 0; i < 10000; ++i) {
        const double x = h.uniform01();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("exponential: inversion with the requested mean") {
    Xoshiro256pp g(11);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += g.exponential(2.0);
    CHECK(sum / n == doctest::Approx(2.0).epsilon(0.02));
    CHECK(Xoshiro256pp(1).exponential(0.0) == 0.0);
}
