#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "akbest/modem.hpp"
#include "akbest/rng.hpp"

using namespace akbest;

namespace {

double min_axis_gap(const Constellation& c) {
    double gap = 1e30;
    for (int i = 0; i < c.order; ++i)
        for (int j = 0; j < c.order; ++j) {
            const double d = std::abs(c.points[i].real() - c.points[j].real());
            if (d > 1e-9) gap = std::min(gap, d);
        }
    return gap;
}

}  // namespace

TEST(Modem, OrdersAndUnitEnergy) {
    for (int order : {4, 16, 64}) {
        Constellation c = Constellation::make(order);
        EXPECT_EQ(c.order, order);
        EXPECT_EQ(1 << c.bits_per_symbol, order);
        double e = 0.0;
        for (const cplx& p : c.points) e += std::norm(p);
        EXPECT_NEAR(e / order, 1.0, 1e-12);
        for (int i = 0; i < order; ++i) EXPECT_EQ(c.labels[i], static_cast<std::uint32_t>(i));
    }
}

TEST(Modem, UnsupportedOrder) {
    EXPECT_THROW(Constellation::make(8), LengthError);
    EXPECT_THROW(Constellation::make(0), LengthError);
}

TEST(Modem, Qpsk4Table) {
    Constellation c = Constellation::make(4);
    const double s = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(c.points[0] - cplx(s, s)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.points[1] - cplx(s, -s)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.points[2] - cplx(-s, s)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.points[3] - cplx(-s, -s)), 0.0, 1e-15);
    EXPECT_EQ(c.label_bits(2), "10");
}

TEST(Modem, Qam16Anchors) {
    Constellation c = Constellation::make(16);
    const double s = 1.0 / std::sqrt(10.0);
    EXPECT_NEAR(std::abs(c.points[0] - cplx(-3 * s, -3 * s)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.points[5] - cplx(-s, -s)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(c.points[15] - cplx(s, s)), 0.0, 1e-15);
    EXPECT_EQ(c.label_bits(0), "0000");
    EXPECT_EQ(c.label_bits(9), "1001");
}

TEST(Modem, GrayAdjacencyExhaustive) {
    for (int order : {4, 16, 64}) {
        Constellation c = Constellation::make(order);
        const double gap = min_axis_gap(c);
        int checked = 0;
        for (int i = 0; i < order; ++i) {
            for (int j = 0; j < order; ++j) {
                if (i == j) continue;
                const double dx = std::abs(c.points[i].real() - c.points[j].real());
                const double dy = std::abs(c.points[i].imag() - c.points[j].imag());
                const bool x_step = std::abs(dx - gap) < 1e-9 && dy < 1e-9;
                const bool y_step = std::abs(dy - gap) < 1e-9 && dx < 1e-9;
                if (x_step || y_step) {
                    EXPECT_EQ(std::popcount(c.labels[i] ^ c.labels[j]), 1)
                        << "order " << order << " pair " << i << "," << j;
                    ++checked;
                }
            }
        }
        EXPECT_GT(checked, 0);
    }
}

TEST(Modem, ModulateIndexOrder) {
    Constellation c = Constellation::make(4);
    BitBlock bits{0, 0, 0, 1, 1, 0, 1, 1};
    ComplexVector x = modulate(bits, c);
    ASSERT_EQ(x.len(), 4);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(x[i], c.points[i]);
}

TEST(Modem, ModulateIndivisible) {
    Constellation c = Constellation::make(16);
    EXPECT_THROW(modulate(BitBlock{0, 1, 0}, c), LengthError);
}

TEST(Modem, HardRoundTrip) {
    RngStream rng(42, 0);
    for (int order : {4, 16, 64}) {
        Constellation c = Constellation::make(order);
        BitBlock bits;
        for (int i = 0; i < 40 * c.bits_per_symbol; ++i)
            bits.push_back(static_cast<std::uint8_t>(rng.next_u64() & 1));
        ComplexVector x = modulate(bits, c);
        EXPECT_EQ(demodulate_hard(x, c), bits);
    }
}

TEST(Modem, HardDecisionTieLowestIndex) {
    EXPECT_EQ(hard_decision_index(cplx(0, 0), Constellation::make(4)), 0);
    EXPECT_EQ(hard_decision_index(cplx(0, 0), Constellation::make(16)), 5);
}

TEST(Modem, HardDecisionUnderPerturbation) {
    Constellation c = Constellation::make(16);
    for (int i = 0; i < c.order; ++i) {
        const cplx s = c.points[i] + cplx(0.003, -0.002);
        EXPECT_EQ(hard_decision_index(s, c), i);
    }
}

TEST(Modem, NearestPointsOrigin16Qam) {
    Constellation c = Constellation::make(16);
    const std::vector<int> expect{5, 7, 13, 15};
    EXPECT_EQ(nearest_points(cplx(0, 0), c, 4), expect);
    EXPECT_EQ(nearest_points(cplx(0, 0), c, 1), std::vector<int>{5});
    auto all = nearest_points(cplx(0, 0), c, 16);
    ASSERT_EQ(all.size(), 16u);
    for (int i = 0; i < 4; ++i) EXPECT_EQ(all[i], expect[i]);
}

TEST(Modem, NearestPointsSelfFirst) {
    Constellation c = Constellation::make(64);
    for (int i = 0; i < c.order; ++i) EXPECT_EQ(nearest_points(c.points[i], c, 1)[0], i);
}

TEST(Modem, NearestPointsRange) {
    Constellation c = Constellation::make(16);
    EXPECT_THROW(nearest_points(cplx(0, 0), c, 0), LengthError);
    EXPECT_THROW(nearest_points(cplx(0, 0), c, 17), LengthError);
}
