#include <gtest/gtest.h>

#include "support.hpp"

using namespace qd;
using qd::testing::R;

TEST(Scalar, ExactArithmeticReducesFractions) {
    Scalar a = R(1, 3) + R(1, 6);
    EXPECT_EQ(a, R(1, 2));
    EXPECT_EQ(a.str(), "1/2");
    EXPECT_EQ((R(2, 3) * R(3, 4)).str(), "1/2");
    EXPECT_EQ((R(1) / R(4)).str(), "1/4");
    EXPECT_EQ(R(5).str(), "5/1");
    EXPECT_EQ((-R(3, 7)).str(), "-3/7");
}

TEST(Scalar, IntegerPromotionStaysInBackend) {
    Scalar x = R(1, 2);
    x += 1L;
    EXPECT_TRUE(x.is_exact());
    EXPECT_EQ(x, R(3, 2));
    Scalar y(0.25);
    y *= 4L;
    EXPECT_FALSE(y.is_exact());
    EXPECT_DOUBLE_EQ(y.as_float(), 1.0);
}

TEST(Scalar, MixedBackendsThrow) {
    EXPECT_THROW(R(1, 2) + Scalar(0.5), backend_mismatch);
    EXPECT_THROW((void)(R(1, 2) < Scalar(0.5)), backend_mismatch);
}

TEST(Scalar, DivisionByZeroThrows) {
    EXPECT_THROW(R(1) / R(0), domain_error);
    EXPECT_THROW(Scalar(1.0) / Scalar(0.0), domain_error);
    EXPECT_THROW(R(1) / 0L, domain_error);
}

TEST(Scalar, FloatSerializationRoundTrips) {
    EXPECT_EQ(Scalar(0.1).str(), "0.1");
    EXPECT_EQ(Scalar(0.66).str(), "0.66");
    EXPECT_EQ(Scalar(1.0 / 3.0).str(), "0.3333333333333333");
}

TEST(Scalar, ParseRational) {
    EXPECT_EQ(Scalar(parse_rational("3/4")), R(3, 4));
    EXPECT_EQ(Scalar(parse_rational("0.3")), R(3, 10));
    EXPECT_EQ(Scalar(parse_rational("-2")), R(-2));
    EXPECT_EQ(Scalar(parse_rational("6/8")), R(3, 4));
    EXPECT_THROW(parse_rational("abc"), std::exception);
    EXPECT_THROW(parse_rational("1/0"), std::exception);
}

TEST(Scalar, PowAndAbs) {
    EXPECT_EQ(pow(R(1, 2), 10), R(1, 1024));
    EXPECT_EQ(pow(R(3), 0), R(1));
    EXPECT_EQ(abs(R(-2, 5)), R(2, 5));
    EXPECT_DOUBLE_EQ(pow(Scalar(0.5), 3).as_float(), 0.125);
}
