#include "akbest/model_io.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace {

using namespace akbest;

std::string temp_path(const char* tag) {
    return std::string(::testing::TempDir()) + "model_io_" + tag + ".txt";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

TEST(ModelIo, ScalarAndTensorRoundTripExactly) {
    ModelFile mf;
    mf.set_scalar("alpha", 0.1);  // not exactly representable
    mf.set_scalar("neg_zero", -0.0);
    mf.set_scalar("tiny", 1e-300);
    mf.set_scalar("huge", -1.7976931348623157e308);
    mf.set_tensor("theta", {2, 3}, {1.0 / 3.0, -2.0 / 7.0, 0.0, 1e-17, 123456789.123456789, -5.5});

    const std::string path = temp_path("roundtrip");
    mf.save(path);
    const ModelFile back = ModelFile::load(path);

    EXPECT_EQ(back.scalar("alpha"), 0.1);
    EXPECT_EQ(back.scalar("neg_zero"), 0.0);
    EXPECT_TRUE(std::signbit(back.scalar("neg_zero")));
    EXPECT_EQ(back.scalar("tiny"), 1e-300);
    EXPECT_EQ(back.scalar("huge"), -1.7976931348623157e308);
    const ModelFile::Tensor& t = back.tensor("theta");
    ASSERT_EQ(t.dims, (std::vector<long long>{2, 3}));
    ASSERT_EQ(t.values.size(), 6u);
    EXPECT_EQ(t.values[0], 1.0 / 3.0);
    EXPECT_EQ(t.values[1], -2.0 / 7.0);
    EXPECT_EQ(t.values[2], 0.0);
    EXPECT_EQ(t.values[3], 1e-17);
    EXPECT_EQ(t.values[4], 123456789.123456789);
    EXPECT_EQ(t.values[5], -5.5);
    std::remove(path.c_str());
}

TEST(ModelIo, ResaveIsByteIdentical) {
    ModelFile mf;
    mf.set_scalar("a", 1.2345678901234567);
    mf.set_tensor("w", {4}, {0.1, 0.2, 0.3, 0.4});
    mf.set_scalar("b", -17.0);

    const std::string p1 = temp_path("bytes1");
    const std::string p2 = temp_path("bytes2");
    mf.save(p1);
    ModelFile::load(p1).save(p2);
    EXPECT_EQ(slurp(p1), slurp(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST(ModelIo, NamesKeepInsertionOrder) {
    ModelFile mf;
    mf.set_scalar("zulu", 1.0);
    mf.set_tensor("alpha", {1}, {2.0});
    mf.set_scalar("mike", 3.0);
    EXPECT_EQ(mf.names(), (std::vector<std::string>{"zulu", "alpha", "mike"}));

    const std::string path = temp_path("order");
    mf.save(path);
    EXPECT_EQ(ModelFile::load(path).names(), mf.names());
    std::remove(path.c_str());
}

TEST(ModelIo, OverwritingScalarKeepsSingleEntry) {
    ModelFile mf;
    mf.set_scalar("x", 1.0);
    mf.set_scalar("x", 2.0);
    EXPECT_EQ(mf.scalar("x"), 2.0);
    EXPECT_EQ(mf.names().size(), 1u);
}

TEST(ModelIo, SetterRejectsBadInput) {
    ModelFile mf;
    EXPECT_THROW(mf.set_scalar("", 1.0), ModelError);
    EXPECT_THROW(mf.set_scalar("two words", 1.0), ModelError);
    EXPECT_THROW(mf.set_tensor("t", {0}, {}), ModelError);
    EXPECT_THROW(mf.set_tensor("t", {2, 2}, {1.0, 2.0, 3.0}), ModelError);
    EXPECT_THROW(mf.scalar("missing"), ModelError);
    EXPECT_THROW(mf.tensor("missing"), ModelError);
}

TEST(ModelIo, LoadRejectsMalformedFiles) {
    const std::string path = temp_path("bad");

    EXPECT_THROW(ModelFile::load(temp_path("does_not_exist")), ModelError);

    spit(path, "not-a-model\nscalar a 1\n");
    EXPECT_THROW(ModelFile::load(path), ModelError);

    spit(path, "akbest-model 1\nscalar a\n");
    EXPECT_THROW(ModelFile::load(path), ModelError);

    spit(path, "akbest-model 1\nscalar a abc\n");
    EXPECT_THROW(ModelFile::load(path), ModelError);

    spit(path, "akbest-model 1\nwibble a 1\n");
    EXPECT_THROW(ModelFile::load(path), ModelError);

    spit(path, "akbest-model 1\nscalar a 1\nscalar a 2\n");
    EXPECT_THROW(ModelFile::load(path), ModelError);

    spit(path, "akbest-model 1\ntensor t 1 3\n1\n2\n");
    EXPECT_THROW(ModelFile::load(path), ModelError);  // truncated values

    spit(path, "akbest-model 1\ntensor t 1 -2\n");
    EXPECT_THROW(ModelFile::load(path), ModelError);

    spit(path, "akbest-model 1\ntensor t 2 2\n");  // rank 2 but one dim
    EXPECT_THROW(ModelFile::load(path), ModelError);

    std::remove(path.c_str());
}

TEST(ModelIo, LoadAcceptsBlankLines) {
    const std::string path = temp_path("blank");
    spit(path, "akbest-model 1\n\nscalar a 2.5\n\n");
    EXPECT_EQ(ModelFile::load(path).scalar("a"), 2.5);
    std::remove(path.c_str());
}

}  // namespace
