#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "imkg/order_conditions.hpp"
#include "imkg/registry.hpp"
#include "imkg/tableau_io.hpp"

using namespace imkg;

TEST(TableauIo, RoundTripIsExact) {
    for (const auto& e : registry()) {
        const auto t = e.tableau();
        std::stringstream ss;
        write_tableau(t, ss);
        const auto back = read_tableau(ss);
        EXPECT_TRUE(back == t) << e.name();
    }
}

TEST(TableauIo, RoundTripThroughFile) {
    const auto t = lookup("IMKG232a").tableau();
    const auto path = std::filesystem::temp_directory_path() / "imkg_roundtrip_232a.txt";
    write_tableau_file(t, path.string());
    const auto back = read_tableau_file(path.string());
    std::filesystem::remove(path);
    EXPECT_EQ(back.explicit_part().A(), t.explicit_part().A());
    EXPECT_EQ(back.implicit_part().A(), t.implicit_part().A());
    EXPECT_EQ(back.implicit_part().b(), t.implicit_part().b());
}

static std::string midpoint_text(const std::string& ahat_row1 = "0 0") {
    return "# two-stage pair\n"
           "name test\n"
           "r 2\n"
           "A\n0 0\n1 0\n"
           "b\n0.5 0.5\n"
           "Ahat\n" + ahat_row1 + "\n0.5 0.5\n"
           "bhat\n0.5 0.5\n";
}

TEST(TableauIo, ReadsCommentsAndBlankLines) {
    std::istringstream is(midpoint_text());
    const auto t = read_tableau(is);
    EXPECT_EQ(t.name(), "test");
    EXPECT_EQ(t.stages(), 2);
    EXPECT_DOUBLE_EQ(t.implicit_part().c()[1], 1.0);
}

TEST(TableauIo, UpperEntryInImplicitPartIsParseError) {
    std::istringstream is(midpoint_text("0 0.25"));
    try {
        read_tableau(is);
        FAIL() << "expected parse error";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("implicit part not lower triangular"), std::string::npos);
        EXPECT_EQ(e.line(), 10);
    }
}

TEST(TableauIo, StageTimeMismatchIsParseError) {
    std::istringstream is(midpoint_text() + "c\n0 0.9\n");
    try {
        read_tableau(is);
        FAIL() << "expected parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 15);
    }
    std::istringstream ok(midpoint_text() + "c\n0 1\nchat\n0 1\n");
    EXPECT_NO_THROW(read_tableau(ok));
}

TEST(TableauIo, MalformedInput) {
    std::istringstream bad_number("name x\nr 1\nA\nzero\n");
    EXPECT_THROW(read_tableau(bad_number), ParseError);
    std::istringstream short_row("name x\nr 2\nA\n0 0\n1\n");
    EXPECT_THROW(read_tableau(short_row), ParseError);
    std::istringstream truncated("name x\nr 2\n");
    EXPECT_THROW(read_tableau(truncated), ParseError);
    std::istringstream bad_r("name x\nr -1\n");
    EXPECT_THROW(read_tableau(bad_r), ParseError);
    EXPECT_THROW(read_tableau_file("/nonexistent/tableau.txt"), ParseError);
}

TEST(TableauIo, UserPairWithDeficientWeightsLoadsThenFailsOrderOne) {
    std::istringstream is(
        "name user\nr 3\nA\n0 0 0\n0.5 0 0\n0 1 0\nb\n0.25 0.5 0.25\n"
        "Ahat\n0.5 0 0\n0 0.5 0\n0 0.5 0.5\nbhat\n0.3 0.3 0.3\n");
    const auto t = read_tableau(is);
    const auto rep = check_order2_general(t);
    EXPECT_EQ(rep.order_classified, 0);
    EXPECT_NEAR(rep.find("bhat.1")->value, -0.1, 1e-15);
}
