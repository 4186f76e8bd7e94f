#include <relkin/config.hpp>
#include <relkin/report.hpp>

#include <gtest/gtest.h>

using namespace relkin;

TEST(Config, ParsesSectionsAndComments) {
    const auto c = parse_config_text("[kernel]\nfamily = soft  # comment\nb = 1.5\ngamma=0.25\n; note\n[quad]\nradial = 12\nmc = 1e6\n"
                                     "run.seed = 42\n");
    EXPECT_EQ(c.kernel.family, Family::Soft);
    EXPECT_EQ(c.kernel.rho, -1.5);
    EXPECT_EQ(c.kernel.gamma, 0.25);
    EXPECT_EQ(c.quad.radialOrder, 12);
    EXPECT_EQ(c.quad.mcSamples, 1000000);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.quad.seed, 42u);
}

TEST(Config, Errors) {
    EXPECT_THROW(parse_config_text("kernel.nope = 1\n"), ConfigError);
    EXPECT_THROW(parse_config_text("[kernel\n"), ConfigError);
    EXPECT_THROW(parse_config_text("kernel.gamma\n"), ConfigError);
    EXPECT_THROW(parse_config_text("kernel.gamma = abc\n"), ConfigError);
    EXPECT_THROW(parse_config_text("quad.radial = 1.5\n"), ConfigError);
    EXPECT_THROW(parse_config_text("run.format = xml\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/relkin.cfg"), ConfigError);
}

TEST(Config, ListSyntax) {
    RunConfig c;
    apply_list(c, "kernel", "hard, a=0.5, gamma=0.3, epsilon=0.1");
    EXPECT_EQ(c.kernel.family, Family::Hard);
    EXPECT_EQ(c.kernel.rho, 0.5);
    EXPECT_EQ(c.kernel.epsilon, 0.1);
    EXPECT_THROW(apply_list(c, "quad", "fast"), ConfigError);
}

TEST(Config, RoundTrip) {
    RunConfig c;
    apply_list(c, "kernel", "soft,b=1.2,gamma=0.35,cphi=2.5,angular=constant");
    apply_list(c, "quad", "radial=10,sphere=14,planar=18,R=9.5,tol=1e-7");
    c.suite = "norms";
    c.seed = 99;
    c.threads = 3;
    c.quad.seed = 99;
    c.quad.threads = 3;
    const auto back = parse_config_text(to_config_text(c));
    EXPECT_TRUE(back == c);
}

TEST(Report, ChecksAndDeterministicJson) {
    RunConfig c;
    Report a("demo", c), b("demo", c);
    for (Report* r : {&a, &b}) {
        EXPECT_TRUE(r->check("x", 1.0, "<=", 2.0));
        EXPECT_FALSE(r->check("y", 3.0, "<", 2.0));
        r->data()["v"] = 0.1;
    }
    EXPECT_FALSE(a.passed());
    EXPECT_EQ(a.to_json(false).dump(), b.to_json(false).dump());
    const auto j = a.to_json();
    EXPECT_EQ(j["schemaVersion"], kSchemaVersion);
    EXPECT_TRUE(j.contains("timestamp"));
    EXPECT_EQ(a.to_csv(), "name,value,relation,threshold,pass\nx,1.0,<=,2.0,1\ny,3.0,<,2.0,0\n");
}
