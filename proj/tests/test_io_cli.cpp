#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "lieball/cli.hpp"
#include "lieball/io.hpp"

using namespace lieball;
namespace fs = std::filesystem;

namespace {

const fs::path data_dir = LIEBALL_DATA_DIR;

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("lieball_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    fs::path dir;

    fs::path write(const std::string& name, const std::string& text) const {
        const auto p = dir / name;
        io::write_atomic(p, text);
        return p;
    }
};

struct Outcome {
    int code;
    std::string out, err;
};

Outcome invoke(const cli::RunConfig& cfg) {
    std::ostringstream o, e;
    const int code = cli::run(cfg, o, e);
    return {code, o.str(), e.str()};
}

cli::RunConfig expand_cfg(const fs::path& spec, const fs::path& out, int K = 10) {
    cli::RunConfig c;
    c.command = cli::Command::expand;
    c.spec = spec.string();
    c.out = out.string();
    c.K = K;
    c.M = 12;
    c.radial_nodes = 16;
    return c;
}

} // namespace

TEST(SpecIO, RoundTripsEveryKind) {
    ComplexPolynomial p(2);
    p.add_term({1, 1}, cplx(0.5, -1.0));
    p.add_term({0, 0}, 2.0);
    for (const auto& s : {FunctionSpec::polynomial(p, 1.5), FunctionSpec::inverse_quadratic(4, 1.0, 3.0),
                          FunctionSpec::newton_kernel(1.0, {0.0, 1.5, 1.5}), FunctionSpec::exp_linear(2.0, {1.0, -2.0})}) {
        const auto back = io::spec_from_json(io::parse_json(io::dump(io::to_json(s)), "mem"));
        EXPECT_EQ(io::to_json(back), io::to_json(s));
        EXPECT_EQ(back.kind, s.kind);
    }
    for (const char* f : {"inverse_quadratic.json", "newton_kernel.json", "newton_kernel_far.json", "exp_linear.json",
                          "harmonic_cubic.json"})
        EXPECT_NO_THROW(io::spec_from_json(io::load_json(data_dir / f))) << f;
}

TEST(SpecIO, ErrorsNameTheField) {
    auto field_of = [](const std::string& text) -> std::string {
        try {
            io::spec_from_json(io::parse_json(text, "mem"));
        } catch (const ValidationError& e) {
            return e.field();
        }
        return "";
    };
    EXPECT_EQ(field_of(R"({"kind":"inverse_quadratic","n":3,"R":1,"params":{"a":0.5}})"), "params.a");
    EXPECT_EQ(field_of(R"({"kind":"inverse_quadratic","n":3,"params":{"a":5}})"), "R");
    EXPECT_EQ(field_of(R"({"kind":"newton_kernel","n":3,"R":1,"params":{"pole":[0,0,"x"]}})"), "params.pole");
    EXPECT_EQ(field_of(R"({"kind":"exp_linear","n":3,"R":1,"params":{}})"), "params.direction");
    EXPECT_EQ(field_of(R"({"kind":"polynomial","n":2,"R":1,"params":[{"alpha":[1],"re":1}]})"), "params[0].alpha");
    EXPECT_EQ(field_of(R"({"kind":"mystery","n":2,"R":1,"params":[]})"), "kind");
    EXPECT_EQ(field_of(R"({"kind":"exp_linear","n":1.5,"R":1,"params":{"direction":[1]}})"), "n");
}

TEST(SpecIO, MalformedJsonReportsPosition) {
    try {
        io::parse_json("{\n  \"kind\": ,\n}", "bad.json");
        FAIL();
    } catch (const io::ParseError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("bad.json:2:", 0), 0u) << e.what();
    }
}

TEST(PointsIO, BothLayoutsAndErrors) {
    const auto pts = io::points_from_json(io::load_json(data_dir / "points.json"));
    ASSERT_EQ(pts.size(), 4u);
    const auto bare = io::points_from_json(io::parse_json(R"([{"re":[1,2]},{"re":[0,0],"im":[1,1]}])", "mem"));
    ASSERT_EQ(bare.size(), 2u);
    EXPECT_EQ(bare[0].im()[1], 0.0);
    EXPECT_EQ(bare[1].im()[0], 1.0);
    try {
        io::points_from_json(io::parse_json(R"({"points":[{"re":[1]},{"re":[1,2],"im":[1]}]})", "mem"));
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "points[1].im");
    }
}

TEST(ExpansionIO, JsonRoundTripIsBitwise) {
    ExpandOptions o;
    o.K = 8;
    o.M = 10;
    o.radial_nodes = 12;
    const auto e = expand(FunctionSpec::newton_kernel(1.0, {0.3, 0.0, 1.9}), o);
    const auto back = io::expansion_from_json(io::parse_json(io::dump(io::to_json(e)), "mem"));
    EXPECT_EQ(back.n, e.n);
    EXPECT_EQ(back.scale, e.scale);
    EXPECT_EQ(back.radial_nodes, e.radial_nodes);
    for (int k = 0; k <= e.K; ++k)
        for (std::size_t l = 0; l < e.profiles[k].size(); ++l) {
            EXPECT_EQ(back.profile(k, l).coeffs, e.profile(k, l).coeffs);
            EXPECT_EQ(back.profile(k, l).fit_residual, e.profile(k, l).fit_residual);
        }
    const std::vector<double> x{0.1, -0.4, 0.2};
    EXPECT_EQ(roundtrip(back, x), roundtrip(e, x));
    EXPECT_EQ(io::dump(io::to_json(back)), io::dump(io::to_json(e)));
}

TEST(ExpansionIO, RejectsMissingAndDuplicateRows) {
    ExpandOptions o;
    o.K = 2;
    o.M = 2;
    o.radial_nodes = 4;
    auto j = io::to_json(expand(FunctionSpec::exp_linear(1.0, {1.0, 0.0}), o));
    auto dup = j;
    dup["rows"][1] = dup["rows"][0];
    EXPECT_THROW(io::expansion_from_json(dup), ValidationError);
    auto missing = j;
    missing["rows"].erase(missing["rows"].size() - 1);
    EXPECT_THROW(io::expansion_from_json(missing), ValidationError);
    auto bad = j;
    bad["format"] = "lieball/0";
    EXPECT_THROW(io::expansion_from_json(bad), ValidationError);
}

TEST(ExpansionIO, CsvMatchesJsonValues) {
    ExpandOptions o;
    o.K = 4;
    o.M = 4;
    o.radial_nodes = 8;
    const auto e = expand(FunctionSpec::exp_linear(1.0, {0.2, 0.7, -0.1}), o);
    std::istringstream csv(io::expansion_csv(e));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "k,l,m,re,im,fit_residual,source");
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
        int k, l, m;
        double re, im;
        ASSERT_EQ(std::sscanf(line.c_str(), "%d,%d,%d,%lf,%lf", &k, &l, &m, &re, &im), 5);
        EXPECT_EQ(cplx(re, im), e.profile(k, l).coeffs[m]);
        ++rows;
    }
    EXPECT_EQ(rows, e.profile_count() * 5);
}

TEST(WriteAtomic, LeavesNoTemporary) {
    const auto dir = fs::temp_directory_path() / "lieball_atomic";
    fs::create_directories(dir);
    io::write_atomic(dir / "a.txt", "one");
    io::write_atomic(dir / "a.txt", "two");
    EXPECT_EQ(io::read_file(dir / "a.txt"), "two");
    EXPECT_FALSE(fs::exists(dir / "a.txt.tmp"));
    EXPECT_THROW(io::write_atomic(dir / "missing" / "b.txt", "x"), ValidationError);
    fs::remove_all(dir);
}

TEST_F(TempDir, ExpandInverseQuadraticHasOneNonzeroRow) {
    const auto out = dir / "iq.json";
    const auto r = invoke(expand_cfg(data_dir / "inverse_quadratic.json", out));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("nonzero=1 "), std::string::npos) << r.out;
    EXPECT_FALSE(fs::exists(dir / "iq.json.tmp"));
    const auto j = io::load_json(out);
    EXPECT_EQ(j.at("format"), io::format_version);
    EXPECT_EQ(j.at("artifact"), "expansion");
    const auto e = io::expansion_from_json(j);
    EXPECT_NEAR(e.profile(0, 0).coeffs[0].real(), std::sqrt(sphere_area(3)) / 4, 1e-12);
}

TEST_F(TempDir, ReplayingEmbeddedConfigIsByteIdentical) {
    const auto out = dir / "exp.json";
    ASSERT_EQ(invoke(expand_cfg(data_dir / "exp_linear.json", out)).code, 0);
    const auto first = io::read_file(out);
    const auto cfg = cli::RunConfig::from_json(io::parse_json(first, "mem").at("config"));
    fs::remove(out);
    ASSERT_EQ(invoke(cfg).code, 0);
    EXPECT_EQ(io::read_file(out), first);

    ::setenv("LIEBALL_THREADS", "3", 1);
    ASSERT_EQ(invoke(cfg).code, 0);
    ::unsetenv("LIEBALL_THREADS");
    EXPECT_EQ(io::read_file(out), first);
}

TEST_F(TempDir, ExtendWritesValuesInInputOrder) {
    const auto exp = dir / "newton.json";
    ASSERT_EQ(invoke(expand_cfg(data_dir / "newton_kernel.json", exp, 20)).code, 0);
    cli::RunConfig c;
    c.command = cli::Command::extend;
    c.expansion = exp.string();
    c.points = (data_dir / "points.json").string();
    c.out = (dir / "values.json").string();
    c.decay = true;
    const auto r = invoke(c);
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = io::load_json(c.out);
    const auto pts = io::points_from_json(io::load_json(c.points));
    const auto spec = FunctionSpec::newton_kernel(1.0, {0.0, 0.0, 2.0});
    ASSERT_EQ(j.at("rows").size(), pts.size());
    EXPECT_EQ(j.at("tail_bound_kind"), "empirical");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& row = j.at("rows")[i];
        EXPECT_EQ(io::point_from_json(row.at("z"), "z"), pts[i]);
        const cplx v(row.at("value").at("re").get<double>(), row.at("value").at("im").get<double>());
        EXPECT_NEAR(std::abs(v - spec(pts[i])), 0.0, 1e-6);
    }
    // CSV carries the same numbers.
    c.format = "csv";
    c.out = (dir / "values.csv").string();
    ASSERT_EQ(invoke(c).code, 0);
    std::istringstream csv(io::read_file(c.out));
    std::string line;
    std::getline(csv, line);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        ASSERT_TRUE(std::getline(csv, line));
        const auto& v = j.at("rows")[i].at("value");
        EXPECT_NE(line.find(io::g17(v.at("re").get<double>()) + "," + io::g17(v.at("im").get<double>())),
                  std::string::npos);
    }
}

TEST_F(TempDir, EstimateRadiusPrintsRhoHat) {
    cli::RunConfig c;
    c.command = cli::Command::estimate_radius;
    c.spec = (data_dir / "newton_kernel.json").string();
    const auto r = invoke(c);
    ASSERT_EQ(r.code, 0) << r.err;
    double rho = 0.0;
    ASSERT_EQ(std::sscanf(r.out.c_str(), "rho_hat = %lf", &rho), 1) << r.out;
    EXPECT_GT(rho, 1.9);
    EXPECT_LT(rho, 2.1);
}

TEST_F(TempDir, ExitCodes) {
    // Invalid flag values and files: 2.
    auto c = expand_cfg(data_dir / "inverse_quadratic.json", dir / "x.json");
    c.K = -1;
    auto r = invoke(c);
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.err.rfind("error: invalid field 'K': must", 0), 0u) << r.err;

    c = expand_cfg(write("bad.json", "{\"kind\": \"exp_linear\",\n \"n\": }"), dir / "x.json");
    r = invoke(c);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("bad.json:2:"), std::string::npos) << r.err;

    c = expand_cfg(data_dir / "inverse_quadratic.json", dir / "x.json");
    c.n = 4;
    EXPECT_EQ(invoke(c).code, 2);

    c = expand_cfg(dir / "nope.json", dir / "x.json");
    r = invoke(c);
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.err.rfind("error: invalid field 'spec': cannot open file", 0), 0u) << r.err;

    // Out-of-domain point: 2.
    ASSERT_EQ(invoke(expand_cfg(data_dir / "newton_kernel.json", dir / "n.json", 6)).code, 0);
    cli::RunConfig x;
    x.command = cli::Command::extend;
    x.expansion = (dir / "n.json").string();
    x.points = write("far.json", R"({"points":[{"re":[0,0,0.1]},{"re":[0,0,1.5]}]})").string();
    x.out = (dir / "v.json").string();
    r = invoke(x);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("point 1"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(dir / "v.json"));

    // Resource cap: 2.
    c = expand_cfg(write("wide.json", R"({"kind":"exp_linear","n":8,"R":1,"params":{"direction":[1,0,0,0,0,0,0,0]}})"),
                   dir / "x.json", 4);
    c.quad_degree = 400;
    r = invoke(c);
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(r.err.rfind("error: resource:", 0), 0u) << r.err;

    // Unwritable output directory: 2. Rename onto a non-empty directory: 1.
    EXPECT_EQ(invoke(expand_cfg(data_dir / "inverse_quadratic.json", dir / "missing_dir" / "x.json")).code, 2);
    fs::create_directories(dir / "occupied");
    write("occupied/keep.txt", "x");
    r = invoke(expand_cfg(data_dir / "inverse_quadratic.json", dir / "occupied"));
    EXPECT_EQ(r.code, 1) << r.err;
    EXPECT_FALSE(fs::exists(dir / "occupied.tmp"));
}

TEST_F(TempDir, VerifyIsDeterministicAndWritesReport) {
    cli::RunConfig c;
    c.command = cli::Command::verify;
    c.suite = "legendre";
    c.trials = 10;
    c.seed = 7;
    c.out = (dir / "v1.json").string();
    const auto r = invoke(c);
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_NE(r.out.find("84 checks, 0 failing"), std::string::npos) << r.out;
    c.out = (dir / "v2.json").string();
    ASSERT_EQ(invoke(c).code, 0);
    auto a = io::load_json(dir / "v1.json");
    auto b = io::load_json(dir / "v2.json");
    a["config"].erase("out");
    b["config"].erase("out");
    EXPECT_EQ(a, b);
    EXPECT_TRUE(a.at("passed").get<bool>());
}

TEST_F(TempDir, BasisExport) {
    cli::RunConfig c;
    c.command = cli::Command::basis;
    c.n = 3;
    c.k = 2;
    c.out = (dir / "b.json").string();
    ASSERT_EQ(invoke(c).code, 0);
    const auto j = io::load_json(c.out);
    EXPECT_EQ(j.at("basis").at("size"), 5);
    c.n.reset();
    EXPECT_EQ(invoke(c).code, 2);
}

TEST(RunConfig, JsonRoundTrip) {
    cli::RunConfig c;
    c.command = cli::Command::estimate_radius;
    c.n = 3;
    c.tau = 0.25;
    c.spec = "a.json";
    c.seed = 99;
    const auto back = cli::RunConfig::from_json(c.to_json());
    EXPECT_EQ(back.to_json(), c.to_json());
    EXPECT_FALSE(c.to_json().contains("threads"));
    EXPECT_THROW(cli::command_from_string("launch"), ValidationError);
}
