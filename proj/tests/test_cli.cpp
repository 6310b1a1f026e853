#include "cvdshift/image.hpp"
#include "cvdshift/rotation.hpp"
#include "cli_runner.hpp"
#include "support.hpp"

#include "json.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace cvdshift;
using testing_support::Gen;
using testing_support::read_file;
using testing_support::run_cli;
using testing_support::scratch_dir;

namespace {

std::filesystem::path write_random_png(const std::string& name, int w, int h, std::uint64_t seed)
{
    Gen gen(seed);
    Image img(w, h, 3);
    for (auto& b : img.bytes())
        b = static_cast<std::uint8_t>(gen.integer(0, 255));
    const auto path = scratch_dir() / name;
    write_image(img, path);
    return path;
}

bool contains(const std::string& haystack, const std::string& needle)
{
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST(Cli, UnknownSubcommandExitsTwo)
{
    const auto r = run_cli({"frobnicate"});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_FALSE(r.err.empty());
    EXPECT_EQ(run_cli({}).exit_code, 2);
}

TEST(Cli, HelpExitsZero)
{
    const auto r = run_cli({"--help"});
    EXPECT_EQ(r.exit_code, 0);
    for (const char* sub : {"rotate", "simulate", "name", "analyze", "study", "serve"})
        EXPECT_TRUE(contains(r.out, sub)) << sub;
}

TEST(Cli, MalformedPngNamesTheFile)
{
    const auto bad = scratch_dir() / "garbage.png";
    std::ofstream(bad, std::ios::binary) << "\x89PNG\r\n\x1a\nthis is not really a png";
    const auto r = run_cli({"rotate", bad.string(), (scratch_dir() / "never.png").string(), "--theta", "10"});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_TRUE(contains(r.err, bad.string())) << r.err;
    EXPECT_FALSE(std::filesystem::exists(scratch_dir() / "never.png"));

    const auto missing = run_cli({"simulate", (scratch_dir() / "absent.png").string(),
                                  (scratch_dir() / "x.png").string(), "--cvd", "protan"});
    EXPECT_EQ(missing.exit_code, 2);
    EXPECT_TRUE(contains(missing.err, "absent.png")) << missing.err;
}

TEST(Cli, RotateZeroIsPixelIdentical)
{
    const auto in = write_random_png("cli_zero_in.png", 50, 30, 701);
    const auto out = scratch_dir() / "cli_zero_out.png";
    const auto r = run_cli({"rotate", in.string(), out.string(), "--theta", "0"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(read_image(out), read_image(in));
}

TEST(Cli, RotateRedToGreenAt120)
{
    const auto in = scratch_dir() / "cli_red.png";
    write_image(Image(8, 8, SRgb8{255, 0, 0}), in);
    const auto out = scratch_dir() / "cli_green.ppm";
    const auto r = run_cli({"rotate", in.string(), out.string(), "--theta", "120"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto img = read_image(out);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const auto p = img.pixel(x, y);
            EXPECT_LE(p.r, 1);
            EXPECT_GE(p.g, 254);
            EXPECT_LE(p.b, 1);
        }
}

TEST(Cli, RotateMatchesLibrary)
{
    const auto in = write_random_png("cli_lib_in.png", 40, 40, 702);
    const auto out = scratch_dir() / "cli_lib_out.png";
    ASSERT_EQ(run_cli({"rotate", in.string(), out.string(), "--theta", "73"}).exit_code, 0);
    EXPECT_EQ(read_image(out), rotate_image(read_image(in), RotationAngle::degrees(73)));
}

TEST(Cli, SimulateRejectsUnknownCvd)
{
    const auto in = write_random_png("cli_sim_in.png", 4, 4, 703);
    const auto r = run_cli({"simulate", in.string(), (scratch_dir() / "s.png").string(), "--cvd", "achromat"});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_TRUE(contains(r.err, "achromat")) << r.err;
    EXPECT_EQ(run_cli({"simulate", in.string(), (scratch_dir() / "s.png").string(), "--cvd", "deutan"}).exit_code, 0);
}

TEST(Cli, NameReferenceColors)
{
    const auto black = run_cli({"name", "0", "0", "0"});
    ASSERT_EQ(black.exit_code, 0) << black.err;
    EXPECT_TRUE(contains(black.out, "black"));
    const auto j = nlohmann::json::parse(run_cli({"name", "136", "136", "136", "--json"}).out);
    EXPECT_TRUE(contains(j["name"].get<std::string>(), "gray"));
    EXPECT_EQ(run_cli({"name", "256", "0", "0"}).exit_code, 2);
    EXPECT_EQ(run_cli({"name", "1", "2"}).exit_code, 2);
}

TEST(Cli, DictionaryFlagIsHonouredAndValidated)
{
    const auto bad = scratch_dir() / "bad_dict.csv";
    std::ofstream(bad) << "name,variant,r,g,b\nred,base,255,0,0\n";
    const auto r = run_cli({"--dictionary", bad.string(), "name", "1", "2", "3"});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_TRUE(contains(r.err, "bad_dict.csv")) << r.err;
}

TEST(Cli, StudyIsDeterministicPerSeed)
{
    const auto a = scratch_dir() / "study_a.csv";
    const auto b = scratch_dir() / "study_b.csv";
    ASSERT_EQ(run_cli({"--seed", "7", "study", "run", "--cvd", "deutan", "--out", a.string()}).exit_code, 0);
    ASSERT_EQ(run_cli({"--seed", "7", "study", "run", "--cvd", "deutan", "--out", b.string()}).exit_code, 0);
    EXPECT_EQ(read_file(a), read_file(b));
    EXPECT_EQ(read_file(scratch_dir() / "study_a.json"), read_file(scratch_dir() / "study_b.json"));
    const auto j = nlohmann::json::parse(read_file(scratch_dir() / "study_a.json"));
    EXPECT_EQ(j["ellipses"].size(), 8u);

    const auto c = scratch_dir() / "study_c.csv";
    ASSERT_EQ(run_cli({"--seed", "8", "study", "run", "--cvd", "deutan", "--out", c.string()}).exit_code, 0);
    EXPECT_NE(read_file(a), read_file(c));
    EXPECT_EQ(run_cli({"study", "run"}).exit_code, 2);
    EXPECT_EQ(run_cli({"study", "run", "--cvd", "deutan", "--lapse", "2"}).exit_code, 2);
}

TEST(Cli, AnalyzeFig9WritesCsvAndJson)
{
    const auto r = run_cli({"analyze", "fig9"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 12 * 360);
    const auto bad = run_cli({"analyze", "fig9", "--base", "1,2"});
    EXPECT_EQ(bad.exit_code, 2);
}

TEST(Cli, AnalyzeEllipseFitsPoints)
{
    const auto pts = scratch_dir() / "points.csv";
    {
        std::ofstream out(pts);
        out.precision(17);
        out << "x,y\n";
        for (int i = 0; i < 8; ++i) {
            const double t = i * std::numbers::pi / 4;
            out << 0.3 + 0.02 * std::cos(t) << "," << 0.32 + 0.01 * std::sin(t) << "\n";
        }
    }
    const auto r = run_cli({"analyze", "ellipse", pts.string()});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["semi_major"].get<double>(), 0.02, 1e-6);
    EXPECT_NEAR(j["semi_minor"].get<double>(), 0.01, 1e-6);
    EXPECT_NEAR(j["area"].get<double>(), std::numbers::pi * 0.02 * 0.01, 1e-9);

    const auto few = scratch_dir() / "few.csv";
    std::ofstream(few) << "x,y\n0.1,0.1\n0.2,0.2\n";
    EXPECT_NE(run_cli({"analyze", "ellipse", few.string()}).exit_code, 0);
}

TEST(Cli, TrajectoryCsv)
{
    const auto r = run_cli({"trajectory", "255", "0", "0", "--samples", "6"});
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 7);
}

TEST(Cli, ServeRejectsBadPort)
{
    EXPECT_EQ(run_cli({"serve", "--port", "70000"}).exit_code, 2);
}
