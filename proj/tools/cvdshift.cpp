#include "cvdshift/analysis.hpp"
#include "cvdshift/cvd_sim.hpp"
#include "cvdshift/image.hpp"
#include "cvdshift/naming.hpp"
#include "cvdshift/psychophysics.hpp"
#include "cvdshift/report.hpp"
#include "cvdshift/rotation.hpp"
#include "cvdshift/service.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace cvdshift;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

/// Raised for bad inputs that the argument parser cannot catch.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw std::runtime_error(path + ": cannot write file");
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError(path + ": cannot open file");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

CvdType cvd_from(const std::string& text)
{
    try {
        return parse_cvd_type(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

struct Options {
    std::string dictionary;
    std::uint64_t seed = 1;

    std::string input, output;
    double theta_deg = 0.0;
    std::string cvd = "protan";

    int r = 0, g = 0, b = 0;
    int k = 0;
    bool json = false;

    int samples = 72;
    std::string format = "csv";

    std::string base = "136,136,136";
    double spacing = 5.0;
    int count = 13;
    double step = 1.0;
    std::string csv_out = "-";
    std::string json_out;
    bool curves = false;

    double tau_jnd = 1.0;
    double lapse = 0.0;

    std::string bind = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
};

const ColorDictionary& dictionary_for(const Options& o, std::optional<ColorDictionary>& storage)
{
    if (o.dictionary.empty())
        return ColorDictionary::builtin();
    try {
        storage = ColorDictionary::load(o.dictionary);
    } catch (const DictionaryError& e) {
        throw UsageError(e.what());
    }
    return *storage;
}

Image load_input(const std::string& path)
{
    try {
        return read_image(path);
    } catch (const ImageError& e) {
        throw UsageError(e.what());
    }
}

int cmd_rotate(const Options& o)
{
    write_image(rotate_image(load_input(o.input), RotationAngle::degrees(o.theta_deg)), o.output);
    return 0;
}

int cmd_simulate(const Options& o)
{
    write_image(simulate_image(load_input(o.input), cvd_from(o.cvd)), o.output);
    return 0;
}

int cmd_name(const Options& o)
{
    std::optional<ColorDictionary> storage;
    const auto& dict = dictionary_for(o, storage);
    const auto c = srgb_decode(
        SRgb8{static_cast<std::uint8_t>(o.r), static_cast<std::uint8_t>(o.g), static_cast<std::uint8_t>(o.b)});
    const auto best = name_color(c, dict);
    if (o.json) {
        std::vector<ColorName> nearest;
        if (o.k > 0)
            nearest = nearest_k(c, dict, static_cast<std::size_t>(o.k));
        std::cout << report::name_json(best, nearest);
        return 0;
    }
    std::cout << best.name << "\n";
    if (o.k > 0)
        for (const auto& n : nearest_k(c, dict, static_cast<std::size_t>(o.k)))
            std::cout << "  " << n.name << " " << n.distance << "\n";
    return 0;
}

int cmd_trajectory(const Options& o)
{
    const auto c = srgb_decode(
        SRgb8{static_cast<std::uint8_t>(o.r), static_cast<std::uint8_t>(o.g), static_cast<std::uint8_t>(o.b)});
    if (o.r + o.g + o.b == 0)
        throw UsageError("black has no chromaticity trajectory");
    const auto t = shift_trajectory(c, o.samples);
    write_text(o.output, o.format == "json" ? report::trajectory_json(t) : report::trajectory_csv(t));
    return 0;
}

int cmd_fig9(const Options& o)
{
    report::Fig9Request req;
    try {
        req.base = report::parse_rgb_triplet(o.base);
    } catch (const report::ParseError& e) {
        throw UsageError(std::string("--base: ") + e.what());
    }
    req.cvd = cvd_from(o.cvd);
    req.spacing_delta_e = o.spacing;
    req.count = o.count;
    req.angle_step_deg = o.step;
    const auto result = report::run_fig9(req);
    write_text(o.csv_out, report::fig9_csv(result));
    if (!o.json_out.empty())
        write_text(o.json_out, report::fig9_json(result, o.curves));
    return 0;
}

int cmd_ellipse(const Options& o)
{
    std::vector<XyChromaticity> pts;
    try {
        pts = report::parse_points_csv(read_text(o.input), o.input);
    } catch (const report::ParseError& e) {
        throw UsageError(e.what());
    }
    write_text(o.output, report::ellipse_json(fit_ellipse(pts)));
    return 0;
}

int cmd_study(const Options& o)
{
    const SimulatedObserver observer(cvd_from(o.cvd), o.tau_jnd, o.lapse);
    const auto cfg = make_study_config(o.seed);
    const auto records = run_study(observer, cfg);
    const auto summary = report::study_json(observer, cfg, summarize_study(records));
    write_text(o.output, report::study_csv(records));
    if (o.output.empty() || o.output == "-")
        std::cout << summary;
    else
        write_text(std::filesystem::path(o.output).replace_extension(".json").string(), summary);
    return 0;
}

int cmd_serve(const Options& o)
{
    ServiceConfig cfg;
    cfg.bind_address = o.bind;
    cfg.port = o.port;
    cfg.static_dir = o.static_dir;
    if (!o.dictionary.empty())
        cfg.dictionary_path = o.dictionary;
    std::cerr << "serving on http://" << cfg.bind_address << ":" << cfg.port << "\n";
    serve(cfg);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    Options o;
    CLI::App app{"Gray-axis color rotation toolkit for dichromat color discrimination"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--dictionary", o.dictionary, "Color-name CSV (name,variant,r,g,b) replacing the built-in table");
    app.add_option("--seed", o.seed, "Random seed for stochastic commands");

    auto* rotate = app.add_subcommand("rotate", "Rotate an image's colors about the gray axis");
    rotate->add_option("input", o.input, "Input PNG or PPM")->required();
    rotate->add_option("output", o.output, "Output path (.ppm writes P6, anything else PNG)")->required();
    rotate->add_option("--theta", o.theta_deg, "Rotation angle in degrees")->required();

    auto* simulate = app.add_subcommand("simulate", "Render an image as a dichromat perceives it");
    simulate->add_option("input", o.input, "Input PNG or PPM")->required();
    simulate->add_option("output", o.output, "Output path")->required();
    simulate->add_option("--cvd", o.cvd, "protan, deutan or tritan")->required();

    auto* name = app.add_subcommand("name", "Name an sRGB color from the dictionary");
    name->add_option("r", o.r)->required()->check(CLI::Range(0, 255));
    name->add_option("g", o.g)->required()->check(CLI::Range(0, 255));
    name->add_option("b", o.b)->required()->check(CLI::Range(0, 255));
    name->add_option("-k,--nearest", o.k, "Also list the k nearest entries")->check(CLI::Range(1, 57));
    name->add_flag("--json", o.json, "Emit the same JSON as the HTTP service");

    auto* trajectory = app.add_subcommand("trajectory", "Chromaticity trail of a color over a full rotation");
    trajectory->add_option("r", o.r)->required()->check(CLI::Range(0, 255));
    trajectory->add_option("g", o.g)->required()->check(CLI::Range(0, 255));
    trajectory->add_option("b", o.b)->required()->check(CLI::Range(0, 255));
    trajectory->add_option("--samples", o.samples, "Number of angles")->check(CLI::Range(2, 3600));
    trajectory->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));
    trajectory->add_option("--out", o.output, "Output path, '-' for stdout");

    auto* analyze = app.add_subcommand("analyze", "Discriminability and threshold-ellipse analyses");
    analyze->require_subcommand(1);
    auto* fig9 = analyze->add_subcommand("fig9", "Perceived JND of adjacent confusion-line pairs versus rotation");
    fig9->add_option("--base", o.base, "Base color as r,g,b");
    fig9->add_option("--cvd", o.cvd, "protan, deutan or tritan");
    fig9->add_option("--spacing", o.spacing, "dE76 between adjacent samples")->check(CLI::PositiveNumber);
    fig9->add_option("--count", o.count, "Samples on the line")->check(CLI::Range(2, 64));
    fig9->add_option("--step", o.step, "Angle step in degrees")->check(CLI::Range(0.1, 360.0));
    fig9->add_option("--csv", o.csv_out, "Per-angle CSV path, '-' for stdout");
    fig9->add_option("--json", o.json_out, "Per-pair summary JSON path");
    fig9->add_flag("--curves", o.curves, "Include the sampled curves in the JSON");
    auto* ellipse = analyze->add_subcommand("ellipse", "Fit a threshold ellipse to x,y points");
    ellipse->add_option("points", o.input, "CSV with header x,y")->required();
    ellipse->add_option("--out", o.output, "Output JSON path, '-' for stdout");

    auto* study = app.add_subcommand("study", "Simulated-observer discrimination study");
    study->require_subcommand(1);
    auto* run = study->add_subcommand("run", "Run all 64 staircase sequences");
    run->add_option("--cvd", o.cvd, "Observer type")->required();
    run->add_option("--tau-jnd", o.tau_jnd, "Observer threshold in JND")->check(CLI::PositiveNumber);
    run->add_option("--lapse", o.lapse, "Lapse rate")->check(CLI::Range(0.0, 1.0));
    run->add_option("--out", o.output, "Threshold CSV path; ellipse JSON goes next to it");

    auto* serve_cmd = app.add_subcommand("serve", "Local HTTP service for the viewer");
    serve_cmd->add_option("--bind", o.bind, "Bind address");
    serve_cmd->add_option("--port", o.port)->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--static", o.static_dir, "Viewer asset directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (*rotate)
            return cmd_rotate(o);
        if (*simulate)
            return cmd_simulate(o);
        if (*name)
            return cmd_name(o);
        if (*trajectory)
            return cmd_trajectory(o);
        if (*fig9)
            return cmd_fig9(o);
        if (*ellipse)
            return cmd_ellipse(o);
        if (*run)
            return cmd_study(o);
        if (*serve_cmd)
            return cmd_serve(o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
