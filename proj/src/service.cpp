#include "cvdshift/service.hpp"

#include "cvdshift/cvd_sim.hpp"
#include "cvdshift/image.hpp"
#include "cvdshift/report.hpp"
#include "cvdshift/rotation.hpp"

#include "httplib.h"
#include "json.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <span>

namespace cvdshift {

void ServiceConfig::validate() const
{
    if (port < 0 || port > 65535)
        throw std::invalid_argument("port must be in 0..65535");
    if (max_width <= 0 || max_height <= 0)
        throw std::invalid_argument("maximum image dimensions must be positive");
    if (bind_address.empty())
        throw std::invalid_argument("bind address must not be empty");
}

std::string_view to_string(ApiErrorCode c)
{
    switch (c) {
    case ApiErrorCode::BadRequest: return "bad_request";
    case ApiErrorCode::UnsupportedMedia: return "unsupported_media";
    case ApiErrorCode::TooLarge: return "too_large";
    case ApiErrorCode::Internal: return "internal";
    }
    return "internal";
}

int http_status(ApiErrorCode c)
{
    switch (c) {
    case ApiErrorCode::BadRequest: return 400;
    case ApiErrorCode::UnsupportedMedia: return 415;
    case ApiErrorCode::TooLarge: return 413;
    case ApiErrorCode::Internal: return 500;
    }
    return 500;
}

ApiError::ApiError(ApiErrorCode code, const std::string& message) : std::runtime_error(message), code_(code)
{
    if (message.empty())
        throw std::invalid_argument("ApiError message must not be empty");
}

std::string ApiError::json() const
{
    nlohmann::ordered_json j;
    j["error"] = {{"code", to_string(code_)}, {"message", what()}};
    return j.dump() + "\n";
}

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kPng = "image/png";

ApiError bad_request(const std::string& msg) { return {ApiErrorCode::BadRequest, msg}; }

const std::string* find_param(const Service::Params& q, const std::string& key)
{
    const auto it = q.find(key);
    return it == q.end() ? nullptr : &it->second;
}

const std::string& require_param(const Service::Params& q, const std::string& key)
{
    if (const auto* v = find_param(q, key))
        return *v;
    throw bad_request("missing query parameter '" + key + "'");
}

double number_param(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v))
        throw bad_request("parameter '" + key + "' must be a number");
    return v;
}

long integer_param(const std::string& key, const std::string& text, long lo, long hi)
{
    long v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc{} || ptr != end || v < lo || v > hi)
        throw bad_request("parameter '" + key + "' must be an integer in " + std::to_string(lo) + ".."
                          + std::to_string(hi));
    return v;
}

SRgb8 rgb_params(const Service::Params& q)
{
    return {static_cast<std::uint8_t>(integer_param("r", require_param(q, "r"), 0, 255)),
            static_cast<std::uint8_t>(integer_param("g", require_param(q, "g"), 0, 255)),
            static_cast<std::uint8_t>(integer_param("b", require_param(q, "b"), 0, 255))};
}

CvdType cvd_param(const Service::Params& q)
{
    const auto& text = require_param(q, "cvd");
    try {
        return parse_cvd_type(text);
    } catch (const std::invalid_argument&) {
        throw bad_request("parameter 'cvd' must be protan, deutan or tritan, got '" + text + "'");
    }
}

std::uint32_t read_be32(const std::string& s, std::size_t at)
{
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < 4; ++i)
        v = (v << 8) | static_cast<unsigned char>(s[at + i]);
    return v;
}

Image decode_upload(const std::string& body, const std::string& content_type, const ServiceConfig& cfg)
{
    const auto media = content_type.substr(0, content_type.find(';'));
    if (!media.empty() && media != kPng && media != "application/octet-stream")
        throw ApiError(ApiErrorCode::UnsupportedMedia, "expected an image/png body, got '" + media + "'");
    static constexpr unsigned char kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (body.size() < 8 || !std::equal(std::begin(kSignature), std::end(kSignature), body.begin(),
                                       [](unsigned char a, char b) { return a == static_cast<unsigned char>(b); }))
        throw ApiError(ApiErrorCode::UnsupportedMedia, "request body is not a PNG image");
    // IHDR is always the first chunk; checking it first avoids decoding oversized uploads.
    if (body.size() >= 24) {
        const auto w = read_be32(body, 16);
        const auto h = read_be32(body, 20);
        if (w > static_cast<std::uint32_t>(cfg.max_width) || h > static_cast<std::uint32_t>(cfg.max_height))
            throw ApiError(ApiErrorCode::TooLarge, "image is " + std::to_string(w) + "x" + std::to_string(h)
                                                       + ", limit is " + std::to_string(cfg.max_width) + "x"
                                                       + std::to_string(cfg.max_height));
    }
    try {
        const auto* data = reinterpret_cast<const std::uint8_t*>(body.data());
        return decode_png(std::span(data, body.size()), "upload");
    } catch (const ImageError& e) {
        throw bad_request(e.what());
    }
}

ApiResponse png_response(const Image& img)
{
    const auto bytes = encode_png(img);
    return {200, kPng, std::string(bytes.begin(), bytes.end())};
}

template <typename Fn>
ApiResponse guarded(Fn&& fn)
{
    try {
        return fn();
    } catch (const ApiError& e) {
        return {e.status(), kJson, e.json()};
    } catch (const std::invalid_argument& e) {
        const ApiError err(ApiErrorCode::BadRequest, e.what());
        return {err.status(), kJson, err.json()};
    } catch (const std::domain_error& e) {
        const ApiError err(ApiErrorCode::BadRequest, e.what());
        return {err.status(), kJson, err.json()};
    } catch (const GamutError& e) {
        const ApiError err(ApiErrorCode::BadRequest, e.what());
        return {err.status(), kJson, err.json()};
    } catch (const std::exception& e) {
        const ApiError err(ApiErrorCode::Internal, e.what()[0] ? e.what() : "internal error");
        return {err.status(), kJson, err.json()};
    }
}

}  // namespace

Service::Service(ServiceConfig cfg)
    : cfg_(std::move(cfg)),
      dict_(cfg_.dictionary_path ? ColorDictionary::load(*cfg_.dictionary_path) : ColorDictionary::builtin())
{
    cfg_.validate();
}

ApiResponse Service::name(const Params& q) const
{
    return guarded([&] {
        const auto c = srgb_decode(rgb_params(q));
        const auto best = name_color(c, dict_);
        std::vector<ColorName> nearest;
        if (const auto* k = find_param(q, "k"))
            nearest = nearest_k(c, dict_,
                                static_cast<std::size_t>(integer_param("k", *k, 1, static_cast<long>(dict_.size()))));
        return ApiResponse{200, kJson, report::name_json(best, nearest)};
    });
}

ApiResponse Service::dictionary_listing() const
{
    return guarded([&] { return ApiResponse{200, kJson, report::dictionary_json(dict_)}; });
}

ApiResponse Service::rotate(const Params& q, const std::string& body, const std::string& content_type) const
{
    return guarded([&] {
        const double theta = number_param("theta_deg", require_param(q, "theta_deg"));
        const auto img = decode_upload(body, content_type, cfg_);
        return png_response(rotate_image(img, RotationAngle::degrees(theta)));
    });
}

ApiResponse Service::simulate(const Params& q, const std::string& body, const std::string& content_type) const
{
    return guarded([&] {
        const auto cvd = cvd_param(q);
        const auto img = decode_upload(body, content_type, cfg_);
        return png_response(simulate_image(img, cvd));
    });
}

ApiResponse Service::trajectory(const Params& q) const
{
    return guarded([&] {
        const auto c = srgb_decode(rgb_params(q));
        int samples = 72;
        if (const auto* s = find_param(q, "samples"))
            samples = static_cast<int>(integer_param("samples", *s, 2, 3600));
        return ApiResponse{200, kJson, report::trajectory_json(shift_trajectory(c, samples))};
    });
}

ApiResponse Service::fig9(const Params& q) const
{
    return guarded([&] {
        report::Fig9Request req;
        if (const auto* b = find_param(q, "base"))
            req.base = report::parse_rgb_triplet(*b);
        if (find_param(q, "cvd"))
            req.cvd = cvd_param(q);
        if (const auto* s = find_param(q, "spacing"))
            req.spacing_delta_e = number_param("spacing", *s);
        if (const auto* n = find_param(q, "count"))
            req.count = static_cast<int>(integer_param("count", *n, 2, 64));
        if (const auto* s = find_param(q, "step")) {
            req.angle_step_deg = number_param("step", *s);
            if (req.angle_step_deg < 0.1)
                throw bad_request("parameter 'step' must be at least 0.1 degrees");
        }
        return ApiResponse{200, kJson, report::fig9_json(report::run_fig9(req), true)};
    });
}

void Service::attach(httplib::Server& server) const
{
    const auto reply = [](httplib::Response& res, const ApiResponse& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server.set_payload_max_length(std::size_t{256} << 20);
    server.Get("/api/name", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, name(req.params));
    });
    server.Get("/api/dictionary", [this, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, dictionary_listing());
    });
    server.Post("/api/rotate", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, rotate(req.params, req.body, req.get_header_value("Content-Type")));
    });
    server.Post("/api/simulate", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, simulate(req.params, req.body, req.get_header_value("Content-Type")));
    });
    server.Get("/api/trajectory", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, trajectory(req.params));
    });
    server.Get("/api/fig9", [this, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, fig9(req.params));
    });
    if (!cfg_.static_dir.empty())
        server.set_mount_point("/", cfg_.static_dir.string());
}

void serve(const ServiceConfig& cfg)
{
    const Service service(cfg);
    httplib::Server server;
    service.attach(server);
    if (!server.bind_to_port(cfg.bind_address, cfg.port))
        throw std::runtime_error("cannot bind " + cfg.bind_address + ":" + std::to_string(cfg.port));
    server.listen_after_bind();
}

}  // namespace cvdshift
