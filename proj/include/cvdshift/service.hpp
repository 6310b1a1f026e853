#pragma once

#include "cvdshift/naming.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace httplib {
class Server;
}

namespace cvdshift {

struct ServiceConfig {
    std::string bind_address = "127.0.0.1";
    int port = 8080;
    std::filesystem::path static_dir;  ///< viewer assets; empty disables static serving
    std::optional<std::filesystem::path> dictionary_path;
    int max_width = 4096;
    int max_height = 4096;

    /// Throws std::invalid_argument for a port outside 0..65535 or non-positive limits.
    void validate() const;
};

enum class ApiErrorCode { BadRequest, UnsupportedMedia, TooLarge, Internal };

std::string_view to_string(ApiErrorCode c);
int http_status(ApiErrorCode c);

class ApiError : public std::runtime_error {
public:
    /// Throws std::invalid_argument for an empty message.
    ApiError(ApiErrorCode code, const std::string& message);

    ApiErrorCode code() const { return code_; }
    int status() const { return http_status(code_); }
    /// {"error": {"code": ..., "message": ...}}
    std::string json() const;

private:
    ApiErrorCode code_;
};

struct ApiResponse {
    int status = 200;
    std::string content_type;
    std::string body;
};

/// Request handlers over the shared core. Each handler is pure given the
/// loaded dictionary and limits, so the service is safe to call concurrently.
class Service {
public:
    using Params = std::multimap<std::string, std::string>;

    explicit Service(ServiceConfig cfg);

    const ServiceConfig& config() const { return cfg_; }
    const ColorDictionary& dictionary() const { return dict_; }

    ApiResponse name(const Params& q) const;            ///< r, g, b, optional k runner-ups
    ApiResponse dictionary_listing() const;
    ApiResponse rotate(const Params& q, const std::string& body, const std::string& content_type) const;
    ApiResponse simulate(const Params& q, const std::string& body, const std::string& content_type) const;
    ApiResponse trajectory(const Params& q) const;      ///< r, g, b, samples
    ApiResponse fig9(const Params& q) const;            ///< base, cvd, spacing, count, step

    /// Installs every /api route, plus the static mount when configured.
    void attach(httplib::Server& server) const;

private:
    ServiceConfig cfg_;
    ColorDictionary dict_;
};

/// Blocks serving until the process is terminated. Throws std::runtime_error
/// when the address cannot be bound.
void serve(const ServiceConfig& cfg);

}  // namespace cvdshift
