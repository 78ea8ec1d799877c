#include "dynarag/http_client.hpp"

#include "dynarag/error.hpp"

#include <chrono>

#include <httplib.h>

namespace dynarag {

namespace {

struct ParsedUrl {
    std::string host;
    int port = 80;
    std::string path = "/";
};

ParsedUrl parse_http_url(const std::string& url) {
    constexpr std::string_view scheme = "http://";
    if (url.rfind(scheme, 0) != 0) {
        throw Error(ErrorCode::config_error, "only http:// endpoints are supported: " + url);
    }
    ParsedUrl out;
    std::string rest = url.substr(scheme.size());
    std::size_t slash = rest.find('/');
    std::string authority = rest.substr(0, slash);
    if (slash != std::string::npos) out.path = rest.substr(slash);
    std::size_t colon = authority.find(':');
    if (colon == std::string::npos) {
        out.host = authority;
    } else {
        out.host = authority.substr(0, colon);
        out.port = std::stoi(authority.substr(colon + 1));
    }
    if (out.host.empty()) {
        throw Error(ErrorCode::config_error, "endpoint URL has no host: " + url);
    }
    return out;
}

} // namespace

HttpResult post_json(const std::string& url, const std::string& json_body,
                     int timeout_ms, const std::string& bearer_token) {
    ParsedUrl target = parse_http_url(url);
    if (timeout_ms < 1) timeout_ms = 1;

    httplib::Client client(target.host, target.port);
    client.set_connection_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    client.set_write_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);

    httplib::Headers headers;
    if (!bearer_token.empty()) {
        headers.emplace("Authorization", "Bearer " + bearer_token);
    }

    HttpResult result;
    auto start = std::chrono::steady_clock::now();
    auto response = client.Post(target.path, headers, json_body, "application/json");
    auto elapsed = std::chrono::steady_clock::now() - start;
    result.latency_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();

    if (!response) {
        result.transport_ok = false;
        result.error = "request to " + url + " failed: " + httplib::to_string(response.error());
        return result;
    }
    result.transport_ok = true;
    result.status = response->status;
    result.body = response->body;
    return result;
}

} // namespace dynarag
