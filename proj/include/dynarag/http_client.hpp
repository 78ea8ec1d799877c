#pragma once

#include <string>

namespace dynarag {

struct HttpResult {
    bool transport_ok = false;  // a response arrived (any status code)
    int status = 0;
    std::string body;
    std::string error;          // transport diagnostic when !transport_ok
    long long latency_ms = 0;

    bool ok() const { return transport_ok && status >= 200 && status < 300; }
};

// POST `json_body` (application/json) to an http:// URL. Network faults
// and timeouts are reported in the result, never thrown. `bearer_token`,
// when non-empty, is sent as an Authorization header.
HttpResult post_json(const std::string& url, const std::string& json_body,
                     int timeout_ms, const std::string& bearer_token = "");

} // namespace dynarag
