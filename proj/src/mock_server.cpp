#include "dynarag/mock_server.hpp"

#include "dynarag/error.hpp"

#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

namespace dynarag {

namespace {

std::string endpoint_path(const std::string& endpoint) {
    // Path component of an URL; bare authorities serve at "/".
    std::size_t scheme = endpoint.find("://");
    std::size_t from = scheme == std::string::npos ? 0 : scheme + 3;
    std::size_t slash = endpoint.find('/', from);
    if (slash == std::string::npos) return "/";
    return endpoint.substr(slash);
}

} // namespace

struct MockApiServer::Impl {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    bool running = false;
};

MockApiServer::MockApiServer(std::vector<ApiSchema> catalog,
                             std::map<std::string, std::string> fixtures)
    : impl_(std::make_unique<Impl>()) {
    std::unordered_set<std::string> known;
    for (const auto& schema : catalog) known.insert(schema.name);
    for (const auto& [name, body] : fixtures) {
        if (!known.count(name)) {
            throw Error(ErrorCode::config_error,
                        "fixture names schema \"" + name + "\" absent from the catalog");
        }
    }

    std::unordered_set<std::string> paths;
    for (const auto& schema : catalog) {
        auto fixture = fixtures.find(schema.name);
        if (fixture == fixtures.end()) {
            throw Error(ErrorCode::config_error,
                        "no fixture for schema \"" + schema.name + "\"");
        }
        std::string path = endpoint_path(schema.endpoint);
        if (!paths.insert(path).second) {
            throw Error(ErrorCode::config_error,
                        "endpoint path \"" + path + "\" served by more than one schema");
        }
        std::string body = fixture->second;
        auto parsed = nlohmann::json::parse(body, nullptr, false);
        std::string content_type = parsed.is_discarded() ? "text/plain" : "application/json";
        impl_->server.Post(path, [body, content_type](const httplib::Request& req,
                                                      httplib::Response& res) {
            auto request_json = nlohmann::json::parse(req.body, nullptr, false);
            if (request_json.is_discarded() || !request_json.is_object()) {
                res.status = 400;
                res.set_content("request body must be a JSON object", "text/plain");
                return;
            }
            res.set_content(body, content_type);
        });
    }
}

MockApiServer::~MockApiServer() {
    stop();
}

void MockApiServer::start(int port) {
    if (impl_->running) return;
    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
        if (impl_->port <= 0) {
            throw Error(ErrorCode::io_error, "cannot bind mock server to a free port");
        }
    } else {
        if (!impl_->server.bind_to_port("127.0.0.1", port)) {
            throw Error(ErrorCode::io_error,
                        "cannot bind mock server to port " + std::to_string(port));
        }
        impl_->port = port;
    }
    impl_->running = true;
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void MockApiServer::stop() {
    if (!impl_ || !impl_->running) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
    impl_->running = false;
}

bool MockApiServer::running() const {
    return impl_ && impl_->running;
}

int MockApiServer::port() const {
    return impl_->port;
}

std::map<std::string, std::string> load_fixtures(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open fixtures file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();

    nlohmann::json j = nlohmann::json::parse(buffer.str(), nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw Error(ErrorCode::parse_error, "fixtures file must be a JSON object");
    }
    std::map<std::string, std::string> fixtures;
    for (auto it = j.begin(); it != j.end(); ++it) {
        fixtures[it.key()] =
            it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
    }
    return fixtures;
}

} // namespace dynarag
