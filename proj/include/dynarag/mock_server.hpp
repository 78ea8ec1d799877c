#pragma once

#include "dynarag/schema_index.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace dynarag {

// Serves canned responses for a schema catalog: each schema is reachable
// via POST at its endpoint's path and answers with the fixture body for
// that schema name. Fixture coverage is checked both ways at construction:
// a fixture naming an absent schema and a schema without a fixture are
// both startup errors. Unknown paths get 404, bodies that are not JSON
// objects get 400.
class MockApiServer {
public:
    // fixtures: schema name -> response body (strings are sent verbatim,
    // other JSON values are serialized).
    MockApiServer(std::vector<ApiSchema> catalog, std::map<std::string, std::string> fixtures);
    ~MockApiServer();

    MockApiServer(const MockApiServer&) = delete;
    MockApiServer& operator=(const MockApiServer&) = delete;

    // Binds and serves on a background thread. port 0 picks a free port.
    // Throws Error(io_error) when the port cannot be bound.
    void start(int port);
    void stop();
    bool running() const;
    int port() const; // bound port, valid after start()

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Fixtures file: JSON object mapping schema name -> response body.
std::map<std::string, std::string> load_fixtures(const std::string& path);

} // namespace dynarag
