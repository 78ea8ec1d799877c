#include "dynarag/api_router.hpp"

#include "dynarag/error.hpp"
#include "dynarag/mock_server.hpp"
#include "test_http_util.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <chrono>
#include <random>

using namespace dynarag;

namespace {

ApiSchema make_schema(const std::string& name, const std::string& description,
                      std::vector<ApiParameter> params = {}) {
    ApiSchema s;
    s.name = name;
    s.description = description;
    s.parameters = std::move(params);
    s.endpoint = "http://127.0.0.1:9/api/" + name;
    return s;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::internal_error;
}

} // namespace

TEST_CASE("reference caller picks the only candidate with empty arguments") {
    KeywordToolCaller caller;
    auto call = caller.propose_call("anything at all", {make_schema("solo", "any description")});
    CHECK(call.schema_name == "solo");
    CHECK(call.arguments.empty());
}

TEST_CASE("reference caller keyword-matches the schema name") {
    KeywordToolCaller caller;
    std::vector<ApiSchema> candidates = {
        make_schema("get_weather", "current weather for a city"),
        make_schema("get_stock_price", "stock price for a company"),
    };
    auto call = caller.propose_call("what is the current stock price of Acme", candidates);
    CHECK(call.schema_name == "get_stock_price");
}

TEST_CASE("reference caller fills required parameters from the query") {
    KeywordToolCaller caller;
    auto schema = make_schema("get_population", "population of a city",
                              {{"city", ParamType::string_type, true, ""},
                               {"year", ParamType::integer_type, true, ""},
                               {"growth", ParamType::number_type, false, ""}});
    auto call = caller.propose_call("What was the population of New York City in 2020?", {schema});
    CHECK(call.schema_name == "get_population");
    CHECK(call.arguments["city"] == "New York City");
    CHECK(call.arguments["year"] == 2020);
    CHECK_FALSE(call.arguments.contains("growth")); // optional params stay unfilled
}

TEST_CASE("reference caller rejects unfillable required parameters") {
    KeywordToolCaller caller;
    auto string_schema = make_schema("s", "d", {{"entity", ParamType::string_type, true, ""}});
    CHECK(code_of([&] { caller.propose_call("no capitals here", {string_schema}); }) ==
          ErrorCode::caller_failure);

    auto int_schema = make_schema("s", "d", {{"count", ParamType::integer_type, true, ""}});
    CHECK(code_of([&] { caller.propose_call("No Numbers Anywhere", {int_schema}); }) ==
          ErrorCode::caller_failure);

    auto bool_schema = make_schema("s", "d", {{"flag", ParamType::boolean_type, true, ""}});
    CHECK(code_of([&] { caller.propose_call("Toggle The Flag", {bool_schema}); }) ==
          ErrorCode::caller_failure);

    CHECK(code_of([&] { caller.propose_call("anything", {}); }) == ErrorCode::caller_failure);
}

TEST_CASE("remote caller failure modes") {
    testutil::TestHttpServer server;
    server.post("/call", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"schema_name": "get_weather", "arguments": {"city": "Paris"}})",
                        "application/json");
    });
    server.post("/prose", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("I would call the weather API for this one.", "text/plain");
    });
    server.start();

    auto candidates = std::vector<ApiSchema>{make_schema("get_weather", "weather")};
    auto call = RemoteToolCaller(server.url("/call")).propose_call("q", candidates);
    CHECK(call.schema_name == "get_weather");
    CHECK(call.arguments["city"] == "Paris");

    CHECK(code_of([&] { RemoteToolCaller(server.url("/prose")).propose_call("q", candidates); }) ==
          ErrorCode::caller_failure);
    CHECK(code_of([&] {
              RemoteToolCaller("http://127.0.0.1:1/x", "", 200).propose_call("q", candidates);
          }) == ErrorCode::caller_failure);
}

TEST_CASE("validate accepts a correct call unchanged") {
    auto schema = make_schema("get_weather", "d",
                              {{"city", ParamType::string_type, true, ""},
                               {"days", ParamType::integer_type, false, ""}});
    ApiCall call;
    call.schema_name = "get_weather";
    call.arguments["city"] = "Paris";
    call.arguments["days"] = 3;
    const ApiCall& validated = validate(call, {schema});
    CHECK(&validated == &call);
    CHECK(validated.arguments == call.arguments);
}

TEST_CASE("validate rejects each hallucination class with its own code") {
    auto schema = make_schema("get_weather", "d",
                              {{"city", ParamType::string_type, true, ""},
                               {"days", ParamType::integer_type, false, ""},
                               {"metric", ParamType::boolean_type, false, ""},
                               {"lat", ParamType::number_type, false, ""}});
    std::vector<ApiSchema> catalog = {schema};

    ApiCall unknown_api;
    unknown_api.schema_name = "get_whether"; // typo'd API
    CHECK(code_of([&] { validate(unknown_api, catalog); }) == ErrorCode::hallucinated_api);

    ApiCall extra;
    extra.schema_name = "get_weather";
    extra.arguments["city"] = "Paris";
    extra.arguments["foo"] = 1;
    CHECK(code_of([&] { validate(extra, catalog); }) == ErrorCode::hallucinated_parameter);

    ApiCall missing;
    missing.schema_name = "get_weather";
    CHECK(code_of([&] { validate(missing, catalog); }) == ErrorCode::missing_parameter);

    ApiCall wrong_type;
    wrong_type.schema_name = "get_weather";
    wrong_type.arguments["city"] = 42;
    CHECK(code_of([&] { validate(wrong_type, catalog); }) == ErrorCode::parameter_type_mismatch);

    // Doubles are not integers, but integers are numbers.
    ApiCall float_for_int;
    float_for_int.schema_name = "get_weather";
    float_for_int.arguments["city"] = "Paris";
    float_for_int.arguments["days"] = 2.5;
    CHECK(code_of([&] { validate(float_for_int, catalog); }) ==
          ErrorCode::parameter_type_mismatch);

    ApiCall int_for_number;
    int_for_number.schema_name = "get_weather";
    int_for_number.arguments["city"] = "Paris";
    int_for_number.arguments["lat"] = 48;
    CHECK_NOTHROW(validate(int_for_number, catalog));
}

TEST_CASE("validation completeness on fuzzed mutations") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        // Build a schema with one parameter of each type, all required.
        auto schema = make_schema("api_" + std::to_string(trial), "fuzz target",
                                  {{"s", ParamType::string_type, true, ""},
                                   {"i", ParamType::integer_type, true, ""},
                                   {"n", ParamType::number_type, true, ""},
                                   {"b", ParamType::boolean_type, true, ""}});
        std::vector<ApiSchema> catalog = {schema, make_schema("other", "decoy")};

        ApiCall valid;
        valid.schema_name = schema.name;
        valid.arguments["s"] = "text";
        valid.arguments["i"] = static_cast<long long>(rng() % 100);
        valid.arguments["n"] = 0.5;
        valid.arguments["b"] = true;
        CHECK_NOTHROW(validate(valid, catalog)); // no false rejects

        ApiCall mutated = valid;
        switch (rng() % 4) {
            case 0:
                mutated.schema_name = "nonexistent_api";
                CHECK(code_of([&] { validate(mutated, catalog); }) ==
                      ErrorCode::hallucinated_api);
                break;
            case 1:
                mutated.arguments.erase(std::array{"s", "i", "n", "b"}[rng() % 4]);
                CHECK(code_of([&] { validate(mutated, catalog); }) ==
                      ErrorCode::missing_parameter);
                break;
            case 2:
                mutated.arguments["invented"] = 1;
                CHECK(code_of([&] { validate(mutated, catalog); }) ==
                      ErrorCode::hallucinated_parameter);
                break;
            case 3:
                mutated.arguments["i"] = "not a number";
                CHECK(code_of([&] { validate(mutated, catalog); }) ==
                      ErrorCode::parameter_type_mismatch);
                break;
        }
    }
}

TEST_CASE("execute returns the canned body from a mock server") {
    std::vector<ApiSchema> catalog = {make_schema("get_population", "population")};
    MockApiServer server(catalog, {{"get_population", R"({"population": 67000000})"}});
    server.start(0);
    catalog[0].endpoint = "http://127.0.0.1:" + std::to_string(server.port()) +
                          "/api/get_population";

    ApiCall call;
    call.schema_name = "get_population";
    auto response = execute(call, catalog, 2000);
    CHECK(response.status == ApiStatus::ok);
    CHECK(response.body == R"({"population": 67000000})");
}

TEST_CASE("execute maps HTTP errors to status error, never throws") {
    testutil::TestHttpServer server;
    server.post("/api/broken", [](const httplib::Request&, httplib::Response& res) {
        res.status = 500;
        res.set_content("upstream exploded", "text/plain");
    });
    server.start();

    std::vector<ApiSchema> catalog = {make_schema("broken", "d")};
    catalog[0].endpoint = server.url("/api/broken");

    ApiCall call;
    call.schema_name = "broken";
    auto response = execute(call, catalog, 2000);
    CHECK(response.status == ApiStatus::error);
    CHECK(response.body.find("500") != std::string::npos);

    // Unknown schema name inside execute degrades the same way.
    ApiCall ghost;
    ghost.schema_name = "ghost";
    CHECK(execute(ghost, catalog, 2000).status == ApiStatus::error);
}

TEST_CASE("execute times out within the configured budget plus slack") {
    std::vector<ApiSchema> catalog = {make_schema("dead", "d")};
    catalog[0].endpoint = "http://127.0.0.1:1/api/dead"; // nothing listens here

    ApiCall call;
    call.schema_name = "dead";
    auto start = std::chrono::steady_clock::now();
    auto response = execute(call, catalog, 100);
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    CHECK(response.status == ApiStatus::error);
    CHECK(response.body.find("failed") != std::string::npos);
    // Wide slack: refused connections return immediately, slow paths must
    // still respect the timeout rather than hanging.
    CHECK(elapsed <= 2000);
}

TEST_CASE("execute forwards the bearer token as an Authorization header") {
    testutil::TestHttpServer server;
    std::string seen_auth;
    server.post("/api/secure", [&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        res.set_content("ok", "text/plain");
    });
    server.start();

    std::vector<ApiSchema> catalog = {make_schema("secure", "d")};
    catalog[0].endpoint = server.url("/api/secure");
    ApiCall call;
    call.schema_name = "secure";

    CHECK(execute(call, catalog, 2000, "sekrit").status == ApiStatus::ok);
    CHECK(seen_auth == "Bearer sekrit");

    seen_auth.clear();
    CHECK(execute(call, catalog, 2000).status == ApiStatus::ok);
    CHECK(seen_auth.empty()); // no token, no header
}

TEST_CASE("mock server construction checks fixture coverage both ways") {
    std::vector<ApiSchema> catalog = {make_schema("a", "d"), make_schema("b", "d")};

    CHECK_THROWS_AS(MockApiServer(catalog, {{"a", "x"}, {"b", "y"}, {"ghost", "z"}}), Error);
    CHECK_THROWS_AS(MockApiServer(catalog, {{"a", "x"}}), Error);
    CHECK_NOTHROW(MockApiServer(catalog, {{"a", "x"}, {"b", "y"}}));
}

TEST_CASE("mock server serves canned bodies and 404s unknown paths") {
    std::vector<ApiSchema> catalog = {make_schema("echo", "d")};
    MockApiServer server(catalog, {{"echo", "canned"}});
    server.start(0);

    httplib::Client client("127.0.0.1", server.port());
    auto good = client.Post("/api/echo", R"({"arguments":{}})", "application/json");
    REQUIRE(good);
    CHECK(good->status == 200);
    CHECK(good->body == "canned");

    auto missing = client.Post("/api/nothing", R"({"arguments":{}})", "application/json");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    auto bad_body = client.Post("/api/echo", "not json", "application/json");
    REQUIRE(bad_body);
    CHECK(bad_body->status == 400);

    server.stop();
    CHECK_FALSE(server.running());
}

TEST_CASE("fixtures file loading") {
    testutil::TempDir dir;
    auto path = dir.write("fixtures.json",
                          R"({"a": "plain text", "b": {"nested": true}, "c": 42})");
    auto fixtures = load_fixtures(path);
    CHECK(fixtures["a"] == "plain text");
    CHECK(fixtures["b"] == R"({"nested":true})");
    CHECK(fixtures["c"] == "42");

    auto bad = dir.write("bad.json", "[1,2,3]");
    CHECK_THROWS_AS(load_fixtures(bad), Error);
}
