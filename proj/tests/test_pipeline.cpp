#include "dynarag/pipeline.hpp"

#include "dynarag/error.hpp"
#include "dynarag/mock_server.hpp"

#include <doctest.h>

#include <set>

#include <json.hpp>

using namespace dynarag;

namespace {

// A page whose paragraph answers the query with full term coverage.
DatasetRecord answerable_record(const std::string& id) {
    DatasetRecord record;
    record.query.id = id;
    record.query.text = "What is the capital of France?";
    record.query.gold_answer = "Paris";
    record.documents.push_back(
        {"http://pages/" + id, "<p>The capital of France is Paris.</p>", 1});
    record.documents.push_back({"http://pages/" + id + "/noise",
                                "<p>Gardening tips for tomato growers.</p>", 2});
    return record;
}

DatasetRecord unanswerable_record(const std::string& id) {
    DatasetRecord record;
    record.query.id = id;
    record.query.text = "What is the current stock price of Orion Industries?";
    record.query.gold_answer = "142.75";
    record.documents.push_back(
        {"http://pages/" + id, "<p>Gardening tips for tomato growers.</p>", 1});
    return record;
}

std::vector<ApiSchema> stock_catalog(int port) {
    ApiSchema schema;
    schema.name = "get_stock_price_orion_industries";
    schema.description = "Current stock price of Orion Industries";
    schema.parameters = {{"company", ParamType::string_type, true, "company name"}};
    schema.endpoint = "http://127.0.0.1:" + std::to_string(port) +
                      "/api/get_stock_price_orion_industries";
    return {schema};
}

PipelineConfig config_for(Mode mode, double threshold = 0.5) {
    PipelineConfig cfg;
    cfg.mode = mode;
    cfg.threshold = threshold;
    cfg.timeout_ms = 1000;
    return cfg;
}

} // namespace

TEST_CASE("task1 sufficient query answers from passages without api") {
    Pipeline pipeline(config_for(Mode::task1), Bindings::reference());
    auto trace = pipeline.run_query(answerable_record("q1"));
    CHECK(trace.decision.verdict == Verdict::sufficient);
    CHECK_FALSE(trace.api_call.has_value());
    CHECK_FALSE(trace.degraded);
    CHECK(trace.answer.answer_text.find("Paris") != std::string::npos);
    CHECK(trace.snippets_count == 2);
    CHECK(!trace.stage_timings_ms.empty());
}

TEST_CASE("task1 insufficient query still generates, marked degraded, no api call") {
    Pipeline pipeline(config_for(Mode::task1), Bindings::reference());
    auto trace = pipeline.run_query(unanswerable_record("q2"));
    CHECK(trace.decision.verdict == Verdict::insufficient);
    CHECK_FALSE(trace.api_call.has_value());
    CHECK(trace.degraded);
    CHECK(trace.answer.abstained); // reference generator abstains on low overlap
}

TEST_CASE("task2 with empty document set takes the fallback path") {
    MockApiServer server(stock_catalog(9),
                         {{"get_stock_price_orion_industries",
                           "The current stock price of Orion Industries is 142.75."}});
    server.start(0);
    auto catalog = stock_catalog(server.port());

    Pipeline pipeline(config_for(Mode::task2), Bindings::reference(), catalog);
    DatasetRecord record = unanswerable_record("q3");
    record.documents.clear();
    auto trace = pipeline.run_query(record);

    CHECK(trace.decision.verdict == Verdict::insufficient);
    REQUIRE(trace.api_call.has_value());
    CHECK(trace.api_call->schema_name == "get_stock_price_orion_industries");
    CHECK(trace.api_call->arguments["company"] == "Orion Industries");
    REQUIRE(trace.api_response.has_value());
    CHECK(trace.api_response->status == ApiStatus::ok);
    CHECK(trace.answer.used_api);
    CHECK_FALSE(trace.degraded);
    CHECK(trace.answer.answer_text.find("142.75") != std::string::npos);
}

TEST_CASE("task2 sufficient query does not touch the api") {
    MockApiServer server(stock_catalog(9), {{"get_stock_price_orion_industries", "irrelevant"}});
    server.start(0);
    Pipeline pipeline(config_for(Mode::task2), Bindings::reference(),
                      stock_catalog(server.port()));
    auto trace = pipeline.run_query(answerable_record("q4"));
    CHECK(trace.decision.verdict == Verdict::sufficient);
    CHECK_FALSE(trace.api_call.has_value());
    CHECK_FALSE(trace.answer.used_api);
}

TEST_CASE("task2 degrades to static context when the api is down") {
    auto catalog = stock_catalog(1); // port 1: connection refused
    Pipeline pipeline(config_for(Mode::task2), Bindings::reference(), catalog);
    auto trace = pipeline.run_query(unanswerable_record("q5"));

    CHECK(trace.decision.verdict == Verdict::insufficient);
    REQUIRE(trace.api_call.has_value());    // call was proposed and validated
    REQUIRE(trace.api_response.has_value());
    CHECK(trace.api_response->status == ApiStatus::error);
    REQUIRE(trace.api_failure.has_value());
    CHECK(trace.degraded);
    CHECK_FALSE(trace.answer.used_api);
    CHECK(trace.answer.abstained); // static context says nothing useful
}

TEST_CASE("task2 mode requires a catalog") {
    CHECK_THROWS_AS(Pipeline(config_for(Mode::task2), Bindings::reference(), {}), Error);
}

TEST_CASE("gate soundness: fallback is attempted iff task2 and below threshold") {
    MockApiServer server(stock_catalog(9), {{"get_stock_price_orion_industries", "body"}});
    server.start(0);
    auto catalog = stock_catalog(server.port());

    std::vector<DatasetRecord> records;
    for (int i = 0; i < 6; ++i) {
        records.push_back(i % 2 == 0 ? answerable_record("q" + std::to_string(i))
                                     : unanswerable_record("q" + std::to_string(i)));
    }
    for (Mode mode : {Mode::task1, Mode::task2}) {
        Pipeline pipeline(config_for(mode), Bindings::reference(), catalog);
        for (const auto& record : records) {
            auto trace = pipeline.run_query(record);
            bool below = trace.decision.top_score.value < trace.decision.threshold;
            CHECK(trace.api_call.has_value() == (mode == Mode::task2 && below));
            if (trace.decision.verdict == Verdict::sufficient) {
                CHECK_FALSE(trace.api_call.has_value());
            }
        }
    }
}

TEST_CASE("raising the threshold only grows the fallback set") {
    MockApiServer server(stock_catalog(9), {{"get_stock_price_orion_industries", "body"}});
    server.start(0);
    auto catalog = stock_catalog(server.port());

    std::vector<DatasetRecord> records = {answerable_record("a"), unanswerable_record("b")};
    std::vector<double> thresholds = {0.1, 0.5, 0.9};
    std::vector<std::set<std::string>> fallback_sets;
    for (double tau : thresholds) {
        Pipeline pipeline(config_for(Mode::task2, tau), Bindings::reference(), catalog);
        std::set<std::string> fell_back;
        for (const auto& record : records) {
            auto trace = pipeline.run_query(record);
            if (trace.api_call) fell_back.insert(trace.query_id);
        }
        fallback_sets.push_back(std::move(fell_back));
    }
    for (std::size_t i = 1; i < fallback_sets.size(); ++i) {
        for (const auto& id : fallback_sets[i - 1]) {
            CHECK(fallback_sets[i].count(id) == 1);
        }
    }
}

TEST_CASE("run_batch keeps input order and captures per-query failures") {
    class ExplodingGenerator final : public Generator {
    public:
        std::string generate(const std::string& prompt) const override {
            if (prompt.find("boom") != std::string::npos) {
                throw Error(ErrorCode::generator_failure, "scripted crash");
            }
            return "fine";
        }
    };

    Bindings bindings = Bindings::reference();
    bindings.generator = std::make_shared<ExplodingGenerator>();
    Pipeline pipeline(config_for(Mode::task1), bindings);

    std::vector<DatasetRecord> records;
    for (int i = 0; i < 5; ++i) records.push_back(answerable_record("q" + std::to_string(i)));
    records[2].query.text = "boom?";
    records[2].documents.clear();

    auto traces = pipeline.run_batch(records, 3);
    REQUIRE(traces.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(traces[i].query_id == "q" + std::to_string(i));
    }
    CHECK(traces[2].error.has_value());
    CHECK_FALSE(traces[0].error.has_value());

    CHECK(pipeline.run_batch({}, 4).empty());
}

TEST_CASE("parallelism does not change results") {
    std::vector<DatasetRecord> records;
    for (int i = 0; i < 12; ++i) {
        records.push_back(i % 3 == 0 ? unanswerable_record("q" + std::to_string(i))
                                     : answerable_record("q" + std::to_string(i)));
    }
    Pipeline pipeline(config_for(Mode::task1), Bindings::reference());
    auto serial = pipeline.run_batch(records, 1);
    auto parallel = pipeline.run_batch(records, 8);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        auto a = nlohmann::ordered_json::parse(serialize_trace(serial[i]));
        auto b = nlohmann::ordered_json::parse(serialize_trace(parallel[i]));
        a.erase("stage_timings_ms");
        b.erase("stage_timings_ms");
        CHECK(a == b);
    }
}

TEST_CASE("trace serialization round trip") {
    MockApiServer server(stock_catalog(9),
                         {{"get_stock_price_orion_industries",
                           "The current stock price of Orion Industries is 142.75."}});
    server.start(0);
    Pipeline pipeline(config_for(Mode::task2), Bindings::reference(),
                      stock_catalog(server.port()));
    auto trace = pipeline.run_query(unanswerable_record("q"));

    auto line = serialize_trace(trace);
    auto parsed = parse_trace(line);
    CHECK(parsed.query_id == trace.query_id);
    CHECK(parsed.snippets_count == trace.snippets_count);
    CHECK(parsed.decision.verdict == trace.decision.verdict);
    CHECK(parsed.decision.top_score.value == trace.decision.top_score.value);
    REQUIRE(parsed.api_call.has_value());
    CHECK(parsed.api_call->schema_name == trace.api_call->schema_name);
    CHECK(parsed.answer.answer_text == trace.answer.answer_text);
    CHECK(parsed.answer.used_api == trace.answer.used_api);
    CHECK(serialize_trace(parsed) == line);
}
