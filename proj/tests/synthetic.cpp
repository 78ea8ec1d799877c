#include "synthetic.hpp"

#include "dynarag/html_cleaner.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

namespace synthetic {

using namespace dynarag;

namespace {

const std::vector<std::string> kFirstNames = {
    "Orion",  "Zephyr", "Aurora", "Titan",   "Nimbus", "Vega",   "Atlas",
    "Lyra",   "Sirius", "Nova",   "Quasar",  "Comet",  "Zenith", "Apex",
    "Ember",  "Frost",  "Galena", "Halcyon", "Indigo", "Juniper"};

const std::vector<std::string> kSecondNames = {
    "Industries", "Holdings", "Dynamics", "Systems",  "Ventures",
    "Collective", "Gruppe",   "Exchange", "Partners", "Observatory"};

// Facts recoverable from the supplied pages.
const std::vector<std::string> kStaticFacts = {
    "height", "length", "capacity", "elevation", "headcount", "budget"};

// Facts reachable only through an API; each pairs with the name of the
// required string parameter the reference caller must fill.
const std::vector<std::pair<std::string, std::string>> kDynamicFacts = {
    {"current stock price", "company"},
    {"current temperature", "city"},
    {"current attendance", "venue"},
    {"current exchange rate", "company"},
    {"current queue length", "location"},
};

// Filler vocabulary chosen to share no content term with any query.
const std::vector<std::string> kFillerSentences = {
    "Gardeners prefer loose soil and steady watering schedules.",
    "Sourdough starters need flour, patience and a warm shelf.",
    "Pottery kilns reach their glaze point after several hours.",
    "Basil and mint grow well together in shaded planters.",
    "Compost bins benefit from alternating green and brown layers.",
    "A good whisk makes folding batter considerably easier.",
};

std::string slug(const std::string& phrase) {
    std::string out;
    for (char c : phrase) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!out.empty() && out.back() != '_') {
            out.push_back('_');
        }
    }
    while (!out.empty() && out.back() == '_') out.pop_back();
    return out;
}

std::string filler_paragraphs(std::mt19937& rng, int count) {
    std::string html;
    for (int i = 0; i < count; ++i) {
        html += "<p>" + kFillerSentences[rng() % kFillerSentences.size()] + "</p>";
    }
    return html;
}

std::string boilerplate(std::mt19937& rng) {
    std::string html = "<nav><ul><li>Home</li><li>About</li></ul></nav>";
    if (rng() % 2) html += "<script>window.track('pageview');</script>";
    if (rng() % 2) html += "<style>.hero { display: none; }</style>";
    html += "<header><h1>Portal</h1></header>";
    return html;
}

Domain domain_for(std::size_t i) {
    switch (i % 5) {
        case 0: return Domain::finance;
        case 1: return Domain::sports;
        case 2: return Domain::music;
        case 3: return Domain::movie;
        default: return Domain::open;
    }
}

DatasetRecord static_record(std::mt19937& rng, const std::string& id,
                            const std::string& entity, std::size_t index) {
    const std::string& fact = kStaticFacts[index % kStaticFacts.size()];
    std::string value = std::to_string(1000 + 37 * static_cast<int>(index)) + " units";

    DatasetRecord record;
    record.query.id = id;
    record.query.text = "What is the " + fact + " of " + entity + "?";
    record.query.gold_answer = value;
    record.query.dynamism = Dynamism::static_fact;
    record.query.domain = domain_for(index);
    record.query.question_type = "simple";

    std::string answer_page = boilerplate(rng) + filler_paragraphs(rng, 1) + "<p>The " + fact +
                              " of " + entity + " is " + value + ".</p>" +
                              "<footer>copyright portal</footer>";
    record.documents.push_back({"http://pages.local/" + id + "/1", answer_page, 1});
    record.documents.push_back(
        {"http://pages.local/" + id + "/2", boilerplate(rng) + filler_paragraphs(rng, 2), 2});
    record.documents.push_back(
        {"http://pages.local/" + id + "/3", filler_paragraphs(rng, 1), 3});
    return record;
}

struct DynamicQuery {
    DatasetRecord record;
    ApiSchema schema;
    std::string fixture_body;
};

DynamicQuery dynamic_record(std::mt19937& rng, const std::string& id,
                            const std::string& entity, std::size_t index) {
    const auto& [fact, param_name] = kDynamicFacts[index % kDynamicFacts.size()];
    char value[32];
    std::snprintf(value, sizeof(value), "%.2f", 100.0 + 3.17 * static_cast<double>(index));

    DynamicQuery out;
    out.record.query.id = id;
    out.record.query.text = "What is the " + fact + " of " + entity + "?";
    out.record.query.gold_answer = value;
    out.record.query.dynamism =
        index % 2 == 0 ? Dynamism::real_time : Dynamism::fast_changing;
    out.record.query.domain = domain_for(index);
    out.record.query.question_type = "simple";

    // The supplied pages never mention the fact or the entity.
    out.record.documents.push_back(
        {"http://pages.local/" + id + "/1", boilerplate(rng) + filler_paragraphs(rng, 2), 1});
    out.record.documents.push_back(
        {"http://pages.local/" + id + "/2", filler_paragraphs(rng, 2), 2});

    std::string fact_capitalized = fact;
    fact_capitalized[0] =
        static_cast<char>(std::toupper(static_cast<unsigned char>(fact_capitalized[0])));

    out.schema.name = "get_" + slug(fact) + "_" + slug(entity);
    out.schema.description = fact_capitalized + " of " + entity;
    out.schema.parameters = {{param_name, ParamType::string_type, true, "entity the fact is about"}};
    out.schema.endpoint = "http://127.0.0.1:0/api/" + out.schema.name;

    out.fixture_body = "The " + fact + " of " + entity + " is " + std::string(value) + ".";
    return out;
}

} // namespace

Benchmark make_benchmark(unsigned seed) {
    std::mt19937 rng(seed);

    // Distinct two-word entities for every query, eval and dev alike.
    std::vector<std::string> entities;
    for (const auto& first : kFirstNames) {
        for (const auto& second : kSecondNames) {
            entities.push_back(first + " " + second);
        }
    }
    std::shuffle(entities.begin(), entities.end(), rng);

    Benchmark benchmark;
    std::size_t entity_cursor = 0;

    for (std::size_t i = 0; i < 30; ++i) {
        benchmark.eval_records.push_back(
            static_record(rng, "static_" + std::to_string(i), entities[entity_cursor++], i));
    }
    for (std::size_t i = 0; i < 30; ++i) {
        auto dynamic = dynamic_record(rng, "dynamic_" + std::to_string(i),
                                      entities[entity_cursor++], i);
        benchmark.eval_records.push_back(dynamic.record);
        benchmark.fixtures[dynamic.schema.name] = dynamic.fixture_body;
        benchmark.catalog.push_back(std::move(dynamic.schema));
    }
    std::shuffle(benchmark.eval_records.begin(), benchmark.eval_records.end(), rng);

    for (std::size_t i = 0; i < 10; ++i) {
        benchmark.dev_records.push_back(
            static_record(rng, "dev_static_" + std::to_string(i), entities[entity_cursor++], i));
    }
    for (std::size_t i = 0; i < 10; ++i) {
        auto dynamic = dynamic_record(rng, "dev_dynamic_" + std::to_string(i),
                                      entities[entity_cursor++], i);
        benchmark.dev_records.push_back(dynamic.record); // no schema: dev tunes only
    }
    return benchmark;
}

void set_catalog_port(std::vector<ApiSchema>& catalog, int port) {
    for (auto& schema : catalog) {
        auto path_pos = schema.endpoint.find("/api/");
        schema.endpoint =
            "http://127.0.0.1:" + std::to_string(port) + schema.endpoint.substr(path_pos);
    }
}

std::vector<LabeledExample> dev_examples(const Benchmark& benchmark, const Scorer& scorer,
                                         int top_n) {
    std::vector<LabeledExample> dev;
    for (const auto& record : benchmark.dev_records) {
        auto snippets = clean_all(retrieval_set(record));
        auto ranked = rerank(record.query, snippets, scorer, top_n);
        double top = 0.0;
        for (const auto& passage : ranked) top = std::max(top, passage.score.value);
        bool sufficient = record.query.dynamism == Dynamism::static_fact;
        dev.push_back({top, sufficient});
    }
    // Margin anchors keep the tuned threshold strictly between the score
    // bands instead of landing exactly on an observed eval score.
    dev.push_back({0.5, true});
    dev.push_back({0.35, false});
    return dev;
}

std::vector<HtmlFixture> html_corpus(unsigned seed, std::size_t pages) {
    std::mt19937 rng(seed);
    std::vector<HtmlFixture> corpus;
    for (std::size_t p = 0; p < pages; ++p) {
        HtmlFixture fixture;
        auto tag_marker = [&](const std::string& kind) {
            std::string marker = kind + "poison" + std::to_string(rng() % 10000);
            fixture.removed_markers.push_back(marker);
            return marker;
        };
        auto keep_marker = [&] {
            std::string marker = "keepword" + std::to_string(p) + "x" + std::to_string(rng() % 1000);
            fixture.kept_markers.push_back(marker);
            return marker;
        };

        std::string html = "<!DOCTYPE html><html><body>";
        html += "<script>var p = '<p>" + tag_marker("script") + "</p>';</script>";
        html += "<style>.x { content: \"" + tag_marker("style") + "\"; }</style>";
        html += "<nav><a href='/'>" + tag_marker("nav") + "</a></nav>";
        html += "<header><h1>" + tag_marker("header") + "</h1></header>";
        html += "<aside>" + tag_marker("aside") + "</aside>";
        html += "<noscript>" + tag_marker("noscript") + "</noscript>";

        int paragraphs = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < paragraphs; ++i) {
            html += "<p>Paragraph   " + keep_marker() + "\t mixes&nbsp;whitespace " +
                    std::to_string(rng() % 100) + ".</p>";
            if (rng() % 3 == 0) html += "<div>outside " + std::to_string(rng() % 10) + "</div>";
        }

        // A slice of the corpus is deliberately broken.
        switch (p % 5) {
            case 0: html += "<p>unclosed trailing paragraph " + keep_marker(); break;
            case 1: html += "<p attr=\"1 > 0\">gt inside attr " + keep_marker() + "</p>"; break;
            case 2: html += "<br><<p>stray " + keep_marker() + "</p>"; break;
            case 3: html += "<footer>" + tag_marker("footer"); break; // unclosed removal tag
            default: html += "<footer>" + tag_marker("footer") + "</footer></body></html>"; break;
        }
        fixture.html = std::move(html);
        corpus.push_back(std::move(fixture));
    }
    return corpus;
}

} // namespace synthetic
