#pragma once

#include <memory>
#include <string>
#include <vector>

#include "scroll/layout.hpp"

namespace scroll {

enum class LayoutMode { llm, fixture };

struct StoryRequest {
    std::string story;
    double aspect = 4.0;
    int max_scenes = 6;
    LayoutMode mode = LayoutMode::llm;
    std::string fixture_path;  // fixture mode: a Layout JSON file
};

// One model exchange, retained verbatim for audit even when parsing
// fails. Genre/style hints are optional metadata, never required
// downstream.
struct RawLayoutResponse {
    std::string text;
    bool parse_ok = false;
    std::string genre_hint;
    std::string style_hint;
};

// Minimal injected transport: send an instruction prompt, receive the
// model's text. Tests use canned responses; production uses HTTP.
class LlmTransport {
public:
    virtual ~LlmTransport() = default;
    virtual std::string send(const std::string& prompt) = 0;
};

// POSTs {"prompt": string} to the endpoint and returns the response
// body as plain text. Endpoint/key default to the SCROLL_LLM_ENDPOINT
// and SCROLL_LLM_KEY environment variables.
class HttpLlmTransport : public LlmTransport {
public:
    HttpLlmTransport(std::string endpoint, std::string api_key, int timeout_seconds = 30);
    static std::unique_ptr<HttpLlmTransport> from_env(int timeout_seconds = 30);

    std::string send(const std::string& prompt) override;

private:
    std::string endpoint_;
    std::string api_key_;
    int timeout_seconds_;
};

void validate_story_request(const StoryRequest& req);

// Deterministic instruction template: task description, the exact
// layout JSON schema, two worked examples, the left-to-right tiling
// constraint, and the request's aspect and scene budget.
std::string build_prompt(const StoryRequest& req);

// Normalizes any syntactically valid layout into one satisfying the
// layout invariants: boxes clamped to [0,1], scenes sorted by center-x
// and stretched into a full-height horizontal tiling (gaps and overlaps
// split at midpoints), objects reassigned to an intersecting scene or
// dropped. Idempotent.
Layout repair_layout(const Layout& layout);

// The first balanced JSON object inside free-form model text, or an
// empty string when none exists.
std::string extract_json_object(const std::string& text);

struct PredictResult {
    Layout layout;
    std::vector<RawLayoutResponse> responses;
};

// Story -> repaired layout. In llm mode, retries up to 3 attempts with
// an appended correction instruction when the response fails to parse
// or validate; throws PredictionError (carrying every raw response)
// once exhausted. Fixture mode reads the fixture file and performs no
// transport calls at all.
PredictResult predict_layout(const StoryRequest& req, LlmTransport* transport);

}  // namespace scroll
