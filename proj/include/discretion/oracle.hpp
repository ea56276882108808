// Copyright 2026 The Discretion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "discretion/ingest.hpp"
#include "discretion/types.hpp"

namespace discretion {

// A judging prompt with {prompt}, {principle}, {response A}, {response B}
// placeholders. Literal {A}/{B}/{NA} answer tokens are part of the wording,
// not placeholders.
struct PromptTemplate {
  std::string template_id;
  std::string version;
  std::string body;
};

// Judges which response better adheres to a principle; allows NA.
const PromptTemplate& oracle_template();
// Judges which response is better overall; allows NA.
const PromptTemplate& generic_template();

enum class Orientation { Original, Swapped };

// Instantiates the template. Swapped places response1 in slot A. The
// principle is required by the oracle template and must be absent for the
// generic one; a residual placeholder raises DataError.
std::string render_prompt(const PromptTemplate& tmpl,
                          const PreferenceItem& item,
                          const Principle* principle,
                          Orientation orientation);

enum class ParsedChoice { ResponseA, ResponseB, NA, Unparseable };

// Strict parse of a completion: after trimming (and dropping a leading
// "Answer:"), the first token must be A, B or NA, optionally braced.
// Anything else is Unparseable, which is a counted value, not an error.
ParsedChoice parse_choice(const std::string& raw);

struct RetryPolicy {
  int max_attempts = 3;
  int initial_backoff_ms = 250;  // doubles per attempt
};

struct EndpointConfig {
  std::string base_url;            // scheme://host[:port]
  std::string provider = "openai";  // adapter name: openai | anthropic
  std::string model_id;
  std::string auth_env;            // env var holding the credential; the
                                   // secret itself is never stored
  int max_concurrent = 4;
  int requests_per_minute = 60;
  int rate_window_ms = 60000;      // sliding-window span the cap applies to
  RetryPolicy retry;
  double temperature = 0.0;        // pinned for reproducible judgments
};

EndpointConfig load_endpoint_config(const std::string& path);

// Blocks callers so that no more than max_per_window acquisitions fall in
// any sliding window of the given span.
class RateLimiter {
 public:
  RateLimiter(int max_per_window, std::chrono::milliseconds window);
  void acquire();

 private:
  int max_per_window_;
  std::chrono::milliseconds window_;
  std::mutex mu_;
  std::deque<std::chrono::steady_clock::time_point> stamps_;
};

// Minimal chat-completion client: one rendered prompt in, completion text
// out. Retries transport and server errors with exponential backoff and
// honors the rate cap. Throws EndpointError after retry exhaustion. Not
// safe for concurrent use; workers hold one client each and share the rate
// limiter so the cap is global.
class ChatClient {
 public:
  explicit ChatClient(EndpointConfig config,
                      std::shared_ptr<RateLimiter> limiter = nullptr);
  ~ChatClient();

  ChatClient(const ChatClient&) = delete;
  ChatClient& operator=(const ChatClient&) = delete;

  std::string complete(const std::string& prompt);

  const EndpointConfig& config() const { return config_; }

 private:
  EndpointConfig config_;
  std::shared_ptr<RateLimiter> limiter_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct AnnotationStats {
  std::int64_t cells_requested = 0;
  std::int64_t cells_from_cache = 0;
  std::int64_t cells_fetched = 0;
  std::int64_t network_calls = 0;
  std::int64_t unparseable_completions = 0;
  std::int64_t positional_bias_cells = 0;
  // Cells that could not be completed (endpoint failure or unparseable
  // output); re-running resumes exactly these.
  std::vector<std::pair<std::string, std::string>> missing;
  std::string endpoint_error;  // first endpoint failure, if any
};

struct AnnotationResult {
  JudgmentMatrix matrix;
  AnnotationStats stats;
};

// Fills the (item x principle) judgment grid. Cached cells are never
// re-queried; new cells are asked in both slot orders, merged with the
// positional-bias rule, and appended to the cache file before use. With a
// complete cache no network client is even constructed.
AnnotationResult annotate_principles(const std::vector<PreferenceItem>& items,
                                     const std::vector<Principle>& principles,
                                     const EndpointConfig& endpoint,
                                     JudgmentCache& cache,
                                     JudgmentCacheWriter* writer);

// Same protocol without the principle dimension; produces the labels of an
// LLM annotator identified by the endpoint's model id. Cached under an
// empty principle_id.
struct GenericAnnotationResult {
  AnnotatorLabels labels;
  AnnotationStats stats;
};
GenericAnnotationResult annotate_generic(
    const std::vector<PreferenceItem>& items, const EndpointConfig& endpoint,
    JudgmentCache& cache, JudgmentCacheWriter* writer);

}  // namespace discretion
