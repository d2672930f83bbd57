#pragma once

#include <memory>
#include <optional>
#include <string>

#include "apf/backend.hpp"

namespace apf {

// Wiring for one remote chat-completions target.
struct HttpBackendConfig {
    std::string id;
    std::string base_url;                       // e.g. http://127.0.0.1:8080
    std::string path = "/v1/chat/completions";  // or /v1/completions (completion style)
    std::string model;
    std::string api_key_env;  // env var holding the bearer token; never the token itself
    bool prefill_via_assistant_message = true;  // API honors a trailing assistant turn
    // Completion-style endpoints take the raw rendered prompt instead of a
    // messages array; the prefill is spliced by the template.
    bool completion_style = false;
    std::string template_name = "generic";
    int timeout_ms = 30000;
    int max_concurrency = 4;
};

class HttpBackend final : public ChatBackend {
  public:
    explicit HttpBackend(HttpBackendConfig config);
    ~HttpBackend() override;

    const std::string& id() const override;
    bool supports_prefill() const override;

    // Throws CapabilityError before any network I/O when the transcript
    // needs a prefill this backend cannot deliver; TransportError,
    // TimeoutError, or HttpStatusError on failed requests.
    std::string generate(const ChatTranscript& transcript,
                         const GenerationParams& params) override;

    const HttpBackendConfig& config() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace apf
