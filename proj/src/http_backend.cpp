#include "apf/http_backend.hpp"

#include <cstdlib>
#include <mutex>
#include <condition_variable>

#include "json.hpp"

#include "apf/errors.hpp"
#include "apf/http.hpp"

namespace apf {

using nlohmann::json;

namespace {

// Bounded-concurrency gate; one per backend.
class Gate {
  public:
    explicit Gate(int limit) : available_(limit > 0 ? limit : 1) {}

    void acquire() {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return available_ > 0; });
        --available_;
    }

    void release() {
        {
            std::lock_guard lock(mutex_);
            ++available_;
        }
        cv_.notify_one();
    }

  private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int available_;
};

struct GateGuard {
    explicit GateGuard(Gate& gate) : gate_(gate) { gate_.acquire(); }
    ~GateGuard() { gate_.release(); }
    Gate& gate_;
};

}  // namespace

struct HttpBackend::Impl {
    HttpBackendConfig config;
    ChatTemplate tmpl;
    Gate gate;

    Impl(HttpBackendConfig c)
        : config(std::move(c)),
          tmpl(ChatTemplate::builtin(config.template_name)),
          gate(config.max_concurrency) {}
};

HttpBackend::HttpBackend(HttpBackendConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

HttpBackend::~HttpBackend() = default;

const std::string& HttpBackend::id() const { return impl_->config.id; }

const HttpBackendConfig& HttpBackend::config() const { return impl_->config; }

bool HttpBackend::supports_prefill() const {
    return impl_->config.completion_style || impl_->config.prefill_via_assistant_message;
}

std::string HttpBackend::generate(const ChatTranscript& transcript,
                                  const GenerationParams& params) {
    const auto& cfg = impl_->config;
    if (transcript.assistant_prefill && !supports_prefill()) {
        throw CapabilityError(cfg.id, "backend '" + cfg.id +
                                          "' does not support assistant prefill");
    }
    if (auto why = transcript.violation()) {
        throw Error("invalid transcript for backend '" + cfg.id + "': " + *why);
    }

    json body;
    body["model"] = cfg.model;
    body["temperature"] = params.sampling ? params.temperature : 0.0;
    body["max_tokens"] = params.max_new_tokens;
    if (cfg.completion_style) {
        body["prompt"] = render(impl_->tmpl, transcript);
    } else {
        json messages = json::array();
        if (transcript.system) {
            messages.push_back({{"role", "system"}, {"content", *transcript.system}});
        }
        for (const Turn& turn : transcript.turns) {
            messages.push_back({{"role", turn.role == Role::User ? "user" : "assistant"},
                                {"content", turn.text}});
        }
        if (transcript.assistant_prefill) {
            messages.push_back({{"role", "assistant"}, {"content", *transcript.assistant_prefill}});
        }
        body["messages"] = std::move(messages);
    }

    http::RequestOptions options;
    options.timeout_ms = cfg.timeout_ms;
    if (!cfg.api_key_env.empty()) {
        const char* token = std::getenv(cfg.api_key_env.c_str());
        if (token && *token) options.headers["Authorization"] = std::string("Bearer ") + token;
    }

    GateGuard guard(impl_->gate);
    http::TransportFailure failure;
    auto response = http::post_json(cfg.base_url, cfg.path, body.dump(), options, &failure);
    if (!response) {
        if (failure.timed_out) {
            throw TimeoutError(cfg.id, "backend '" + cfg.id + "' timed out: " + failure.message);
        }
        throw TransportError(cfg.id,
                             "backend '" + cfg.id + "' unreachable: " + failure.message);
    }
    if (response->status < 200 || response->status >= 300) {
        throw HttpStatusError(cfg.id, response->status,
                              "backend '" + cfg.id + "' returned HTTP " +
                                  std::to_string(response->status));
    }

    json parsed;
    try {
        parsed = json::parse(response->body);
    } catch (const json::exception& e) {
        throw TransportError(cfg.id, "backend '" + cfg.id +
                                         "' returned unparsable JSON: " + e.what());
    }
    try {
        const json& choice = parsed.at("choices").at(0);
        if (cfg.completion_style) return choice.at("text").get<std::string>();
        return choice.at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw TransportError(cfg.id, "backend '" + cfg.id +
                                         "' response missing choices[0] content");
    }
}

}  // namespace apf
