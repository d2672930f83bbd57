#pragma once

#include <map>
#include <optional>
#include <string>

namespace apf::http {

struct Response {
    int status = 0;
    std::string body;
};

struct RequestOptions {
    std::map<std::string, std::string> headers;
    int timeout_ms = 30000;
};

// POST a JSON body to base_url + path. Returns the response on any HTTP
// status; nullopt when the transport layer failed (err_out gets the cause).
// Timeouts are reported through err_out with timed_out set.
struct TransportFailure {
    std::string message;
    bool timed_out = false;
};

std::optional<Response> post_json(const std::string& base_url, const std::string& path,
                                  const std::string& json_body, const RequestOptions& options,
                                  TransportFailure* failure);

}  // namespace apf::http
