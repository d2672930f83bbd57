#include "apf/http.hpp"

#include "httplib.h"

namespace apf::http {

std::optional<Response> post_json(const std::string& base_url, const std::string& path,
                                  const std::string& json_body, const RequestOptions& options,
                                  TransportFailure* failure) {
    httplib::Client client(base_url);
    client.set_connection_timeout(0, options.timeout_ms * 1000LL);
    client.set_read_timeout(0, options.timeout_ms * 1000LL);
    client.set_write_timeout(0, options.timeout_ms * 1000LL);

    httplib::Headers headers;
    for (const auto& [key, value] : options.headers) headers.emplace(key, value);

    auto result = client.Post(path, headers, json_body, "application/json");
    if (!result) {
        if (failure) {
            failure->message = httplib::to_string(result.error());
            failure->timed_out = result.error() == httplib::Error::ConnectionTimeout ||
                                 result.error() == httplib::Error::Read ||
                                 result.error() == httplib::Error::Write;
        }
        return std::nullopt;
    }
    return Response{result->status, result->body};
}

}  // namespace apf::http
