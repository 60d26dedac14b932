#pragma once

#include "turnkit/errors.hpp"

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace turnkit {

struct HttpRequest {
    std::string method = "POST";
    std::string path;
    std::string body;
    std::string content_type = "application/json";
    std::vector<std::pair<std::string, std::string>> headers;
};

struct HttpResponse {
    int status = 0;
    std::string body;
    std::string content_type;
};

/// Timeout or connection-level failure; retried like an HTTP 5xx.
class TransportError : public Error {
public:
    using Error::Error;
};

/// One HTTP exchange. Implementations must be safe to call from multiple
/// threads concurrently.
class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// Real HTTP/1.1 transport over cpp-httplib. base_url is scheme://host[:port];
/// request paths are appended to it. One connection per request.
class HttplibTransport : public Transport {
public:
    HttplibTransport(std::string base_url, int timeout_ms);
    HttpResponse send(const HttpRequest& request) override;

private:
    std::string base_url_;
    int timeout_ms_;
};

} // namespace turnkit
