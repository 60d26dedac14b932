#include "turnkit/http.hpp"

#include <httplib.h>

namespace turnkit {

HttplibTransport::HttplibTransport(std::string base_url, int timeout_ms)
    : base_url_(std::move(base_url)), timeout_ms_(timeout_ms) {
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

HttpResponse HttplibTransport::send(const HttpRequest& request) {
    httplib::Client cli(base_url_);
    cli.set_connection_timeout(0, timeout_ms_ * 1000LL);
    cli.set_read_timeout(0, timeout_ms_ * 1000LL);
    cli.set_write_timeout(0, timeout_ms_ * 1000LL);

    httplib::Headers headers;
    for (const auto& [k, v] : request.headers) headers.emplace(k, v);

    httplib::Result res;
    if (request.method == "POST") {
        res = cli.Post(request.path, headers, request.body, request.content_type);
    } else if (request.method == "GET") {
        res = cli.Get(request.path, headers);
    } else {
        throw ProtocolError("unsupported HTTP method '" + request.method + "'");
    }

    if (!res)
        throw TransportError("HTTP request to " + base_url_ + request.path + " failed: " +
                             httplib::to_string(res.error()));

    HttpResponse out;
    out.status = res->status;
    out.body = res->body;
    out.content_type = res->get_header_value("Content-Type");
    return out;
}

} // namespace turnkit
