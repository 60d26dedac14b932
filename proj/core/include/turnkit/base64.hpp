#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace turnkit {

std::string base64_encode(std::span<const std::uint8_t> data);

/// Throws ValidationError on characters outside the RFC 4648 alphabet or bad padding.
std::vector<std::uint8_t> base64_decode(const std::string& text);

} // namespace turnkit
