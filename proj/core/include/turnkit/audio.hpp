#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace turnkit {

/// Millisecond offset to sample index, rounded half-up. The single rounding
/// convention used by slice() and append_silence().
inline std::int64_t ms_to_samples(std::int64_t ms, int sample_rate) {
    return (ms * sample_rate + 500) / 1000;
}

/// Mono PCM16 audio. Immutable by convention after load; all operations
/// return new clips.
struct AudioClip {
    int sample_rate = 0; // Hz
    std::vector<std::int16_t> samples;

    std::int64_t duration_ms() const {
        return static_cast<std::int64_t>(samples.size()) * 1000 / sample_rate;
    }

    bool operator==(const AudioClip&) const = default;
};

/// Decode RIFF/WAVE PCM16 mono. Throws ValidationError naming the violated
/// constraint (non-PCM16, channels != 1, truncated chunks).
AudioClip decode_wav(std::span<const std::uint8_t> bytes);

/// Canonical 44-byte-header PCM16 mono little-endian encoding.
std::vector<std::uint8_t> encode_wav(const AudioClip& clip);

AudioClip load_wav(const std::filesystem::path& path);
void save_wav(const AudioClip& clip, const std::filesystem::path& path);

/// Copy of the sample subsequence [start_ms, end_ms). Requires
/// 0 <= start_ms < end_ms <= duration_ms(clip); throws ValidationError
/// otherwise. Result duration equals end_ms - start_ms within +/-1 ms.
AudioClip slice(const AudioClip& clip, std::int64_t start_ms, std::int64_t end_ms);

/// The clip followed by round(pause_ms * sample_rate / 1000) zero samples.
/// pause_ms must be >= 0.
AudioClip append_silence(const AudioClip& clip, std::int64_t pause_ms);

} // namespace turnkit
