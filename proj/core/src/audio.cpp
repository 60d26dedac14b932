#include "turnkit/audio.hpp"

#include "turnkit/errors.hpp"

#include <cstring>
#include <fstream>

namespace turnkit {

namespace {

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
           (static_cast<std::uint32_t>(b[off + 2]) << 16) |
           (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

} // namespace

AudioClip decode_wav(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw ValidationError("wav: not a RIFF/WAVE file");

    bool have_fmt = false;
    int channels = 0, bits = 0, format = 0;
    std::uint32_t rate = 0;
    AudioClip clip;
    bool have_data = false;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const char* tag = reinterpret_cast<const char*>(bytes.data() + pos);
        const std::uint32_t size = read_u32(bytes, pos + 4);
        pos += 8;
        if (size > bytes.size() - pos)
            throw ValidationError("wav: truncated chunk '" + std::string(tag, 4) + "'");
        if (std::memcmp(tag, "fmt ", 4) == 0) {
            if (size < 16) throw ValidationError("wav: fmt chunk too small");
            format = read_u16(bytes.subspan(pos), 0);
            channels = read_u16(bytes.subspan(pos), 2);
            rate = read_u32(bytes.subspan(pos), 4);
            bits = read_u16(bytes.subspan(pos), 14);
            have_fmt = true;
        } else if (std::memcmp(tag, "data", 4) == 0) {
            if (!have_fmt) throw ValidationError("wav: data chunk before fmt chunk");
            if (size % 2 != 0) throw ValidationError("wav: odd data chunk size for PCM16");
            clip.samples.resize(size / 2);
            for (std::size_t i = 0; i < clip.samples.size(); ++i) {
                const std::uint16_t u = read_u16(bytes.subspan(pos), i * 2);
                clip.samples[i] = static_cast<std::int16_t>(u);
            }
            have_data = true;
        }
        pos += size + (size % 2); // chunks are word-aligned
    }

    if (!have_fmt) throw ValidationError("wav: missing fmt chunk");
    if (format != 1) throw ValidationError("wav: format=" + std::to_string(format) + " unsupported (PCM only)");
    if (channels != 1) throw ValidationError("wav: channels=" + std::to_string(channels) + " unsupported");
    if (bits != 16) throw ValidationError("wav: bits=" + std::to_string(bits) + " unsupported (PCM16 only)");
    if (rate == 0 || rate > INT32_MAX) throw ValidationError("wav: invalid sample rate");
    if (!have_data) throw ValidationError("wav: missing data chunk");
    clip.sample_rate = static_cast<int>(rate);
    return clip;
}

std::vector<std::uint8_t> encode_wav(const AudioClip& clip) {
    if (clip.sample_rate <= 0) throw ValidationError("wav: invalid sample rate");
    const std::uint32_t data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    put_u32(out, 36 + data_bytes);
    out.insert(out.end(), {'W', 'A', 'V', 'E'});
    out.insert(out.end(), {'f', 'm', 't', ' '});
    put_u32(out, 16);
    put_u16(out, 1); // PCM
    put_u16(out, 1); // mono
    put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
    put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2); // byte rate
    put_u16(out, 2);  // block align
    put_u16(out, 16); // bits per sample
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    put_u32(out, data_bytes);
    for (std::int16_t s : clip.samples)
        put_u16(out, static_cast<std::uint16_t>(s));
    return out;
}

AudioClip load_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open wav '" + path.string() + "' for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    try {
        return decode_wav(bytes);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void save_wav(const AudioClip& clip, const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = encode_wav(clip);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open wav '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing wav '" + path.string() + "'");
}

AudioClip slice(const AudioClip& clip, std::int64_t start_ms, std::int64_t end_ms) {
    if (start_ms < 0 || start_ms >= end_ms || end_ms > clip.duration_ms())
        throw ValidationError("slice: bounds [" + std::to_string(start_ms) + "," +
                              std::to_string(end_ms) + ") out of range for clip of " +
                              std::to_string(clip.duration_ms()) + " ms");
    const auto begin = static_cast<std::size_t>(ms_to_samples(start_ms, clip.sample_rate));
    const auto end = static_cast<std::size_t>(ms_to_samples(end_ms, clip.sample_rate));
    AudioClip out;
    out.sample_rate = clip.sample_rate;
    out.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                       clip.samples.begin() + static_cast<std::ptrdiff_t>(end));
    return out;
}

AudioClip append_silence(const AudioClip& clip, std::int64_t pause_ms) {
    if (pause_ms < 0) throw ValidationError("append_silence: negative pause_ms");
    AudioClip out = clip;
    out.samples.resize(out.samples.size() + static_cast<std::size_t>(ms_to_samples(pause_ms, clip.sample_rate)), 0);
    return out;
}

} // namespace turnkit
