#include "pairtime/timestamp_file.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

#include "pairtime/errors.hpp"

namespace pairtime {

namespace {

constexpr char kMagic[8] = {'P', 'T', 'A', 'G', '0', '0', '0', '1'};

void put_u32le(unsigned char* p, uint32_t v) {
    for (int i = 0; i < 4; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

void put_u64le(unsigned char* p, uint64_t v) {
    for (int i = 0; i < 8; ++i) p[i] = static_cast<unsigned char>(v >> (8 * i));
}

uint32_t get_u32le(const unsigned char* p) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
    return v;
}

uint64_t get_u64le(const unsigned char* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
    return v;
}

}  // namespace

void write_timestamp_file(const std::filesystem::path& path,
                          const TimestampStream& stream) {
    const double res = stream.resolution_ps;
    if (!(res >= 1.0) || res != std::floor(res) || res > 4294967295.0)
        throw ConfigError("timestamp file requires an integral resolution in [1, 2^32) ps");
    if (stream.channel_id < 0 || stream.channel_id > 255)
        throw ConfigError("timestamp file channel must fit in one byte");
    const auto res_u = static_cast<uint64_t>(res);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");

    std::array<unsigned char, 16> buf{};
    std::memcpy(buf.data(), kMagic, 8);
    put_u32le(buf.data() + 8, static_cast<uint32_t>(res_u));
    put_u32le(buf.data() + 12, 0);
    out.write(reinterpret_cast<const char*>(buf.data()), buf.size());

    for (int64_t tick : stream.ticks) {
        if (tick < 0) throw ConfigError("timestamp file requires non-negative ticks");
        buf.fill(0);
        put_u64le(buf.data(), static_cast<uint64_t>(tick) * res_u);
        buf[8] = static_cast<unsigned char>(stream.channel_id);
        out.write(reinterpret_cast<const char*>(buf.data()), buf.size());
    }
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

TimestampStream read_timestamp_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::array<unsigned char, 16> buf{};
    in.read(reinterpret_cast<char*>(buf.data()), buf.size());
    if (in.gcount() != 16 || std::memcmp(buf.data(), kMagic, 8) != 0)
        throw ConfigError(path.string() + ": not a timestamp file (bad magic)");
    const uint32_t res_u = get_u32le(buf.data() + 8);
    if (res_u == 0)
        throw ConfigError(path.string() + ": zero resolution in header");

    TimestampStream stream;
    stream.resolution_ps = static_cast<double>(res_u);
    stream.channel_id = -1;

    uint64_t prev_ps = 0;
    bool first = true;
    for (;;) {
        in.read(reinterpret_cast<char*>(buf.data()), buf.size());
        const auto got = in.gcount();
        if (got == 0) break;
        if (got != 16)
            throw ConfigError(path.string() + ": truncated record");
        const uint64_t t_ps = get_u64le(buf.data());
        const int channel = buf[8];
        if (t_ps % res_u != 0)
            throw ConfigError(path.string() + ": record time is not a multiple of the resolution");
        if (!first && t_ps < prev_ps)
            throw ConfigError(path.string() + ": timestamps are not sorted");
        if (first)
            stream.channel_id = channel;
        else if (channel != stream.channel_id)
            throw ConfigError(path.string() + ": mixed channels in one file");
        stream.ticks.push_back(static_cast<int64_t>(t_ps / res_u));
        prev_ps = t_ps;
        first = false;
    }
    if (first) stream.channel_id = 0;
    return stream;
}

}  // namespace pairtime
