#pragma once

#include <filesystem>

#include "pairtime/detection.hpp"

namespace pairtime {

// Binary timestamp file, 16-byte header then 16-byte records.
// Header: magic "PTAG0001", u32 LE resolution in ps, u32 LE zero.
// Record: u64 LE time in ps (tick * resolution), u8 channel, 7 zero bytes.
//
// The writer requires an integral resolution >= 1 ps and non-negative
// ticks so every record time is exact. The reader rejects bad magic,
// truncated files, record times that are not multiples of the header
// resolution, mixed channels, and unsorted times.
void write_timestamp_file(const std::filesystem::path& path,
                          const TimestampStream& stream);

TimestampStream read_timestamp_file(const std::filesystem::path& path);

}  // namespace pairtime
