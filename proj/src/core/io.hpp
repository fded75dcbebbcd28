#pragma once

#include <string>
#include <vector>

#include "core/dsp.hpp"
#include "core/extractor.hpp"

namespace qrng {

// Sidecar metadata for raw capture files, stored as JSON at <data path>.json.
struct RawMeta {
    double sample_rate_hz = 0.0;
    double full_scale = 1.0; // amplitude mapped to ADC code 32768
    int adc_bits = 16;
    std::string dtype = "i16";
    std::string endianness = "little";
};

// Raw format: little-endian signed 16-bit integers; amplitude x maps to
// round(x / full_scale * 32768), so integer codes round-trip bit-exactly.
void write_raw(const std::string& path, const SignalStream& stream, const RawMeta& meta);

SignalStream ingest_raw(const std::string& path, RawMeta* meta_out = nullptr);

RawMeta read_sidecar(const std::string& path);

void write_bits(const std::string& path, const BitStream& bits);
BitStream read_bits(const std::string& path);

// One CSV table: header row, then numeric rows, fixed column count.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

} // namespace qrng
