#include "core/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "core/errors.hpp"

namespace qrng {

namespace {

using nlohmann::json;

std::string sidecar_path(const std::string& path) { return path + ".json"; }

json parse_json_file(const std::string& path, const std::string& what) {
    std::ifstream in(path);
    require(in.good(), errc::io, "cannot open " + what + ": " + path);
    json j = json::parse(in, nullptr, false);
    require(!j.is_discarded(), errc::validation, "malformed JSON in " + path);
    return j;
}

} // namespace

void write_raw(const std::string& path, const SignalStream& stream, const RawMeta& meta) {
    require(meta.sample_rate_hz > 0.0, errc::validation, "sample rate must be positive");
    require(meta.full_scale > 0.0, errc::validation, "full scale must be positive");
    require(meta.adc_bits == 16 && meta.dtype == "i16" && meta.endianness == "little",
            errc::validation, "raw format is restricted to little-endian i16");

    std::ofstream out(path, std::ios::binary);
    require(out.good(), errc::io, "cannot open for writing: " + path);
    for (double x : stream.samples) {
        double scaled = std::round(x / meta.full_scale * 32768.0);
        if (scaled > 32767.0) scaled = 32767.0;
        if (scaled < -32768.0) scaled = -32768.0;
        const int16_t code = int16_t(scaled);
        const uint8_t bytes[2] = {uint8_t(uint16_t(code) & 0xff), uint8_t(uint16_t(code) >> 8)};
        out.write(reinterpret_cast<const char*>(bytes), 2);
    }
    require(out.good(), errc::io, "short write: " + path);
    out.close();

    json j = {{"sample_rate_hz", meta.sample_rate_hz},
              {"full_scale", meta.full_scale},
              {"adc_bits", meta.adc_bits},
              {"dtype", meta.dtype},
              {"endianness", meta.endianness}};
    write_text(sidecar_path(path), j.dump(2) + "\n");
}

RawMeta read_sidecar(const std::string& path) {
    json j = parse_json_file(sidecar_path(path), "sidecar metadata");
    RawMeta m;
    try {
        m.sample_rate_hz = j.at("sample_rate_hz").get<double>();
        m.full_scale = j.at("full_scale").get<double>();
        m.adc_bits = j.at("adc_bits").get<int>();
        m.dtype = j.at("dtype").get<std::string>();
        m.endianness = j.at("endianness").get<std::string>();
    } catch (const json::exception& e) {
        fail(errc::validation, std::string("sidecar metadata incomplete: ") + e.what());
    }
    require(m.sample_rate_hz > 0.0, errc::validation, "sidecar sample rate must be positive");
    require(m.full_scale > 0.0, errc::validation, "sidecar full scale must be positive");
    require(m.dtype == "i16" && m.endianness == "little" && m.adc_bits == 16, errc::validation,
            "unsupported raw format in sidecar");
    return m;
}

SignalStream ingest_raw(const std::string& path, RawMeta* meta_out) {
    RawMeta meta = read_sidecar(path);

    std::ifstream in(path, std::ios::binary | std::ios::ate);
    require(in.good(), errc::io, "cannot open raw data: " + path);
    const std::streamoff size = in.tellg();
    require(size % 2 == 0, errc::io, "raw data truncated mid-sample: " + path);
    in.seekg(0);

    SignalStream s;
    s.sample_rate = meta.sample_rate_hz;
    s.origin = path;
    s.samples.resize(size_t(size / 2));
    std::vector<uint8_t> buf(static_cast<size_t>(size));
    in.read(reinterpret_cast<char*>(buf.data()), size);
    require(in.gcount() == size, errc::io, "short read: " + path);
    for (size_t i = 0; i < s.samples.size(); ++i) {
        const int16_t code = int16_t(uint16_t(buf[2 * i]) | (uint16_t(buf[2 * i + 1]) << 8));
        s.samples[i] = double(code) * meta.full_scale / 32768.0;
    }
    if (meta_out) *meta_out = meta;
    return s;
}

void write_bits(const std::string& path, const BitStream& bits) {
    std::ofstream out(path, std::ios::binary);
    require(out.good(), errc::io, "cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bits.bytes.data()),
              std::streamsize(bits.bytes.size()));
    require(out.good(), errc::io, "short write: " + path);
}

BitStream read_bits(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    require(in.good(), errc::io, "cannot open bit file: " + path);
    const std::streamoff size = in.tellg();
    in.seekg(0);
    BitStream b;
    b.bytes.resize(size_t(size));
    in.read(reinterpret_cast<char*>(b.bytes.data()), size);
    require(in.gcount() == size, errc::io, "short read: " + path);
    b.bit_count = uint64_t(size) * 8;
    return b;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    require(out.good(), errc::io, "cannot open for writing: " + path);
    for (size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    char cell[64];
    for (const auto& row : rows) {
        require(row.size() == header.size(), errc::internal, "CSV row width mismatch");
        for (size_t i = 0; i < row.size(); ++i) {
            std::snprintf(cell, sizeof cell, "%.12g", row[i]);
            out << cell << (i + 1 < row.size() ? "," : "\n");
        }
    }
    require(out.good(), errc::io, "short write: " + path);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    require(out.good(), errc::io, "cannot open for writing: " + path);
    out << text;
    require(out.good(), errc::io, "short write: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), errc::io, "cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace qrng
