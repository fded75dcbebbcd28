#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "core/protocol.hpp"
#include "core/sanity.hpp"

namespace qrng {

// Flattened run report matching the emitted JSON schema one to one.
struct ReportData {
    nlohmann::json config = nlohmann::json::object();
    double h_inf = 0.0;
    double h_max = 0.0;
    std::string estimator;
    double c = 0.0;
    double h_low = 0.0;
    double tail_error = 0.0;
    uint64_t t_bits = 0;
    double r_sec = 0.0;
    uint64_t m = 0;             // measurements consumed
    uint64_t n_check_total = 0;
    uint64_t extracted_bits = 0;
    bool seed_exhausted = false;

    struct BlockRow {
        uint64_t index = 0;
        uint64_t offset = 0;
        uint64_t size = 0;
        uint64_t n_check = 0;
        uint64_t t_bits = 0;
        double h_inf = 0.0;
        double h_max = 0.0;
        double h_low = 0.0;
        double tail_error = 0.0;
        double r_sec = 0.0;
        uint64_t l = 0;              // extractor output bits per substring
        uint64_t extracted_bits = 0; // total bits extracted from this block
    };
    std::vector<BlockRow> blocks;
    std::vector<SanityResult> sanity;
};

// Per-block extraction totals, aligned with RunReport::blocks.
struct BlockExtractionMeta {
    uint64_t l = 0;
    uint64_t bits = 0;
};

ReportData make_report(const nlohmann::json& config, const RunReport& run,
                       const std::vector<SanityResult>& sanity = {},
                       const std::vector<BlockExtractionMeta>& extraction = {});

nlohmann::json report_to_json(const ReportData& data);

// Strict schema parse; unknown keys are ignored, missing keys are errors.
ReportData parse_report(const nlohmann::json& j);

// Per-block CSV trace rows (entropy and rate per block).
void write_block_csv(const std::string& path, const ReportData& data);

} // namespace qrng
