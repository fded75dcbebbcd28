#include "core/report.hpp"

#include "core/errors.hpp"
#include "core/io.hpp"

namespace qrng {

using nlohmann::json;

ReportData make_report(const json& config, const RunReport& run,
                       const std::vector<SanityResult>& sanity,
                       const std::vector<BlockExtractionMeta>& extraction) {
    require(extraction.empty() || extraction.size() == run.blocks.size(), errc::internal,
            "extraction metadata does not match the block count");
    ReportData d;
    d.config = config;
    d.h_inf = run.entropy.h_inf;
    d.h_max = run.entropy.h_max;
    d.estimator = estimator_name(run.entropy.estimator);
    d.c = run.entropy.c.c;
    d.h_low = run.entropy.h_low;
    d.tail_error = run.entropy.tail_error;
    d.t_bits = run.t_bits;
    d.r_sec = run.r_sec;
    d.m = run.measurements_used;
    d.seed_exhausted = run.seed_exhausted;
    d.blocks.reserve(run.blocks.size());
    for (size_t i = 0; i < run.blocks.size(); ++i) {
        const BlockTrace& b = run.blocks[i];
        ReportData::BlockRow row;
        row.index = b.index;
        row.offset = b.offset;
        row.size = b.size;
        row.n_check = b.n_check;
        row.t_bits = b.t_bits;
        row.h_inf = b.entropy.h_inf;
        row.h_max = b.entropy.h_max;
        row.h_low = b.entropy.h_low;
        row.tail_error = b.entropy.tail_error;
        row.r_sec = b.r_sec;
        if (!extraction.empty()) {
            row.l = extraction[i].l;
            row.extracted_bits = extraction[i].bits;
            d.extracted_bits += extraction[i].bits;
        }
        d.n_check_total += b.n_check;
        d.blocks.push_back(row);
    }
    d.sanity = sanity;
    return d;
}

json report_to_json(const ReportData& d) {
    json blocks = json::array();
    for (const auto& b : d.blocks)
        blocks.push_back({{"index", b.index},
                          {"offset", b.offset},
                          {"size", b.size},
                          {"n_check", b.n_check},
                          {"t_bits", b.t_bits},
                          {"h_inf", b.h_inf},
                          {"h_max", b.h_max},
                          {"h_low", b.h_low},
                          {"tail_error", b.tail_error},
                          {"r_sec", b.r_sec},
                          {"l", b.l},
                          {"extracted_bits", b.extracted_bits}});
    json sanity = json::array();
    for (const auto& s : d.sanity)
        sanity.push_back({{"name", s.name},
                          {"statistic", s.statistic},
                          {"threshold", s.threshold},
                          {"pass", s.pass}});
    return json{{"config", d.config},
                {"h_inf", d.h_inf},
                {"h_max", d.h_max},
                {"estimator", d.estimator},
                {"c", d.c},
                {"h_low", d.h_low},
                {"tail_error", d.tail_error},
                {"t_bits", d.t_bits},
                {"r_sec", d.r_sec},
                {"m", d.m},
                {"n_check_total", d.n_check_total},
                {"extracted_bits", d.extracted_bits},
                {"seed_exhausted", d.seed_exhausted},
                {"blocks", blocks},
                {"sanity", sanity}};
}

ReportData parse_report(const json& j) {
    ReportData d;
    try {
        d.config = j.at("config");
        d.h_inf = j.at("h_inf").get<double>();
        d.h_max = j.at("h_max").get<double>();
        d.estimator = j.at("estimator").get<std::string>();
        d.c = j.at("c").get<double>();
        d.h_low = j.at("h_low").get<double>();
        d.tail_error = j.at("tail_error").get<double>();
        d.t_bits = j.at("t_bits").get<uint64_t>();
        d.r_sec = j.at("r_sec").get<double>();
        d.m = j.at("m").get<uint64_t>();
        d.n_check_total = j.at("n_check_total").get<uint64_t>();
        d.extracted_bits = j.at("extracted_bits").get<uint64_t>();
        d.seed_exhausted = j.at("seed_exhausted").get<bool>();
        for (const auto& bj : j.at("blocks")) {
            ReportData::BlockRow b;
            b.index = bj.at("index").get<uint64_t>();
            b.offset = bj.at("offset").get<uint64_t>();
            b.size = bj.at("size").get<uint64_t>();
            b.n_check = bj.at("n_check").get<uint64_t>();
            b.t_bits = bj.at("t_bits").get<uint64_t>();
            b.h_inf = bj.at("h_inf").get<double>();
            b.h_max = bj.at("h_max").get<double>();
            b.h_low = bj.at("h_low").get<double>();
            b.tail_error = bj.at("tail_error").get<double>();
            b.r_sec = bj.at("r_sec").get<double>();
            b.l = bj.at("l").get<uint64_t>();
            b.extracted_bits = bj.at("extracted_bits").get<uint64_t>();
            d.blocks.push_back(b);
        }
        for (const auto& sj : j.at("sanity")) {
            SanityResult s;
            s.name = sj.at("name").get<std::string>();
            s.statistic = sj.at("statistic").get<double>();
            s.threshold = sj.at("threshold").get<double>();
            s.pass = sj.at("pass").get<bool>();
            d.sanity.push_back(s);
        }
    } catch (const json::exception& e) {
        fail(errc::validation, std::string("report schema violation: ") + e.what());
    }
    return d;
}

void write_block_csv(const std::string& path, const ReportData& d) {
    std::vector<std::vector<double>> rows;
    rows.reserve(d.blocks.size());
    for (const auto& b : d.blocks)
        rows.push_back({double(b.index), double(b.offset), double(b.size), double(b.n_check),
                        double(b.t_bits), b.h_inf, b.h_max, b.h_low, b.tail_error, b.r_sec,
                        double(b.l), double(b.extracted_bits)});
    write_csv(path,
              {"index", "offset", "size", "n_check", "t_bits", "h_inf", "h_max", "h_low",
               "tail_error", "r_sec", "l", "extracted_bits"},
              rows);
}

} // namespace qrng
