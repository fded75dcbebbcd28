#include "core/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "core/errors.hpp"
#include "core/io.hpp"
#include "core/sanity.hpp"

namespace qrng {

using nlohmann::json;

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& section) {
    require(j.is_object(), errc::validation, "config section must be an object: " + section);
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        require(known, errc::validation, "unknown config key: " + section + "." + key);
    }
}

template <typename T>
T field(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(errc::validation, std::string("bad value for config key ") + key);
    }
}

GaussianState quantizing_state(const PipelineConfig& cfg) {
    require(cfg.source.kind != "file", errc::validation,
            "this command needs a simulated source");
    return state_from_source(cfg.source);
}

SampleBlock ingest_symbols(const PipelineConfig& cfg) {
    require(!cfg.source.path.empty(), errc::validation, "ingestion mode needs source.path");
    SignalStream stream = ingest_raw(cfg.source.path);
    SampleBlock block;
    block.partition = cfg.protocol.partition;
    block.source = cfg.source.path;
    block.symbols.reserve(stream.samples.size());
    for (double x : stream.samples) block.symbols.push_back(block.partition.bin_of(x));
    return block;
}

int effective_b(const PipelineConfig& cfg) {
    return cfg.extractor.b == 0 ? cfg.protocol.partition.bit_depth : cfg.extractor.b;
}

void append_stream(BitStream& dst, const BitStream& src) {
    for (uint64_t i = 0; i < src.bit_count; ++i) dst.push_bit(src.bit(i));
}

json emit(const PipelineConfig& cfg, const ReportData& data) {
    json j = report_to_json(data);
    if (!cfg.output.report.empty()) write_text(cfg.output.report, j.dump(2) + "\n");
    if (!cfg.output.blocks_csv.empty()) write_block_csv(cfg.output.blocks_csv, data);
    return j;
}

} // namespace

GaussianState state_from_source(const SourceSpec& source) {
    if (source.kind == "vacuum") return GaussianState::vacuum();
    if (source.kind == "thermal") return GaussianState::thermal(source.parameter);
    if (source.kind == "squeezed") return GaussianState::squeezed(source.parameter);
    if (source.kind == "empirical") return GaussianState::empirical(source.parameter);
    fail(errc::validation, "unknown source kind: " + source.kind);
}

PipelineConfig config_from_json(const json& j) {
    check_keys(j, {"source", "dsp", "partition", "protocol", "extractor", "output"}, "config");
    PipelineConfig cfg;

    if (j.contains("source")) {
        const json& s = j.at("source");
        check_keys(s, {"kind", "parameter", "path", "seed"}, "source");
        cfg.source.kind = field<std::string>(s, "kind", cfg.source.kind);
        cfg.source.parameter = field<double>(s, "parameter", cfg.source.parameter);
        cfg.source.path = field<std::string>(s, "path", cfg.source.path);
        cfg.source.seed = field<uint64_t>(s, "seed", cfg.source.seed);
        if (cfg.source.kind != "file") state_from_source(cfg.source); // validate kind
    }
    if (j.contains("dsp")) {
        const json& d = j.at("dsp");
        check_keys(d,
                   {"sample_rate", "f0", "cutoff", "taps", "downsample", "bandwidth",
                    "variance", "count"},
                   "dsp");
        cfg.dsp.sample_rate = field<double>(d, "sample_rate", cfg.dsp.sample_rate);
        cfg.dsp.f0 = field<double>(d, "f0", cfg.dsp.f0);
        cfg.dsp.cutoff = field<double>(d, "cutoff", cfg.dsp.cutoff);
        cfg.dsp.taps = field<int>(d, "taps", cfg.dsp.taps);
        cfg.dsp.downsample = field<int>(d, "downsample", cfg.dsp.downsample);
        cfg.dsp.bandwidth = field<double>(d, "bandwidth", cfg.dsp.bandwidth);
        cfg.dsp.variance = field<double>(d, "variance", cfg.dsp.variance);
        cfg.dsp.count = field<uint64_t>(d, "count", cfg.dsp.count);
    }
    if (j.contains("partition")) {
        const json& p = j.at("partition");
        check_keys(p, {"bit_depth", "p_max", "centered"}, "partition");
        cfg.protocol.partition =
            Partition(field<int>(p, "bit_depth", cfg.protocol.partition.bit_depth),
                      field<double>(p, "p_max", cfg.protocol.partition.p_max),
                      field<bool>(p, "centered", cfg.protocol.partition.centered));
    }
    if (j.contains("protocol")) {
        const json& p = j.at("protocol");
        check_keys(p,
                   {"m", "n_q", "estimator", "recalibration_block", "seed",
                    "seed_budget_bits"},
                   "protocol");
        cfg.protocol.m = field<uint64_t>(p, "m", cfg.protocol.m);
        cfg.protocol.n_q = field<uint64_t>(p, "n_q", cfg.protocol.n_q);
        cfg.protocol.estimator = estimator_from_name(
            field<std::string>(p, "estimator", estimator_name(cfg.protocol.estimator)));
        cfg.protocol.recalibration_block =
            field<uint64_t>(p, "recalibration_block", cfg.protocol.recalibration_block);
        cfg.protocol.seed = field<uint64_t>(p, "seed", cfg.protocol.seed);
        cfg.protocol.seed_budget_bits =
            field<uint64_t>(p, "seed_budget_bits", cfg.protocol.seed_budget_bits);
    }
    if (j.contains("extractor")) {
        const json& e = j.at("extractor");
        check_keys(e, {"n", "b", "mode", "matrix_seed", "margin_bits"}, "extractor");
        cfg.extractor.n = field<uint64_t>(e, "n", cfg.extractor.n);
        cfg.extractor.b = field<int>(e, "b", 0); // 0 = follow partition depth
        cfg.extractor.mode = matrix_mode_from_name(
            field<std::string>(e, "mode", matrix_mode_name(cfg.extractor.mode)));
        cfg.extractor.matrix_seed = field<uint64_t>(e, "matrix_seed", cfg.extractor.matrix_seed);
        cfg.extractor.margin_bits = field<double>(e, "margin_bits", cfg.extractor.margin_bits);
    } else {
        cfg.extractor.b = 0;
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        check_keys(o, {"report", "bits", "raw", "blocks_csv", "autocorr_csv", "sweep_csv"},
                   "output");
        cfg.output.report = field<std::string>(o, "report", "");
        cfg.output.bits = field<std::string>(o, "bits", "");
        cfg.output.raw = field<std::string>(o, "raw", "");
        cfg.output.blocks_csv = field<std::string>(o, "blocks_csv", "");
        cfg.output.autocorr_csv = field<std::string>(o, "autocorr_csv", "");
        cfg.output.sweep_csv = field<std::string>(o, "sweep_csv", "");
    }
    return cfg;
}

json config_to_json(const PipelineConfig& cfg) {
    return json{
        {"source",
         {{"kind", cfg.source.kind},
          {"parameter", cfg.source.parameter},
          {"path", cfg.source.path},
          {"seed", cfg.source.seed}}},
        {"dsp",
         {{"sample_rate", cfg.dsp.sample_rate},
          {"f0", cfg.dsp.f0},
          {"cutoff", cfg.dsp.cutoff},
          {"taps", cfg.dsp.taps},
          {"downsample", cfg.dsp.downsample},
          {"bandwidth", cfg.dsp.bandwidth},
          {"variance", cfg.dsp.variance},
          {"count", cfg.dsp.count}}},
        {"partition",
         {{"bit_depth", cfg.protocol.partition.bit_depth},
          {"p_max", cfg.protocol.partition.p_max},
          {"centered", cfg.protocol.partition.centered}}},
        {"protocol",
         {{"m", cfg.protocol.m},
          {"n_q", cfg.protocol.n_q},
          {"estimator", estimator_name(cfg.protocol.estimator)},
          {"recalibration_block", cfg.protocol.recalibration_block},
          {"seed", cfg.protocol.seed},
          {"seed_budget_bits", cfg.protocol.seed_budget_bits}}},
        {"extractor",
         {{"n", cfg.extractor.n},
          {"b", cfg.extractor.b},
          {"mode", matrix_mode_name(cfg.extractor.mode)},
          {"matrix_seed", cfg.extractor.matrix_seed},
          {"margin_bits", cfg.extractor.margin_bits}}},
        {"output",
         {{"report", cfg.output.report},
          {"bits", cfg.output.bits},
          {"raw", cfg.output.raw},
          {"blocks_csv", cfg.output.blocks_csv},
          {"autocorr_csv", cfg.output.autocorr_csv},
          {"sweep_csv", cfg.output.sweep_csv}}}};
}

PipelineConfig load_config(const std::string& path) {
    json j = json::parse(read_text(path), nullptr, false);
    require(!j.is_discarded(), errc::validation, "malformed JSON config: " + path);
    return config_from_json(j);
}

json run_simulate(const PipelineConfig& cfg) {
    require(!cfg.output.raw.empty(), errc::validation, "simulate needs output.raw");
    const GaussianState state = quantizing_state(cfg);
    NormalSampler normal(cfg.source.seed, 0.0, std::sqrt(state.sigma2_p));
    SignalStream s;
    s.sample_rate = cfg.dsp.sample_rate;
    s.origin = state.describe();
    s.samples.resize(size_t(cfg.protocol.m));
    for (auto& x : s.samples) x = normal.next();

    RawMeta meta;
    meta.sample_rate_hz = s.sample_rate;
    meta.full_scale = cfg.protocol.partition.p_max;
    write_raw(cfg.output.raw, s, meta);
    return json{{"command", "simulate"},
                {"samples", s.samples.size()},
                {"source", s.origin},
                {"full_scale", meta.full_scale},
                {"raw", cfg.output.raw}};
}

json run_downconvert(const PipelineConfig& cfg) {
    require(!cfg.output.raw.empty(), errc::validation, "downconvert needs output.raw");
    SignalStream in;
    if (cfg.source.kind == "file") {
        require(!cfg.source.path.empty(), errc::validation, "ingestion mode needs source.path");
        in = ingest_raw(cfg.source.path);
    } else {
        in = bandlimited_noise(cfg.dsp.variance, cfg.dsp.bandwidth, cfg.dsp.sample_rate,
                               cfg.dsp.count, cfg.source.seed);
    }
    if (cfg.dsp.f0 > 0.0) in = downmix(in, cfg.dsp.f0);
    SignalStream filtered = fir_lowpass(in, cfg.dsp.cutoff, cfg.dsp.taps);
    SignalStream out = downsample(filtered, cfg.dsp.downsample);

    double peak = 1e-12;
    for (double x : out.samples) peak = std::max(peak, std::abs(x));
    RawMeta meta;
    meta.sample_rate_hz = out.sample_rate;
    meta.full_scale = peak; // keep the stream inside the ADC range
    write_raw(cfg.output.raw, out, meta);

    json result{{"command", "downconvert"},
                {"samples_in", in.samples.size()},
                {"samples_out", out.samples.size()},
                {"sample_rate_out", out.sample_rate},
                {"raw", cfg.output.raw}};
    if (!cfg.output.autocorr_csv.empty() && out.samples.size() > 200) {
        auto rho = autocorrelation(out, 50);
        std::vector<std::vector<double>> rows;
        for (size_t k = 0; k < rho.size(); ++k) rows.push_back({double(k), rho[k]});
        write_csv(cfg.output.autocorr_csv, {"lag", "rho"}, rows);
        double worst = 0.0;
        for (size_t k = 1; k < rho.size(); ++k) worst = std::max(worst, std::abs(rho[k]));
        result["max_abs_rho"] = worst;
        result["autocorr_csv"] = cfg.output.autocorr_csv;
    }
    return result;
}

json run_certify(const PipelineConfig& cfg) {
    RunReport run = cfg.source.kind == "file"
                        ? run_protocol(cfg.protocol, ingest_symbols(cfg))
                        : run_protocol(cfg.protocol, quantizing_state(cfg), cfg.source.seed);
    ReportData data = make_report(config_to_json(cfg), run);
    json j = emit(cfg, data);
    j["command"] = "certify";
    return j;
}

json run_extract(const PipelineConfig& cfg) {
    RunReport run = cfg.source.kind == "file"
                        ? run_protocol(cfg.protocol, ingest_symbols(cfg))
                        : run_protocol(cfg.protocol, quantizing_state(cfg), cfg.source.seed);

    ExtractorParams params = cfg.extractor;
    params.b = effective_b(cfg);
    std::vector<BlockExtractionMeta> meta(run.blocks.size());
    BitStream all;
    for (size_t i = 0; i < run.blocks.size(); ++i) {
        const BlockTrace& block = run.blocks[i];
        if (!(block.entropy.h_low > 0.0)) continue;
        const double h_used = std::min(block.entropy.h_low, double(params.b));
        ExtractorParams p = params;
        p.matrix_seed = subseed(params.matrix_seed, block.index);
        SampleBlock sb;
        sb.partition = cfg.protocol.partition;
        sb.symbols = block.data_symbols;
        ExtractResult r = extract_stream(sb, p, h_used);
        meta[i].l = r.l;
        meta[i].bits = r.bits.bit_count;
        append_stream(all, r.bits);
    }
    run.extracted_bits = all.bit_count;

    std::vector<SanityResult> sanity;
    if (all.bit_count >= 100000) sanity = sanity_tests(all);
    if (!cfg.output.bits.empty()) write_bits(cfg.output.bits, all);

    ReportData data = make_report(config_to_json(cfg), run, sanity, meta);
    json j = emit(cfg, data);
    j["command"] = "extract";
    if (!cfg.output.bits.empty()) j["bits_file"] = cfg.output.bits;
    return j;
}

json run_sweep(const PipelineConfig& cfg, const std::string& grid) {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    if (grid == "overlap") {
        header = {"delta", "c", "log2_inv_c"};
        for (int i = 1; i <= 24; ++i) {
            const double delta = 0.05 * double(i);
            OverlapConstant oc = overlap_constant(delta, delta);
            rows.push_back({delta, oc.c, oc.log2_inv_c});
        }
    } else if (grid == "entropy") {
        header = {"bit_depth", "n_q", "mean_h_low"};
        const uint64_t m = cfg.protocol.m;
        const GaussianState state = quantizing_state(cfg);
        Xoshiro256 pick(subseed(cfg.protocol.seed, 0x5357454550ull));
        for (int depth = 1; depth <= 8; ++depth) {
            Partition part(depth, cfg.protocol.partition.p_max,
                           cfg.protocol.partition.centered);
            SampleBlock record =
                sample_quadrature(state, true, part, m, subseed(cfg.source.seed, depth));
            for (int i = 1; i <= 4; ++i) {
                const uint64_t n_q =
                    std::max<uint64_t>(64, uint64_t(std::llround(double(m) * std::pow(10.0, -i))));
                double sum = 0.0;
                std::vector<uint64_t> idx(n_q);
                std::vector<uint32_t> stamp(m, 0);
                for (int rep = 1; rep <= 200; ++rep) {
                    for (uint64_t k = 0; k < n_q;) {
                        const uint64_t cand = pick.next() % m;
                        if (stamp[cand] == uint32_t(rep)) continue;
                        stamp[cand] = uint32_t(rep);
                        idx[k++] = cand;
                    }
                    sum += certify(record, idx, cfg.protocol.estimator).h_low;
                }
                rows.push_back({double(depth), double(n_q), sum / 200.0});
            }
        }
    } else if (grid == "variance") {
        header = {"sigma2", "h_inf", "h_low"};
        for (int i = 0; i <= 10; ++i) {
            const double sigma2 = 0.5 + 0.05 * double(i);
            EntropyReport er =
                certify(bin_probabilities(sigma2, cfg.protocol.partition));
            rows.push_back({sigma2, er.h_inf, er.h_low});
        }
    } else {
        fail(errc::validation, "unknown sweep grid: " + grid);
    }

    require(!cfg.output.sweep_csv.empty(), errc::validation, "sweep needs output.sweep_csv");
    write_csv(cfg.output.sweep_csv, header, rows);
    return json{{"command", "sweep"},
                {"grid", grid},
                {"rows", rows.size()},
                {"sweep_csv", cfg.output.sweep_csv}};
}

json run_selftest(const PipelineConfig& cfg) {
    (void)cfg;
    json checks = json::array();
    bool ok = true;
    auto add = [&](const std::string& name, bool pass) {
        checks.push_back({{"name", name}, {"pass", pass}});
        ok = ok && pass;
    };

    {
        bool increasing = true;
        double prev = 0.0;
        for (int i = 1; i <= 12; ++i) {
            const double c = overlap_constant(0.05 * i, 0.05 * i).c;
            increasing = increasing && c > prev;
            prev = c;
        }
        add("overlap_monotone", increasing);
    }
    {
        EntropyReport er = certify(bin_probabilities(0.5, Partition(11, 10.24, true)));
        add("vacuum_gap", er.h_inf - er.h_low <= 0.02);
    }
    {
        SeedStream seed = SeedStream::prng(7);
        auto sel = select_check_instants(4096, 37, seed);
        SeedStream replay = SeedStream::from_bytes([&] {
            // re-encode the chosen rank; round-trip through subset_rank
            std::vector<uint8_t> bytes((seed_cost(4096, 37) + 7) / 8, 0);
            const BigUint rank = subset_rank(4096, sel);
            const auto& limbs = rank.limbs();
            for (uint64_t b = 0; b < seed_cost(4096, 37); ++b) {
                if ((b >> 6) >= limbs.size()) break;
                if ((limbs[b >> 6] >> (b & 63)) & 1) bytes[b >> 3] |= uint8_t(1u << (b & 7));
            }
            return bytes;
        }());
        add("selection_roundtrip", select_check_instants(4096, 37, replay) == sel);
    }
    {
        auto m = random_matrix(3, 48, 16);
        BitStream x, y, z;
        Xoshiro256 r(5);
        for (int i = 0; i < 48; ++i) {
            int a = int(r.next() & 1), b = int(r.next() & 1);
            x.push_bit(a);
            y.push_bit(b);
            z.push_bit(a ^ b);
        }
        auto hx = hash_block(x, m), hy = hash_block(y, m), hz = hash_block(z, m);
        bool linear = true, oracle = true;
        for (uint64_t j = 0; j < 16; ++j) {
            linear = linear && hz.bit(j) == (hx.bit(j) ^ hy.bit(j));
            int o = 0;
            for (uint64_t i = 0; i < 48; ++i) o ^= x.bit(i) & m.at(i, j);
            oracle = oracle && o == hx.bit(j);
        }
        add("hash_linear", linear);
        add("hash_oracle", oracle);
    }
    {
        BitStream zeros;
        for (int i = 0; i < 100000; ++i) zeros.push_bit(0);
        add("sanity_rejects_zeros", !sanity_all_pass(sanity_tests(zeros)));
    }
    {
        ProtocolConfig pc;
        pc.m = 4096;
        pc.partition = Partition(5, 7.424621202458749, false);
        RunReport run = run_protocol(pc, GaussianState::empirical(0.677), 11);
        ReportData data = make_report(json::object(), run);
        json j1 = report_to_json(data);
        json j2 = report_to_json(parse_report(j1));
        add("report_roundtrip", j1 == j2);
    }
    add("seed_cost_fixture", seed_cost(10000, 100) == 804);
    add("secure_rate_fixture",
        std::abs(secure_rate(615514112, 24810, 1.3629, seed_cost(615514112, 24810)) -
                 1.362198491227769) < 1e-12);
    {
        // hash_block throughput at production scale, fixed matrix
        const uint64_t n = 10000, l = 2725;
        auto m = random_matrix(17, n, l);
        BitStream in;
        Xoshiro256 r(23);
        for (uint64_t i = 0; i < n; ++i) in.push_bit(int(r.next() & 1));
        const auto t0 = std::chrono::steady_clock::now();
        uint64_t out_bits = 0;
        int reps = 0;
        double dt = 0.0;
        do {
            for (int k = 0; k < 20; ++k) out_bits += hash_block(in, m).bit_count;
            reps += 20;
            dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        } while (dt < 0.2);
        const double mbps = double(out_bits) / dt / 1e6;
        checks.push_back(
            {{"name", "hash_throughput"}, {"pass", true}, {"mbit_per_s", mbps}, {"reps", reps}});
    }
    return json{{"command", "selftest"}, {"ok", ok}, {"checks", checks}};
}

} // namespace qrng
