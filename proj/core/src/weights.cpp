#include <algorithm>
#include <cstring>

#include "eisp/hash.hpp"
#include "eisp/neural.hpp"
#include "json.hpp"

namespace eisp {
namespace {

constexpr char magic[8] = {'E', 'I', 'S', 'P', 'W', 'G', 'T', 'S'};

}  // namespace

Bytes save_weights(const CurrentEstimator& model) {
    nlohmann::ordered_json h;
    h["schema"] = "eisp-weights";
    h["schema_version"] = weights_schema_version;
    h["n_transmitters"] = model.n_transmitters();
    h["n_receivers"] = model.n_receivers();
    h["widths"] = model.net(0).widths();
    h["n_frequencies"] = model.config().encoding.n_frequencies;
    h["side_m"] = model.config().side_m;
    h["normalized"] = model.has_normalization();
    h["payload"] = "per transmitter: output_scale, [feature_mean, feature_scale], parameters; float64 LE";
    const std::string header = h.dump();

    Bytes out(magic, magic + 8);
    append_u32_le(out, weights_schema_version);
    append_u64_le(out, header.size());
    out.insert(out.end(), header.begin(), header.end());
    for (int t = 0; t < model.n_transmitters(); ++t) {
        const DenseNet& net = model.net(t);
        append_f64(out, net.output_scale());
        if (model.has_normalization()) {
            const RVector mean = model.feature_mean().row(t).transpose();
            const RVector scale = model.feature_scale().row(t).transpose();
            append_f64(out, std::span(mean.data(), static_cast<std::size_t>(mean.size())));
            append_f64(out, std::span(scale.data(), static_cast<std::size_t>(scale.size())));
        }
        append_f64(out, std::span(net.parameters().data(), static_cast<std::size_t>(net.parameter_count())));
    }
    const auto digest = sha256(out);
    out.insert(out.end(), digest.begin(), digest.end());
    return out;
}

CurrentEstimator load_weights(std::span<const std::uint8_t> bytes) { return load_weights(bytes, {}); }

CurrentEstimator load_weights(std::span<const std::uint8_t> bytes, const WeightExpectations& expected) {
    require(bytes.size() >= 8 + 4 + 8 + 32, Errc::format_error, "weight file too short");
    require(std::memcmp(bytes.data(), magic, 8) == 0, Errc::format_error, "not an eisp weight file (bad magic)");
    const auto body = bytes.first(bytes.size() - 32);
    const auto digest = sha256(body);
    require(std::equal(digest.begin(), digest.end(), bytes.end() - 32), Errc::format_error,
            "weight file checksum mismatch");
    ByteReader in(body);
    in.take(8);
    const std::uint32_t version = in.u32_le();
    require(version == weights_schema_version, Errc::format_error,
            "unsupported weight schema version " + std::to_string(version));
    const std::uint64_t header_len = in.u64_le();
    require(header_len <= in.remaining(), Errc::format_error, "weight header length exceeds file size");
    const auto raw = in.take(header_len);
    nlohmann::json h;
    EstimatorConfig cfg;
    std::vector<int> widths;
    bool normalized = false;
    try {
        h = nlohmann::json::parse(raw.begin(), raw.end());
        require(h.at("schema").get<std::string>() == "eisp-weights", Errc::format_error, "wrong weight schema");
        require(h.at("schema_version").get<std::uint32_t>() == version, Errc::format_error,
                "header schema version disagrees with the file version");
        cfg.n_transmitters = h.at("n_transmitters").get<int>();
        cfg.n_receivers = h.at("n_receivers").get<int>();
        cfg.encoding.n_frequencies = h.at("n_frequencies").get<int>();
        cfg.side_m = h.at("side_m").get<double>();
        widths = h.at("widths").get<std::vector<int>>();
        normalized = h.at("normalized").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::format_error, std::string("malformed weight header: ") + e.what());
    }
    require(widths.size() >= 2 && widths.back() == 2, Errc::format_error, "weight header has invalid layer widths");
    require(cfg.n_transmitters >= 1 && cfg.n_receivers >= 1 && cfg.encoding.n_frequencies >= 1 && cfg.side_m > 0,
            Errc::format_error, "weight header has invalid geometry");
    require(widths.front() == 2 * cfg.n_receivers + cfg.encoding.output_dim(), Errc::format_error,
            "weight header input width disagrees with N_r and the encoding");
    cfg.hidden_layers = static_cast<int>(widths.size()) - 2;
    cfg.hidden_width = cfg.hidden_layers > 0 ? widths[1] : 1;
    for (std::size_t l = 1; l + 1 < widths.size(); ++l) {
        require(widths[l] == cfg.hidden_width, Errc::format_error, "hidden layers must share one width");
    }
    if (expected.n_transmitters && *expected.n_transmitters != cfg.n_transmitters) {
        fail(Errc::format_error, "weight file has N=" + std::to_string(cfg.n_transmitters) + ", expected " +
                                     std::to_string(*expected.n_transmitters));
    }
    if (expected.n_receivers && *expected.n_receivers != cfg.n_receivers) {
        fail(Errc::format_error, "weight file has N_r=" + std::to_string(cfg.n_receivers) + ", expected " +
                                     std::to_string(*expected.n_receivers));
    }

    CurrentEstimator model(cfg, 0);
    const int fd = 2 * cfg.n_receivers;
    RRowMatrix mean(cfg.n_transmitters, fd), scale(cfg.n_transmitters, fd);
    for (int t = 0; t < cfg.n_transmitters; ++t) {
        DenseNet& net = model.net(t);
        const double s = in.f64();
        require(s > 0.0 && std::isfinite(s), Errc::format_error, "invalid output scale");
        net.set_output_scale(s);
        if (normalized) {
            RVector m(fd), sc(fd);
            in.f64(std::span(m.data(), static_cast<std::size_t>(fd)));
            in.f64(std::span(sc.data(), static_cast<std::size_t>(fd)));
            mean.row(t) = m.transpose();
            scale.row(t) = sc.transpose();
        }
        in.f64(std::span(net.parameters().data(), static_cast<std::size_t>(net.parameter_count())));
    }
    require(in.remaining() == 0, Errc::format_error, "trailing bytes after weight payload");
    if (normalized) {
        try {
            model.set_normalization(std::move(mean), std::move(scale));
        } catch (const Error& e) {
            fail(Errc::format_error, e.what());
        }
    }
    return model;
}

}  // namespace eisp
