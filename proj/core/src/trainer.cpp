#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>

#include "eisp/hash.hpp"
#include "eisp/inversion.hpp"
#include "eisp/parallel.hpp"

namespace eisp {

void fit_statistics(CurrentEstimator& model, const Dataset& dataset) {
    require(!dataset.records.empty(), Errc::invalid_argument, "cannot fit statistics on an empty dataset");
    require(dataset.n_transmitters() == model.n_transmitters() && dataset.n_receivers() == model.n_receivers(),
            Errc::invalid_argument, "dataset and model disagree on N or N_r");
    const int n = model.n_transmitters();
    const int fd = model.feature_dim();
    RRowMatrix mean = RRowMatrix::Zero(n, fd);
    RRowMatrix sq = RRowMatrix::Zero(n, fd);
    const auto count = static_cast<double>(dataset.records.size());
    for (int t = 0; t < n; ++t) {
        double current_power = 0.0;
        for (const auto& r : dataset.records) {
            for (Eigen::Index k = 0; k < r.measured.cols(); ++k) {
                const cplx v = r.measured(t, k);
                mean(t, 2 * k) += v.real();
                mean(t, 2 * k + 1) += v.imag();
                sq(t, 2 * k) += v.real() * v.real();
                sq(t, 2 * k + 1) += v.imag() * v.imag();
            }
            current_power += r.current.row(t).squaredNorm() / static_cast<double>(r.current.cols());
        }
        const double rms = std::sqrt(current_power / count);
        model.net(t).set_output_scale(rms > 0.0 ? 3.0 * rms : 1.0);
    }
    mean /= count;
    RRowMatrix scale = (sq / count - mean.cwiseAbs2()).cwiseMax(0.0).cwiseSqrt();
    const double floor = std::max(scale.maxCoeff() * 1e-12, 1e-300);
    scale = scale.cwiseMax(floor);
    model.set_normalization(std::move(mean), std::move(scale));
}

namespace {

constexpr char checkpoint_magic[8] = {'E', 'I', 'S', 'P', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t checkpoint_version = 1;

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, int epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(splitmix64(seed ^ (0xA5A5A5A5ULL + static_cast<std::uint64_t>(epoch))));
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

}  // namespace

Bytes save_checkpoint(const TrainCheckpoint& ckpt) {
    Bytes out(checkpoint_magic, checkpoint_magic + 8);
    append_u32_le(out, checkpoint_version);
    append_u32_le(out, static_cast<std::uint32_t>(ckpt.epochs_done));
    const Bytes weights = save_weights(ckpt.model);
    append_u64_le(out, weights.size());
    out.insert(out.end(), weights.begin(), weights.end());
    append_u64_le(out, ckpt.history.size());
    for (const auto& h : ckpt.history) {
        append_u32_le(out, static_cast<std::uint32_t>(h.epoch));
        for (double v : {h.l_curr, h.l_perm, h.l_scat, h.total}) append_f64(out, v);
    }
    append_u64_le(out, ckpt.optimizer.size());
    for (const auto& s : ckpt.optimizer) {
        append_u64_le(out, static_cast<std::uint64_t>(s.step));
        append_u64_le(out, static_cast<std::uint64_t>(s.m.size()));
        append_f64(out, std::span(s.m.data(), static_cast<std::size_t>(s.m.size())));
        append_f64(out, std::span(s.v.data(), static_cast<std::size_t>(s.v.size())));
    }
    const auto digest = sha256(out);
    out.insert(out.end(), digest.begin(), digest.end());
    return out;
}

TrainCheckpoint load_checkpoint(std::span<const std::uint8_t> bytes) {
    require(bytes.size() >= 8 + 8 + 32 && std::memcmp(bytes.data(), checkpoint_magic, 8) == 0, Errc::format_error,
            "not an eisp checkpoint");
    const auto body = bytes.first(bytes.size() - 32);
    const auto digest = sha256(body);
    require(std::equal(digest.begin(), digest.end(), bytes.end() - 32), Errc::format_error,
            "checkpoint checksum mismatch");
    ByteReader in(body);
    in.take(8);
    require(in.u32_le() == checkpoint_version, Errc::format_error, "unsupported checkpoint version");
    TrainCheckpoint ckpt;
    ckpt.epochs_done = static_cast<int>(in.u32_le());
    const auto wlen = in.u64_le();
    ckpt.model = load_weights(in.take(wlen));
    const auto nh = in.u64_le();
    for (std::uint64_t i = 0; i < nh; ++i) {
        EpochLoss h;
        h.epoch = static_cast<int>(in.u32_le());
        h.l_curr = in.f64();
        h.l_perm = in.f64();
        h.l_scat = in.f64();
        h.total = in.f64();
        ckpt.history.push_back(h);
    }
    const auto no = in.u64_le();
    for (std::uint64_t i = 0; i < no; ++i) {
        AdamState s;
        s.step = static_cast<std::int64_t>(in.u64_le());
        const auto len = static_cast<Eigen::Index>(in.u64_le());
        s.m.resize(len);
        s.v.resize(len);
        in.f64(std::span(s.m.data(), static_cast<std::size_t>(len)));
        in.f64(std::span(s.v.data(), static_cast<std::size_t>(len)));
        ckpt.optimizer.push_back(std::move(s));
    }
    require(in.remaining() == 0, Errc::format_error, "trailing bytes in checkpoint");
    return ckpt;
}

TrainResult train(const Dataset& dataset, CurrentEstimator model, const GreenOperators& ops,
                  const TrainConfig& config, const TrainCheckpoint* resume) {
    config.optimizer.validate();
    config.weights.validate();
    require(dataset.grid() == ops.grid(), Errc::invalid_argument, "dataset grid does not match the Green operators");
    require(layout_hash(dataset.meta.layout) == layout_hash(ops.layout()), Errc::invalid_argument,
            "dataset layout does not match the Green operators");
    require(dataset.n_transmitters() == model.n_transmitters() && dataset.n_receivers() == model.n_receivers(),
            Errc::invalid_argument, "dataset and model disagree on N or N_r");
    require(!dataset.records.empty() || config.optimizer.epochs == 0, Errc::invalid_argument,
            "cannot train on an empty dataset");

    const int n_tx = model.n_transmitters();
    TrainResult result;
    int start = 0;
    if (resume) {
        require(resume->model.n_transmitters() == n_tx, Errc::invalid_argument,
                "checkpoint transmitter count does not match");
        model = resume->model;
        result.optimizer = resume->optimizer;
        result.history = resume->history;
        start = resume->epochs_done;
    }
    if (result.optimizer.size() != static_cast<std::size_t>(n_tx)) {
        result.optimizer.clear();
        for (int t = 0; t < n_tx; ++t) result.optimizer.push_back(AdamState::zeros(model.net(t).parameter_count()));
    }

    const RMatrix encoded = encode_grid(ops.grid(), model.config().encoding);
    const std::size_t n = dataset.records.size();
    const auto batch = static_cast<std::size_t>(config.optimizer.batch_size);

    for (int epoch = start; epoch < config.optimizer.epochs; ++epoch) {
        const auto order = epoch_order(n, config.seed, epoch);
        std::vector<LossParts> per_tx(static_cast<std::size_t>(n_tx));
        parallel_for(n_tx, config.threads, [&](int t) {
            DenseNet& net = model.net(t);
            AdamState& state = result.optimizer[static_cast<std::size_t>(t)];
            LossParts acc;
            std::size_t batches = 0;
            for (std::size_t b0 = 0, bi = 0; b0 < n; b0 += batch, ++bi) {
                const std::size_t b1 = std::min(n, b0 + batch);
                const double bsize = static_cast<double>(b1 - b0) * (config.average_over_transmitters ? n_tx : 1);
                RVector grad = RVector::Zero(net.parameter_count());
                LossParts parts;
                for (std::size_t k = b0; k < b1; ++k) {
                    const DatasetRecord& rec = dataset.records[order[k]];
                    const SampleTarget target{rec.current.row(t).transpose(), rec.permittivity,
                                              rec.measured.row(t).transpose(), dataset.incident.row(t).transpose()};
                    const RVector f = model.features(target.measured, t);
                    const auto ev = evaluate_sample(net, f, encoded, target, ops, config.weights, bsize, true);
                    grad += ev.gradient;
                    parts.curr += ev.parts.curr;
                    parts.perm += ev.parts.perm;
                    parts.scat += ev.parts.scat;
                    parts.total += ev.parts.total;
                }
                if (!std::isfinite(parts.total)) {
                    fail(Errc::training_failure, "non-finite loss at epoch " + std::to_string(epoch + 1) +
                                                     ", batch " + std::to_string(bi) + ", transmitter " +
                                                     std::to_string(t));
                }
                adam_step(net, state, std::move(grad), config.optimizer, epoch);
                acc.curr += parts.curr;
                acc.perm += parts.perm;
                acc.scat += parts.scat;
                acc.total += parts.total;
                ++batches;
            }
            const auto nb = static_cast<double>(std::max<std::size_t>(batches, 1));
            per_tx[static_cast<std::size_t>(t)] = {acc.curr / nb, acc.perm / nb, acc.scat / nb, acc.total / nb};
        });

        EpochLoss row;
        row.epoch = epoch + 1;
        for (const auto& p : per_tx) {
            row.l_curr += p.curr;
            row.l_perm += p.perm;
            row.l_scat += p.scat;
            row.total += p.total;
        }
        result.history.push_back(row);
        if (config.on_epoch) config.on_epoch(row);
        if (config.checkpoint_every > 0 && (epoch + 1) % config.checkpoint_every == 0 &&
            !config.checkpoint_path.empty()) {
            write_file(config.checkpoint_path,
                       save_checkpoint({epoch + 1, model, result.optimizer, result.history}));
        }
    }
    result.model = std::move(model);
    return result;
}

std::string history_csv(std::span<const EpochLoss> history) {
    std::ostringstream out;
    out << "epoch,l_curr,l_perm,l_scat,total\n";
    for (const auto& h : history) {
        out << h.epoch << ',' << format_real(h.l_curr) << ',' << format_real(h.l_perm) << ','
            << format_real(h.l_scat) << ',' << format_real(h.total) << '\n';
    }
    return out.str();
}

}  // namespace eisp
