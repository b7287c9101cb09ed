#include "gapeval/ridge.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <Eigen/Cholesky>

#include "gapeval/corrupt.hpp"
#include "gapeval/error.hpp"
#include "gapeval/interpolate.hpp"
#include "gapeval/marker_csv.hpp"
#include "gapeval/rng.hpp"

namespace gapeval {

void assemble_features(const CenteredSequence& centered, std::size_t t, std::size_t w,
                       Eigen::VectorXd& out) {
    const MarkerSequence& seq = centered.seq;
    const std::size_t M = seq.markers();
    const std::size_t channels = M * 3 + 3;
    out.resize(static_cast<Eigen::Index>((2 * w + 1) * channels + 1));

    const std::size_t T = seq.frames();
    Eigen::Index k = 0;
    for (std::size_t o = 0; o < 2 * w + 1; ++o) {
        std::size_t f = (t + o < w) ? 0 : t + o - w;
        if (f >= T) f = T - 1;
        const double* frame = &seq.data()[f * M * 3];
        for (std::size_t i = 0; i < M * 3; ++i) out[k++] = frame[i];
        const double* offset = centered.offset(f);
        out[k++] = offset[0];
        out[k++] = offset[1];
        out[k++] = offset[2];
    }
    out[k] = 1.0;
}

namespace {

std::vector<std::size_t> actor_index_of(const MarkerSequence& seq, const SkeletonConfig& skel) {
    auto index = skel.resolve(seq);
    std::vector<std::size_t> actor_of(seq.markers());
    for (const auto& id : skel.marker_ids) {
        const std::string& actor = skel.marker_actor.at(id);
        std::size_t ai =
            std::find(skel.actors.begin(), skel.actors.end(), actor) - skel.actors.begin();
        actor_of[index.at(id)] = ai;
    }
    return actor_of;
}

void set_passthrough(RidgeDenoiser& model, std::size_t m) {
    std::size_t center_base = model.w * model.channels();
    for (std::size_t c = 0; c < 3; ++c)
        model.weights(static_cast<Eigen::Index>(center_base + m * 3 + c),
                      static_cast<Eigen::Index>(m * 3 + c)) = 1.0;
}

} // namespace

RidgeDenoiser train_ridge(const std::vector<MarkerSequence>& clean, const SkeletonConfig& skel,
                          const CurriculumParams& params, int epochs, std::size_t w, double reg,
                          std::uint64_t seed) {
    if (clean.empty()) throw_usage("training needs at least one clean sequence");
    if (w < 1) throw_usage("window radius must be at least 1");
    if (!(reg > 0.0)) throw_usage("regularization strength must be positive");
    if (epochs < 0) throw_usage("epoch count must be non-negative");
    params.validate();

    const std::vector<std::string>& ids = clean[0].marker_ids();
    for (const auto& seq : clean) {
        if (seq.marker_ids() != ids)
            throw_data("training sequences must share one marker layout");
        if (!seq.fully_present()) throw_data("training sequences must be fully present");
        if (seq.frames() <= 2 * w + 1)
            throw_data("training sequence shorter than the feature window");
    }
    auto actor_of = actor_index_of(clean[0], skel);

    RidgeDenoiser model;
    model.w = w;
    model.reg = reg;
    model.actor_count = skel.actors.size();
    model.marker_ids = ids;

    const std::size_t M = ids.size();
    const std::size_t F = model.feature_dim();
    std::vector<std::unique_ptr<Eigen::MatrixXd>> gram(M);
    std::vector<std::unique_ptr<Eigen::MatrixXd>> moment(M);

    Eigen::VectorXd x;
    for (int ep = 0; ep < epochs; ++ep) {
        for (std::size_t s = 0; s < clean.size(); ++s) {
            const MarkerSequence& gt = clean[s];
            const std::size_t T = gt.frames();
            auto [count, duration] = curriculum(ep, params, T, M);
            if (count == 0 || duration == 0) continue;

            GapSpec spec;
            spec.mode = GapMode::window;
            spec.count = count;
            spec.duration = duration;
            spec.seed = Rng::derive_seed(seed, static_cast<std::uint64_t>(ep), 2 * s);
            ObservationMask mask = sample_mask(T, M, spec);

            MarkerSequence noisy = add_masked_noise(
                interpolate_gaps(apply_mask(gt, mask)), mask, noise_sigma(ep, params.c),
                Rng::derive_seed(seed, static_cast<std::uint64_t>(ep), 2 * s + 1));
            CenteredSequence centered = center_hips(noisy, skel);

            for (std::size_t t = 0; t < T; ++t) {
                bool any = false;
                for (std::size_t m = 0; m < M && !any; ++m) any = mask.missing(t, m);
                if (!any) continue;
                assemble_features(centered, t, w, x);
                for (std::size_t m = 0; m < M; ++m) {
                    if (!mask.missing(t, m)) continue;
                    if (!gram[m]) {
                        gram[m] = std::make_unique<Eigen::MatrixXd>(
                            Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(F),
                                                  static_cast<Eigen::Index>(F)));
                        moment[m] = std::make_unique<Eigen::MatrixXd>(
                            Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(F), 3));
                    }
                    gram[m]->selfadjointView<Eigen::Lower>().rankUpdate(x);
                    const double* hip = centered.hip_center(actor_of[m], t);
                    Eigen::Vector3d y(gt.at(t, m, 0) - hip[0], gt.at(t, m, 1) - hip[1],
                                      gt.at(t, m, 2) - hip[2]);
                    moment[m]->noalias() += x * y.transpose();
                }
            }
        }
    }

    bool any_samples = false;
    model.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(F),
                                          static_cast<Eigen::Index>(3 * M));
    model.fitted.assign(M, 0);
    for (std::size_t m = 0; m < M; ++m) {
        if (!gram[m]) {
            set_passthrough(model, m);
            continue;
        }
        any_samples = true;
        Eigen::MatrixXd a = gram[m]->selfadjointView<Eigen::Lower>();
        a.diagonal().array() += reg;
        Eigen::LDLT<Eigen::MatrixXd> solver(a);
        if (solver.info() != Eigen::Success)
            throw_numeric("normal equations solve failed for marker '" + ids[m] + "'");
        Eigen::MatrixXd sol = solver.solve(*moment[m]);
        if (!sol.allFinite())
            throw_numeric("non-finite weights for marker '" + ids[m] + "'");
        model.weights.block(0, static_cast<Eigen::Index>(3 * m), static_cast<Eigen::Index>(F), 3) =
            sol;
        model.fitted[m] = 1;
    }
    if (!any_samples) throw_data("no training samples");

    model.trained = true;
    return model;
}

MarkerSequence fill_ridge(const RidgeDenoiser& model, const MarkerSequence& corrupted,
                          const ObservationMask& mask, const SkeletonConfig& skel) {
    if (!model.trained) throw_usage("ridge model is not trained");
    mask.require_shape(corrupted);
    if (corrupted.marker_ids() != model.marker_ids)
        throw_data("sequence marker layout does not match the model");
    if (skel.actors.size() != model.actor_count)
        throw_data("skeleton actor count does not match the model");
    if (corrupted.frames() <= 2 * model.w + 1)
        throw_data("sequence shorter than the feature window");

    MarkerSequence out = interpolate_gaps(corrupted);
    CenteredSequence centered = center_hips(out, skel);
    auto actor_of = actor_index_of(out, skel);

    const std::size_t M = out.markers();
    Eigen::VectorXd x;
    for (std::size_t t = 0; t < out.frames(); ++t) {
        bool any = false;
        for (std::size_t m = 0; m < M && !any; ++m) any = mask.missing(t, m);
        if (!any) continue;
        assemble_features(centered, t, model.w, x);
        for (std::size_t m = 0; m < M; ++m) {
            if (!mask.missing(t, m)) continue;
            const double* hip = centered.hip_center(actor_of[m], t);
            for (std::size_t c = 0; c < 3; ++c) {
                double pred = model.weights.col(static_cast<Eigen::Index>(m * 3 + c)).dot(x);
                out.at(t, m, c) = pred + hip[c];
            }
            out.set_present(t, m, true);
        }
    }
    return out;
}

namespace {

constexpr const char* kModelHeader = "mocap-gapeval-ridge v1";

double parse_model_double(const std::string& field, const std::string& path) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value))
        throw_data(path + ": bad numeric field '" + field + "'");
    return value;
}

std::size_t parse_model_size(const std::string& field, const std::string& path) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw_data(path + ": bad integer field '" + field + "'");
    return value;
}

} // namespace

void save_ridge(const RidgeDenoiser& model, const std::string& path) {
    if (!model.trained) throw_usage("refusing to save an untrained model");
    char buf[32];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };

    std::string out;
    out += kModelHeader;
    out += '\n';
    out += "window " + std::to_string(model.w) + '\n';
    out += "reg " + num(model.reg) + '\n';
    out += "actors " + std::to_string(model.actor_count) + '\n';
    out += "markers " + std::to_string(model.marker_ids.size()) + '\n';
    for (std::size_t m = 0; m < model.marker_ids.size(); ++m)
        out += model.marker_ids[m] + (model.fitted[m] ? " 1\n" : " 0\n");
    const std::size_t F = model.feature_dim();
    for (std::size_t m = 0; m < model.marker_ids.size(); ++m) {
        if (!model.fitted[m]) continue;
        out += "weights " + std::to_string(m) + '\n';
        for (std::size_t f = 0; f < F; ++f) {
            out += num(model.weights(static_cast<Eigen::Index>(f),
                                     static_cast<Eigen::Index>(m * 3)));
            out += ' ';
            out += num(model.weights(static_cast<Eigen::Index>(f),
                                     static_cast<Eigen::Index>(m * 3 + 1)));
            out += ' ';
            out += num(model.weights(static_cast<Eigen::Index>(f),
                                     static_cast<Eigen::Index>(m * 3 + 2)));
            out += '\n';
        }
    }
    out += "end\n";
    write_file_atomic(path, out);
}

RidgeDenoiser load_ridge(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("cannot open file: " + path);

    auto next_line = [&in, &path](const char* what) {
        std::string line;
        if (!std::getline(in, line)) throw_data(path + ": truncated model file, expected " + what);
        return line;
    };
    auto keyed = [&next_line, &path](const std::string& key) {
        std::string line = next_line(key.c_str());
        if (line.rfind(key + " ", 0) != 0)
            throw_data(path + ": expected '" + key + " ...', got '" + line + "'");
        return line.substr(key.size() + 1);
    };

    if (next_line("header") != kModelHeader)
        throw_data(path + ": not a ridge model file (bad header)");

    RidgeDenoiser model;
    model.w = parse_model_size(keyed("window"), path);
    if (model.w < 1) throw_data(path + ": window radius must be at least 1");
    model.reg = parse_model_double(keyed("reg"), path);
    model.actor_count = parse_model_size(keyed("actors"), path);
    std::size_t M = parse_model_size(keyed("markers"), path);
    if (M == 0) throw_data(path + ": model has no markers");

    model.fitted.assign(M, 0);
    for (std::size_t m = 0; m < M; ++m) {
        std::string line = next_line("marker id");
        std::size_t sep = line.rfind(' ');
        if (sep == std::string::npos || sep + 2 != line.size() ||
            (line[sep + 1] != '0' && line[sep + 1] != '1'))
            throw_data(path + ": bad marker line '" + line + "'");
        model.marker_ids.push_back(line.substr(0, sep));
        model.fitted[m] = (line[sep + 1] == '1') ? 1 : 0;
    }

    const std::size_t F = model.feature_dim();
    model.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(F),
                                          static_cast<Eigen::Index>(3 * M));
    for (std::size_t m = 0; m < M; ++m)
        if (!model.fitted[m]) set_passthrough(model, m);

    std::vector<std::uint8_t> loaded(M, 0);
    std::string line;
    while ((line = next_line("weights block or end")) != "end") {
        if (line.rfind("weights ", 0) != 0)
            throw_data(path + ": expected 'weights <marker>' or 'end', got '" + line + "'");
        std::size_t m = parse_model_size(line.substr(8), path);
        if (m >= M || !model.fitted[m] || loaded[m])
            throw_data(path + ": weights block for unexpected marker index " + std::to_string(m));
        loaded[m] = 1;
        for (std::size_t f = 0; f < F; ++f) {
            std::istringstream row(next_line("weight row"));
            std::string a, b, c;
            if (!(row >> a >> b >> c))
                throw_data(path + ": short weight row for marker index " + std::to_string(m));
            model.weights(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(m * 3)) =
                parse_model_double(a, path);
            model.weights(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(m * 3 + 1)) =
                parse_model_double(b, path);
            model.weights(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(m * 3 + 2)) =
                parse_model_double(c, path);
        }
    }
    for (std::size_t m = 0; m < M; ++m)
        if (model.fitted[m] && !loaded[m])
            throw_data(path + ": missing weights block for marker index " + std::to_string(m));
    model.trained = true;
    return model;
}

} // namespace gapeval
