// Command-line front end. Everything flows through the public C API; this
// file only parses flags, shuttles files, and renders the report pages.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mocapgapeval.h"

namespace {

using nlohmann::json;

struct CommandError {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) { throw CommandError{code, message}; }

void check(mge_status st) {
    if (st != MGE_OK) fail(static_cast<int>(st), mge_last_error());
}

template <typename T, void (*Free)(T*)>
class Owned {
public:
    Owned() = default;
    ~Owned() { reset(); }
    Owned(Owned&& other) noexcept : p_(other.p_) { other.p_ = nullptr; }
    Owned& operator=(Owned&& other) noexcept {
        if (this != &other) {
            reset();
            p_ = other.p_;
            other.p_ = nullptr;
        }
        return *this;
    }
    Owned(const Owned&) = delete;
    Owned& operator=(const Owned&) = delete;

    T** out() {
        reset();
        return &p_;
    }
    T* get() const { return p_; }
    explicit operator bool() const { return p_ != nullptr; }
    void reset() {
        if (p_ != nullptr) Free(p_);
        p_ = nullptr;
    }

private:
    T* p_ = nullptr;
};

using Seq = Owned<mge_seq, mge_seq_free>;
using Mask = Owned<mge_mask, mge_mask_free>;
using Skel = Owned<mge_skel, mge_skel_free>;
using Model = Owned<mge_model, mge_model_free>;
using Report = Owned<mge_report, mge_report_free>;
using Ratings = Owned<mge_ratings, mge_ratings_free>;
using Scores = Owned<mge_scores, mge_scores_free>;

std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(3, "cannot hash file: " + path);
    std::uint64_t h = 14695981039346656037ull;
    char buf[8192];
    while (in) {
        in.read(buf, sizeof buf);
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016" PRIx64, h);
    return hex;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) fail(3, "cannot write file: " + path);
}

/// One JSON sidecar per run: the exact command, every input and output with
/// a content hash, all effective parameters, and all seeds. No timestamps,
/// so identical runs produce identical manifests.
class Manifest {
public:
    explicit Manifest(const std::string& command) {
        j_["command"] = command;
        j_["version"] = mge_version();
        j_["inputs"] = json::object();
        j_["outputs"] = json::object();
        j_["params"] = json::object();
        j_["seeds"] = json::object();
    }

    void input(const std::string& path) { j_["inputs"][path] = file_hash(path); }
    void output(const std::string& path) { j_["outputs"][path] = file_hash(path); }
    template <typename V>
    void param(const std::string& key, const V& value) {
        j_["params"][key] = value;
    }
    void seed(const std::string& key, std::uint64_t value) { j_["seeds"][key] = value; }
    void write(const std::string& path) const { write_text(path, j_.dump(2) + "\n"); }

private:
    json j_;
};

std::string stem_of(const std::string& path) {
    return std::filesystem::path(path).stem().string();
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        parts.push_back(text.substr(start, end - start));
        start = end + 1;
    }
    return parts;
}

std::array<double, 4> parse_curve(const std::string& text) {
    auto parts = split_list(text);
    if (parts.size() != 4)
        fail(2, "--curve expects n_start,n_rate,d_start,d_rate, got '" + text + "'");
    std::array<double, 4> curve{};
    for (std::size_t i = 0; i < 4; ++i) {
        try {
            std::size_t used = 0;
            curve[i] = std::stod(parts[i], &used);
            if (used != parts[i].size()) throw std::invalid_argument(parts[i]);
        } catch (const std::exception&) {
            fail(2, "--curve component '" + parts[i] + "' is not a number");
        }
    }
    return curve;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

/* ---- synth -------------------------------------------------------------- */

struct SynthArgs {
    std::string skel;
    std::string out;
    std::size_t actors = 2;
    double seconds = 10.0;
    double fps = 120.0;
    std::uint64_t seed = 0;
};

void run_synth(const SynthArgs& a) {
    Skel skel;
    if (!a.skel.empty()) check(mge_skel_read(a.skel.c_str(), skel.out()));
    Seq seq;
    check(mge_synth(skel.get(), a.actors, a.seconds, a.fps, -1.0, 0.0, 0.0, a.seed, seq.out()));
    check(mge_markers_write(seq.get(), a.out.c_str()));

    Manifest m("synth");
    if (!a.skel.empty()) m.input(a.skel);
    m.param("actors", a.actors);
    m.param("seconds", a.seconds);
    m.param("fps", a.fps);
    m.seed("seed", a.seed);
    m.output(a.out);
    m.write(a.out + ".manifest.json");
}

/* ---- skeleton ------------------------------------------------------------ */

struct SkeletonArgs {
    std::size_t actors = 2;
    std::string layout = "full";
    std::string out;
};

void run_skeleton(const SkeletonArgs& a) {
    Skel skel;
    check(mge_skel_build(a.actors, a.layout.c_str(), skel.out()));
    check(mge_skel_write(skel.get(), a.out.c_str()));

    Manifest m("skeleton");
    m.param("actors", a.actors);
    m.param("layout", a.layout);
    m.output(a.out);
    m.write(a.out + ".manifest.json");
}

/* ---- corrupt -------------------------------------------------------------- */

struct CorruptArgs {
    std::string in;
    std::string mode;
    std::string part;
    std::string skel;
    std::string curve;
    std::string out;
    std::string mask_out;
    double p = -1.0;
    long long n = -1;
    long long d = -1;
    int epoch = -1;
    double noise_c = -1.0;
    std::uint64_t seed = 0;
};

void run_corrupt(const CorruptArgs& a) {
    Seq seq;
    check(mge_markers_read(a.in.c_str(), 0.0, seq.out()));
    Skel skel;
    if (!a.skel.empty()) check(mge_skel_read(a.skel.c_str(), skel.out()));

    double p = 0.0;
    std::size_t count = 0;
    std::size_t duration = 0;
    if (a.mode == "iid") {
        if (a.p < 0.0) fail(2, "mode iid needs --p");
        if (a.n >= 0 || a.d >= 0 || !a.curve.empty() || !a.part.empty())
            fail(2, "mode iid takes only --p");
        p = a.p;
    } else if (a.mode == "window") {
        if (a.p >= 0.0 || !a.part.empty()) fail(2, "mode window takes --n/--d or --curve");
        if (!a.curve.empty()) {
            if (a.n >= 0 || a.d >= 0) fail(2, "--curve replaces --n and --d");
            if (a.epoch < 0) fail(2, "--curve needs --epoch");
            auto curve = parse_curve(a.curve);
            check(mge_curriculum(a.epoch, curve[0], curve[1], curve[2], curve[3],
                                 mge_seq_frames(seq.get()), mge_seq_markers(seq.get()), &count,
                                 &duration));
        } else {
            if (a.n < 0 || a.d < 0) fail(2, "mode window needs --n and --d (or --curve)");
            count = static_cast<std::size_t>(a.n);
            duration = static_cast<std::size_t>(a.d);
        }
    } else if (a.mode == "bodypart") {
        if (a.part.empty() || a.d < 0) fail(2, "mode bodypart needs --part and --d");
        if (a.p >= 0.0 || a.n >= 0 || !a.curve.empty()) fail(2, "mode bodypart takes --part and --d");
        if (!skel) fail(2, "mode bodypart needs --skel");
        duration = static_cast<std::size_t>(a.d);
    } else {
        fail(2, "unknown mode '" + a.mode + "'");
    }

    Mask mask;
    check(mge_mask_sample(seq.get(), a.mode.c_str(), p, count, duration,
                          a.part.empty() ? nullptr : a.part.c_str(), a.seed, skel.get(),
                          mask.out()));

    double sigma = 0.0;
    if (a.noise_c >= 0.0) {
        if (a.epoch < 0) fail(2, "--noise-c needs --epoch");
        check(mge_noise_sigma(a.epoch, a.noise_c, &sigma));
    }

    // With noise the output is the reconstruction input itself: gaps filled
    // by interpolation, then perturbed at the missing entries. Without noise
    // the gaps stay as absent cells.
    std::uint64_t noise_seed = 0;
    Seq corrupted;
    if (sigma > 0.0) {
        Seq gapped;
        check(mge_apply_mask(seq.get(), mask.get(), gapped.out()));
        Seq interp;
        check(mge_interpolate_gaps(gapped.get(), interp.out()));
        check(mge_derive_seed(a.seed, 1, 0, &noise_seed));
        check(mge_add_masked_noise(interp.get(), mask.get(), sigma, noise_seed, corrupted.out()));
    } else {
        check(mge_apply_mask(seq.get(), mask.get(), corrupted.out()));
    }

    check(mge_markers_write(corrupted.get(), a.out.c_str()));
    check(mge_mask_write(mask.get(), seq.get(), a.mask_out.c_str()));

    Manifest m("corrupt");
    m.input(a.in);
    if (!a.skel.empty()) m.input(a.skel);
    m.param("mode", a.mode);
    if (a.mode == "iid") m.param("p", p);
    if (a.mode == "window") {
        m.param("count", count);
        m.param("duration", duration);
    }
    if (a.mode == "bodypart") {
        m.param("part", a.part);
        m.param("duration", duration);
    }
    if (!a.curve.empty()) m.param("curve", a.curve);
    if (a.epoch >= 0) m.param("epoch", a.epoch);
    if (a.noise_c >= 0.0) {
        m.param("noise_c", a.noise_c);
        m.param("sigma", sigma);
    }
    m.seed("seed", a.seed);
    if (sigma > 0.0) m.seed("noise_seed", noise_seed);
    m.output(a.out);
    m.output(a.mask_out);
    m.write(a.out + ".manifest.json");
}

/* ---- train ---------------------------------------------------------------- */

struct TrainArgs {
    std::string clean_dir;
    std::string skel;
    std::string curve;
    std::string out;
    int epochs = 0;
    std::size_t window = 3;
    double reg = 1e-3;
    double noise_c = 0.0;
    std::uint64_t seed = 0;
};

void run_train(const TrainArgs& a) {
    std::vector<std::string> files;
    {
        std::error_code ec;
        std::filesystem::directory_iterator it(a.clean_dir, ec);
        if (ec) fail(3, "cannot list directory: " + a.clean_dir);
        for (const auto& entry : it)
            if (entry.path().extension() == ".csv") files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) fail(3, "no .csv sequences in " + a.clean_dir);

    Skel skel;
    check(mge_skel_read(a.skel.c_str(), skel.out()));

    std::vector<Seq> seqs(files.size());
    std::vector<const mge_seq*> raw(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
        check(mge_markers_read(files[i].c_str(), 0.0, seqs[i].out()));
        raw[i] = seqs[i].get();
    }

    auto curve = parse_curve(a.curve);
    Model model;
    check(mge_train_ridge(raw.data(), raw.size(), skel.get(), curve[0], curve[1], curve[2],
                          curve[3], a.noise_c, 1.0, a.epochs, a.window, a.reg, a.seed,
                          model.out()));
    check(mge_ridge_save(model.get(), a.out.c_str()));

    Manifest m("train");
    for (const auto& f : files) m.input(f);
    m.input(a.skel);
    m.param("epochs", a.epochs);
    m.param("window", a.window);
    m.param("reg", a.reg);
    m.param("curve", a.curve);
    m.param("noise_c", a.noise_c);
    m.seed("seed", a.seed);
    m.output(a.out);
    m.write(a.out + ".manifest.json");
}

/* ---- fill ----------------------------------------------------------------- */

struct FillArgs {
    std::string in;
    std::string mask;
    std::string skel;
    std::string method;
    std::string model;
    std::string model_part[4];
    std::string raw;
    std::string out;
    std::string smooth_scope = "all";
    std::size_t smooth_window = 0;
    std::size_t smooth_order = 3;
};

void run_fill(const FillArgs& a) {
    Seq in;
    check(mge_markers_read(a.in.c_str(), 0.0, in.out()));
    Mask mask;
    check(mge_mask_read(a.mask.c_str(), mask.out()));
    Skel skel;
    check(mge_skel_read(a.skel.c_str(), skel.out()));

    Seq pred;
    Model single;
    Model part_models[4];
    if (a.method == "interp") {
        if (!a.model.empty()) fail(2, "method interp takes no --model");
        check(mge_fill_interp(in.get(), mask.get(), pred.out()));
    } else if (a.method == "ridge") {
        if (a.model.empty()) fail(2, "method ridge needs --model");
        check(mge_ridge_load(a.model.c_str(), single.out()));
        check(mge_fill_ridge(single.get(), in.get(), mask.get(), skel.get(), pred.out()));
    } else if (a.method == "hips-outwards") {
        const mge_model* models[4] = {nullptr, nullptr, nullptr, nullptr};
        for (int i = 0; i < 4; ++i) {
            if (a.model_part[i].empty()) continue;
            check(mge_ridge_load(a.model_part[i].c_str(), part_models[i].out()));
            models[i] = part_models[i].get();
        }
        check(mge_fill_hips_outwards(models, in.get(), mask.get(), skel.get(), pred.out()));
    } else {
        fail(2, "unknown method '" + a.method + "'");
    }

    const std::string raw_path = a.raw.empty() ? a.in : a.raw;
    Seq raw;
    check(mge_markers_read(raw_path.c_str(), 0.0, raw.out()));
    Seq final_seq;
    check(mge_postprocess(pred.get(), raw.get(), mask.get(), a.smooth_window, a.smooth_order,
                          a.smooth_scope.c_str(), final_seq.out()));
    check(mge_markers_write(final_seq.get(), a.out.c_str()));

    Manifest m("fill");
    m.input(a.in);
    m.input(a.mask);
    m.input(a.skel);
    if (!a.model.empty()) m.input(a.model);
    static const char* kPartNames[4] = {"hips", "torso", "head", "limbs"};
    for (int i = 0; i < 4; ++i)
        if (!a.model_part[i].empty()) m.input(a.model_part[i]);
    if (raw_path != a.in) m.input(raw_path);
    m.param("method", a.method);
    for (int i = 0; i < 4; ++i)
        if (!a.model_part[i].empty()) m.param(std::string("model_") + kPartNames[i], a.model_part[i]);
    if (a.smooth_window > 0) {
        m.param("smooth_window", a.smooth_window);
        m.param("smooth_order", a.smooth_order);
        m.param("smooth_scope", a.smooth_scope);
    }
    m.output(a.out);
    m.write(a.out + ".manifest.json");
}

/* ---- eval ----------------------------------------------------------------- */

struct EvalArgs {
    std::string pred;
    std::string gt;
    std::string mask;
    std::string skel;
    std::string metrics;
    std::string norm = "per_coordinate";
    std::string scope = "all";
    std::string stimulus;
    std::string out;
    bool append = false;
};

void run_eval(const EvalArgs& a) {
    Seq pred;
    check(mge_markers_read(a.pred.c_str(), 0.0, pred.out()));
    Seq gt;
    if (!a.gt.empty()) check(mge_markers_read(a.gt.c_str(), 0.0, gt.out()));
    Mask mask;
    if (!a.mask.empty()) check(mge_mask_read(a.mask.c_str(), mask.out()));
    Skel skel;
    if (!a.skel.empty()) check(mge_skel_read(a.skel.c_str(), skel.out()));

    if (a.scope != "all" && a.scope != "missing")
        fail(2, "--scope must be all or missing, got '" + a.scope + "'");
    if (a.scope == "missing" && !mask) fail(2, "--scope missing needs --mask");

    const std::string stimulus = a.stimulus.empty() ? stem_of(a.pred) : a.stimulus;
    auto names = split_list(a.metrics);
    if (names.empty() || a.metrics.empty()) fail(2, "--metrics must list at least one metric");

    Report report;
    check(mge_report_new(report.out()));
    for (const auto& name : names) {
        // Scope restricts the position error to reconstructed entries; the
        // other metrics are defined over whole sequences either way.
        int scoped = (a.scope == "missing" && name == "rmse") ? 1 : 0;
        double value = 0.0;
        check(mge_metric(pred.get(), gt.get(), mask.get(), skel.get(), name.c_str(),
                         a.norm.c_str(), scoped, &value));
        bool bone_metric = (name == "bdp" || name == "bdp_gt");
        check(mge_report_add(report.get(), stimulus.c_str(), name.c_str(), value,
                             bone_metric ? "none" : a.norm.c_str()));
    }
    if (a.append)
        check(mge_report_append(report.get(), a.out.c_str()));
    else
        check(mge_report_write(report.get(), a.out.c_str()));

    Manifest m("eval");
    m.input(a.pred);
    if (!a.gt.empty()) m.input(a.gt);
    if (!a.mask.empty()) m.input(a.mask);
    if (!a.skel.empty()) m.input(a.skel);
    m.param("stimulus", stimulus);
    m.param("metrics", a.metrics);
    m.param("norm", a.norm);
    m.param("scope", a.scope);
    m.param("append", a.append);
    m.output(a.out);
    m.write(a.out + ".manifest.json");
}

/* ---- correlate ------------------------------------------------------------- */

struct CorrelateArgs {
    std::string metrics;
    std::string ratings;
    std::string out;
    std::size_t resamples = 50000;
    std::uint64_t seed = 0;
};

void run_correlate(const CorrelateArgs& a) {
    Report report;
    check(mge_report_read(a.metrics.c_str(), report.out()));
    Ratings ratings;
    check(mge_ratings_read(a.ratings.c_str(), ratings.out()));

    char* warnings = nullptr;
    check(mge_correlate(report.get(), ratings.get(), a.resamples, a.seed, a.out.c_str(),
                        &warnings));
    if (warnings != nullptr) {
        std::string text = warnings;
        mge_string_free(warnings);
        std::size_t start = 0;
        while (start < text.size()) {
            std::size_t end = text.find('\n', start);
            if (end == std::string::npos) end = text.size();
            std::cerr << "gapeval: warning: " << text.substr(start, end - start) << "\n";
            start = end + 1;
        }
    }

    Manifest m("correlate");
    m.input(a.metrics);
    m.input(a.ratings);
    m.param("resamples", a.resamples);
    m.seed("seed", a.seed);
    m.output(a.out);
    m.write(a.out + ".manifest.json");
}

/* ---- report ---------------------------------------------------------------- */

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string md_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '|') out += '\\';
        out += c;
    }
    return out;
}

struct Chart {
    std::string body;
    double width = 0;
    double height = 0;

    void rect(double x, double y, double w, double h, const std::string& fill) {
        body += "  <rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(w) +
                "\" height=\"" + fmt(h) + "\" fill=\"" + fill + "\"/>\n";
    }
    void line(double x1, double y1, double x2, double y2, const std::string& stroke) {
        body += "  <line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
                "\" y2=\"" + fmt(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"1\"/>\n";
    }
    void circle(double cx, double cy, double r, const std::string& fill) {
        body += "  <circle cx=\"" + fmt(cx) + "\" cy=\"" + fmt(cy) + "\" r=\"" + fmt(r) +
                "\" fill=\"" + fill + "\"/>\n";
    }
    void text(double x, double y, const std::string& s, const std::string& anchor = "start",
              int size = 11) {
        body += "  <text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" font-size=\"" +
                std::to_string(size) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor +
                "\">" + xml_escape(s) + "</text>\n";
    }
    std::string render() const {
        return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width) +
               "\" height=\"" + fmt(height) + "\" viewBox=\"0 0 " + fmt(width) + " " +
               fmt(height) + "\">\n  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
               body + "</svg>\n";
    }
};

const char* kBarFill = "#4a98c9";
const char* kCategoryFills[] = {"#d0e1f2", "#94c4df", "#4a98c9", "#1764ab", "#08306b"};

std::string bar_chart(const std::string& title, const std::vector<std::string>& labels,
                      const std::vector<double>& values) {
    const double left = 50, top = 34, bottom = 46, bar_w = 44, gap = 18;
    const double plot_h = 220;
    Chart c;
    c.width = left + labels.size() * (bar_w + gap) + 30;
    c.height = top + plot_h + bottom;

    double vmax = 0.0;
    for (double v : values) vmax = std::max(vmax, v);
    if (vmax <= 0.0) vmax = 1.0;

    c.text(left, 18, title, "start", 13);
    c.line(left, top, left, top + plot_h, "#444");
    c.line(left, top + plot_h, c.width - 20, top + plot_h, "#444");
    c.text(left - 6, top + 4, fmt(vmax), "end");
    c.text(left - 6, top + plot_h + 4, "0", "end");

    for (std::size_t i = 0; i < labels.size(); ++i) {
        double h = plot_h * values[i] / vmax;
        double x = left + gap / 2 + i * (bar_w + gap);
        c.rect(x, top + plot_h - h, bar_w, h, kBarFill);
        c.text(x + bar_w / 2, top + plot_h - h - 4, fmt(values[i]), "middle");
        c.text(x + bar_w / 2, top + plot_h + 16, labels[i], "middle");
    }
    return c.render();
}

std::string scatter_chart(const std::string& title, const std::vector<double>& xs,
                          const std::vector<double>& ys, const std::string& xlabel,
                          const std::string& ylabel) {
    const double left = 56, top = 34, right = 24, bottom = 50;
    const double plot_w = 360, plot_h = 240;
    Chart c;
    c.width = left + plot_w + right;
    c.height = top + plot_h + bottom;

    double xmin = xs[0], xmax = xs[0], ymin = ys[0], ymax = ys[0];
    for (double v : xs) {
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
    }
    for (double v : ys) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
    }
    double xpad = (xmax - xmin) > 0 ? (xmax - xmin) * 0.08 : std::max(std::abs(xmax), 1.0) * 0.08;
    double ypad = (ymax - ymin) > 0 ? (ymax - ymin) * 0.08 : std::max(std::abs(ymax), 1.0) * 0.08;
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double v) { return left + (v - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double v) { return top + plot_h - (v - ymin) / (ymax - ymin) * plot_h; };

    c.text(left, 18, title, "start", 13);
    c.line(left, top, left, top + plot_h, "#444");
    c.line(left, top + plot_h, left + plot_w, top + plot_h, "#444");
    c.text(left - 6, py(ymin) + 4, fmt(ymin), "end");
    c.text(left - 6, py(ymax) + 4, fmt(ymax), "end");
    c.text(px(xmin), top + plot_h + 16, fmt(xmin), "middle");
    c.text(px(xmax), top + plot_h + 16, fmt(xmax), "middle");
    c.text(left + plot_w / 2, top + plot_h + 34, xlabel, "middle");
    c.text(16, top - 10, ylabel, "start");

    // Least-squares trend over the x span, skipped for degenerate spreads.
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double var = sxx - sx * sx / n;
    if (var > 1e-12) {
        double slope = (sxy - sx * sy / n) / var;
        double intercept = (sy - slope * sx) / n;
        auto clamp_y = [&](double v) { return std::min(std::max(v, ymin), ymax); };
        double y1 = clamp_y(slope * xmin + intercept);
        double y2 = clamp_y(slope * xmax + intercept);
        double x1 = slope != 0.0 ? (y1 - intercept) / slope : xmin;
        double x2 = slope != 0.0 ? (y2 - intercept) / slope : xmax;
        c.line(px(x1), py(y1), px(x2), py(y2), "#999");
    }

    for (std::size_t i = 0; i < xs.size(); ++i) c.circle(px(xs[i]), py(ys[i]), 4, kBarFill);
    return c.render();
}

std::string ratings_chart(const mge_scores* scores) {
    const std::size_t n = mge_scores_count(scores);
    const std::size_t cats = mge_scores_categories(scores);
    const double left = 120, top = 44, row_h = 26, bar_w = 320;
    Chart c;
    c.width = left + bar_w + 140;
    c.height = top + n * row_h + 20;

    c.text(left, 18, "Rating distribution per stimulus", "start", 13);
    double legend_x = left;
    for (std::size_t k = 0; k < cats; ++k) {
        c.rect(legend_x, 26, 10, 10, kCategoryFills[k % 5]);
        c.text(legend_x + 14, 35, std::to_string(mge_scores_category(scores, k)));
        legend_x += 44;
    }

    for (std::size_t i = 0; i < n; ++i) {
        double y = top + i * row_h;
        c.text(left - 8, y + row_h / 2 + 4, mge_scores_id(scores, i), "end");
        double x = left;
        for (std::size_t k = 0; k < cats; ++k) {
            double w = bar_w * mge_scores_fraction(scores, i, k);
            if (w > 0.0) c.rect(x, y + 4, w, row_h - 8, kCategoryFills[k % 5]);
            x += w;
        }
        char label[64];
        std::snprintf(label, sizeof label, "mean %.2f (n=%zu)", mge_scores_mean(scores, i),
                      mge_scores_ratings(scores, i));
        c.text(left + bar_w + 8, y + row_h / 2 + 4, label);
    }
    return c.render();
}

struct ReportArgs {
    std::string metrics;
    std::string ratings;
    std::string out_dir;
};

void run_report(const ReportArgs& a) {
    Report rep;
    check(mge_report_read(a.metrics.c_str(), rep.out()));

    std::vector<std::string> stimuli;
    std::map<std::string, std::map<std::string, double>> values;
    for (std::size_t i = 0; i < mge_report_count(rep.get()); ++i) {
        const char* stim = nullptr;
        const char* metric = nullptr;
        double value = 0.0;
        check(mge_report_row(rep.get(), i, &stim, &metric, &value, nullptr));
        if (std::find(stimuli.begin(), stimuli.end(), stim) == stimuli.end())
            stimuli.push_back(stim);
        auto [it, inserted] = values[metric].emplace(stim, value);
        if (!inserted)
            fail(3, std::string("duplicate ") + metric + " row for stimulus '" + stim + "'");
    }
    static const char* kMetricOrder[] = {"rmse", "vd_gt", "vd", "bdp_gt", "bdp"};
    std::vector<std::string> metric_order;
    for (const char* name : kMetricOrder)
        if (values.count(name)) metric_order.push_back(name);

    Ratings ratings;
    Scores scores;
    double alpha = 0.0;
    if (!a.ratings.empty()) {
        check(mge_ratings_read(a.ratings.c_str(), ratings.out()));
        check(mge_scores_compute(ratings.get(), scores.out()));
        check(mge_alpha(ratings.get(), &alpha));
    }

    std::error_code ec;
    std::filesystem::create_directories(a.out_dir, ec);
    if (ec) fail(3, "cannot create directory: " + a.out_dir);
    auto out_path = [&](const std::string& name) { return a.out_dir + "/" + name; };

    std::vector<std::string> figures;
    for (const auto& metric : metric_order) {
        std::vector<std::string> labels;
        std::vector<double> bars;
        for (const auto& id : stimuli) {
            auto it = values[metric].find(id);
            if (it == values[metric].end()) continue;
            labels.push_back(id);
            bars.push_back(it->second);
        }
        std::string name = "bars_" + metric + ".svg";
        write_text(out_path(name), bar_chart(metric + " per stimulus", labels, bars));
        figures.push_back(name);

        if (scores) {
            std::vector<double> xs;
            std::vector<double> ys;
            for (std::size_t i = 0; i < mge_scores_count(scores.get()); ++i) {
                std::string id = mge_scores_id(scores.get(), i);
                auto it = values[metric].find(id);
                if (it == values[metric].end()) continue;
                xs.push_back(it->second);
                ys.push_back(mge_scores_mean(scores.get(), i));
            }
            if (xs.size() >= 2) {
                std::string sname = "scatter_" + metric + ".svg";
                write_text(out_path(sname), scatter_chart(metric + " vs mean rating", xs, ys,
                                                          metric, "mean rating"));
                figures.push_back(sname);
            }
        }
    }
    if (scores) {
        write_text(out_path("ratings.svg"), ratings_chart(scores.get()));
        figures.push_back("ratings.svg");
    }

    std::string md = "# Gap reconstruction evaluation\n\n## Metrics\n\n";
    md += "| stimulus |";
    for (const auto& metric : metric_order) md += " " + metric + " |";
    md += "\n|---|";
    for (std::size_t i = 0; i < metric_order.size(); ++i) md += "---|";
    md += "\n";
    for (const auto& id : stimuli) {
        md += "| " + md_escape(id) + " |";
        for (const auto& metric : metric_order) {
            auto it = values[metric].find(id);
            md += it == values[metric].end() ? " |" : " " + fmt(it->second) + " |";
        }
        md += "\n";
    }

    if (scores) {
        md += "\n## Ratings\n\n| stimulus | mean rating | ratings |\n|---|---|---|\n";
        for (std::size_t i = 0; i < mge_scores_count(scores.get()); ++i) {
            char row[128];
            std::snprintf(row, sizeof row, "| %s | %.3f | %zu |\n",
                          md_escape(mge_scores_id(scores.get(), i)).c_str(),
                          mge_scores_mean(scores.get(), i), mge_scores_ratings(scores.get(), i));
            md += row;
        }
        char line[96];
        std::snprintf(line, sizeof line,
                      "\nInter-rater reliability (Krippendorff's alpha, ordinal): %.4f\n", alpha);
        md += line;
    }

    md += "\n## Figures\n\n";
    for (const auto& fig : figures) md += "![" + fig + "](" + fig + ")\n\n";
    write_text(out_path("report.md"), md);

    Manifest m("report");
    m.input(a.metrics);
    if (!a.ratings.empty()) m.input(a.ratings);
    m.output(out_path("report.md"));
    for (const auto& fig : figures) m.output(out_path(fig));
    m.write(out_path("manifest.json"));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Missing-marker reconstruction evaluation toolkit"};
    app.set_version_flag("--version", mge_version());
    app.require_subcommand(1);

    SynthArgs sy;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic marker sequence");
    synth->add_option("--skel", sy.skel, "Skeleton JSON (default: built-in full layout)");
    synth->add_option("--actors", sy.actors, "Actor count")->check(CLI::Range(1, 2));
    synth->add_option("--seconds", sy.seconds, "Duration in seconds");
    synth->add_option("--fps", sy.fps, "Frame rate");
    synth->add_option("--seed", sy.seed, "RNG seed");
    synth->add_option("--out", sy.out, "Output marker CSV")->required();

    SkeletonArgs sk;
    auto* skeleton = app.add_subcommand("skeleton", "Write a built-in skeleton config");
    skeleton->add_option("--actors", sk.actors, "Actor count")->check(CLI::Range(1, 2));
    skeleton->add_option("--layout", sk.layout, "full or minimal")
        ->check(CLI::IsMember({"full", "minimal"}));
    skeleton->add_option("--out", sk.out, "Output skeleton JSON")->required();

    CorruptArgs co;
    auto* corrupt = app.add_subcommand("corrupt", "Knock gaps into a clean sequence");
    corrupt->add_option("--in", co.in, "Clean marker CSV")->required();
    corrupt->add_option("--mode", co.mode, "iid, window or bodypart")
        ->required()
        ->check(CLI::IsMember({"iid", "window", "bodypart"}));
    corrupt->add_option("--p", co.p, "iid: per-entry missing probability");
    corrupt->add_option("--n", co.n, "window: number of markers hit");
    corrupt->add_option("--d", co.d, "window/bodypart: gap length in frames");
    corrupt->add_option("--part", co.part, "bodypart: hips, torso, head or limbs");
    corrupt->add_option("--skel", co.skel, "Skeleton JSON (bodypart mode)");
    corrupt->add_option("--epoch", co.epoch, "Schedule epoch for --curve / --noise-c");
    corrupt->add_option("--curve", co.curve, "n_start,n_rate,d_start,d_rate schedule");
    corrupt->add_option("--noise-c", co.noise_c,
                        "Noise cap; adds schedule noise to interpolated gap values");
    corrupt->add_option("--seed", co.seed, "RNG seed");
    corrupt->add_option("--out", co.out, "Corrupted marker CSV")->required();
    corrupt->add_option("--mask-out", co.mask_out, "Observation mask CSV")->required();

    TrainArgs tr;
    auto* train = app.add_subcommand("train", "Fit the windowed ridge denoiser");
    train->add_option("--clean", tr.clean_dir, "Directory of clean marker CSVs")->required();
    train->add_option("--skel", tr.skel, "Skeleton JSON")->required();
    train->add_option("--epochs", tr.epochs, "Schedule epochs to replay")->required();
    train->add_option("--window", tr.window, "Feature window radius in frames");
    train->add_option("--reg", tr.reg, "Ridge regularization strength");
    train->add_option("--curve", tr.curve, "n_start,n_rate,d_start,d_rate schedule")->required();
    train->add_option("--noise-c", tr.noise_c, "Noise cap for the corruption schedule");
    train->add_option("--seed", tr.seed, "RNG seed");
    train->add_option("--out", tr.out, "Output model file")->required();

    FillArgs fi;
    auto* fill = app.add_subcommand("fill", "Reconstruct missing markers");
    fill->add_option("--in", fi.in, "Corrupted marker CSV")->required();
    fill->add_option("--mask", fi.mask, "Observation mask CSV")->required();
    fill->add_option("--skel", fi.skel, "Skeleton JSON")->required();
    fill->add_option("--method", fi.method, "interp, ridge or hips-outwards")
        ->required()
        ->check(CLI::IsMember({"interp", "ridge", "hips-outwards"}));
    fill->add_option("--model", fi.model, "Model file (ridge method)");
    fill->add_option("--model-hips", fi.model_part[0], "Hips model (hips-outwards)");
    fill->add_option("--model-torso", fi.model_part[1], "Torso model (hips-outwards)");
    fill->add_option("--model-head", fi.model_part[2], "Head model (hips-outwards)");
    fill->add_option("--model-limbs", fi.model_part[3], "Limbs model (hips-outwards)");
    fill->add_option("--smooth-window", fi.smooth_window, "Post-smoothing window (odd, 0 = off)");
    fill->add_option("--smooth-order", fi.smooth_order, "Post-smoothing polynomial order");
    fill->add_option("--smooth-scope", fi.smooth_scope, "all or gaps")
        ->check(CLI::IsMember({"all", "gaps"}));
    fill->add_option("--raw", fi.raw, "Sequence whose observed entries are restored (default --in)");
    fill->add_option("--out", fi.out, "Reconstructed marker CSV")->required();

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Score a reconstruction");
    eval->add_option("--pred", ev.pred, "Reconstructed marker CSV")->required();
    eval->add_option("--gt", ev.gt, "Ground-truth marker CSV");
    eval->add_option("--mask", ev.mask, "Observation mask CSV");
    eval->add_option("--skel", ev.skel, "Skeleton JSON (bone metrics)");
    eval->add_option("--metrics", ev.metrics, "Comma list: rmse,vd_gt,vd,bdp_gt,bdp")->required();
    eval->add_option("--norm", ev.norm, "per_coordinate or per_marker")
        ->check(CLI::IsMember({"per_coordinate", "per_marker"}));
    eval->add_option("--scope", ev.scope, "all, or missing to score only reconstructed entries")
        ->check(CLI::IsMember({"all", "missing"}));
    eval->add_option("--stimulus", ev.stimulus, "Stimulus id for the rows (default: --pred stem)");
    eval->add_flag("--append", ev.append, "Merge rows into an existing metrics CSV");
    eval->add_option("--out", ev.out, "Metrics CSV")->required();

    CorrelateArgs cr;
    auto* correlate = app.add_subcommand("correlate", "Rank-correlate metrics against ratings");
    correlate->add_option("--metrics", cr.metrics, "Metrics CSV")->required();
    correlate->add_option("--ratings", cr.ratings, "Ratings CSV")->required();
    correlate->add_option("--resamples", cr.resamples, "Bootstrap resamples");
    correlate->add_option("--seed", cr.seed, "Bootstrap seed");
    correlate->add_option("--out", cr.out, "Correlation CSV")->required();

    ReportArgs re;
    auto* report = app.add_subcommand("report", "Render a markdown report with figures");
    report->add_option("--metrics", re.metrics, "Metrics CSV")->required();
    report->add_option("--ratings", re.ratings, "Ratings CSV (optional)");
    report->add_option("--out-dir", re.out_dir, "Output directory")->required();

    synth->callback([&] { run_synth(sy); });
    skeleton->callback([&] { run_skeleton(sk); });
    corrupt->callback([&] { run_corrupt(co); });
    train->callback([&] { run_train(tr); });
    fill->callback([&] { run_fill(fi); });
    eval->callback([&] { run_eval(ev); });
    correlate->callback([&] { run_correlate(cr); });
    report->callback([&] { run_report(re); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const CommandError& e) {
        std::cerr << "gapeval: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "gapeval: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
