// moodpipe command-line front end.
//
// Exit codes: 0 ok, 2 I/O or config, 3 no face, 4 feature failure,
// 5 too much training data lost (or a single class left).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "moodpipe/config.hpp"
#include "moodpipe/pipeline.hpp"
#include "moodpipe/svm.hpp"
#include "moodpipe/synthface.hpp"

namespace fs = std::filesystem;
using namespace moodpipe;

namespace {

enum Exit { kOk = 0, kIo = 2, kNoFace = 3, kFeature = 4, kDegraded = 5 };

int exit_code_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::NoFaceDetected: return kNoFace;
        case ErrorKind::FeatureNotFound:
        case ErrorKind::MissingFeature:
        case ErrorKind::DegenerateCurvature:
        case ErrorKind::FaceTooSmall: return kFeature;
        case ErrorKind::DegenerateLabels: return kDegraded;
        default: return kIo;
    }
}

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;

    PipelineConfig load() const {
        PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw Error(ErrorKind::ConfigError, "--set expects key=value, got '" + kv + "'");
            set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (seed) set_config_value(cfg, "seed", std::to_string(*seed));
        cfg.validate();
        return cfg;
    }
};

void add_common(CLI::App* cmd, Common& c, bool with_seed = false) {
    cmd->add_option("--config", c.config_path, "Config file (key = value lines)");
    cmd->add_option("--set", c.overrides, "Override one config key: key=value (repeatable)");
    if (with_seed) cmd->add_option("--seed", c.seed, "Seed; overrides the config");
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Reads either a manifest (`path,label`) or a feature CSV, returning
/// feature rows; manifest rows are extracted, failures logged to stderr.
std::vector<FeatureRow> load_rows(const fs::path& file, const PipelineConfig& cfg, std::vector<std::string>* paths) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + file.string());
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    std::vector<FeatureRow> rows;
    if (header == feature_csv_header()) {
        in.seekg(0);
        rows = read_feature_csv(in);
    } else {
        const DatasetManifest m = read_manifest(file);
        rows = extract_dataset(m, cfg);
    }
    for (const auto& r : rows) {
        if (paths) paths->push_back(r.path);
        if (!r.features) std::cerr << "skipped " << r.path << ": " << r.failure << '\n';
    }
    return rows;
}

std::size_t count_failed(const std::vector<FeatureRow>& rows) {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.features ? 0 : 1;
    return n;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw Error(ErrorKind::IoError, "cannot write " + path.string());
}

MultiClassSvmModel read_model(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open model " + path.string());
    return load_model(in);
}

// ---------------------------------------------------------------------------

int cmd_synth(int n, double jitter, std::uint64_t seed, const std::string& out, int size) {
    const auto m = generate_corpus(n, jitter, seed, out, size);
    std::cout << "wrote " << m.rows.size() << " images to " << out << '\n';
    return kOk;
}

int cmd_detect(const std::string& image, const Common& c, const std::string& annotate) {
    const PipelineConfig cfg = c.load();
    const RasterImage img = load_image(image);
    const auto faces = img.channels() == 3 ? detect_faces(img, cfg.detect) : std::vector<FaceDetection>{};
    for (const auto& f : faces) {
        std::printf("%d %d %d %d %d %d %d %.6f\n", f.circle.cx, f.circle.cy, f.circle.r, f.bbox.x1, f.bbox.y1, f.bbox.x2,
                    f.bbox.y2, f.confidence);
    }
    if (!annotate.empty()) {
        RasterImage out = img.channels() == 3 ? img : RasterImage(img.width(), img.height(), Rgb{});
        if (img.channels() == 1) {
            for (int y = 0; y < img.height(); ++y) {
                for (int x = 0; x < img.width(); ++x) out.set_rgb(x, y, img.rgb(x, y));
            }
        }
        for (const auto& f : faces) {
            draw_circle(out, f.circle, Rgb{255, 0, 0});
            draw_rect(out, f.bbox, Rgb{0, 255, 0});
        }
        save_image(annotate, out);
    }
    return kOk;
}

int cmd_extract(const std::string& image, const Common& c, const std::vector<int>& bbox, const std::string& dump) {
    const PipelineConfig cfg = c.load();
    const RasterImage img = load_image(image);
    FaceAnalysis a;
    if (!bbox.empty()) {
        if (bbox.size() != 4) throw Error(ErrorKind::ConfigError, "--bbox expects x1,y1,x2,y2");
        a = analyze_box(img, Rect{bbox[0], bbox[1], bbox[2], bbox[3]}, cfg);
    } else {
        a = analyze_image(img, cfg);
    }
    for (int k = 0; k < kFeatureDim; ++k) std::cout << (k ? " " : "") << fmt(a.features.values[k]);
    std::cout << '\n';
    if (!dump.empty()) {
        fs::create_directories(dump);
        save_image(fs::path(dump) / "face.pgm", a.crop);
        save_image(fs::path(dump) / "left_eyebrow.pgm", mask_to_gray(a.masks.left_eyebrow));
        save_image(fs::path(dump) / "right_eyebrow.pgm", mask_to_gray(a.masks.right_eyebrow));
        save_image(fs::path(dump) / "lip.pgm", mask_to_gray(a.masks.lip));
    }
    return kOk;
}

int cmd_train(const std::string& data, const Common& c, const std::string& model_out, const std::string& features_out) {
    const PipelineConfig cfg = c.load();
    const auto rows = load_rows(data, cfg, nullptr);
    if (rows.empty()) throw Error(ErrorKind::EmptyDataset, "no training rows");
    const std::size_t failed = count_failed(rows);
    if (2 * failed > rows.size()) {
        std::cerr << "error: " << failed << " of " << rows.size() << " rows failed extraction\n";
        return kDegraded;
    }
    if (!features_out.empty()) {
        std::ostringstream os;
        write_feature_csv(os, rows);
        write_text(features_out, os.str());
    }
    const auto samples = to_samples(rows);
    const auto model = train_multiclass(samples, cfg.kernel, cfg.train);
    std::ostringstream os;
    save_model(os, model);
    write_text(model_out, os.str());

    std::cout << "rows " << rows.size() << ", used " << samples.size() << ", skipped " << failed << '\n';
    for (const auto& pm : model.pairs) {
        std::cout << name_of(pm.positive) << '/' << name_of(pm.negative) << ": ";
        if (!pm.trained) {
            std::cout << "absent\n";
            continue;
        }
        std::cout << pm.model.support_vectors.size() << " SVs, "
                  << (pm.model.converged ? "converged" : "NOT converged") << ", " << pm.model.iterations
                  << " updates\n";
    }
    const auto report = evaluate(model, samples);
    std::printf("training accuracy %.1f%% (%d/%d)\n", 100.0 * report.correct / report.total, report.correct,
                report.total);
    return kOk;
}

int cmd_predict(const std::string& image, const Common& c, const std::string& model_path) {
    const PipelineConfig cfg = c.load();
    const auto model = read_model(model_path);
    const auto a = analyze_image(load_image(image), cfg);
    const auto p = predict_expression(model, a.features.values);
    std::cout << name_of(p.label) << '\n';
    for (Expression e : kReportOrder) std::cout << name_of(e) << ' ' << p.votes[index_of(e)] << '\n';
    for (int k = 0; k < kPairCount; ++k) {
        const auto& pm = model.pairs[k];
        std::cout << name_of(pm.positive) << '/' << name_of(pm.negative) << ' ';
        if (!p.pair_scores[k]) {
            std::cout << "absent\n";
            continue;
        }
        const double f = *p.pair_scores[k];
        std::cout << name_of(f >= 0.0 ? pm.positive : pm.negative) << ' ' << fmt(f) << '\n';
    }
    return kOk;
}

int cmd_eval(const std::string& data, const Common& c, const std::string& model_path, bool csv,
             const std::string& train_data) {
    const PipelineConfig cfg = c.load();
    const auto model = read_model(model_path);
    std::vector<std::string> paths;
    const auto rows = load_rows(data, cfg, &paths);
    if (!train_data.empty()) {
        std::set<std::string> test_set;
        for (const auto& p : paths) test_set.insert(fs::weakly_canonical(fs::path(data).parent_path() / p).string());
        std::vector<std::string> train_paths;
        std::ifstream in(train_data);
        if (!in) throw Error(ErrorKind::IoError, "cannot open " + train_data);
        std::string line;
        std::getline(in, line);
        std::size_t overlap = 0;
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            const auto p = fs::weakly_canonical(fs::path(train_data).parent_path() / line.substr(0, comma)).string();
            overlap += test_set.count(p);
        }
        if (overlap > 0) std::cerr << "warning: " << overlap << " test images also appear in the training data\n";
    }
    const auto samples = to_samples(rows);
    const auto report = evaluate(model, samples);
    std::cout << (csv ? format_report_csv(report) : format_report(report));
    return kOk;
}

int cmd_config(const Common& c, const std::string& out) {
    std::ostringstream os;
    write_config(os, c.load());
    if (out.empty()) {
        std::cout << os.str();
    } else {
        write_text(out, os.str());
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"moodpipe: facial expression recognition from geometric face features"};
    app.require_subcommand(1);

    int n = 30;
    double jitter = 0.15;
    std::uint64_t synth_seed = 0;
    std::string out_dir;
    int size = 256;
    auto* synth = app.add_subcommand("synth", "Render a labelled synthetic corpus");
    synth->add_option("--n", n, "Images per expression")->check(CLI::PositiveNumber);
    synth->add_option("--jitter", jitter, "Shape perturbation in [0, 0.5]");
    synth->add_option("--seed", synth_seed, "Corpus seed");
    synth->add_option("--out", out_dir, "Output directory")->required();
    synth->add_option("--size", size, "Image side in pixels");

    Common common;
    std::string image, annotate, model_path, data, features_out, train_data, config_out, dump;
    std::vector<int> bbox;
    bool csv = false;

    auto* detect = app.add_subcommand("detect", "Print face detections");
    detect->add_option("image", image, "Input PPM/PGM")->required();
    detect->add_option("--annotate", annotate, "Write a copy with detections drawn");
    add_common(detect, common);

    auto* extract = app.add_subcommand("extract", "Print the 7 features: He We Hm Wm Rul Rll NL");
    extract->add_option("image", image, "Input PPM/PGM")->required();
    extract->add_option("--bbox", bbox, "Use this face box instead of detection: x1,y1,x2,y2")->delimiter(',');
    extract->add_option("--dump-masks", dump, "Directory for face crop and feature masks (PGM)");
    add_common(extract, common);

    auto* train = app.add_subcommand("train", "Train the expression classifier");
    train->add_option("data", data, "Manifest CSV or feature CSV")->required();
    train->add_option("--model", model_path, "Output model file")->required();
    train->add_option("--save-features", features_out, "Also write the extracted feature CSV");
    add_common(train, common, true);

    auto* predict = app.add_subcommand("predict", "Classify one image");
    predict->add_option("image", image, "Input PPM")->required();
    predict->add_option("--model", model_path, "Model file")->required();
    add_common(predict, common);

    auto* eval = app.add_subcommand("eval", "Accuracy table over a labelled set");
    eval->add_option("data", data, "Manifest CSV or feature CSV")->required();
    eval->add_option("--model", model_path, "Model file")->required();
    eval->add_flag("--csv", csv, "Machine-readable output");
    eval->add_option("--train-manifest", train_data, "Warn if any test image also appears here");
    add_common(eval, common);

    auto* config = app.add_subcommand("config", "Print the effective configuration");
    config->add_option("--out", config_out, "Write to this file instead of stdout");
    add_common(config, common, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kIo;
    }

    try {
        if (*synth) return cmd_synth(n, jitter, synth_seed, out_dir, size);
        if (*detect) return cmd_detect(image, common, annotate);
        if (*extract) return cmd_extract(image, common, bbox, dump);
        if (*train) return cmd_train(data, common, model_path, features_out);
        if (*predict) return cmd_predict(image, common, model_path);
        if (*eval) return cmd_eval(data, common, model_path, csv, train_data);
        if (*config) return cmd_config(common, config_out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what();
        if (!e.detail().empty()) std::cerr << " (" << e.detail() << ')';
        std::cerr << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIo;
    }
    return kOk;
}
