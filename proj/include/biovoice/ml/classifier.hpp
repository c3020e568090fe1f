#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/jsonutil.hpp"
#include "biovoice/core/mathutil.hpp"
#include "biovoice/ml/decision_tree.hpp"
#include "biovoice/ml/mlp.hpp"
#include "biovoice/ml/naive_bayes.hpp"
#include "biovoice/ml/random_forest.hpp"
#include "biovoice/ml/scaler.hpp"
#include "biovoice/ml/svm.hpp"

namespace biovoice {

enum class ClassifierKind { NB, DTree, SVM, RF, MLP };

inline const std::vector<ClassifierKind>& all_classifier_kinds() {
    static const std::vector<ClassifierKind> kinds = {
        ClassifierKind::NB, ClassifierKind::DTree, ClassifierKind::SVM, ClassifierKind::RF,
        ClassifierKind::MLP};
    return kinds;
}

inline const char* classifier_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::NB: return "nb";
        case ClassifierKind::DTree: return "dtree";
        case ClassifierKind::SVM: return "svm";
        case ClassifierKind::RF: return "rf";
        case ClassifierKind::MLP: return "mlp";
    }
    return "?";
}

inline ClassifierKind classifier_from_name(const std::string& s) {
    for (ClassifierKind k : all_classifier_kinds())
        if (s == classifier_name(k)) return k;
    throw RangeViolation("unknown classifier name: " + s);
}

// Union of every kind's knobs; to_json/label emit only the fields the kind
// actually uses. max_depth < 0 encodes "unbounded"; gamma <= 0 encodes the
// data-driven "scale" value.
struct HyperParams {
    double var_smoothing = 1e-9;            // NB
    int max_depth = -1;                      // DTree, RF
    std::size_t min_leaf = 1;                // DTree
    double C = 1.0;                          // SVM
    double gamma = 0.0;                      // SVM
    int n_trees = 100;                       // RF
    std::vector<std::size_t> hidden = {32};  // MLP
    double learning_rate = 0.01;             // MLP

    json to_json(ClassifierKind k) const {
        json j = json::object();
        switch (k) {
            case ClassifierKind::NB:
                j["var_smoothing"] = var_smoothing;
                break;
            case ClassifierKind::DTree:
                j["max_depth"] = max_depth < 0 ? json(nullptr) : json(max_depth);
                j["min_leaf"] = min_leaf;
                break;
            case ClassifierKind::SVM:
                j["C"] = C;
                j["gamma"] = gamma <= 0.0 ? json("scale") : json(gamma);
                break;
            case ClassifierKind::RF:
                j["n_trees"] = n_trees;
                j["max_depth"] = max_depth < 0 ? json(nullptr) : json(max_depth);
                break;
            case ClassifierKind::MLP:
                j["hidden"] = hidden;
                j["learning_rate"] = learning_rate;
                break;
        }
        return j;
    }

    static HyperParams from_json(ClassifierKind k, const json& j) {
        HyperParams h;
        switch (k) {
            case ClassifierKind::NB:
                h.var_smoothing = j.at("var_smoothing").get<double>();
                break;
            case ClassifierKind::DTree:
                h.max_depth = j.at("max_depth").is_null() ? -1 : j.at("max_depth").get<int>();
                h.min_leaf = j.at("min_leaf").get<std::size_t>();
                break;
            case ClassifierKind::SVM:
                h.C = j.at("C").get<double>();
                h.gamma = j.at("gamma").is_string() ? 0.0 : j.at("gamma").get<double>();
                break;
            case ClassifierKind::RF:
                h.n_trees = j.at("n_trees").get<int>();
                h.max_depth = j.at("max_depth").is_null() ? -1 : j.at("max_depth").get<int>();
                break;
            case ClassifierKind::MLP:
                h.hidden = j.at("hidden").get<std::vector<std::size_t>>();
                h.learning_rate = j.at("learning_rate").get<double>();
                break;
        }
        return h;
    }

    std::string label(ClassifierKind k) const {
        auto depth_str = [](int d) { return d < 0 ? std::string("inf") : std::to_string(d); };
        switch (k) {
            case ClassifierKind::NB:
                return "var_smoothing=" + fmt_g9(var_smoothing);
            case ClassifierKind::DTree:
                return "max_depth=" + depth_str(max_depth) +
                       ",min_leaf=" + std::to_string(min_leaf);
            case ClassifierKind::SVM:
                return "C=" + fmt_g9(C) +
                       ",gamma=" + (gamma <= 0.0 ? std::string("scale") : fmt_g9(gamma));
            case ClassifierKind::RF:
                return "trees=" + std::to_string(n_trees) + ",max_depth=" + depth_str(max_depth);
            case ClassifierKind::MLP: {
                std::string hs;
                for (std::size_t i = 0; i < hidden.size(); ++i)
                    hs += (i ? "x" : "") + std::to_string(hidden[i]);
                return "hidden=" + hs + ",lr=" + fmt_g9(learning_rate);
            }
        }
        return "?";
    }
};

// Tuning grids; cell order is the deterministic tie-break order.
inline std::vector<HyperParams> default_grid(ClassifierKind k) {
    std::vector<HyperParams> g;
    HyperParams h;
    switch (k) {
        case ClassifierKind::NB:
            for (double vs : {1e-9, 1e-7}) {
                h.var_smoothing = vs;
                g.push_back(h);
            }
            break;
        case ClassifierKind::DTree:
            for (int depth : {3, 5, 10, -1})
                for (std::size_t leaf : {std::size_t(1), std::size_t(5)}) {
                    h.max_depth = depth;
                    h.min_leaf = leaf;
                    g.push_back(h);
                }
            break;
        case ClassifierKind::SVM:
            for (double c : {0.1, 1.0, 10.0, 100.0})
                for (double gm : {0.0, 0.01, 0.1}) {  // 0.0 = scale
                    h.C = c;
                    h.gamma = gm;
                    g.push_back(h);
                }
            break;
        case ClassifierKind::RF:
            for (int trees : {100, 300})
                for (int depth : {-1, 10}) {
                    h.n_trees = trees;
                    h.max_depth = depth;
                    g.push_back(h);
                }
            break;
        case ClassifierKind::MLP:
            for (auto& hid : {std::vector<std::size_t>{32}, std::vector<std::size_t>{64, 32}})
                for (double lr : {0.01, 0.001}) {
                    h.hidden = hid;
                    h.learning_rate = lr;
                    g.push_back(h);
                }
            break;
    }
    return g;
}

struct TrainedModel {
    ClassifierKind kind = ClassifierKind::NB;
    HyperParams hp;
    std::uint64_t seed = 0;
    std::optional<ScalerModel> scaler;  // applied before predict when present

    GaussianNB nb;
    DecisionTree tree;
    SvmClassifier svm;
    RandomForest forest;
    MlpClassifier mlp;

    int predict_one(const std::vector<double>& x) const {
        if (scaler) {
            std::vector<double> z = x;
            for (std::size_t j = 0; j < z.size(); ++j)
                z[j] = (z[j] - scaler->mean[j]) / scaler->stddev[j];
            return predict_raw(z);
        }
        return predict_raw(x);
    }

    std::vector<int> predict(const Matrix& X) const {
        std::vector<int> out(X.size());
        for (std::size_t i = 0; i < X.size(); ++i) out[i] = predict_one(X[i]);
        return out;
    }

private:
    int predict_raw(const std::vector<double>& x) const {
        switch (kind) {
            case ClassifierKind::NB: return nb.predict_one(x);
            case ClassifierKind::DTree: return tree.predict_one(x);
            case ClassifierKind::SVM: return svm.predict_one(x);
            case ClassifierKind::RF: return forest.predict_one(x);
            case ClassifierKind::MLP: return mlp.predict_one(x);
        }
        return 0;
    }
};

inline TrainedModel train_classifier(ClassifierKind kind, const HyperParams& hp, const Matrix& X,
                                     const std::vector<int>& y, std::uint64_t seed) {
    TrainedModel m;
    m.kind = kind;
    m.hp = hp;
    m.seed = seed;
    switch (kind) {
        case ClassifierKind::NB:
            m.nb.var_smoothing = hp.var_smoothing;
            m.nb.fit(X, y);
            break;
        case ClassifierKind::DTree:
            m.tree.max_depth = hp.max_depth;
            m.tree.min_leaf = hp.min_leaf;
            m.tree.fit(X, y);
            break;
        case ClassifierKind::SVM:
            m.svm.C = hp.C;
            m.svm.gamma = hp.gamma;
            m.svm.fit(X, y);
            break;
        case ClassifierKind::RF:
            m.forest.n_trees = hp.n_trees;
            m.forest.max_depth = hp.max_depth;
            m.forest.seed = seed;
            m.forest.fit(X, y);
            break;
        case ClassifierKind::MLP:
            m.mlp.hidden = hp.hidden;
            m.mlp.learning_rate = hp.learning_rate;
            m.mlp.seed = seed;
            m.mlp.fit(X, y);
            break;
    }
    return m;
}

namespace detail {

struct BinWriter {
    std::string buf;
    void u8(std::uint8_t v) { buf.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void vec(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }
};

struct BinReader {
    const std::string& buf;
    std::size_t pos = 0;
    explicit BinReader(const std::string& b) : buf(b) {}
    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw CorruptContainer("model.bin: truncated");
    }
    std::uint8_t u8() {
        need(1);
        return static_cast<std::uint8_t>(buf[pos++]);
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos++])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos++])) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::vector<double> vec() {
        std::vector<double> v(u64());
        for (double& x : v) x = f64();
        return v;
    }
};

inline void write_tree_nodes(BinWriter& w, const std::vector<DecisionTree::Node>& nodes) {
    w.u64(nodes.size());
    for (const auto& n : nodes) {
        w.i32(n.feature);
        w.f64(n.threshold);
        w.i32(n.left);
        w.i32(n.right);
        w.u64(n.count[0]);
        w.u64(n.count[1]);
    }
}

inline std::vector<DecisionTree::Node> read_tree_nodes(BinReader& r) {
    std::vector<DecisionTree::Node> nodes(r.u64());
    for (auto& n : nodes) {
        n.feature = r.i32();
        n.threshold = r.f64();
        n.left = r.i32();
        n.right = r.i32();
        n.count[0] = r.u64();
        n.count[1] = r.u64();
    }
    return nodes;
}

}  // namespace detail

// model.bin layout: magic "BVMD", format version, kind byte, kind payload.
inline void save_model(const TrainedModel& m, const std::string& bin_path,
                       const std::string& meta_path) {
    detail::BinWriter w;
    w.buf += "BVMD";
    w.u32(1);
    w.u8(static_cast<std::uint8_t>(m.kind));
    switch (m.kind) {
        case ClassifierKind::NB: {
            w.f64(m.nb.var_smoothing);
            w.vec(m.nb.log_prior);
            w.u64(m.nb.mu[0].size());
            for (int c = 0; c < 2; ++c) w.vec(m.nb.mu[c]);
            for (int c = 0; c < 2; ++c) w.vec(m.nb.var[c]);
            break;
        }
        case ClassifierKind::DTree:
            detail::write_tree_nodes(w, m.tree.nodes);
            break;
        case ClassifierKind::SVM: {
            w.f64(m.svm.gamma_used);
            w.f64(m.svm.b);
            w.u64(m.svm.support_vectors.size());
            w.u64(m.svm.support_vectors.empty() ? 0 : m.svm.support_vectors[0].size());
            w.vec(m.svm.coef);
            for (const auto& sv : m.svm.support_vectors)
                for (double v : sv) w.f64(v);
            break;
        }
        case ClassifierKind::RF: {
            w.u64(m.forest.trees.size());
            for (const auto& t : m.forest.trees) {
                w.u64(t.nodes.size());
                for (const auto& n : t.nodes) {
                    w.i32(n.feature);
                    w.f64(n.threshold);
                    w.i32(n.left);
                    w.i32(n.right);
                    w.u32(n.count[0]);
                    w.u32(n.count[1]);
                }
            }
            break;
        }
        case ClassifierKind::MLP: {
            w.u64(m.mlp.dims.size());
            for (std::size_t dmm : m.mlp.dims) w.u64(dmm);
            for (std::size_t l = 0; l + 1 < m.mlp.dims.size(); ++l) {
                w.vec(m.mlp.W[l]);
                w.vec(m.mlp.B[l]);
            }
            break;
        }
    }
    std::ofstream out(bin_path, std::ios::binary);
    if (!out) throw UnwritablePath("cannot open for writing: " + bin_path);
    out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
    out.close();
    if (!out) throw UnwritablePath("failed writing: " + bin_path);

    json meta = {{"container", "biovoice-model"},
                 {"version", 1},
                 {"kind", classifier_name(m.kind)},
                 {"hyperparams", m.hp.to_json(m.kind)},
                 {"seed", m.seed}};
    if (m.scaler) {
        std::vector<bool> cf(m.scaler->constant_feature.begin(),
                             m.scaler->constant_feature.end());
        meta["scaler"] = {{"mean", m.scaler->mean},
                          {"stddev", m.scaler->stddev},
                          {"constant_feature", cf}};
    } else {
        meta["scaler"] = nullptr;
    }
    write_json_file(meta_path, meta);
}

inline TrainedModel load_model(const std::string& bin_path, const std::string& meta_path) {
    json meta = read_json_file(meta_path);
    if (!meta.is_object() || meta.value("container", "") != "biovoice-model" ||
        meta.value("version", 0) != 1)
        throw CorruptContainer("model.meta.json: wrong container or version");
    TrainedModel m;
    m.kind = classifier_from_name(meta.at("kind").get<std::string>());
    m.hp = HyperParams::from_json(m.kind, meta.at("hyperparams"));
    m.seed = meta.at("seed").get<std::uint64_t>();
    if (!meta.at("scaler").is_null()) {
        ScalerModel sc;
        sc.mean = meta["scaler"].at("mean").get<std::vector<double>>();
        sc.stddev = meta["scaler"].at("stddev").get<std::vector<double>>();
        for (bool b : meta["scaler"].at("constant_feature").get<std::vector<bool>>())
            sc.constant_feature.push_back(b ? 1 : 0);
        m.scaler = sc;
    }

    std::string buf = read_text_file(bin_path);
    if (buf.size() < 9 || buf.compare(0, 4, "BVMD") != 0)
        throw CorruptContainer("model.bin: bad magic");
    detail::BinReader r(buf);
    r.pos = 4;
    if (r.u32() != 1) throw CorruptContainer("model.bin: unsupported version");
    const auto kind_byte = static_cast<ClassifierKind>(r.u8());
    if (kind_byte != m.kind) throw CorruptContainer("model.bin: kind mismatch with meta");
    switch (m.kind) {
        case ClassifierKind::NB: {
            m.nb.var_smoothing = r.f64();
            m.nb.log_prior = r.vec();
            const std::size_t d = r.u64();
            m.nb.mu.assign(2, {});
            m.nb.var.assign(2, {});
            for (int c = 0; c < 2; ++c) m.nb.mu[c] = r.vec();
            for (int c = 0; c < 2; ++c) m.nb.var[c] = r.vec();
            if (m.nb.mu[0].size() != d) throw CorruptContainer("model.bin: NB size mismatch");
            break;
        }
        case ClassifierKind::DTree:
            m.tree.nodes = detail::read_tree_nodes(r);
            m.tree.max_depth = m.hp.max_depth;
            m.tree.min_leaf = m.hp.min_leaf;
            break;
        case ClassifierKind::SVM: {
            m.svm.gamma_used = r.f64();
            m.svm.b = r.f64();
            const std::size_t n_sv = r.u64(), d = r.u64();
            m.svm.coef = r.vec();
            if (m.svm.coef.size() != n_sv) throw CorruptContainer("model.bin: SVM size mismatch");
            m.svm.support_vectors.assign(n_sv, std::vector<double>(d));
            for (auto& sv : m.svm.support_vectors)
                for (double& v : sv) v = r.f64();
            m.svm.C = m.hp.C;
            m.svm.gamma = m.hp.gamma;
            break;
        }
        case ClassifierKind::RF: {
            m.forest.trees.assign(r.u64(), {});
            for (auto& t : m.forest.trees) {
                t.nodes.assign(r.u64(), {});
                for (auto& n : t.nodes) {
                    n.feature = r.i32();
                    n.threshold = r.f64();
                    n.left = r.i32();
                    n.right = r.i32();
                    n.count[0] = r.u32();
                    n.count[1] = r.u32();
                }
            }
            m.forest.n_trees = m.hp.n_trees;
            m.forest.max_depth = m.hp.max_depth;
            m.forest.seed = m.seed;
            break;
        }
        case ClassifierKind::MLP: {
            m.mlp.dims.assign(r.u64(), 0);
            for (auto& dmm : m.mlp.dims) dmm = r.u64();
            const std::size_t L = m.mlp.dims.empty() ? 0 : m.mlp.dims.size() - 1;
            m.mlp.W.assign(L, {});
            m.mlp.B.assign(L, {});
            for (std::size_t l = 0; l < L; ++l) {
                m.mlp.W[l] = r.vec();
                m.mlp.B[l] = r.vec();
            }
            m.mlp.hidden = m.hp.hidden;
            m.mlp.learning_rate = m.hp.learning_rate;
            m.mlp.seed = m.seed;
            break;
        }
    }
    return m;
}

}  // namespace biovoice
