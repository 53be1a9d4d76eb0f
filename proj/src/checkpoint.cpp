#include "fanetkoop/checkpoint.hpp"

#include <sstream>

#include "fanetkoop/config.hpp"
#include "fanetkoop/csv.hpp"

namespace fanetkoop {

namespace {

constexpr const char* kMagic = "fanetkoop-checkpoint";

void emit_tensor(std::ostringstream& out, const std::string& name, const Eigen::MatrixXd& m) {
    out << "tensor " << name << " " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << " ";
            out << format_double(m(r, c));
        }
        out << "\n";
    }
}

void emit_tensor(std::ostringstream& out, const std::string& name, const Eigen::VectorXd& v) {
    out << "tensor " << name << " " << v.size() << "\n";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out << " ";
        out << format_double(v(i));
    }
    out << "\n";
}

void emit_mlp(std::ostringstream& out, const std::string& prefix, const nn::Mlp& mlp) {
    out << "mlp " << prefix << " " << mlp.layers.size() << "\n";
    for (std::size_t i = 0; i < mlp.layers.size(); ++i) {
        emit_tensor(out, prefix + "." + std::to_string(i) + ".weight", mlp.layers[i].weight);
        emit_tensor(out, prefix + "." + std::to_string(i) + ".bias", mlp.layers[i].bias);
    }
}

void emit_normalizer(std::ostringstream& out, const Normalizer& n) {
    out << "normalizer.db_floor = " << format_double(n.db_floor) << "\n";
    out << "normalizer.floored = " << (n.floored ? 1 : 0) << "\n";
    emit_tensor(out, "normalizer.mean", n.mean);
    emit_tensor(out, "normalizer.std", n.std);
}

void emit_kae_body(std::ostringstream& out, const KaeModel& model) {
    out << "kae.input_dim = " << model.meta.input_dim << "\n";
    out << "kae.latent_dim = " << model.meta.latent_dim << "\n";
    out << "kae.horizon = " << model.meta.horizon << "\n";
    out << "kae.initial_loss = " << format_double(model.meta.initial_loss) << "\n";
    out << "kae.final_loss = " << format_double(model.meta.final_loss) << "\n";
    emit_mlp(out, "encoder", model.encoder);
    emit_tensor(out, "koopman", model.koopman);
    emit_mlp(out, "decoder", model.decoder);
}

// --- parsing ---------------------------------------------------------------

struct Reader {
    std::istringstream stream;
    std::string path;

    explicit Reader(const std::string& text, std::string p)
        : stream(text), path(std::move(p)) {}

    std::string line() {
        std::string l;
        if (!std::getline(stream, l)) throw DataError("checkpoint truncated: " + path);
        if (!l.empty() && l.back() == '\r') l.pop_back();
        return l;
    }

    /// `key = value` line with the expected key.
    std::string value(const std::string& key) {
        std::string l = line();
        std::string prefix = key + " = ";
        if (l.rfind(prefix, 0) != 0)
            throw DataError("checkpoint: expected '" + key + "' line, got '" + l + "'");
        return l.substr(prefix.size());
    }

    Eigen::MatrixXd tensor2(const std::string& name) {
        std::istringstream header(line());
        std::string tag, got;
        Eigen::Index rows = 0, cols = 0;
        header >> tag >> got >> rows >> cols;
        if (tag != "tensor" || got != name || header.fail() || rows < 0 || cols < 0)
            throw DataError("checkpoint: bad tensor header for " + name);
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            std::istringstream row(line());
            for (Eigen::Index c = 0; c < cols; ++c) {
                std::string cell;
                row >> cell;
                if (cell.empty()) throw DataError("checkpoint: short tensor row in " + name);
                m(r, c) = parse_double(cell, name);
            }
        }
        return m;
    }

    Eigen::VectorXd tensor1(const std::string& name) {
        std::istringstream header(line());
        std::string tag, got;
        Eigen::Index size = 0;
        header >> tag >> got >> size;
        if (tag != "tensor" || got != name || header.fail() || size < 0)
            throw DataError("checkpoint: bad tensor header for " + name);
        Eigen::VectorXd v(size);
        std::istringstream row(line());
        for (Eigen::Index i = 0; i < size; ++i) {
            std::string cell;
            row >> cell;
            if (cell.empty()) throw DataError("checkpoint: short tensor row in " + name);
            v(i) = parse_double(cell, name);
        }
        return v;
    }

    nn::Mlp mlp(const std::string& prefix) {
        std::istringstream header(line());
        std::string tag, got;
        std::size_t count = 0;
        header >> tag >> got >> count;
        if (tag != "mlp" || got != prefix || header.fail())
            throw DataError("checkpoint: bad mlp header for " + prefix);
        nn::Mlp m;
        for (std::size_t i = 0; i < count; ++i) {
            nn::DenseLayer layer;
            layer.weight = tensor2(prefix + "." + std::to_string(i) + ".weight");
            Eigen::VectorXd bias = tensor1(prefix + "." + std::to_string(i) + ".bias");
            layer.bias = bias;
            layer.activation =
                (i + 1 < count) ? nn::Activation::Tanh : nn::Activation::Identity;
            m.layers.push_back(std::move(layer));
        }
        return m;
    }

    Normalizer normalizer() {
        Normalizer n;
        n.db_floor = parse_double(value("normalizer.db_floor"), "db_floor");
        n.floored = parse_long(value("normalizer.floored"), "floored") != 0;
        n.mean = tensor1("normalizer.mean");
        n.std = tensor1("normalizer.std");
        return n;
    }

    KaeModel kae_body() {
        KaeModel model;
        model.meta.input_dim = static_cast<int>(parse_long(value("kae.input_dim"), "input_dim"));
        model.meta.latent_dim = static_cast<int>(parse_long(value("kae.latent_dim"), "latent_dim"));
        model.meta.horizon = static_cast<int>(parse_long(value("kae.horizon"), "horizon"));
        model.meta.initial_loss = parse_double(value("kae.initial_loss"), "initial_loss");
        model.meta.final_loss = parse_double(value("kae.final_loss"), "final_loss");
        model.encoder = mlp("encoder");
        model.koopman = tensor2("koopman");
        model.decoder = mlp("decoder");
        return model;
    }
};

std::string header_text(const std::string& kind, std::uint64_t dataset_hash,
                        std::uint64_t model_hash) {
    std::ostringstream out;
    out << kMagic << " v" << kCheckpointVersion << "\n";
    out << "kind = " << kind << "\n";
    std::ostringstream dh, mh;
    dh << std::hex << dataset_hash;
    mh << std::hex << model_hash;
    out << "dataset_hash = " << dh.str() << "\n";
    out << "model_hash = " << mh.str() << "\n";
    return out.str();
}

CheckpointInfo read_header(Reader& r) {
    std::string magic = r.line();
    std::string expected = std::string(kMagic) + " v" + std::to_string(kCheckpointVersion);
    if (magic != expected)
        throw DataError("not a fanetkoop checkpoint (or unsupported version): " + r.path);
    CheckpointInfo info;
    info.kind = r.value("kind");
    info.dataset_hash = std::stoull(r.value("dataset_hash"), nullptr, 16);
    info.model_hash = std::stoull(r.value("model_hash"), nullptr, 16);
    return info;
}

}  // namespace

std::string serialize_kae(const KaeModel& model, std::uint64_t dataset_hash,
                          std::uint64_t model_hash) {
    std::ostringstream out;
    out << header_text("kae", dataset_hash, model_hash);
    emit_normalizer(out, model.normalizer);
    emit_kae_body(out, model);
    return out.str();
}

std::string serialize_gkae(const GkaeModel& model, std::uint64_t dataset_hash,
                           std::uint64_t model_hash) {
    std::ostringstream out;
    out << header_text("gkae", dataset_hash, model_hash);
    out << "gkae.node_count = " << model.meta.node_count << "\n";
    out << "gkae.embedding_dim = " << model.meta.embedding_dim << "\n";
    out << "gkae.horizon = " << model.meta.horizon << "\n";
    out << "gkae.affinity_scale = " << format_double(model.meta.affinity_scale) << "\n";
    out << "gkae.binary_adjacency = " << (model.meta.binary_adjacency ? 1 : 0) << "\n";
    out << "gkae.initial_loss = " << format_double(model.meta.initial_loss) << "\n";
    out << "gkae.final_loss = " << format_double(model.meta.final_loss) << "\n";
    emit_normalizer(out, model.normalizer);
    emit_tensor(out, "graph_encoder.0.weight", model.graph_encoder[0].weight);
    emit_tensor(out, "graph_encoder.0.bias", model.graph_encoder[0].bias);
    emit_tensor(out, "graph_encoder.1.weight", model.graph_encoder[1].weight);
    emit_tensor(out, "graph_encoder.1.bias", model.graph_encoder[1].bias);
    emit_kae_body(out, model.kae);
    emit_mlp(out, "graph_decoder", model.graph_decoder);
    return out.str();
}

CheckpointInfo peek_checkpoint(const std::string& path) {
    Reader r(read_text_file(path), path);
    return read_header(r);
}

KaeModel load_kae(const std::string& path, CheckpointInfo* info) {
    Reader r(read_text_file(path), path);
    CheckpointInfo header = read_header(r);
    if (header.kind != "kae") throw DataError("checkpoint kind is not kae: " + path);
    if (info) *info = header;
    Normalizer norm = r.normalizer();
    KaeModel model = r.kae_body();
    model.normalizer = std::move(norm);
    return model;
}

GkaeModel load_gkae(const std::string& path, CheckpointInfo* info) {
    Reader r(read_text_file(path), path);
    CheckpointInfo header = read_header(r);
    if (header.kind != "gkae") throw DataError("checkpoint kind is not gkae: " + path);
    if (info) *info = header;
    GkaeModel model;
    model.meta.node_count = static_cast<int>(parse_long(r.value("gkae.node_count"), "node_count"));
    model.meta.embedding_dim =
        static_cast<int>(parse_long(r.value("gkae.embedding_dim"), "embedding_dim"));
    model.meta.horizon = static_cast<int>(parse_long(r.value("gkae.horizon"), "horizon"));
    model.meta.affinity_scale = parse_double(r.value("gkae.affinity_scale"), "affinity_scale");
    model.meta.binary_adjacency =
        parse_long(r.value("gkae.binary_adjacency"), "binary_adjacency") != 0;
    model.meta.initial_loss = parse_double(r.value("gkae.initial_loss"), "initial_loss");
    model.meta.final_loss = parse_double(r.value("gkae.final_loss"), "final_loss");
    model.normalizer = r.normalizer();
    model.graph_encoder.resize(2);
    model.graph_encoder[0].weight = r.tensor2("graph_encoder.0.weight");
    model.graph_encoder[0].bias = r.tensor1("graph_encoder.0.bias");
    model.graph_encoder[0].activation = nn::Activation::Tanh;
    model.graph_encoder[1].weight = r.tensor2("graph_encoder.1.weight");
    model.graph_encoder[1].bias = r.tensor1("graph_encoder.1.bias");
    model.graph_encoder[1].activation = nn::Activation::Identity;
    model.kae = r.kae_body();
    model.graph_decoder = r.mlp("graph_decoder");
    model.meta.latent_dim = static_cast<int>(model.kae.koopman.rows());
    return model;
}

void save_kae(const KaeModel& model, const std::string& path, std::uint64_t dataset_hash,
              std::uint64_t model_hash) {
    write_text_file(path, serialize_kae(model, dataset_hash, model_hash));
}

void save_gkae(const GkaeModel& model, const std::string& path, std::uint64_t dataset_hash,
               std::uint64_t model_hash) {
    write_text_file(path, serialize_gkae(model, dataset_hash, model_hash));
}

}  // namespace fanetkoop
