#include "effortlab/neural.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "effortlab/errors.hpp"
#include "effortlab/format.hpp"

namespace effortlab::nn {

namespace {

void append_matrix(std::string& out, const char* tag, int layer, const Matrix& m) {
    out += tag;
    out += ' ';
    out += std::to_string(layer);
    out += ' ';
    out += std::to_string(m.rows);
    out += ' ';
    out += std::to_string(m.cols);
    out += '\n';
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
            if (c > 0) out += ' ';
            out += format_double(m.at(r, c));
        }
        out += '\n';
    }
}

} // namespace

std::string serialize_model(const TrainedNetwork& net) {
    std::string out;
    out += "effortlab-model 1\n";
    out += "kind ";
    out += kind_name(net.spec.kind);
    out += "\nhidden";
    for (int width : net.spec.hidden) {
        out += ' ';
        out += std::to_string(width);
    }
    out += "\nseed ";
    out += std::to_string(net.seed);
    out += "\nfeatures ";
    for (std::size_t i = 0; i < net.norm.features.size(); ++i) {
        if (i > 0) out += ',';
        out += feature_name(net.norm.features[i]);
    }
    out += '\n';
    for (std::size_t i = 0; i < net.norm.features.size(); ++i) {
        out += "feature_range ";
        out += feature_name(net.norm.features[i]);
        out += ' ';
        out += format_double(net.norm.feature_ranges[i].lo);
        out += ' ';
        out += format_double(net.norm.feature_ranges[i].hi);
        out += '\n';
    }
    out += "target_range ";
    out += format_double(net.norm.target_range.lo);
    out += ' ';
    out += format_double(net.norm.target_range.hi);
    out += '\n';

    for (int l = 0; l < net.layer_count(); ++l) {
        append_matrix(out, "weights", l, net.weights[l]);
        out += "bias " + std::to_string(l) + ' ' +
               std::to_string(net.biases[l].size()) + '\n';
        for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
            if (i > 0) out += ' ';
            out += format_double(net.biases[l][i]);
        }
        out += '\n';
    }
    for (std::size_t i = 0; i < net.skips.size(); ++i) {
        append_matrix(out, "skip", static_cast<int>(i) + 1, net.skips[i]);
    }
    for (std::size_t i = 0; i < net.contexts.size(); ++i) {
        append_matrix(out, "context", static_cast<int>(i), net.contexts[i]);
    }
    out += "end\n";
    return out;
}

namespace {

/// Model text reader: hands out meaningful lines one at a time and reports
/// errors with the line they came from.
class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    // Next non-blank, non-comment line, or nullopt at end of input.
    std::optional<std::string> next() {
        while (pos_ < text_.size()) {
            std::size_t eol = text_.find('\n', pos_);
            if (eol == std::string_view::npos) eol = text_.size();
            std::string line(text_.substr(pos_, eol - pos_));
            pos_ = eol + 1;
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const std::size_t first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            return line;
        }
        return std::nullopt;
    }

    std::string expect(const std::string& what) {
        std::optional<std::string> line = next();
        if (!line) {
            throw ParseError("unexpected end of model file, expected " + what,
                             line_no_ + 1);
        }
        return *line;
    }

    int line_no() const { return line_no_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_no_ = 0;
};

std::vector<std::string> split_words(const std::string& line) {
    std::vector<std::string> words;
    std::istringstream in(line);
    std::string word;
    while (in >> word) words.push_back(word);
    return words;
}

double model_double(const std::string& token, const char* what, int line_no) {
    try {
        return parse_double(token, what);
    } catch (const ValidationError& e) {
        throw ParseError(e.what(), line_no);
    }
}

int model_int(const std::string& token, const char* what, int line_no) {
    int value = 0;
    const auto [ptr, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw ParseError(std::string("expected integer ") + what + ", got \"" +
                         token + "\"", line_no);
    }
    return value;
}

// "<tag> <layer> <rows> <cols>" header plus `rows` lines of `cols` values.
Matrix read_matrix(LineReader& reader, const char* tag, int expect_layer,
                   int expect_rows, int expect_cols) {
    const std::string header = reader.expect(std::string(tag) + " block");
    const std::vector<std::string> words = split_words(header);
    if (words.size() != 4 || words[0] != tag) {
        throw ParseError("expected \"" + std::string(tag) + " " +
                         std::to_string(expect_layer) + " " +
                         std::to_string(expect_rows) + " " +
                         std::to_string(expect_cols) + "\", got \"" + header + "\"",
                         reader.line_no());
    }
    const int layer = model_int(words[1], "layer", reader.line_no());
    const int rows = model_int(words[2], "rows", reader.line_no());
    const int cols = model_int(words[3], "cols", reader.line_no());
    if (layer != expect_layer || rows != expect_rows || cols != expect_cols) {
        throw ParseError("block \"" + header + "\" does not match the declared " +
                         "architecture (expected layer " +
                         std::to_string(expect_layer) + ", " +
                         std::to_string(expect_rows) + "x" +
                         std::to_string(expect_cols) + ")",
                         reader.line_no());
    }
    Matrix m = Matrix::zeros(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const std::string row = reader.expect("matrix row");
        const std::vector<std::string> values = split_words(row);
        if (static_cast<int>(values.size()) != cols) {
            throw ParseError("expected " + std::to_string(cols) +
                             " values in matrix row, got " +
                             std::to_string(values.size()), reader.line_no());
        }
        for (int c = 0; c < cols; ++c) {
            m.at(r, c) = model_double(values[c], "matrix entry", reader.line_no());
        }
    }
    return m;
}

} // namespace

TrainedNetwork parse_model(std::string_view text) {
    LineReader reader(text);

    std::string line = reader.expect("header");
    if (line != "effortlab-model 1") {
        throw ParseError("expected \"effortlab-model 1\" header, got \"" + line + "\"",
                         reader.line_no());
    }

    TrainedNetwork net;

    line = reader.expect("kind");
    std::vector<std::string> words = split_words(line);
    if (words.size() != 2 || words[0] != "kind") {
        throw ParseError("expected \"kind <name>\", got \"" + line + "\"",
                         reader.line_no());
    }
    const std::optional<NetworkKind> kind = kind_from_name(words[1]);
    if (!kind) {
        throw ParseError("unknown network kind \"" + words[1] + "\"", reader.line_no());
    }
    net.spec.kind = *kind;

    line = reader.expect("hidden widths");
    words = split_words(line);
    if (words.size() < 2 || words[0] != "hidden") {
        throw ParseError("expected \"hidden <w>...\", got \"" + line + "\"",
                         reader.line_no());
    }
    net.spec.hidden.clear();
    for (std::size_t i = 1; i < words.size(); ++i) {
        net.spec.hidden.push_back(model_int(words[i], "hidden width", reader.line_no()));
    }

    line = reader.expect("seed");
    words = split_words(line);
    if (words.size() != 2 || words[0] != "seed") {
        throw ParseError("expected \"seed <n>\", got \"" + line + "\"", reader.line_no());
    }
    {
        std::uint64_t seed = 0;
        const std::string& tok = words[1];
        const auto [ptr, ec] =
            std::from_chars(tok.data(), tok.data() + tok.size(), seed);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            throw ParseError("expected unsigned integer seed, got \"" + tok + "\"",
                             reader.line_no());
        }
        net.seed = seed;
    }

    line = reader.expect("feature list");
    words = split_words(line);
    if (words.size() != 2 || words[0] != "features") {
        throw ParseError("expected \"features <f,...>\", got \"" + line + "\"",
                         reader.line_no());
    }
    {
        std::istringstream in(words[1]);
        std::string name;
        while (std::getline(in, name, ',')) {
            const std::optional<Feature> f = feature_from_name(name);
            if (!f) {
                throw ParseError("unknown feature \"" + name + "\"", reader.line_no());
            }
            net.norm.features.push_back(*f);
        }
    }
    if (net.norm.features.empty()) {
        throw ParseError("feature list is empty", reader.line_no());
    }
    net.spec.input_width = static_cast<int>(net.norm.features.size());

    for (const Feature feature : net.norm.features) {
        line = reader.expect("feature_range");
        words = split_words(line);
        if (words.size() != 4 || words[0] != "feature_range" ||
            words[1] != feature_name(feature)) {
            throw ParseError("expected \"feature_range " +
                             std::string(feature_name(feature)) + " <lo> <hi>\", got \"" +
                             line + "\"", reader.line_no());
        }
        Range range;
        range.lo = model_double(words[2], "range low", reader.line_no());
        range.hi = model_double(words[3], "range high", reader.line_no());
        net.norm.feature_ranges.push_back(range);
    }

    line = reader.expect("target_range");
    words = split_words(line);
    if (words.size() != 3 || words[0] != "target_range") {
        throw ParseError("expected \"target_range <lo> <hi>\", got \"" + line + "\"",
                         reader.line_no());
    }
    net.norm.target_range.lo = model_double(words[1], "range low", reader.line_no());
    net.norm.target_range.hi = model_double(words[2], "range high", reader.line_no());

    validate(net.spec);

    for (int l = 0; l < net.layer_count(); ++l) {
        net.weights.push_back(read_matrix(reader, "weights", l, net.layer_width(l),
                                          net.layer_input_width(l)));
        line = reader.expect("bias block");
        words = split_words(line);
        const int width = net.layer_width(l);
        if (words.size() != 3 || words[0] != "bias" ||
            model_int(words[1], "layer", reader.line_no()) != l ||
            model_int(words[2], "size", reader.line_no()) != width) {
            throw ParseError("expected \"bias " + std::to_string(l) + " " +
                             std::to_string(width) + "\", got \"" + line + "\"",
                             reader.line_no());
        }
        line = reader.expect("bias values");
        words = split_words(line);
        if (static_cast<int>(words.size()) != width) {
            throw ParseError("expected " + std::to_string(width) + " bias values, got " +
                             std::to_string(words.size()), reader.line_no());
        }
        std::vector<double> bias(width);
        for (int i = 0; i < width; ++i) {
            bias[i] = model_double(words[i], "bias value", reader.line_no());
        }
        net.biases.push_back(std::move(bias));
    }

    if (net.spec.kind == NetworkKind::Cascade) {
        for (int l = 1; l < net.layer_count(); ++l) {
            net.skips.push_back(read_matrix(reader, "skip", l, net.layer_width(l),
                                            net.spec.input_width));
        }
    }
    const int context_layers =
        net.spec.kind == NetworkKind::Elman ? 1
        : net.spec.kind == NetworkKind::LayerRecurrent
            ? static_cast<int>(net.spec.hidden.size())
            : 0;
    for (int l = 0; l < context_layers; ++l) {
        net.contexts.push_back(read_matrix(reader, "context", l, net.layer_width(l),
                                           net.layer_width(l)));
    }

    line = reader.expect("\"end\"");
    if (line != "end") {
        throw ParseError("expected \"end\", got \"" + line + "\"", reader.line_no());
    }
    if (std::optional<std::string> extra = reader.next()) {
        throw ParseError("unexpected content after \"end\": \"" + *extra + "\"",
                         reader.line_no());
    }
    return net;
}

void save_model(const TrainedNetwork& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open \"" + path + "\" for writing");
    }
    out << serialize_model(net);
    if (!out.flush()) {
        throw Error("failed writing model to \"" + path + "\"");
    }
}

TrainedNetwork load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open model file \"" + path + "\"");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_model(buffer.str());
}

} // namespace effortlab::nn
