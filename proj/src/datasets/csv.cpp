#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "infobatch/dataset.hpp"
#include "infobatch/errors.hpp"

namespace infobatch {

namespace {

std::string sha256_hex(std::string_view content) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(content.data(), content.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 digest failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
    return out.str();
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    if (text.empty()) return false;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

[[noreturn]] void cell_error(std::size_t row, std::string_view column, std::string_view cell, const char* what) {
    throw InvalidArgument("csv: row " + std::to_string(row) + ", column " + std::string(column) + ": " + what +
                          " '" + std::string(cell) + "'");
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    if (schema.feature_columns.empty()) throw InvalidArgument("csv: schema lists no feature columns");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("csv: cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string content = buffer.str();
    if (content.empty()) throw InvalidArgument("csv: file is empty: " + path.string());

    std::vector<std::string_view> lines;
    {
        std::string_view rest = content;
        while (!rest.empty()) {
            const std::size_t nl = rest.find('\n');
            const std::string_view line = rest.substr(0, nl);
            if (!trim(line).empty()) lines.push_back(line);
            if (nl == std::string_view::npos) break;
            rest.remove_prefix(nl + 1);
        }
    }
    if (lines.empty()) throw InvalidArgument("csv: file is empty: " + path.string());

    const auto header = split_fields(lines.front());
    const auto column_index = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw InvalidArgument("csv: missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    std::vector<std::size_t> feature_idx;
    for (const auto& name : schema.feature_columns) feature_idx.push_back(column_index(name));
    const std::size_t label_idx = column_index(schema.label_column);

    const std::size_t n = lines.size() - 1;
    if (n == 0) throw InvalidArgument("csv: no data rows in " + path.string());
    const std::size_t d = feature_idx.size();

    Dataset data;
    data.label_kind = schema.label_kind;
    data.features = Matrix(n, d);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t row_no = r + 1;
        const auto fields = split_fields(lines[r + 1]);
        if (fields.size() != header.size()) {
            throw InvalidArgument("csv: row " + std::to_string(row_no) + " has " + std::to_string(fields.size()) +
                                  " fields, header has " + std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < d; ++j) {
            const auto cell = fields[feature_idx[j]];
            double v = 0.0;
            if (!parse_number(cell, v)) cell_error(row_no, schema.feature_columns[j], cell, "cannot parse");
            if (!std::isfinite(v)) cell_error(row_no, schema.feature_columns[j], cell, "non-finite value");
            data.features(r, j) = v;
        }
        const auto cell = fields[label_idx];
        if (schema.label_kind == LabelKind::classification) {
            int c = 0;
            if (!parse_number(cell, c) || c < 0) cell_error(row_no, schema.label_column, cell, "invalid class label");
            data.classes.push_back(c);
            data.num_classes = std::max(data.num_classes, static_cast<std::size_t>(c) + 1);
        } else {
            double t = 0.0;
            if (!parse_number(cell, t) || !std::isfinite(t)) {
                cell_error(row_no, schema.label_column, cell, "invalid target");
            }
            data.targets.push_back(t);
        }
    }
    data.provenance = {{"source", "csv"},
                       {"path", path.string()},
                       {"sha256", sha256_hex(content)},
                       {"features", schema.feature_columns},
                       {"label", schema.label_column},
                       {"label_kind", to_string(schema.label_kind)},
                       {"standardized", false}};
    return data;
}

void write_csv(const std::filesystem::path& path, const Dataset& data, std::span<const std::string> feature_names,
               const std::string& label_name) {
    if (feature_names.size() != data.dim()) throw InvalidArgument("write_csv: one name per feature column required");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("write_csv: cannot open " + path.string());
    for (const auto& name : feature_names) out << name << ',';
    out << label_name << '\n';
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (const double v : data.features.row(r)) out << format_double(v) << ',';
        if (data.label_kind == LabelKind::classification) {
            out << data.classes[r];
        } else {
            out << format_double(data.targets[r]);
        }
        out << '\n';
    }
}

}  // namespace infobatch
