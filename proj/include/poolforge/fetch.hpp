#pragma once

/// @file fetch.hpp
/// @brief Built-in catalog of public benchmark datasets and a downloader that
/// converts them to the canonical CSV layout.
///
/// Requires libcurl and OpenSSL (libcrypto) at link time.

#include <poolforge/core.hpp>
#include <poolforge/dataset.hpp>

#include <curl/curl.h>
#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace poolforge {

/// How to turn one raw source file into a Dataset.
struct SourceRecipe {
    std::string url;
    /// ',' for comma-separated, ' ' for runs of whitespace.
    char separator = ',';
    /// Zero-based label column; -1 means the last column.
    int label_column = -1;
    std::vector<int> drop_columns;
    bool has_header = false;
    /// Expected SHA-256 of the raw file (lowercase hex); empty skips the check.
    std::string sha256;
    /// Number of feature columns after conversion.
    std::size_t features = 0;
};

struct CatalogEntry {
    std::string id;
    std::size_t rows = 0;
    std::size_t classes = 0;
    SourceRecipe primary;
    /// Headerless, label-last mirror copy looked up as `<mirror>/<id>.dat`.
    std::optional<SourceRecipe> mirror;
};

inline const std::vector<CatalogEntry>& dataset_catalog() {
    static const std::string uci = "https://archive.ics.uci.edu/ml/machine-learning-databases/";
    auto keel = [](std::string sha, std::size_t f) {
        return SourceRecipe{"", ',', -1, {}, false, std::move(sha), f};
    };
    static const std::vector<CatalogEntry> catalog = {
        {"australian", 690, 2, {uci + "statlog/australian/australian.dat", ' ', -1, {}, false, "", 14},
         keel("ccc64bf31674bc1c282e11f9ba2bb3c5777ca15f03e3d96142ed0817bf7fedce", 14)},
        {"blood", 748, 2, {uci + "blood-transfusion/transfusion.data", ',', -1, {}, true, "", 4}, std::nullopt},
        {"diabetes", 768, 2,
         {"https://raw.githubusercontent.com/jbrownlee/Datasets/master/pima-indians-diabetes.data.csv", ',', -1, {},
          false, "", 8},
         keel("8c47d6392aa12d154ed5c34ee8c98fe7827d8554d04a4ffec1fafd75741e24fd", 8)},
        {"haberman", 306, 2, {uci + "haberman/haberman.data", ',', -1, {}, false, "", 3}, std::nullopt},
        {"heart", 270, 2, {uci + "statlog/heart/heart.dat", ' ', -1, {}, false, "", 13},
         keel("0a9bffc81e612f8c5aae79cfe9414b58daf2e8fa8c21e67c4c80eb0883108ad6", 13)},
        {"ionosphere", 351, 2, {uci + "ionosphere/ionosphere.data", ',', -1, {}, false, "", 34},
         keel("3364c4a0d45072f195b7eab510f3ed27882e0c7a14fe15fd4bf982a4bd8143e4", 33)},
        {"liver", 345, 2, {uci + "liver-disorders/bupa.data", ',', -1, {}, false, "", 6}, std::nullopt},
        {"sonar", 208, 2,
         {uci + "undocumented/connectionist-bench/sonar/sonar.all-data", ',', -1, {}, false, "", 60},
         keel("3db22f5ece13d019e43617217524f1072b1eae5275c69040517b784c52427b0d", 60)},
        {"wdbc", 569, 2, {uci + "breast-cancer-wisconsin/wdbc.data", ',', 1, {0}, false, "", 30},
         keel("f47612e4ffcd253ddf456474c584eb1f39d07e998b96fc7193a23e7b7d26b611", 30)},
        {"wine", 178, 3, {uci + "wine/wine.data", ',', 0, {}, false, "", 13},
         keel("33ff747cf181064ecc0933228c29cad7194d68d09a71355b3072072bbf4e0878", 13)},
    };
    return catalog;
}

inline const CatalogEntry& catalog_entry(const std::string& id) {
    for (const auto& e : dataset_catalog())
        if (e.id == id) return e;
    throw ArgumentError("unknown dataset id '" + id + "' (not in the built-in catalog)");
}

inline std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw RuntimeFailure("SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

/// Download a URL into memory. file:// URLs are read directly.
inline std::string http_get(const std::string& url) {
    if (url.rfind("file://", 0) == 0) return read_file(url.substr(7));
    static const bool init = [] { return curl_global_init(CURL_GLOBAL_DEFAULT) == CURLE_OK; }();
    if (!init) throw RuntimeFailure("libcurl initialisation failed");
    std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> h(curl_easy_init(), &curl_easy_cleanup);
    if (!h) throw RuntimeFailure("libcurl handle allocation failed");
    std::string body;
    auto sink = +[](char* ptr, std::size_t size, std::size_t nmemb, void* user) -> std::size_t {
        static_cast<std::string*>(user)->append(ptr, size * nmemb);
        return size * nmemb;
    };
    curl_easy_setopt(h.get(), CURLOPT_URL, url.c_str());
    curl_easy_setopt(h.get(), CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(h.get(), CURLOPT_WRITEFUNCTION, sink);
    curl_easy_setopt(h.get(), CURLOPT_WRITEDATA, &body);
    curl_easy_setopt(h.get(), CURLOPT_CONNECTTIMEOUT, 20L);
    curl_easy_setopt(h.get(), CURLOPT_TIMEOUT, 120L);
    curl_easy_setopt(h.get(), CURLOPT_FAILONERROR, 1L);
    const CURLcode rc = curl_easy_perform(h.get());
    if (rc != CURLE_OK) throw RuntimeFailure("download of " + url + " failed: " + curl_easy_strerror(rc));
    return body;
}

/// Convert a raw source file per its recipe. Lines starting with '@' (ARFF
/// style headers) are ignored, as are rows with missing values.
inline Dataset convert_raw(std::string_view raw, const SourceRecipe& recipe, const std::string& name) {
    Dataset d;
    d.name = name;
    std::map<std::string, int, std::less<>> codes;
    bool header_pending = recipe.has_header;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < raw.size()) {
        std::size_t eol = raw.find('\n', pos);
        if (eol == std::string_view::npos) eol = raw.size();
        std::string_view line = detail::trim(raw.substr(pos, eol - pos));
        pos = eol + 1;
        ++line_no;
        if (line.empty() || line.front() == '@' || line.front() == '%') continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        std::vector<std::string_view> fields;
        if (recipe.separator == ' ') {
            std::size_t s = 0;
            while (s < line.size()) {
                while (s < line.size() && (line[s] == ' ' || line[s] == '\t')) ++s;
                std::size_t e = s;
                while (e < line.size() && line[e] != ' ' && line[e] != '\t') ++e;
                if (e > s) fields.push_back(line.substr(s, e - s));
                s = e;
            }
        } else {
            fields = detail::split_fields(line, recipe.separator);
        }
        const std::size_t label_idx =
            recipe.label_column < 0 ? fields.size() - 1 : static_cast<std::size_t>(recipe.label_column);
        if (label_idx >= fields.size())
            throw DataError(name + " line " + std::to_string(line_no) + ": label column out of range");
        if (std::any_of(fields.begin(), fields.end(), detail::is_missing)) {
            ++d.dropped_rows;
            continue;
        }
        std::size_t nf = 0;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c == label_idx) continue;
            if (std::find(recipe.drop_columns.begin(), recipe.drop_columns.end(), static_cast<int>(c)) !=
                recipe.drop_columns.end())
                continue;
            auto v = detail::parse_double(fields[c]);
            if (!v || !std::isfinite(*v))
                throw DataError(name + " line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                                ": not a finite number");
            d.features.push_back(*v);
            ++nf;
        }
        if (d.n_features == 0) {
            d.n_features = nf;
        } else if (nf != d.n_features) {
            throw DataError(name + " line " + std::to_string(line_no) + ": inconsistent column count");
        }
        const std::string_view lab = fields[label_idx];
        auto it = codes.find(lab);
        if (it == codes.end()) {
            it = codes.emplace(std::string(lab), static_cast<int>(d.class_names.size())).first;
            d.class_names.emplace_back(lab);
        }
        d.labels.push_back(it->second);
    }
    for (std::size_t j = 0; j < d.n_features; ++j) d.feature_names.push_back("f" + std::to_string(j));
    d.validate();
    return d;
}

struct FetchResult {
    std::string path;
    std::string source;
    std::string sha256;
    std::size_t rows = 0;
    std::size_t features = 0;
    std::size_t classes = 0;
};

/// Fetch a catalog dataset into `dest_dir/<id>.csv`.
///
/// With a mirror directory, `<mirror>/<id>.dat` is used when present instead
/// of the network. The converted shape is checked against the catalog, and
/// the raw checksum is checked whenever the catalog pins one.
inline FetchResult fetch_dataset(const std::string& id, const std::string& dest_dir,
                                 const std::string& mirror_dir = "") {
    const CatalogEntry& entry = catalog_entry(id);
    const SourceRecipe* recipe = &entry.primary;
    std::string source = entry.primary.url;
    std::string raw;
    if (!mirror_dir.empty() && entry.mirror) {
        const auto local = std::filesystem::path(mirror_dir) / (id + ".dat");
        if (std::filesystem::exists(local)) {
            recipe = &*entry.mirror;
            source = "file://" + local.string();
        }
    }
    raw = http_get(source);

    FetchResult r;
    r.source = source;
    r.sha256 = sha256_hex(raw);
    if (!recipe->sha256.empty() && recipe->sha256 != r.sha256)
        throw DataError("checksum mismatch for '" + id + "': expected " + recipe->sha256 + ", got " + r.sha256);
    Dataset d = convert_raw(raw, *recipe, id);
    if (d.size() != entry.rows || d.n_features != recipe->features || d.num_classes() != entry.classes)
        throw DataError("shape mismatch for '" + id + "': got " + std::to_string(d.size()) + "x" +
                        std::to_string(d.n_features) + " with " + std::to_string(d.num_classes()) +
                        " classes, catalog says " + std::to_string(entry.rows) + "x" +
                        std::to_string(recipe->features) + " with " + std::to_string(entry.classes));
    std::filesystem::create_directories(dest_dir);
    r.path = (std::filesystem::path(dest_dir) / (id + ".csv")).string();
    write_csv(d, r.path);
    r.rows = d.size();
    r.features = d.n_features;
    r.classes = d.num_classes();
    return r;
}

}  // namespace poolforge
