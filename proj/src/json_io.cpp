#include "factored/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace factored {

namespace {

std::vector<double> as_double_vector(const nlohmann::json& j, const char* key) {
    if (!j.is_array() || j.empty()) {
        throw Error(ErrorCode::BadParameter,
                    std::string("instance: \"") + key + "\" must be a non-empty array");
    }
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) {
            throw Error(ErrorCode::BadParameter,
                        std::string("instance: \"") + key + "\" must contain numbers");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

std::vector<Gmm1D> parse_instance_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadParameter, std::string("instance: ") + e.what());
    }
    if (!doc.is_array()) {
        throw Error(ErrorCode::BadParameter,
                    "instance: top-level document must be an array of factors");
    }
    std::vector<Gmm1D> factors;
    factors.reserve(doc.size());
    for (const auto& f : doc) {
        if (!f.is_object() || !f.contains("weights") || !f.contains("means") ||
            !f.contains("variances")) {
            throw Error(ErrorCode::BadParameter,
                        "instance: each factor needs \"weights\", \"means\", \"variances\"");
        }
        factors.emplace_back(as_double_vector(f["weights"], "weights"),
                             as_double_vector(f["means"], "means"),
                             as_double_vector(f["variances"], "variances"));
    }
    return factors;
}

std::vector<Gmm1D> load_instance(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) {
        throw Error(ErrorCode::BadParameter, "instance: cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_instance_json(buf.str());
}

std::string instance_to_json(const std::vector<Gmm1D>& factors) {
    nlohmann::json doc = nlohmann::json::array();
    for (const Gmm1D& f : factors) {
        doc.push_back(nlohmann::json{{"weights", f.weights()},
                                     {"means", f.means()},
                                     {"variances", f.variances()}});
    }
    return doc.dump(2) + "\n";
}

void save_instance(const std::filesystem::path& path, const std::vector<Gmm1D>& factors) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) {
        throw Error(ErrorCode::BadParameter, "instance: cannot write " + path.string());
    }
    f << instance_to_json(factors);
}

}  // namespace factored
