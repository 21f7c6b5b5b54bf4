#include "cdac/table_io.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "cdac/errors.hpp"

namespace cdac {

namespace {

constexpr char kMagic[8] = {'C', 'D', 'A', 'C', 'T', 'B', 'L', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T take(std::istream& in, const std::string& path) {
    T value;
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw ConfigError("truncated table file: " + path);
    return value;
}

} // namespace

void save_solved(const SolvedPolicy& solved, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + path);

    out.write(kMagic, sizeof(kMagic));
    put(out, kVersion);
    put<std::uint8_t>(out, solved.model.kind == "peripheral" ? 1 : 0);
    put<std::uint8_t>(out, solved.model.stop_rule == StopRule::declare_best ? 1 : 0);
    put<std::uint32_t>(out, solved.model.k);
    put<std::uint32_t>(out, solved.grid->resolution());
    put<std::uint32_t>(out, solved.model.num_actions);
    put<std::uint32_t>(out, solved.model.num_obs);
    put<std::uint32_t>(out, solved.sweeps);
    put(out, solved.costs.c);
    put(out, solved.costs.cs);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(solved.model.betas.size()));
    for (Eigen::Index i = 0; i < solved.model.betas.size(); ++i) {
        put(out, solved.model.betas[i]);
    }
    const std::uint64_t cells = solved.grid->cell_count();
    put(out, cells);
    const auto& v = solved.values.v;
    const auto& code = solved.policy.code;
    for (std::uint64_t cell = 0; cell < cells; ++cell) {
        for (int a = 0; a < solved.model.num_actions; ++a) {
            put(out, v(cell, a));
        }
    }
    for (std::uint64_t cell = 0; cell < cells; ++cell) {
        for (int a = 0; a < solved.model.num_actions; ++a) {
            put(out, code(cell, a));
        }
    }
    if (!out) throw ConfigError("write failed: " + path);
}

SolvedPolicy load_solved(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open table file: " + path);

    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ConfigError("not a table file (bad magic): " + path);
    }
    const auto version = take<std::uint32_t>(in, path);
    if (version != kVersion) {
        throw ConfigError("unsupported table format version " + std::to_string(version) +
                          ": " + path);
    }
    const auto kind = take<std::uint8_t>(in, path);
    const auto rule = take<std::uint8_t>(in, path);
    const auto k = take<std::uint32_t>(in, path);
    const auto grid_n = take<std::uint32_t>(in, path);
    const auto num_actions = take<std::uint32_t>(in, path);
    const auto num_obs = take<std::uint32_t>(in, path);
    const auto sweeps = take<std::uint32_t>(in, path);
    const double c = take<double>(in, path);
    const double cs = take<double>(in, path);
    const auto beta_count = take<std::uint32_t>(in, path);
    Eigen::VectorXd betas(beta_count);
    for (std::uint32_t i = 0; i < beta_count; ++i) {
        betas[i] = take<double>(in, path);
    }

    TaskModel model;
    if (kind == 0) {
        if (beta_count != 1) throw ConfigError("simple-task table needs 1 beta: " + path);
        model = SimpleTaskModel(betas[0]).build();
    } else if (kind == 1) {
        if (beta_count != 4) throw ConfigError("peripheral-task table needs 4 betas: " + path);
        model = PeripheralTaskModel(Eigen::Vector4d(betas)).build();
    } else {
        throw ConfigError("unknown task kind in table header: " + path);
    }
    if (model.k != static_cast<int>(k) || model.num_actions != static_cast<int>(num_actions) ||
        model.num_obs != static_cast<int>(num_obs) ||
        (model.stop_rule == StopRule::declare_best) != (rule == 1)) {
        throw ConfigError("table header is inconsistent with its task kind: " + path);
    }

    auto grid = std::make_shared<const SimplexGrid>(static_cast<int>(k),
                                                    static_cast<int>(grid_n));
    const auto cells = take<std::uint64_t>(in, path);
    if (cells != static_cast<std::uint64_t>(grid->cell_count())) {
        throw ConfigError("table cell count does not match its grid resolution: " + path);
    }

    ValueTable values;
    values.v.resize(static_cast<Eigen::Index>(cells), model.num_actions);
    for (std::uint64_t cell = 0; cell < cells; ++cell) {
        for (int a = 0; a < model.num_actions; ++a) {
            values.v(cell, a) = take<double>(in, path);
        }
    }
    PolicyTable policy;
    policy.code.resize(static_cast<Eigen::Index>(cells), model.num_actions);
    for (std::uint64_t cell = 0; cell < cells; ++cell) {
        for (int a = 0; a < model.num_actions; ++a) {
            policy.code(cell, a) = take<std::int16_t>(in, path);
        }
    }

    return SolvedPolicy{std::move(grid), std::move(model), CostParams(c, cs),
                        std::move(values), std::move(policy), static_cast<int>(sweeps)};
}

void check_table_matches(const SolvedPolicy& solved, const TaskModel& model,
                         const CostParams& costs, int grid_n) {
    if (solved.model.kind != model.kind) {
        throw ConfigError("table task kind '" + solved.model.kind +
                          "' does not match requested '" + model.kind + "'");
    }
    if (solved.grid->resolution() != grid_n) {
        throw ConfigError("table grid resolution " +
                          std::to_string(solved.grid->resolution()) +
                          " does not match requested " + std::to_string(grid_n));
    }
    if (solved.costs.c != costs.c || solved.costs.cs != costs.cs) {
        throw ConfigError("table cost parameters do not match the requested environment");
    }
    if (solved.model.betas.size() != model.betas.size() ||
        solved.model.betas != model.betas) {
        throw ConfigError("table beta parameters do not match the requested environment");
    }
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows) {
    const auto r = rows.size();
    if (r == 0) return Eigen::MatrixXd(0, 0);
    const auto c = rows[0].size();
    Eigen::MatrixXd m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw ConfigError("ragged matrix in representation file");
        for (std::size_t j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
    return v;
}

} // namespace

void save_representation_json(const ApproxResult& result, const std::string& path) {
    nlohmann::json doc;
    doc["format"] = "cdac-approx-v1";
    doc["iterations"] = result.iterations;
    doc["final_change"] = result.final_change;
    if (result.method == ApproxMethod::rbf) {
        doc["method"] = "rbf";
        doc["rbf"] = {{"sigma", result.rbf.sigma},
                      {"centers", matrix_to_json(result.rbf.centers)},
                      {"weights", matrix_to_json(result.rbf.weights)}};
    } else {
        doc["method"] = result.method == ApproxMethod::gpr ? "gpr" : "gpr-ard";
        nlohmann::json models = nlohmann::json::array();
        for (const auto& g : result.gpr) {
            models.push_back({{"signal", g.hp.signal},
                              {"length", vector_to_json(g.hp.length)},
                              {"noise", g.hp.noise},
                              {"points", matrix_to_json(g.train)},
                              {"targets", vector_to_json(g.targets)}});
        }
        doc["gpr"] = std::move(models);
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw ConfigError("write failed: " + path);
}

ApproxResult load_representation_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open representation file: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad representation file: ") + e.what());
    }
    if (doc.value("format", "") != "cdac-approx-v1") {
        throw ConfigError("unsupported representation format in " + path);
    }
    ApproxResult result;
    result.iterations = doc.value("iterations", 0);
    result.final_change = doc.value("final_change", 0.0);
    const std::string method = doc.value("method", "");
    try {
        if (method == "rbf") {
            result.method = ApproxMethod::rbf;
            result.rbf.sigma = doc["rbf"]["sigma"].get<double>();
            result.rbf.centers = matrix_from_json(doc["rbf"]["centers"]);
            result.rbf.weights = matrix_from_json(doc["rbf"]["weights"]);
        } else if (method == "gpr" || method == "gpr-ard") {
            result.method = method == "gpr" ? ApproxMethod::gpr : ApproxMethod::gpr_ard;
            for (const auto& g : doc["gpr"]) {
                GprHyperparams hp;
                hp.signal = g["signal"].get<double>();
                hp.length = vector_from_json(g["length"]);
                hp.noise = g["noise"].get<double>();
                result.gpr.push_back(
                    gpr_fit(matrix_from_json(g["points"]), vector_from_json(g["targets"]), hp));
            }
        } else {
            throw ConfigError("unknown representation method '" + method + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad representation file: ") + e.what());
    }
    return result;
}

} // namespace cdac
