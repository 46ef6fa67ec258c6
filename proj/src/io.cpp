#include "multinet/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace multinet::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_cell(const std::string& cell, const fs::path& file, size_t row, size_t col) {
    double v = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    while (ptr != end && (*ptr == ' ' || *ptr == '\t')) ++ptr;
    if (ec != std::errc() || ptr != end)
        throw ValidationError("csv: non-numeric cell '" + cell + "' in " + file.string() +
                              " at row " + std::to_string(row) + ", column " + std::to_string(col));
    return v;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw ValidationError("cannot open for writing: " + path.string());
    return f;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open for reading: " + path.string());
    return f;
}

} // namespace

MultiNetworkSample load_sample(const std::vector<fs::path>& paths, bool center) {
    if (paths.empty()) throw ValidationError("load_sample: no files given");
    std::vector<Matrix> X;
    std::vector<std::string> header;
    for (const auto& path : paths) {
        auto f = open_in(path);
        std::string line;
        if (!std::getline(f, line))
            throw ValidationError("csv: empty file " + path.string());
        const auto names = split_csv_line(line);
        if (header.empty())
            header = names;
        else if (names != header)
            throw ValidationError("csv: header of " + path.string() +
                                  " does not match the first file");

        std::vector<std::vector<double>> rows;
        size_t rowno = 1;
        while (std::getline(f, line)) {
            ++rowno;
            if (line.empty()) continue;
            const auto cells = split_csv_line(line);
            if (cells.size() != header.size())
                throw ValidationError("csv: row " + std::to_string(rowno) + " of " + path.string() +
                                      " has " + std::to_string(cells.size()) + " cells, expected " +
                                      std::to_string(header.size()));
            std::vector<double> row(cells.size());
            for (size_t c = 0; c < cells.size(); ++c) row[c] = parse_cell(cells[c], path, rowno, c + 1);
            rows.push_back(std::move(row));
        }
        if (rows.size() < 2)
            throw ValidationError("csv: " + path.string() + " has fewer than 2 data rows");
        Matrix m(rows.size(), header.size());
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = 0; j < header.size(); ++j) m(i, j) = rows[i][j];
        if (center) m.rowwise() -= m.colwise().mean();
        X.push_back(std::move(m));
    }
    return make_sample(std::move(X), header);
}

std::vector<fs::path> save_sample(const MultiNetworkSample& sample, const fs::path& dir,
                                  const std::string& stem) {
    sample.validate();
    fs::create_directories(dir);
    std::vector<fs::path> out;
    for (int t = 0; t < sample.k; ++t) {
        const fs::path path = dir / (stem + "_" + std::to_string(t + 1) + ".csv");
        auto f = open_out(path);
        for (int j = 0; j < sample.p; ++j) f << (j ? "," : "") << sample.names[j];
        f << "\n";
        for (int i = 0; i < sample.n[t]; ++i) {
            for (int j = 0; j < sample.p; ++j)
                f << (j ? "," : "") << format_double(sample.X[t](i, j));
            f << "\n";
        }
        out.push_back(path);
    }
    return out;
}

namespace {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& rows) {
    const auto r = rows.size();
    const auto c = r ? rows[0].size() : 0;
    Matrix m(r, c);
    for (size_t i = 0; i < r; ++i) {
        if (rows[i].size() != c) throw ValidationError("json: ragged matrix");
        for (size_t j = 0; j < c; ++j) m(i, j) = rows[i][j].get<double>();
    }
    return m;
}

json load_json(const fs::path& path) {
    auto f = open_in(path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ValidationError("json: cannot parse " + path.string() + ": " + e.what());
    }
    return j;
}

} // namespace

void save_precision_set(const PrecisionSet& set, const fs::path& path) {
    json j;
    j["k"] = set.k;
    j["p"] = set.p;
    j["omega"] = json::array();
    for (const auto& m : set.omega) j["omega"].push_back(matrix_to_json(m));
    open_out(path) << j.dump(1) << "\n";
}

PrecisionSet load_precision_set(const fs::path& path) {
    const json j = load_json(path);
    PrecisionSet set;
    set.k = j.at("k").get<int>();
    set.p = j.at("p").get<int>();
    for (const auto& m : j.at("omega")) set.omega.push_back(matrix_from_json(m));
    set.validate();
    return set;
}

void save_edge_set(const EdgeSet& edges, const fs::path& path) {
    json j;
    j["p"] = edges.p;
    j["edges"] = json::array();
    for (const auto& e : edges.edges) j["edges"].push_back({e.first + 1, e.second + 1});
    open_out(path) << j.dump(1) << "\n";
}

EdgeSet load_edge_set(const fs::path& path) {
    const json j = load_json(path);
    EdgeSet edges;
    edges.p = j.at("p").get<int>();
    for (const auto& e : j.at("edges")) edges.insert(e.at(0).get<int>() - 1, e.at(1).get<int>() - 1);
    return edges;
}

void save_fits(const std::vector<nodewise::NodewiseFit>& fits, double lambda,
               const fs::path& path) {
    json j;
    j["lambda"] = lambda;
    j["p"] = fits.size();
    j["nodes"] = json::array();
    for (const auto& fit : fits) {
        json node;
        node["j"] = fit.j + 1;
        node["converged"] = fit.converged;
        node["iterations"] = fit.iterations;
        node["omega_jj"] = fit.omega_jj;
        node["support"] = json::array();
        for (int l : fit.support) node["support"].push_back(nodewise::group_to_node(fit.j, l) + 1);
        json coef = json::array();
        json coef_raw = json::array();
        for (size_t t = 0; t < fit.C_hat.size(); ++t) {
            json ct = json::array(), rt = json::array();
            for (int l = 0; l < fit.C_hat[t].size(); ++l) {
                if (fit.C_hat[t](l) != 0.0)
                    ct.push_back({nodewise::group_to_node(fit.j, l) + 1, fit.C_hat[t](l)});
                if (fit.C_raw[t](l) != 0.0)
                    rt.push_back({nodewise::group_to_node(fit.j, l) + 1, fit.C_raw[t](l)});
            }
            coef.push_back(std::move(ct));
            coef_raw.push_back(std::move(rt));
        }
        node["coef"] = std::move(coef);
        node["coef_raw"] = std::move(coef_raw);
        json rs = json::array();
        for (const auto& r : fit.residuals) rs.push_back({{"n", r.size()}, {"norm", r.norm()}});
        node["residual_summary"] = std::move(rs);
        j["nodes"].push_back(std::move(node));
    }
    open_out(path) << j.dump(1) << "\n";
}

std::vector<nodewise::NodewiseFit> load_fits(const fs::path& path,
                                             const MultiNetworkSample& sample, double* lambda_out) {
    const json j = load_json(path);
    if (j.at("p").get<int>() != sample.p)
        throw ValidationError("fits: node count does not match the sample");
    const double lambda = j.at("lambda").get<double>();
    if (lambda_out) *lambda_out = lambda;

    std::vector<nodewise::NodewiseFit> fits(sample.p);
    for (const auto& node : j.at("nodes")) {
        nodewise::NodewiseFit fit;
        fit.j = node.at("j").get<int>() - 1;
        if (fit.j < 0 || fit.j >= sample.p) throw ValidationError("fits: node index out of range");
        fit.n = sample.n;
        fit.lambda_used = lambda;
        fit.converged = node.at("converged").get<bool>();
        fit.iterations = node.at("iterations").get<int>();
        for (int v : node.at("support"))
            fit.support.push_back(nodewise::node_to_group(fit.j, v - 1));
        const auto read_coef = [&](const json& arr) {
            std::vector<Vector> cs;
            for (const auto& ct : arr) {
                Vector c = Vector::Zero(sample.p - 1);
                for (const auto& pair : ct)
                    c(nodewise::node_to_group(fit.j, pair.at(0).get<int>() - 1)) =
                        pair.at(1).get<double>();
                cs.push_back(std::move(c));
            }
            return cs;
        };
        fit.C_hat = read_coef(node.at("coef"));
        fit.C_raw = read_coef(node.at("coef_raw"));
        if (static_cast<int>(fit.C_hat.size()) != sample.k)
            throw ValidationError("fits: class count does not match the sample");
        // residuals and omega are exact functions of (sample, coefficients)
        for (int t = 0; t < sample.k; ++t) {
            Vector pred = Vector::Zero(sample.n[t]);
            for (int l = 0; l < sample.p - 1; ++l)
                if (fit.C_hat[t](l) != 0.0)
                    pred += sample.X[t].col(nodewise::group_to_node(fit.j, l)) * fit.C_hat[t](l);
            fit.residuals.push_back(sample.X[t].col(fit.j) - pred);
            const double ss = fit.residuals[t].squaredNorm();
            if (ss <= 0.0) throw NumericalError("fits: zero residual norm on reload");
            fit.omega_jj.push_back(sample.n[t] / ss);
        }
        fits[fit.j] = std::move(fit);
    }
    for (int jn = 0; jn < sample.p; ++jn)
        if (fits[jn].j != jn) throw ValidationError("fits: missing node " + std::to_string(jn + 1));
    return fits;
}

void save_test_results_csv(const std::vector<inference::TestResult>& results,
                           const fs::path& path) {
    auto f = open_out(path);
    f << "a,b,statistic,critical,reject\n";
    for (const auto& r : results)
        f << r.a + 1 << "," << r.b + 1 << "," << format_double(r.statistic) << ","
          << format_double(r.critical) << "," << (r.reject ? 1 : 0) << "\n";
}

void save_test_results_json(const std::vector<inference::TestResult>& results,
                            const fs::path& path) {
    json j = json::array();
    for (const auto& r : results)
        j.push_back({{"a", r.a + 1},
                     {"b", r.b + 1},
                     {"statistic", r.statistic},
                     {"critical", r.critical},
                     {"reject", r.reject}});
    open_out(path) << j.dump(1) << "\n";
}

} // namespace multinet::io
