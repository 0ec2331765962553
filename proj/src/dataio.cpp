#include "wmar/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wmar/qfun.hpp"

namespace wmar {

namespace {

// Shortest decimal that parses back to the same double.
std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_double(const std::string& s, std::size_t line_no) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        throw Error("line " + std::to_string(line_no) + ": cannot parse number '" + s + "'");
    }
    return v;
}

std::int64_t parse_time(const std::string& s, std::size_t line_no) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error("line " + std::to_string(line_no) + ": cannot parse time '" + s + "'");
    }
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

void check_label(const std::string& label) {
    if (label.empty()) throw Error("empty feature label");
    if (label.find(',') != std::string::npos || label.find('\n') != std::string::npos) {
        throw Error("feature label '" + label + "' may not contain commas or newlines");
    }
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "' for reading");
    return in;
}

} // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in = open_input(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error("write to '" + path + "' failed");
}

DistSeries read_samples_long(std::istream& in, const Grid& grid) {
    std::string line;
    if (!std::getline(in, line)) throw Error("samples CSV is empty");
    auto header = split_csv(line);
    if (header != std::vector<std::string>{"feature", "time", "value"}) {
        throw Error("samples CSV must start with header 'feature,time,value'");
    }
    std::vector<std::string> features;           // first-appearance order
    std::map<std::string, std::size_t> feature_index;
    std::map<std::pair<std::size_t, std::int64_t>, std::vector<double>> cells;
    std::vector<std::int64_t> times;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv(line);
        if (fields.size() != 3) {
            throw Error("line " + std::to_string(line_no) + ": expected 3 columns, got "
                        + std::to_string(fields.size()));
        }
        check_label(fields[0]);
        auto [it, inserted] = feature_index.try_emplace(fields[0], features.size());
        if (inserted) features.push_back(fields[0]);
        const std::int64_t t = parse_time(fields[1], line_no);
        const double v = parse_double(fields[2], line_no);
        if (v < 0.0 || v > 1.0) {
            throw Error("line " + std::to_string(line_no) + ": value " + fmt(v)
                        + " outside [0, 1]");
        }
        if (std::find(times.begin(), times.end(), t) == times.end()) times.push_back(t);
        cells[{it->second, t}].push_back(v);
    }
    if (features.empty()) throw Error("samples CSV has no data rows");
    std::sort(times.begin(), times.end());

    std::vector<std::vector<QuantileGrid>> grids(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        grids[i].reserve(times.size());
        for (std::int64_t t : times) {
            auto it = cells.find({i, t});
            if (it == cells.end()) {
                throw Error("missing cell: feature '" + features[i] + "' has no samples at time "
                            + std::to_string(t));
            }
            grids[i].push_back(empirical_quantile(it->second, grid));
        }
    }
    return DistSeries(std::move(features), std::move(grids), std::move(times));
}

DistSeries read_samples_long_file(const std::string& path, const Grid& grid) {
    std::ifstream in = open_input(path);
    return read_samples_long(in, grid);
}

DistSeries read_grid_wide(std::istream& in, std::optional<Grid> expected_grid) {
    std::string line;
    if (!std::getline(in, line)) throw Error("grid CSV is empty");
    auto header = split_csv(line);
    if (header.size() < 4 || header[0] != "feature" || header[1] != "time") {
        throw Error("grid CSV must start with header 'feature,time,q_0,...'");
    }
    const std::size_t m = header.size() - 2;
    for (std::size_t k = 0; k < m; ++k) {
        if (header[k + 2] != "q_" + std::to_string(k)) {
            throw Error("grid CSV header column " + std::to_string(k + 2) + " should be q_"
                        + std::to_string(k));
        }
    }
    if (expected_grid && expected_grid->size() != m) {
        throw Error("grid CSV has " + std::to_string(m) + " value columns but the manifest grid has "
                    + std::to_string(expected_grid->size()));
    }
    const Grid grid = Grid::with_nodes(m);

    std::vector<std::string> features;
    std::map<std::string, std::size_t> feature_index;
    std::map<std::pair<std::size_t, std::int64_t>, QuantileGrid> cells;
    std::vector<std::int64_t> times;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv(line);
        if (fields.size() != m + 2) {
            throw Error("line " + std::to_string(line_no) + ": expected " + std::to_string(m + 2)
                        + " columns, got " + std::to_string(fields.size()));
        }
        check_label(fields[0]);
        auto [it, inserted] = feature_index.try_emplace(fields[0], features.size());
        if (inserted) features.push_back(fields[0]);
        const std::int64_t t = parse_time(fields[1], line_no);
        std::vector<double> v(m);
        for (std::size_t k = 0; k < m; ++k) v[k] = parse_double(fields[k + 2], line_no);
        for (std::size_t k = 0; k + 1 < m; ++k) {
            if (v[k + 1] < v[k] - kMonotoneTol) {
                throw Error("line " + std::to_string(line_no) + ": row is not nondecreasing at q_"
                            + std::to_string(k + 1));
            }
        }
        for (std::size_t k = 0; k < m; ++k) {
            if (v[k] < -kMonotoneTol || v[k] > 1.0 + kMonotoneTol) {
                throw Error("line " + std::to_string(line_no) + ": value " + fmt(v[k])
                            + " outside [0, 1] at q_" + std::to_string(k));
            }
        }
        if (std::find(times.begin(), times.end(), t) == times.end()) times.push_back(t);
        auto [cit, cell_inserted] =
            cells.try_emplace({it->second, t}, grid, std::move(v), GridRole::quantile);
        if (!cell_inserted) {
            throw Error("line " + std::to_string(line_no) + ": duplicate cell for feature '"
                        + fields[0] + "' at time " + std::to_string(t));
        }
    }
    if (features.empty()) throw Error("grid CSV has no data rows");
    std::sort(times.begin(), times.end());

    std::vector<std::vector<QuantileGrid>> grids(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        grids[i].reserve(times.size());
        for (std::int64_t t : times) {
            auto it = cells.find({i, t});
            if (it == cells.end()) {
                throw Error("missing cell: feature '" + features[i] + "' has no row at time "
                            + std::to_string(t));
            }
            grids[i].push_back(std::move(it->second));
        }
    }
    return DistSeries(std::move(features), std::move(grids), std::move(times));
}

DistSeries read_grid_wide_file(const std::string& path, std::optional<Grid> expected_grid) {
    std::ifstream in = open_input(path);
    return read_grid_wide(in, expected_grid);
}

void write_grid_wide(const DistSeries& series, std::ostream& out) {
    const std::size_t m = series.grid().size();
    out << "feature,time";
    for (std::size_t k = 0; k < m; ++k) out << ",q_" << k;
    out << "\n";
    for (std::size_t i = 0; i < series.n_features(); ++i) {
        check_label(series.labels()[i]);
        for (std::size_t t = 0; t < series.n_instants(); ++t) {
            out << series.labels()[i] << "," << series.times()[t];
            const QuantileGrid& q = series.at(i, t);
            for (std::size_t k = 0; k < m; ++k) out << "," << fmt(q[k]);
            out << "\n";
        }
    }
}

void write_grid_wide_file(const DistSeries& series, const std::string& path) {
    std::ostringstream os;
    write_grid_wide(series, os);
    write_text_file(path, os.str());
}

void write_quantile_csv(const QuantileGrid& q, std::ostream& out) {
    out << "p,value\n";
    for (std::size_t k = 0; k < q.size(); ++k) {
        out << fmt(q.grid().point(k)) << "," << fmt(q[k]) << "\n";
    }
}

QuantileGrid read_quantile_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("quantile CSV is empty");
    if (split_csv(line) != std::vector<std::string>{"p", "value"}) {
        throw Error("quantile CSV must start with header 'p,value'");
    }
    std::vector<double> ps, vs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv(line);
        if (fields.size() != 2) {
            throw Error("line " + std::to_string(line_no) + ": expected 2 columns");
        }
        ps.push_back(parse_double(fields[0], line_no));
        vs.push_back(parse_double(fields[1], line_no));
    }
    if (ps.size() < 2) throw Error("quantile CSV needs at least 2 rows");
    const Grid grid = Grid::with_nodes(ps.size());
    for (std::size_t k = 0; k < ps.size(); ++k) {
        if (std::abs(ps[k] - grid.point(k)) > 1e-9) {
            throw Error("quantile CSV p-column is not the uniform grid at row "
                        + std::to_string(k));
        }
    }
    return QuantileGrid(grid, std::move(vs), GridRole::quantile);
}

QuantileGrid read_quantile_csv_file(const std::string& path) {
    std::ifstream in = open_input(path);
    return read_quantile_csv(in);
}

ValidationReport validate(const DistSeries& series) {
    ValidationReport report;
    for (std::size_t i = 0; i < series.n_features(); ++i) {
        for (std::size_t t = 0; t < series.n_instants(); ++t) {
            const QuantileGrid& q = series.at(i, t);
            for (std::size_t k = 0; k < q.size(); ++k) {
                if (q[k] < 0.0 || q[k] > 1.0) {
                    report.violations.push_back({i, t, k, "out-of-range", q[k]});
                }
                if (k > 0 && q[k] < q[k - 1]) {
                    report.violations.push_back({i, t, k, "decreasing", q[k]});
                }
            }
        }
    }
    const std::size_t t_count = series.n_instants();
    const std::size_t half = t_count / 2;
    report.drift.assign(series.n_features(), 0.0);
    if (half >= 1 && t_count - half >= 1) {
        for (std::size_t i = 0; i < series.n_features(); ++i) {
            const auto& row = series.feature(i);
            std::vector<QuantileGrid> first(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(half));
            std::vector<QuantileGrid> second(row.begin() + static_cast<std::ptrdiff_t>(half), row.end());
            const QuantileGrid m1 = frechet_mean(first);
            const QuantileGrid m2 = frechet_mean(second);
            double sup = 0.0;
            for (std::size_t k = 0; k < m1.size(); ++k) {
                sup = std::max(sup, std::abs(m1[k] - m2[k]));
            }
            report.drift[i] = sup;
        }
    }
    return report;
}

std::string to_json(const DatasetManifest& manifest) {
    nlohmann::json j;
    j["format"] = manifest.format;
    j["grid_h"] = manifest.grid_h;
    j["features"] = manifest.features;
    j["times"] = manifest.times;
    return j.dump(2) + "\n";
}

DatasetManifest manifest_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        DatasetManifest m;
        m.format = j.at("format").get<std::string>();
        m.grid_h = j.at("grid_h").get<double>();
        m.features = j.at("features").get<std::vector<std::string>>();
        m.times = j.at("times").get<std::vector<std::int64_t>>();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("manifest JSON: ") + e.what());
    }
}

std::string to_json(const SimConfig& cfg) {
    nlohmann::json j;
    j["n_features"] = cfg.n_features;
    j["t_len"] = cfg.t_len;
    j["burn_in"] = cfg.burn_in;
    j["alpha"] = cfg.alpha;
    j["density"] = cfg.density;
    j["seed"] = cfg.seed;
    j["grid_h"] = cfg.grid_h;
    return j.dump(2) + "\n";
}

SimConfig sim_config_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        SimConfig cfg;
        cfg.n_features = j.at("n_features").get<std::size_t>();
        cfg.t_len = j.at("t_len").get<std::size_t>();
        if (j.contains("burn_in")) cfg.burn_in = j.at("burn_in").get<std::size_t>();
        if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
        if (j.contains("density")) cfg.density = j.at("density").get<double>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("grid_h")) cfg.grid_h = j.at("grid_h").get<double>();
        cfg.validate();
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("sim config JSON: ") + e.what());
    }
}

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& a) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& rows, std::size_t n) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    if (rows.size() != n) throw Error("matrix JSON row count disagrees with n");
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw Error("matrix JSON is not square");
        for (std::size_t j = 0; j < n; ++j) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j].get<double>();
        }
    }
    return a;
}

} // namespace

std::string coeffs_to_json(const Eigen::MatrixXd& a, double alpha, std::uint64_t seed) {
    nlohmann::json j;
    j["n"] = a.rows();
    j["alpha"] = alpha;
    j["seed"] = seed;
    j["matrix"] = matrix_to_json(a);
    return j.dump(2) + "\n";
}

Eigen::MatrixXd coeffs_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        return matrix_from_json(j.at("matrix"), j.at("n").get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("coefficient JSON: ") + e.what());
    }
}

std::string to_json(const FitReport& report) {
    nlohmann::json j;
    const std::size_t n = report.labels.size();
    j["n_features"] = n;
    j["labels"] = report.labels;
    j["grid_h"] = report.grid_h;
    j["a_hat"] = matrix_to_json(report.a_hat);
    if (report.a_unconstrained) {
        j["a_unconstrained"] = matrix_to_json(*report.a_unconstrained);
    } else {
        j["a_unconstrained"] = nullptr;
    }
    j["gamma0"] = matrix_to_json(report.gram.gamma0);
    j["gamma1"] = matrix_to_json(report.gram.gamma1);

    // Means as one grid-wide CSV block, time column fixed at 0.
    std::vector<std::vector<QuantileGrid>> cells;
    cells.reserve(n);
    for (const QuantileGrid& mq : report.means) cells.push_back({mq});
    DistSeries means_series(report.labels, std::move(cells), {0});
    std::ostringstream means_csv;
    write_grid_wide(means_series, means_csv);
    j["means_csv"] = means_csv.str();

    j["iterations"] = report.iterations;
    j["objective"] = report.objective;
    std::vector<bool> conv(report.row_converged.begin(), report.row_converged.end());
    j["row_converged"] = conv;
    j["options"] = {{"tol", report.options.tol},
                    {"max_iter", report.options.max_iter},
                    {"ridge", report.options.ridge}};
    j["flags"] = {{"ridge_used", report.ridge_used},
                  {"unconstrained_feasible", report.unconstrained_feasible},
                  {"small_sample", report.small_sample},
                  {"degenerate_features", report.degenerate_features}};
    return j.dump(2) + "\n";
}

FitReport fit_report_from_json(const std::string& text) {
    try {
        auto j = nlohmann::json::parse(text);
        FitReport r;
        const auto n = j.at("n_features").get<std::size_t>();
        r.labels = j.at("labels").get<std::vector<std::string>>();
        r.grid_h = j.at("grid_h").get<double>();
        r.a_hat = matrix_from_json(j.at("a_hat"), n);
        if (!j.at("a_unconstrained").is_null()) {
            r.a_unconstrained = matrix_from_json(j.at("a_unconstrained"), n);
        }
        r.gram.gamma0 = matrix_from_json(j.at("gamma0"), n);
        r.gram.gamma1 = matrix_from_json(j.at("gamma1"), n);
        std::istringstream means_csv(j.at("means_csv").get<std::string>());
        DistSeries means_series = read_grid_wide(means_csv);
        if (means_series.n_features() != n || means_series.n_instants() != 1) {
            throw Error("fit report means block has the wrong shape");
        }
        for (std::size_t i = 0; i < n; ++i) r.means.push_back(means_series.at(i, 0));
        r.iterations = j.at("iterations").get<std::vector<std::size_t>>();
        r.objective = j.at("objective").get<std::vector<double>>();
        r.row_converged = j.at("row_converged").get<std::vector<bool>>();
        r.options.tol = j.at("options").at("tol").get<double>();
        r.options.max_iter = j.at("options").at("max_iter").get<std::size_t>();
        r.options.ridge = j.at("options").at("ridge").get<double>();
        r.ridge_used = j.at("flags").at("ridge_used").get<bool>();
        r.unconstrained_feasible = j.at("flags").at("unconstrained_feasible").get<bool>();
        r.small_sample = j.at("flags").at("small_sample").get<bool>();
        r.degenerate_features =
            j.at("flags").at("degenerate_features").get<std::vector<std::size_t>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("fit report JSON: ") + e.what());
    }
}

} // namespace wmar
