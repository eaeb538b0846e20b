#include "opcalc/io.hpp"

#include "opcalc/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace opcalc::io {

namespace {

double number(const json& j, const char* key, const std::string& what)
{
    if (!j.contains(key)) throw InvalidArgument(what + ": missing \"" + key + "\"");
    if (!j.at(key).is_number()) throw InvalidArgument(what + ": \"" + key + "\" must be a number");
    return j.at(key).get<double>();
}

void require_object(const json& j, const std::string& what)
{
    if (!j.is_object()) throw InvalidArgument(what + ": expected a JSON object");
}

Eigen::MatrixXd rows_of(const json& rows, Eigen::Index n, const std::string& what)
{
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != n)
        throw InvalidArgument(what + ": expected " + std::to_string(n) + " rows");
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const json& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw InvalidArgument(what + ": row " + std::to_string(i) + " must have " + std::to_string(n) + " entries");
        for (Eigen::Index k = 0; k < n; ++k) {
            const json& v = row[static_cast<std::size_t>(k)];
            if (!v.is_number()) throw InvalidArgument(what + ": non-numeric entry");
            M(i, k) = v.get<double>();
        }
    }
    return M;
}

}  // namespace

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const Matrix& M)
{
    json re = json::array();
    json im = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json r = json::array();
        json c = json::array();
        for (Eigen::Index k = 0; k < M.cols(); ++k) {
            r.push_back(M(i, k).real());
            c.push_back(M(i, k).imag());
        }
        re.push_back(std::move(r));
        im.push_back(std::move(c));
    }
    return json{{"n", M.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const json& j)
{
    const std::string what = "matrix";
    require_object(j, what);
    const double nd = number(j, "n", what);
    if (nd < 1 || nd != std::floor(nd)) throw InvalidArgument("matrix: n must be a positive integer");
    const auto n = static_cast<Eigen::Index>(nd);
    if (!j.contains("re")) throw InvalidArgument("matrix: missing \"re\"");
    Matrix M = rows_of(j.at("re"), n, "matrix.re").cast<cplx>();
    if (j.contains("im")) M += cplx(0.0, 1.0) * rows_of(j.at("im"), n, "matrix.im").cast<cplx>();
    return M;
}

Matrix matrix_from_csv(const std::string& text)
{
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::logic_error&) {
                throw InvalidArgument("csv matrix: bad number '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n == 0) throw InvalidArgument("csv matrix: no rows");
    Matrix M(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n)
            throw InvalidArgument("csv matrix: must be square");
        for (Eigen::Index k = 0; k < n; ++k) M(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    return M;
}

json to_json(const RepresentingMeasure& m)
{
    json atoms = json::array();
    for (const Atom& a : m.atoms()) atoms.push_back(json::array({a.position, a.weight}));
    json dens = json::array();
    for (const DensityPart& d : m.densities()) {
        json e{{"p", d.p}, {"q", d.q}, {"c", d.c}, {"kind", "jacobi"}};
        if (d.smooth) e["smooth_factor"] = "not serialized";
        dens.push_back(std::move(e));
    }
    return json{{"a", m.support_lo()}, {"b", m.support_hi()}, {"atoms", std::move(atoms)},
                {"densities", std::move(dens)}, {"order", m.order()}};
}

RepresentingMeasure measure_from_json(const json& j)
{
    const std::string what = "measure";
    require_object(j, what);
    const double a = number(j, "a", what);
    const double b = number(j, "b", what);
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
        if (!j.at("atoms").is_array()) throw InvalidArgument("measure: \"atoms\" must be an array");
        for (const json& e : j.at("atoms")) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw InvalidArgument("measure: each atom is [position, weight]");
            atoms.push_back({e[0].get<double>(), e[1].get<double>()});
        }
    }
    std::vector<DensityPart> parts;
    if (j.contains("densities")) {
        if (!j.at("densities").is_array()) throw InvalidArgument("measure: \"densities\" must be an array");
        for (const json& e : j.at("densities")) {
            require_object(e, "measure.densities");
            const std::string kind = e.value("kind", std::string("jacobi"));
            if (kind != "jacobi") throw InvalidArgument("measure: only \"jacobi\" densities are supported");
            parts.push_back({number(e, "p", "density"), number(e, "q", "density"), number(e, "c", "density"), {}});
        }
    }
    int order = kDefaultQuadratureOrder;
    if (j.contains("order")) {
        const double o = number(j, "order", what);
        if (o < 1 || o != std::floor(o)) throw InvalidArgument("measure: order must be a positive integer");
        order = static_cast<int>(o);
    }
    return RepresentingMeasure(a, b, std::move(atoms), std::move(parts), order);
}

json to_json(const MarkovSymbol& s)
{
    json j;
    j["name"] = s.name();
    j["class"] = s.class_tag() == SymbolClass::ZR_0b ? "ZR_0b" : "ZR_ab";
    if (s.builtin_params) {
        j["builtin"] = s.builtin_id;
        j["alpha"] = s.builtin_params->first;
        j["b"] = s.builtin_params->second;
    } else {
        j["builtin"] = nullptr;
    }
    j["measure"] = to_json(s.measure());
    return j;
}

MarkovSymbol symbol_from_json(const json& j)
{
    require_object(j, "symbol");
    if (j.contains("builtin") && !j.at("builtin").is_null()) {
        if (!j.at("builtin").is_string()) throw InvalidArgument("symbol: \"builtin\" must be a string or null");
        const std::string id = j.at("builtin").get<std::string>();
        const double alpha = number(j, "alpha", "symbol");
        const double b = number(j, "b", "symbol");
        if (id == "example1a") return example1a(alpha, b);
        if (id == "example1b") return example1b(alpha, b);
        throw InvalidArgument("symbol: unknown builtin '" + id + "' (expected example1a|example1b)");
    }
    if (!j.contains("measure")) throw InvalidArgument("symbol: needs \"builtin\" or \"measure\"");
    RepresentingMeasure m = measure_from_json(j.at("measure"));
    SymbolClass cls = m.support_lo() == 0.0 ? SymbolClass::ZR_0b : SymbolClass::ZR_ab;
    if (j.contains("class")) {
        const std::string c = j.at("class").is_string() ? j.at("class").get<std::string>() : "";
        if (c == "ZR_0b")
            cls = SymbolClass::ZR_0b;
        else if (c == "ZR_ab")
            cls = SymbolClass::ZR_ab;
        else
            throw InvalidArgument("symbol: \"class\" must be ZR_0b or ZR_ab");
    }
    return MarkovSymbol(std::move(m), cls, j.value("name", std::string("custom")));
}

json to_json(const OperatorCertificate& c, bool with_grid)
{
    json j;
    j["kind"] = c.kind == CertificateKind::V0b ? "V0b" : "Vab";
    j["matrix_id"] = c.matrix_id;
    j["interval"] = json::array({c.a, c.b});
    j["dim"] = c.dim;
    if (c.kind == CertificateKind::V0b) {
        j["M_A"] = c.M_A;
        j["rising_at_cutoff"] = c.rising_at_cutoff;
    } else {
        j["m_A"] = c.m_A;
        j["delta_A"] = c.delta_A;
    }
    j["argmax_t"] = c.argmax_t;
    j["margin"] = c.margin;
    j["spectral_distance"] = c.spectral_distance;
    j["grid_size"] = c.grid.size();
    if (with_grid) j["grid"] = c.grid;
    return j;
}

json to_json(const BoundReport& r)
{
    json consts = json::object();
    for (const auto& [k, v] : r.constants) {
        if (const double* d = std::get_if<double>(&v))
            consts[k] = *d;
        else
            consts[k] = std::get<std::string>(v);
    }
    return json{{"bound_id", to_string(r.bound_id)}, {"lhs", r.lhs},         {"rhs", r.rhs},
                {"slack", r.slack},                  {"holds", r.holds},     {"tolerance", r.tolerance},
                {"constants", std::move(consts)}};
}

json to_json(const SuiteSummary& s)
{
    json fails = json::array();
    for (const BoundReport& r : s.failures) fails.push_back(to_json(r));
    return json{{"suite", s.name},          {"trials", s.trials},         {"violations", s.violations},
                {"min_slack", s.min_slack}, {"worst_ratio", s.worst_ratio}, {"failures", std::move(fails)}};
}

json to_json(const TraceFormulaReport& r)
{
    json cauchy = json::array();
    for (const CauchyCheck& c : r.cauchy)
        cauchy.push_back(json{{"t", c.t}, {"phi", to_json(c.direct)}, {"cauchy", to_json(c.cauchy)}, {"defect", c.defect}});
    json j;
    j["direct"] = to_json(r.direct);
    j["kernel"] = to_json(r.kernel);
    j["contour"] = to_json(r.contour);
    j["kernel_defect"] = r.kernel_defect;
    j["contour_defect"] = r.contour_defect;
    j["anchor_shift_defect"] = r.anchor_shift_defect;
    j["fprime_loop"] = r.fprime_loop;
    j["closure_defect"] = r.closure_defect;
    j["contour_change"] = r.contour_change;
    j["contour_spec"] = r.contour_spec.describe();
    j["contour_nodes"] = r.contour_nodes;
    j["anchor"] = to_json(r.anchor);
    j["apply_order"] = r.apply_order;
    j["kernel_order"] = r.kernel_order;
    j["m_A"] = r.m_A;
    j["m_B"] = r.m_B;
    j["cauchy"] = std::move(cauchy);
    j["bilinear_violations"] = r.bilinear_violations;
    j["tolerance"] = r.tolerance;
    j["holds"] = r.holds;
    return j;
}

json to_json(const MembershipReport& r)
{
    json checks = json::array();
    for (const MembershipCheck& c : r.checks) {
        json v = json::array();
        for (cplx z : c.violations) v.push_back(to_json(z));
        checks.push_back(json{{"name", c.name}, {"passed", c.passed}, {"samples", c.samples}, {"violations", std::move(v)},
                              {"detail", c.detail}});
    }
    return json{{"tested_as", to_string(r.tested_as)}, {"member", r.member},         {"tolerance", r.tolerance},
                {"sample_count", r.sample_count},     {"checks", std::move(checks)}};
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse(const std::string& text, const std::string& what)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(what + ": malformed JSON: " + e.what());
    }
}

Matrix load_matrix(const std::string& path)
{
    const std::string text = read_file(path);
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) return matrix_from_csv(text);
    const json j = parse(text, path);
    // fixture files wrap the matrix next to their provenance
    if (j.is_object() && j.contains("matrix")) return matrix_from_json(j.at("matrix"));
    return matrix_from_json(j);
}

MarkovSymbol load_symbol(const std::string& path)
{
    const json j = parse(read_file(path), path);
    if (j.is_object() && j.contains("symbol")) return symbol_from_json(j.at("symbol"));
    return symbol_from_json(j);
}

}  // namespace opcalc::io
