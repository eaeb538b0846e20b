#include "cli.hpp"

#include "opcalc/errors.hpp"
#include "opcalc/fixtures.hpp"
#include "opcalc/frechet.hpp"
#include "opcalc/io.hpp"
#include "opcalc/perturb.hpp"
#include "opcalc/shift.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace opcalc::cli {

namespace {

using io::json;

struct Options {
    std::string symbol;
    std::string matrix;
    std::string A;
    std::string B;
    std::string U;
    std::string x;
    std::string direction;
    std::string interval;
    std::string ideal;
    std::string out;
    std::string oracle;
    std::string bound;
    std::string contour;
    std::string anchor;
    std::string z;
    std::string kind;
    std::string values;
    std::string lambda;
    std::string T;
    std::string csv;
    unsigned long long seed = 7;
    int order = 0;
    double tolerance = 0.0;
    int terms = 0;
    bool suite = false;
    bool fd_check = false;
    std::size_t trials = 100;
    std::size_t grid = kDefaultCertificateGrid;
    std::size_t n = 3;
    double b = 1.0;
    double gap = 0.2;
    double coupling = 0.5;
    double sigma = 0.1;
};

// ---- argument parsing -------------------------------------------------------

double to_number(const std::string& text, const std::string& what)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw InvalidArgument(what + ": '" + text + "' is not a number");
    }
    if (used != text.size() || !std::isfinite(v)) throw InvalidArgument(what + ": '" + text + "' is not a number");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(text);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

std::vector<double> number_list(const std::string& text, const std::string& what)
{
    std::vector<double> out;
    for (const std::string& p : split(text, ',')) out.push_back(to_number(p, what));
    if (out.empty()) throw InvalidArgument(what + ": empty list");
    return out;
}

// "re" or "re:im"
cplx complex_token(const std::string& text, const std::string& what)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos) return {to_number(text, what), 0.0};
    return {to_number(text.substr(0, colon), what), to_number(text.substr(colon + 1), what)};
}

std::vector<cplx> complex_list(const std::string& text, const std::string& what)
{
    std::vector<cplx> out;
    for (const std::string& p : split(text, ',')) out.push_back(complex_token(p, what));
    if (out.empty()) throw InvalidArgument(what + ": empty list");
    return out;
}

cplx complex_pair(const std::string& text, const std::string& what)
{
    const std::vector<double> v = number_list(text, what);
    if (v.size() == 1) return {v[0], 0.0};
    if (v.size() != 2) throw InvalidArgument(what + ": expected re,im");
    return {v[0], v[1]};
}

std::pair<double, double> interval_of(const std::string& text)
{
    const std::vector<double> v = number_list(text, "--interval");
    if (v.size() != 2 || !(v[0] < v[1]) || v[0] < 0.0)
        throw InvalidArgument("--interval: expected a,b with 0 <= a < b");
    return {v[0], v[1]};
}

void need(const std::string& value, const char* flag, const char* command)
{
    if (value.empty()) throw InvalidArgument(std::string(command) + ": " + flag + " is required");
}

// path or path#key, the key picking a member of a fixture file
Matrix matrix_arg(const std::string& spec, const char* flag, const char* command)
{
    need(spec, flag, command);
    const auto hash = spec.rfind('#');
    if (hash == std::string::npos) return io::load_matrix(spec);
    const std::string path = spec.substr(0, hash);
    const std::string key = spec.substr(hash + 1);
    const json j = io::parse(io::read_file(path), path);
    if (!j.is_object() || !j.contains(key)) throw InvalidArgument(path + ": no member '" + key + "'");
    const json& m = j.at(key);
    return io::matrix_from_json(m.is_object() && m.contains("matrix") ? m.at("matrix") : m);
}

// example1a:alpha,b | example1b:alpha,b | file
MarkovSymbol symbol_arg(const std::string& spec, const char* command)
{
    need(spec, "--symbol", command);
    for (const char* id : {"example1a", "example1b"}) {
        const std::string prefix = std::string(id) + ":";
        if (spec.rfind(prefix, 0) == 0) {
            const std::vector<double> p = number_list(spec.substr(prefix.size()), "--symbol");
            if (p.size() != 2) throw InvalidArgument("--symbol: expected " + prefix + "alpha,b");
            return id[8] == 'a' ? example1a(p[0], p[1]) : example1b(p[0], p[1]);
        }
    }
    return io::load_symbol(spec);
}

Vector vector_arg(const std::string& text, Eigen::Index n)
{
    need(text, "--x", "perturb");
    const std::vector<cplx> v = complex_list(text, "--x");
    if (static_cast<Eigen::Index>(v.size()) != n)
        throw InvalidArgument("--x: expected " + std::to_string(n) + " entries");
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = v[static_cast<std::size_t>(i)];
    return x;
}

// ---- certificates ------------------------------------------------------------

enum class Need { natural, v0b, vab };

OperatorCertificate certificate_for(const MarkovSymbol& f, const Matrix& A, const Options& o, const std::string& id,
                                    Need need_kind = Need::natural)
{
    double lo = f.support_lo();
    double hi = f.support_hi();
    if (!o.interval.empty()) std::tie(lo, hi) = interval_of(o.interval);
    bool v0b = f.class_tag() == SymbolClass::ZR_0b && lo == 0.0;
    if (need_kind == Need::v0b) v0b = true;
    if (need_kind == Need::vab) v0b = false;
    return v0b ? certify_V0b(A, hi, o.grid, id) : certify_Vab(A, lo, hi, o.grid, id);
}

// ---- reporting ---------------------------------------------------------------

json header(const std::string& command, const Options& o)
{
    json j;
    j["tool"] = "markov-opcalc";
    j["version"] = kVersion;
    j["command"] = command;
    j["seed"] = o.seed;
    return j;
}

void emit(const json& j, const Options& o, std::ostream& out)
{
    const std::string text = j.dump(2) + "\n";
    if (o.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw InvalidArgument("--out: cannot write " + o.out);
    f << text;
    if (!f) throw InvalidArgument("--out: write failed for " + o.out);
}

json agreement(const Matrix& X, const Matrix& Y, double tol)
{
    const double d = op_norm(X - Y);
    return json{{"defect", d}, {"tolerance", tol}, {"holds", d <= tol}};
}

// ---- subcommands -------------------------------------------------------------

int cmd_certify(const Options& o, std::ostream& out)
{
    const Matrix A = matrix_arg(o.matrix, "--matrix", "certify");
    const auto [a, b] = interval_of(o.interval.empty() ? "0,1" : o.interval);
    std::string kind = o.kind.empty() ? (a == 0.0 ? "v0b" : "vab") : o.kind;
    if (kind != "v0b" && kind != "vab") throw InvalidArgument("--kind: expected v0b or vab");
    if (kind == "v0b" && a != 0.0) throw InvalidArgument("certify: V0b needs an interval starting at 0");
    json rep = header("certify", o);
    try {
        const OperatorCertificate c =
            kind == "v0b" ? certify_V0b(A, b, o.grid, o.matrix) : certify_Vab(A, a, b, o.grid, o.matrix);
        rep["certified"] = true;
        rep["certificate"] = io::to_json(c, true);
        if (c.kind == CertificateKind::Vab) rep["perturbation_budget"] = perturbation_budget(c);
        emit(rep, o, out);
        return kOk;
    } catch (const NotInClass& e) {
        rep["certified"] = false;
        rep["reason"] = e.what();
        rep["eigenvalue"] = io::to_json(e.eigenvalue());
        emit(rep, o, out);
        return kDefect;
    }
}

int cmd_apply(const Options& o, std::ostream& out)
{
    const MarkovSymbol f = symbol_arg(o.symbol, "apply");
    const Matrix A = matrix_arg(o.matrix, "--matrix", "apply");
    if (!o.oracle.empty() && o.oracle != "eig" && o.oracle != "contour" && o.oracle != "both")
        throw InvalidArgument("--oracle: expected eig, contour or both");
    const OperatorCertificate cert = certificate_for(f, A, o, "A");
    AdaptiveOptions opts;
    if (o.tolerance > 0.0) opts.tolerance = o.tolerance;
    if (o.order > 0) opts.max_order = o.order;
    const ApplyResult r = apply_detailed(f, A, cert, opts);

    json rep = header("apply", o);
    rep["symbol"] = io::to_json(f);
    rep["certificates"] = json::array({io::to_json(cert)});
    rep["quadrature_orders"] = {{"apply", r.order}};
    rep["converged"] = r.converged;
    rep["change"] = r.change;
    rep["value"] = io::to_json(r.value);

    bool holds = r.converged;
    const double tol = 1e-8 * (1.0 + op_norm(r.value));
    json oracles = json::object();
    if (o.oracle == "eig" || o.oracle == "both") {
        try {
            const Matrix E = oracle_eig(f, A);
            oracles["eig"] = agreement(r.value, E, tol);
            holds = holds && oracles["eig"]["holds"].get<bool>();
        } catch (const OracleRefused& e) {
            oracles["eig"] = {{"refused", e.what()}};
        }
    }
    if (o.oracle == "contour" || o.oracle == "both") {
        try {
            const ContourSpec spec = default_support_contour(f, A);
            const ContourOracleResult c = oracle_contour_detailed(f, A, spec);
            json j = agreement(r.value, c.value, tol);
            j["contour"] = spec.describe();
            j["nodes"] = c.nodes;
            j["converged"] = c.converged;
            holds = holds && c.converged && j["holds"].get<bool>();
            oracles["contour"] = j;
        } catch (const OracleRefused& e) {
            oracles["contour"] = {{"refused", e.what()}};
        }
    }
    if (!oracles.empty()) rep["oracles"] = oracles;
    rep["holds"] = holds;
    emit(rep, o, out);
    return holds ? kOk : kDefect;
}

std::vector<std::pair<BoundId, IdealNorm>> suite_plan(const Options& o)
{
    std::vector<std::pair<BoundId, IdealNorm>> plan;
    const std::optional<IdealNorm> ideal =
        o.ideal.empty() ? std::nullopt : std::optional<IdealNorm>(IdealNorm::parse(o.ideal));
    auto add = [&](BoundId id) {
        if (id == BoundId::thm3 && !ideal) {
            for (IdealNorm w : {IdealNorm::op(), IdealNorm::trace_class(), IdealNorm::schatten_p(2.0)})
                plan.emplace_back(id, w);
        } else {
            plan.emplace_back(id, ideal.value_or(IdealNorm::op()));
        }
    };
    if (o.bound.empty()) {
        for (BoundId id : {BoundId::thm1, BoundId::thm2, BoundId::cor1, BoundId::cor2, BoundId::thm3, BoundId::cor4})
            add(id);
    } else {
        for (BoundId id : {BoundId::thm1, BoundId::thm2, BoundId::thm3, BoundId::cor1, BoundId::cor2, BoundId::cor4})
            if (o.bound == to_string(id)) add(id);
    }
    return plan;
}

json run_suites(const Options& o, bool& clean)
{
    SuiteConfig cfg;
    cfg.trials = o.trials;
    cfg.seed = o.seed;
    json arr = json::array();
    clean = true;
    for (const auto& [id, w] : suite_plan(o)) {
        const SuiteSummary s = run_suite(id, cfg, w);
        clean = clean && s.violations == 0;
        arr.push_back(io::to_json(s));
    }
    return arr;
}

BoundId bound_arg(const std::string& text)
{
    for (BoundId id : {BoundId::thm1, BoundId::thm2, BoundId::thm3, BoundId::cor1, BoundId::cor2, BoundId::cor4})
        if (text == to_string(id)) return id;
    throw InvalidArgument("--bound: expected thm1|thm2|thm3|cor1|cor2|cor4");
}

int cmd_perturb(const Options& o, std::ostream& out)
{
    if (o.suite) {
        if (!o.bound.empty()) bound_arg(o.bound);
        json rep = header("perturb", o);
        rep["trials"] = o.trials;
        bool clean = true;
        rep["suites"] = run_suites(o, clean);
        rep["holds"] = clean;
        emit(rep, o, out);
        return clean ? kOk : kDefect;
    }
    need(o.bound, "--bound", "perturb");
    const BoundId id = bound_arg(o.bound);
    const MarkovSymbol f = symbol_arg(o.symbol, "perturb");
    const Matrix A = matrix_arg(o.A.empty() ? o.matrix : o.A, "--A", "perturb");
    const IdealNorm w = o.ideal.empty() ? IdealNorm::op() : IdealNorm::parse(o.ideal);
    const OperatorCertificate ca = certificate_for(f, A, o, "A", Need::v0b);

    json rep = header("perturb", o);
    rep["symbol"] = io::to_json(f);
    json certs = json::array({io::to_json(ca)});
    BoundReport report;
    std::optional<bool> ordered;
    switch (id) {
    case BoundId::thm1:
    case BoundId::thm2:
    case BoundId::thm3: {
        const Matrix B = matrix_arg(o.B, "--B", "perturb");
        const OperatorCertificate cb = certificate_for(f, B, o, "B", Need::v0b);
        certs.push_back(io::to_json(cb));
        const PairCertificates pc{ca, cb};
        if (id == BoundId::thm1)
            report = bound_thm1(f, A, B, pc);
        else if (id == BoundId::thm2)
            report = bound_thm2_pointwise(f, A, B, vector_arg(o.x, A.rows()), pc);
        else
            report = bound_thm3_ideal(f, A, B, w, pc);
        break;
    }
    case BoundId::cor1:
    case BoundId::cor2: {
        const MomentReports m = moment_inequalities(f, A, vector_arg(o.x, A.rows()), ca);
        report = id == BoundId::cor1 ? m.cor1 : m.cor2;
        ordered = m.ordered;
        break;
    }
    case BoundId::cor4:
        report = commutator_bound(f, A, matrix_arg(o.U, "--U", "perturb"), w, ca);
        break;
    }
    rep["certificates"] = certs;
    rep["report"] = io::to_json(report);
    if (const auto it = report.constants.find("quadrature_order"); it != report.constants.end())
        if (const double* d = std::get_if<double>(&it->second)) rep["quadrature_orders"] = {{"bound", *d}};
    bool holds = report.holds;
    if (ordered) {
        rep["ordered"] = *ordered;
        holds = holds && *ordered;
    }
    rep["holds"] = holds;
    emit(rep, o, out);
    return holds ? kOk : kDefect;
}

int cmd_frechet(const Options& o, std::ostream& out)
{
    const MarkovSymbol f = symbol_arg(o.symbol, "frechet");
    const Matrix A = matrix_arg(o.matrix.empty() ? o.A : o.matrix, "--matrix", "frechet");
    const Matrix B = matrix_arg(o.direction, "--direction", "frechet");
    const OperatorCertificate cert = certificate_for(f, A, o, "A");
    const MatrixIntegral mi = frechet_integral(f, A, B, cert);
    const Matrix& D = mi.values.front();

    json rep = header("frechet", o);
    rep["symbol"] = io::to_json(f);
    rep["certificates"] = json::array({io::to_json(cert)});
    json orders = {{"derivative", mi.order}};
    rep["converged"] = mi.converged;
    rep["derivative"] = io::to_json(D);
    bool holds = mi.converged;

    // commuting direction: the derivative is f'(A)B
    const Matrix comm = A * B - B * A;
    if (op_norm(comm) <= 1e-12 * (1.0 + op_norm(A)) * (1.0 + op_norm(B))) {
        const Matrix FB = fprime_of_A(f, A, cert) * B;
        const double d = op_norm(D - FB);
        const double tol = 1e-9 * (1.0 + op_norm(FB));
        rep["commuting"] = {{"defect", d}, {"tolerance", tol}, {"holds", d <= tol}};
        holds = holds && d <= tol;
    }
    if (o.fd_check) {
        const FiniteDifferenceCheck fd = frechet_fd_check(f, A, B, cert, {1e-3, 1e-4, 1e-5, 1e-6});
        const bool ok = fd.slope >= 1.9;
        rep["fd_check"] = {{"steps", fd.steps}, {"errors", fd.errors}, {"slope", fd.slope},
                           {"threshold", 1.9}, {"holds", ok}};
        orders["fd_check"] = fd.quadrature_order;
        holds = holds && ok;
    }
    rep["quadrature_orders"] = orders;
    rep["holds"] = holds;
    emit(rep, o, out);
    return holds ? kOk : kDefect;
}

int cmd_taylor(const Options& o, std::ostream& out)
{
    const MarkovSymbol f = symbol_arg(o.symbol, "taylor");
    const Matrix A = matrix_arg(o.matrix.empty() ? o.A : o.matrix, "--matrix", "taylor");
    const Matrix B = matrix_arg(o.direction, "--direction", "taylor");
    need(o.z, "--z", "taylor");
    const cplx z = complex_pair(o.z, "--z");
    if (o.terms < 0) throw InvalidArgument("--terms must be positive");
    const OperatorCertificate cert = certificate_for(f, A, o, "A", Need::vab);
    const TaylorResult t = taylor_eval(f, A, B, z, o.terms, cert);

    json rep = header("taylor", o);
    rep["symbol"] = io::to_json(f);
    json certs = json::array({io::to_json(cert)});
    json orders = {{"coefficients", t.quadrature_order}};
    rep["z"] = io::to_json(z);
    rep["terms"] = t.terms;
    rep["radius"] = t.radius;
    rep["ratio"] = t.ratio;
    rep["tail_bound"] = t.tail_bound;
    json norms = json::array();
    for (const Matrix& C : t.coefficients) norms.push_back(op_norm(C));
    rep["coefficient_norms"] = norms;
    rep["value"] = io::to_json(t.value);

    // direct difference f(A + zB) - f(A)
    const Matrix Az = A + z * B;
    const OperatorCertificate cz = certificate_for(f, Az, o, "A+zB", Need::vab);
    certs.push_back(io::to_json(cz));
    const ApplyResult d = apply_detailed(f, Az, cz);
    const ApplyResult d0 = apply_detailed(f, A, cert);
    orders["direct"] = std::max(d.order, d0.order);
    const Matrix diff = d.value - d0.value;
    const double defect = op_norm(t.value - diff);
    const double tol = t.tail_bound + 1e-8 * (1.0 + op_norm(diff));
    const bool converged = d.converged && d0.converged;
    rep["direct"] = {{"defect", defect}, {"tolerance", tol}, {"converged", converged}};
    rep["certificates"] = certs;
    rep["quadrature_orders"] = orders;
    const bool holds = converged && defect <= tol;
    rep["holds"] = holds;
    emit(rep, o, out);
    return holds ? kOk : kDefect;
}

int cmd_trace_shift(const Options& o, std::ostream& out)
{
    const MarkovSymbol f = symbol_arg(o.symbol, "trace-shift");
    const Matrix A = matrix_arg(o.A, "--A", "trace-shift");
    const Matrix B = matrix_arg(o.B, "--B", "trace-shift");
    TraceFormulaOptions opts;
    if (!o.contour.empty()) opts.contour = ContourSpec::parse(o.contour);
    if (!o.anchor.empty()) opts.anchor = complex_pair(o.anchor, "--anchor");
    const TraceFormulaReport r = trace_formula_check(f, A, B, opts);

    json rep = header("trace-shift", o);
    rep["symbol"] = io::to_json(f);
    const double lo = f.support_lo();
    const double hi = f.support_hi();
    rep["certificates"] = json::array({io::to_json(certify_Vab(A, lo, hi, o.grid, "A")),
                                       io::to_json(certify_Vab(B, lo, hi, o.grid, "B"))});
    rep["quadrature_orders"] = {{"apply", r.apply_order}, {"kernel", r.kernel_order}, {"contour_nodes", r.contour_nodes}};
    rep["report"] = io::to_json(r);

    const ShiftFunction xi = build_xi(A, B, r.contour_spec, lo, hi, r.anchor);
    json samples = json::array();
    const std::size_t step = std::max<std::size_t>(1, xi.nodes.size() / 64);
    for (std::size_t k = 0; k < xi.nodes.size(); k += step)
        samples.push_back({xi.nodes[k].s, xi.nodes[k].z.real(), xi.nodes[k].z.imag(), xi.values[k].real(),
                           xi.values[k].imag()});
    rep["xi_samples"] = {{"columns", {"s", "re_z", "im_z", "re_xi", "im_xi"}}, {"rows", samples}};
    if (!o.csv.empty()) {
        std::ofstream f(o.csv);
        if (!f) throw InvalidArgument("--csv: cannot write " + o.csv);
        write_xi_csv(xi, f);
        rep["xi_csv"] = o.csv;
    }
    rep["holds"] = r.holds;
    emit(rep, o, out);
    return r.holds ? kOk : kDefect;
}

json check(const std::string& name, bool holds, double defect)
{
    return json{{"name", name}, {"defect", defect}, {"holds", holds}};
}

int cmd_selftest(const Options& o, std::ostream& out)
{
    json rep = header("selftest", o);
    rep["trials"] = o.trials;
    json checks = json::array();
    bool all = true;
    auto record = [&](const std::string& name, double defect, double tol) {
        const bool ok = defect <= tol;
        all = all && ok;
        checks.push_back(check(name, ok, defect));
    };

    {  // atom at t = 1 on a Jordan block: A (I - A)^{-1}
        Matrix J(2, 2);
        J << -1.0, 1.0, 0.0, -1.0;
        Matrix want(2, 2);
        want << -0.5, 0.25, 0.0, -0.5;
        const MarkovSymbol f = atom_symbol(1.0, 1.0, 0.0, 1.0);
        record("apply/jordan-atom", op_norm(apply(f, J, certify_V0b(J, 1.0)) - want), 1e-10);
    }
    {
        const MarkovSymbol f = example1b(0.5, 1.0);
        record("symbols/inverse-moment", std::abs(inverse_moment(f.measure()) - 1.0), 1e-10);
        record("symbols/mass", std::abs(total_mass(f.measure()) - 0.5), 1e-10);
        const Matrix A = fixtures::diag({-1.0, -2.0});
        const Matrix fA = apply(f, A, certify_V0b(A, 1.0));
        record("apply/diag-closed-form", std::abs(fA(0, 0) - f.eval_reference(-1.0)), 1e-10);
    }
    {  // 1x1 trace formula: tr(f(-1) - f(-2))
        const MarkovSymbol f = example1a(0.5, 1.0);
        const Matrix A = Matrix::Constant(1, 1, -1.0);
        const Matrix B = Matrix::Constant(1, 1, -2.0);
        const TraceFormulaReport r = trace_formula_check(f, A, B);
        const cplx exact = f.eval_reference(-1.0) - f.eval_reference(-2.0);
        record("trace-shift/scalar", std::abs(r.contour - exact), 1e-10);
        all = all && r.holds;
    }
    rep["checks"] = checks;
    bool clean = true;
    Options so = o;
    so.bound.clear();
    so.ideal.clear();
    rep["suites"] = run_suites(so, clean);
    all = all && clean;
    rep["holds"] = all;
    emit(rep, o, out);
    return all ? kOk : kDefect;
}

json provenance(const std::string& kind, const Options& o, json params)
{
    return json{{"generator", "markov-opcalc"}, {"version", kVersion}, {"kind", kind}, {"seed", o.seed},
                {"params", std::move(params)}};
}

int cmd_fixtures(const Options& o, std::ostream& out)
{
    need(o.kind, "--kind", "fixtures");
    fixtures::Rng rng(o.seed);
    json rep = header("fixtures", o);
    if (o.kind == "diag") {
        need(o.values, "--values", "fixtures");
        const std::vector<cplx> v = complex_list(o.values, "--values");
        json vals = json::array();
        for (cplx l : v) vals.push_back(io::to_json(l));
        rep["provenance"] = provenance(o.kind, o, {{"values", vals}});
        rep["matrix"] = io::to_json(fixtures::diag(v));
    } else if (o.kind == "jordan") {
        need(o.lambda, "--lambda", "fixtures");
        const cplx l = complex_token(o.lambda, "--lambda");
        rep["provenance"] = provenance(o.kind, o, {{"lambda", io::to_json(l)}, {"n", o.n}});
        rep["matrix"] = io::to_json(fixtures::jordan(l, o.n));
    } else if (o.kind == "ritt-inverse") {
        Matrix T;
        json params;
        if (!o.T.empty()) {
            T = matrix_arg(o.T, "--T", "fixtures");
            params["T"] = o.T;
        } else if (!o.values.empty()) {
            const std::vector<cplx> v = complex_list(o.values, "--values");
            T = fixtures::diag(v);
            json vals = json::array();
            for (cplx l : v) vals.push_back(io::to_json(l));
            params["values"] = vals;
        } else {
            T = fixtures::ritt_operator(o.n, rng);
            params["n"] = o.n;
        }
        rep["provenance"] = provenance(o.kind, o, params);
        rep["T"] = io::to_json(T);
        rep["matrix"] = io::to_json(ritt_inverse_plus_identity(T));
    } else if (o.kind == "random-normal" || o.kind == "random-nonnormal" || o.kind == "rank-one-pair") {
        if (!(o.b > 0.0) || !(o.gap > 0.0)) throw InvalidArgument("fixtures: --b and --gap must be positive");
        const std::vector<cplx> spec = fixtures::spectrum_avoiding(0.0, o.b, o.n, o.gap * o.b, rng);
        json params = {{"n", o.n}, {"b", o.b}, {"gap", o.gap}};
        Matrix A;
        if (o.kind == "random-nonnormal") {
            if (o.coupling < 0.0) throw InvalidArgument("fixtures: --coupling must be >= 0");
            params["coupling"] = o.coupling;
            A = fixtures::random_nonnormal(spec, o.coupling, rng);
        } else {
            A = fixtures::random_normal(spec, rng);
        }
        if (o.kind == "rank-one-pair") {
            if (!(o.sigma >= 0.0)) throw InvalidArgument("fixtures: --sigma must be >= 0");
            params["sigma"] = o.sigma;
            const auto [P, Q] = fixtures::rank_one_pair(A, o.sigma, rng);
            rep["provenance"] = provenance(o.kind, o, params);
            rep["A"] = io::to_json(P);
            rep["B"] = io::to_json(Q);
        } else {
            rep["provenance"] = provenance(o.kind, o, params);
            rep["matrix"] = io::to_json(A);
        }
    } else {
        throw InvalidArgument("--kind: expected diag|jordan|ritt-inverse|random-normal|random-nonnormal|rank-one-pair");
    }
    emit(rep, o, out);
    return kOk;
}

// ---- error mapping -----------------------------------------------------------

int fail(std::ostream& err, const char* type, const std::string& message, int code)
{
    err << json{{"error", type}, {"message", message}, {"exit", code}}.dump() << "\n";
    return code;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Markov function operator calculus on dense complex matrices", "markov-opcalc"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    auto common = [&](CLI::App* c) {
        c->add_option("--out", o.out, "write the report here instead of stdout");
        c->add_option("--seed", o.seed, "random seed");
        c->add_option("--interval", o.interval, "certification interval a,b");
        c->add_option("--grid", o.grid, "certificate sampling grid size")->check(CLI::PositiveNumber);
    };
    auto symbolic = [&](CLI::App* c) {
        c->add_option("--symbol", o.symbol, "symbol JSON file, or example1a:alpha,b / example1b:alpha,b");
        c->add_option("--order", o.order, "quadrature order cap")->check(CLI::PositiveNumber);
        c->add_option("--tolerance", o.tolerance, "quadrature convergence tolerance")->check(CLI::PositiveNumber);
    };

    CLI::App* certify = app.add_subcommand("certify", "certify a matrix in V_(0,b] or V_[a,b]");
    common(certify);
    certify->add_option("--matrix", o.matrix, "matrix JSON or CSV");
    certify->add_option("--kind", o.kind, "v0b or vab (default: v0b when a = 0)");

    CLI::App* apply_c = app.add_subcommand("apply", "evaluate f(A)");
    common(apply_c);
    symbolic(apply_c);
    apply_c->add_option("--matrix", o.matrix, "matrix JSON or CSV");
    apply_c->add_option("--oracle", o.oracle, "eig, contour or both");

    CLI::App* perturb = app.add_subcommand("perturb", "perturbation bounds");
    common(perturb);
    symbolic(perturb);
    perturb->add_option("--bound", o.bound, "thm1|thm2|thm3|cor1|cor2|cor4");
    perturb->add_option("--ideal", o.ideal, "op, trace, hs or schatten:p");
    perturb->add_option("--A,--matrix", o.A, "first operator");
    perturb->add_option("--B", o.B, "second operator");
    perturb->add_option("--U", o.U, "invertible U for cor4");
    perturb->add_option("--x", o.x, "vector, comma separated (re or re:im)");
    perturb->add_flag("--suite", o.suite, "run randomized suites");
    perturb->add_option("--trials", o.trials, "trials per suite")->check(CLI::PositiveNumber);

    CLI::App* frechet = app.add_subcommand("frechet", "Frechet derivative of f at A in direction B");
    common(frechet);
    symbolic(frechet);
    frechet->add_option("--matrix,--A", o.matrix, "base point A");
    frechet->add_option("--direction", o.direction, "direction B");
    frechet->add_flag("--fd-check", o.fd_check, "finite-difference order check");

    CLI::App* taylor = app.add_subcommand("taylor", "Taylor series of f(A + zB)");
    common(taylor);
    symbolic(taylor);
    taylor->add_option("--matrix,--A", o.matrix, "base point A");
    taylor->add_option("--direction,--B", o.direction, "direction B");
    taylor->add_option("--z", o.z, "re,im");
    taylor->add_option("--terms", o.terms, "number of terms (default: from the tail bound)");

    CLI::App* trace = app.add_subcommand("trace-shift", "trace formula with the spectral shift function");
    common(trace);
    symbolic(trace);
    trace->add_option("--A", o.A, "first operator");
    trace->add_option("--B", o.B, "second operator");
    trace->add_option("--contour", o.contour, "ellipse:cx,cy,rx,ry[,n] | circle:cx,cy,r[,n] | stadium:cx,cy,length,radius[,n]");
    trace->add_option("--anchor", o.anchor, "base point of xi, re,im");
    trace->add_option("--csv", o.csv, "write xi at the contour nodes as CSV");

    CLI::App* selftest = app.add_subcommand("selftest", "spot checks and every randomized suite");
    common(selftest);
    selftest->add_option("--trials", o.trials, "trials per suite")->check(CLI::PositiveNumber);

    CLI::App* fixtures_c = app.add_subcommand("fixtures", "write a reproducible fixture");
    common(fixtures_c);
    fixtures_c->add_option("--kind", o.kind,
                           "diag|jordan|ritt-inverse|random-normal|random-nonnormal|rank-one-pair");
    fixtures_c->add_option("--values", o.values, "eigenvalues, comma separated (re or re:im)");
    fixtures_c->add_option("--lambda", o.lambda, "Jordan eigenvalue (re or re:im)");
    fixtures_c->add_option("--n", o.n, "dimension")->check(CLI::PositiveNumber);
    fixtures_c->add_option("--T", o.T, "Ritt operator T");
    fixtures_c->add_option("--b", o.b, "right end of the avoided interval");
    fixtures_c->add_option("--gap", o.gap, "distance of the spectrum from [0, b], relative to b");
    fixtures_c->add_option("--coupling", o.coupling, "non-normal coupling");
    fixtures_c->add_option("--sigma", o.sigma, "rank-one perturbation size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*certify) return cmd_certify(o, out);
        if (*apply_c) return cmd_apply(o, out);
        if (*perturb) return cmd_perturb(o, out);
        if (*frechet) return cmd_frechet(o, out);
        if (*taylor) return cmd_taylor(o, out);
        if (*trace) return cmd_trace_shift(o, out);
        if (*selftest) return cmd_selftest(o, out);
        if (*fixtures_c) return cmd_fixtures(o, out);
        return fail(err, "usage", "no subcommand", kUsage);
    } catch (const nlohmann::json::exception& e) {
        return fail(err, "malformed-input", e.what(), kUsage);
    } catch (const InvalidArgument& e) {
        return fail(err, "invalid-argument", e.what(), kUsage);
    } catch (const DomainError& e) {
        return fail(err, "domain", e.what(), kUsage);
    } catch (const NotInClass& e) {
        return fail(err, "not-in-class", e.what(), kUsage);
    } catch (const CertificateMismatch& e) {
        return fail(err, "certificate-mismatch", e.what(), kUsage);
    } catch (const PreconditionError& e) {
        return fail(err, "precondition", e.what(), kUsage);
    } catch (const RadiusError& e) {
        return fail(err, "radius", e.what(), kUsage);
    } catch (const ContourError& e) {
        return fail(err, "contour", e.what(), kUsage);
    } catch (const Error& e) {
        // quadrature breakdown, spectrum hits during evaluation
        return fail(err, "numerical", e.what(), kDefect);
    } catch (const std::exception& e) {
        return fail(err, "internal", e.what(), kDefect);
    }
}

}  // namespace opcalc::cli
