#include "raccess/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "raccess/analysis.hpp"
#include "raccess/errors.hpp"

namespace raccess {

namespace {

using Json = nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr const char* kToolVersion = "0.1.0";

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

bool is_identifier(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

// Whitespace- or comma-separated names, with the column of each.
std::vector<std::pair<std::string, int>> split_names(std::string_view s, int column) {
    std::vector<std::pair<std::string, int>> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != ',') ++j;
        if (j > i) out.emplace_back(std::string(s.substr(i, j - i)), column + static_cast<int>(i));
        i = j;
    }
    return out;
}

int precedence(const Expr& e) {
    switch (e.op) {
    case Expr::Op::add:
    case Expr::Op::sub: return 1;
    case Expr::Op::mul:
    case Expr::Op::div: return 2;
    case Expr::Op::neg: return 3;
    case Expr::Op::pow: return 4;
    case Expr::Op::number: return e.number.get_den() == 1 ? 5 : 2;
    default: return 5;
    }
}

bool decimal_denominator(Integer d) {
    for (unsigned long p : {2UL, 5UL})
        while (d % p == 0) d /= p;
    return d == 1;
}

std::string print_number(const Rational& q) {
    if (q.get_den() == 1) return q.get_str();
    if (!decimal_denominator(q.get_den())) return q.get_num().get_str() + "/" + q.get_den().get_str();
    // Exact decimal expansion.
    Integer num = q.get_num(), den = q.get_den();
    std::string sign = num < 0 ? "-" : "";
    num = abs(num);
    Integer whole = num / den, rem = num % den;
    std::string frac;
    while (rem != 0) {
        rem *= 10;
        Integer digit = rem / den;
        frac += digit.get_str();
        rem %= den;
    }
    return sign + whole.get_str() + "." + frac;
}

std::string wrap_if(const std::string& s, bool cond) { return cond ? "(" + s + ")" : s; }

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

std::string format_point(const std::vector<RealCoordinate>& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ", ";
        s += p[i].exact ? p[i].value.get_str() : "[" + p[i].lo.get_str() + ", " + p[i].hi.get_str() + "]";
    }
    return s + ")";
}

std::string format_rationals(const std::vector<Rational>& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + p[i].get_str();
    return s + ")";
}

std::string format_doubles(const std::vector<double>& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + format_double(p[i]);
    return s + ")";
}

std::string set_text(const std::vector<double>& p) {
    std::string s = format_doubles(p);
    return "{" + s.substr(1, s.size() - 2) + "}";
}

std::string status_name(ChainResult::Status s) {
    switch (s) {
    case ChainResult::Status::stabilized: return "stabilized";
    case ChainResult::Status::budget_exhausted: return "budget_exhausted";
    case ChainResult::Status::not_applicable: return "not_applicable";
    }
    return "unknown";
}

std::string kind_name(SingularSet::Kind k) {
    switch (k) {
    case SingularSet::Kind::empty: return "empty";
    case SingularSet::Kind::points: return "points";
    case SingularSet::Kind::generators: return "generators";
    case SingularSet::Kind::entire_space: return "entire_space";
    }
    return "unknown";
}

Json polys_json(const std::vector<Polynomial>& ps) {
    std::vector<std::string> texts;
    for (const auto& p : ps) texts.push_back(p.to_string());
    std::sort(texts.begin(), texts.end());
    texts.erase(std::unique(texts.begin(), texts.end()), texts.end());
    return Json(texts);
}

Json chain_json(const ChainResult& c) {
    Json j;
    j["status"] = status_name(c.status);
    j["index"] = c.index ? Json(*c.index) : Json(nullptr);
    j["certified"] = c.certified;
    j["confirmed"] = c.confirmed;
    j["confirmation_broken"] = c.confirmation_broken;
    j["ideal"] = polys_json(c.ideal.registry() ? c.ideal.basis() : std::vector<Polynomial>{});
    Json h = Json::array();
    for (const auto& st : c.history) {
        Json s;
        s["k"] = st.k;
        s["generators"] = polys_json(st.ideal.basis());
        s["certified"] = st.certified;
        if (!st.method.empty()) s["method"] = st.method;
        h.push_back(std::move(s));
    }
    j["history"] = std::move(h);
    return j;
}

Json point_json(const RealPoint& p) {
    Json a = Json::array();
    for (const auto& c : p) {
        if (c.exact) {
            a.push_back(c.value.get_str());
        } else {
            a.push_back(Json{{"lo", c.lo.get_str()}, {"hi", c.hi.get_str()}, {"approx", c.approx()}});
        }
    }
    return a;
}

Json singular_json(const SingularSet& s) {
    Json j;
    j["kind"] = kind_name(s.kind);
    Json pts = Json::array();
    for (const auto& p : s.points) pts.push_back(point_json(p));
    j["points"] = std::move(pts);
    j["generators"] = polys_json(s.generators);
    if (!s.note.empty()) j["note"] = s.note;
    return j;
}

Json report_json(const AnalysisReport& r) {
    Json j;
    j["backward"] = r.backward;
    j["submersive"] = r.submersive;
    j["generically_accessible"] = r.generically_accessible;
    j["kappa"] = chain_json(r.kappa);
    j["r_star"] = r.r_star ? chain_json(*r.r_star) : Json(nullptr);
    j["singular_set"] = singular_json(r.singular_set);
    j["excluded_locus"] = polys_json(r.excluded_locus);
    j["parameter_conditions"] = polys_json(r.parameter_conditions);
    j["invariant"] = r.invariant ? Json(*r.invariant) : Json(nullptr);
    j["certification"] = r.certification == Certification::exact ? "exact" : "heuristic";
    return j;
}

// Factored generators, sorted by total degree and then text, duplicates dropped.
std::vector<std::string> sorted_factored(const std::vector<Polynomial>& gens) {
    std::vector<std::pair<int, std::string>> keyed;
    for (const auto& g : gens) keyed.emplace_back(static_cast<int>(g.total_degree()), factored_string(g));
    std::sort(keyed.begin(), keyed.end());
    keyed.erase(std::unique(keyed.begin(), keyed.end()), keyed.end());
    std::vector<std::string> out;
    for (auto& [d, s] : keyed) out.push_back(std::move(s));
    return out;
}

std::string generator_list(const std::vector<Polynomial>& gens) {
    std::string s = "<";
    bool first = true;
    for (const auto& g : sorted_factored(gens)) {
        s += (first ? "" : ", ") + g;
        first = false;
    }
    return s + ">";
}

// Denominator factors free of inputs are listed; the rest are only counted.
std::string excluded_text(const std::vector<Polynomial>& locus) {
    if (locus.empty()) return "none";
    std::vector<Polynomial> state_only;
    std::set<std::string> with_inputs;
    for (const auto& p : locus) {
        if (p.uses_class(VarClass::input)) {
            with_inputs.insert(p.to_string());
        } else {
            state_only.push_back(p);
        }
    }
    std::string s = state_only.empty() ? "" : "zero set of " + generator_list(state_only);
    if (!with_inputs.empty()) {
        if (!s.empty()) s += "; ";
        s += std::to_string(with_inputs.size()) + " input-dependent denominator factor" +
             (with_inputs.size() == 1 ? "" : "s") + " (listed with --json)";
    }
    return s;
}

std::string singular_text(const SingularSet& s) {
    switch (s.kind) {
    case SingularSet::Kind::empty: return "empty";
    case SingularSet::Kind::entire_space: return "entire state space";
    case SingularSet::Kind::points: {
        std::string out = "{";
        for (std::size_t i = 0; i < s.points.size(); ++i) out += (i ? ", " : "") + format_point(s.points[i]);
        return out + "}";
    }
    case SingularSet::Kind::generators: return "zero set of " + generator_list(s.generators);
    }
    return "";
}

void print_chain(std::ostream& out, const std::string& title, const ChainResult& c) {
    out << title << ":\n";
    for (const auto& st : c.history) {
        out << "  I_" << st.k << " = " << generator_list(st.ideal.basis());
        if (!st.method.empty()) out << "  [" << st.method << (st.certified ? ", certified" : ", uncertified") << "]";
        out << "\n";
    }
}

void print_report(std::ostream& out, const AnalysisReport& r, bool singular_only) {
    if (!singular_only) {
        out << "submersive: " << (r.submersive ? "yes" : "no") << "\n";
        out << "generically accessible: " << (r.generically_accessible ? "yes" : "no") << "\n";
        if (!r.kappa.history.empty()) {
            print_chain(out, "kappa chain (ideal sums)", r.kappa);
            out << "kappa: " << (r.kappa.index ? std::to_string(*r.kappa.index) : "none") << " ("
                << status_name(r.kappa.status) << ")\n";
        }
        if (r.r_star) {
            print_chain(out, "r* chain (real radicals)", *r.r_star);
            out << "r*: " << (r.r_star->index ? std::to_string(*r.r_star->index) : "none") << " ("
                << status_name(r.r_star->status) << (r.r_star->certified ? ", certified" : ", uncertified") << ")\n";
        }
    }
    out << (r.backward ? "backward singular set: " : "singular set: ") << singular_text(r.singular_set) << "\n";
    if (!r.singular_set.note.empty()) out << "note: " << r.singular_set.note << "\n";
    if (!singular_only) {
        out << "excluded locus: " << excluded_text(r.excluded_locus) << "\n";
        if (!r.parameter_conditions.empty())
            out << "assumed nonzero: " << generator_list(r.parameter_conditions) << "\n";
        if (r.invariant) out << "forward invariant: " << (*r.invariant ? "yes" : "no") << "\n";
    }
    out << "certification: " << (r.certification == Certification::exact ? "exact" : "heuristic") << "\n";
}

std::vector<std::string> parse_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::vector<Rational> parse_point(const std::string& s) {
    std::vector<Rational> out;
    for (const auto& part : parse_csv(s)) out.push_back(parse_exact(part));
    return out;
}

std::vector<double> to_doubles(const std::vector<Rational>& v) {
    std::vector<double> out;
    for (const auto& q : v) out.push_back(q.get_d());
    return out;
}

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct Common {
    std::string file;
    std::vector<std::string> binds;
    int max_k = 0;
    bool json = false;
};

struct Loaded {
    std::string text;
    SystemSpec spec;
    std::map<std::string, Rational> bindings;
};

Loaded load(const Common& c) {
    Loaded l;
    l.text = read_file(c.file);
    l.spec = parse_system(l.text);
    for (const auto& b : c.binds) {
        for (const auto& item : parse_csv(b)) {
            auto eq = item.find('=');
            if (eq == std::string::npos) throw UsageError("--bind expects NAME=VALUE, got '" + item + "'");
            std::string name = trim(item.substr(0, eq));
            if (std::find(l.spec.params.begin(), l.spec.params.end(), name) == l.spec.params.end())
                throw UsageError("--bind: '" + name + "' is not a parameter of " + l.spec.name);
            try {
                l.bindings[name] = parse_exact(trim(item.substr(eq + 1)));
            } catch (const std::invalid_argument&) {
                throw UsageError("--bind: bad value in '" + item + "'");
            }
        }
    }
    return l;
}

SystemModel exact_model(const Loaded& l) {
    if (!is_rational(l.spec))
        throw UsageError(l.spec.name + " has transcendental updates; only simulate, rank and scan1d apply");
    SystemModel sys = to_model(l.spec);
    return l.bindings.empty() ? sys : sys.bind(l.bindings);
}

NumericMap numeric_model(const Loaded& l) {
    std::map<std::string, double> values;
    for (const auto& [k, v] : l.bindings) values[k] = v.get_d();
    for (const auto& p : l.spec.params)
        if (!values.count(p)) throw UsageError("parameter " + p + " needs a value for numeric commands (use --bind)");
    return to_numeric_map(l.spec, values);
}

Json header(const std::string& command, const Loaded& l) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["tool"] = "raccess";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["input_hash"] = "fnv1a64:" + fnv1a_hex(l.text);
    Json sys;
    sys["name"] = l.spec.name;
    sys["params"] = l.spec.params;
    sys["states"] = l.spec.states;
    sys["inputs"] = l.spec.inputs;
    sys["numeric"] = l.spec.numeric;
    j["system"] = std::move(sys);
    Json b = Json::object();
    for (const auto& [k, v] : l.bindings) b[k] = v.get_str();
    j["bindings"] = std::move(b);
    return j;
}

void system_line(std::ostream& out, const Loaded& l) {
    out << "system: " << l.spec.name << " (n=" << l.spec.states.size() << ", m=" << l.spec.inputs.size();
    if (!l.spec.params.empty()) {
        out << ", params";
        for (const auto& p : l.spec.params) {
            out << " " << p;
            auto it = l.bindings.find(p);
            if (it != l.bindings.end()) out << "=" << it->second.get_str();
        }
    }
    out << ")\n";
}

void emit(std::ostream& out, Json j, std::chrono::steady_clock::time_point start) {
    j["timings"] = {{"total_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    out << j.dump(2) << "\n";
}

} // namespace

// ---------------------------------------------------------------------------
// System files

SystemSpec parse_system(std::string_view text) {
    SystemSpec spec;
    bool have_name = false, have_params = false, have_states = false, have_inputs = false;
    int states_line = 0;
    std::vector<std::tuple<std::string, std::string, int, int, int>> pending;  // state, expr, line, name col, expr col
    std::set<std::string> declared;
    auto declare = [&](std::vector<std::string>& into, std::string_view rest, int line, int col) {
        for (const auto& [name, c] : split_names(rest, col)) {
            if (!is_identifier(name)) throw ParseError(line, c, "'" + name + "' is not a valid name");
            if (is_function_name(name) || name == "pi" || name == "system" || name == "params" ||
                name == "states" || name == "inputs" || name == "numeric")
                throw ParseError(line, c, "'" + name + "' is reserved");
            if (!declared.insert(name).second) throw ParseError(line, c, "'" + name + "' declared twice");
            into.push_back(name);
        }
    };

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        std::size_t hash = raw.find('#');
        std::string_view body = hash == std::string_view::npos ? raw : raw.substr(0, hash);
        std::size_t first = 0;
        while (first < body.size() && std::isspace(static_cast<unsigned char>(body[first]))) ++first;
        if (first == body.size()) {
            if (end == text.size()) break;
            continue;
        }
        const int col0 = static_cast<int>(first) + 1;
        std::size_t word_end = first;
        while (word_end < body.size() && (std::isalnum(static_cast<unsigned char>(body[word_end])) || body[word_end] == '_'))
            ++word_end;
        std::string word(body.substr(first, word_end - first));
        std::string_view rest = body.substr(word_end);
        const int rest_col = static_cast<int>(word_end) + 1;

        std::size_t after = word_end;
        while (after < body.size() && std::isspace(static_cast<unsigned char>(body[after]))) ++after;
        if (!word.empty() && after < body.size() && body[after] == '\'') {
            std::size_t eq = after + 1;
            while (eq < body.size() && std::isspace(static_cast<unsigned char>(body[eq]))) ++eq;
            if (eq >= body.size() || body[eq] != '=')
                throw ParseError(line_no, static_cast<int>(eq) + 1, "expected '=' after " + word + "'");
            pending.emplace_back(word, std::string(body.substr(eq + 1)), line_no, col0, static_cast<int>(eq) + 2);
            if (end == text.size()) break;
            continue;
        }
        if (!pending.empty() && (word == "system" || word == "params" || word == "states" || word == "inputs"))
            throw ParseError(line_no, col0, "declarations must precede the updates");
        if (word == "system") {
            if (have_name) throw ParseError(line_no, col0, "duplicate 'system' line");
            auto names = split_names(rest, rest_col);
            if (names.size() != 1) throw ParseError(line_no, rest_col, "'system' takes exactly one name");
            spec.name = names[0].first;
            have_name = true;
        } else if (word == "params") {
            if (have_params) throw ParseError(line_no, col0, "duplicate 'params' line");
            declare(spec.params, rest, line_no, rest_col);
            have_params = true;
        } else if (word == "states") {
            if (have_states) throw ParseError(line_no, col0, "duplicate 'states' line");
            declare(spec.states, rest, line_no, rest_col);
            have_states = true;
            states_line = line_no;
        } else if (word == "inputs") {
            if (have_inputs) throw ParseError(line_no, col0, "duplicate 'inputs' line");
            declare(spec.inputs, rest, line_no, rest_col);
            have_inputs = true;
        } else if (word == "numeric") {
            if (!trim(rest).empty()) throw ParseError(line_no, rest_col, "'numeric' takes no arguments");
            spec.numeric = true;
        } else {
            throw ParseError(line_no, col0, "expected a declaration or an update 'state' = expression'");
        }
        if (end == text.size()) break;
    }
    if (!have_name) throw ParseError(1, 1, "missing 'system <name>' line");
    if (spec.states.empty()) throw ParseError(line_no, 1, "no states declared");
    if (spec.inputs.empty()) throw ParseError(line_no, 1, "no inputs declared");

    spec.registry = VariableRegistry::create(spec.params, spec.states, spec.inputs, 1);
    spec.updates.assign(spec.states.size(), nullptr);
    for (const auto& [state, expr, line, ncol, ecol] : pending) {
        auto it = std::find(spec.states.begin(), spec.states.end(), state);
        if (it == spec.states.end()) throw ParseError(line, ncol, "update for undeclared state '" + state + "'");
        auto idx = static_cast<std::size_t>(it - spec.states.begin());
        if (spec.updates[idx]) throw ParseError(line, ncol, "duplicate update for '" + state + "'");
        spec.updates[idx] = parse_expression(expr, *spec.registry, spec.numeric, line, ecol);
    }
    for (std::size_t i = 0; i < spec.states.size(); ++i)
        if (!spec.updates[i]) throw ParseError(states_line, 1, "state '" + spec.states[i] + "' has no update");
    return spec;
}

std::string print_expression(const Expr& e) {
    const int p = precedence(e);
    switch (e.op) {
    case Expr::Op::number: return print_number(e.number);
    case Expr::Op::variable: return e.name;
    case Expr::Op::pi: return "pi";
    case Expr::Op::neg: return "-" + wrap_if(print_expression(*e.lhs), precedence(*e.lhs) <= p);
    case Expr::Op::add:
    case Expr::Op::sub:
    case Expr::Op::mul:
    case Expr::Op::div: {
        const char* sym = e.op == Expr::Op::add ? " + " : e.op == Expr::Op::sub ? " - " : e.op == Expr::Op::mul ? "*" : "/";
        std::string l = wrap_if(print_expression(*e.lhs), precedence(*e.lhs) < p);
        std::string r = wrap_if(print_expression(*e.rhs), precedence(*e.rhs) <= p);
        return l + sym + r;
    }
    case Expr::Op::pow: {
        std::string base = wrap_if(print_expression(*e.lhs), precedence(*e.lhs) <= p);
        return base + "^" + (e.exponent < 0 ? "(" + std::to_string(e.exponent) + ")" : std::to_string(e.exponent));
    }
    case Expr::Op::call: return e.name + "(" + print_expression(*e.lhs) + ")";
    }
    return "";
}

std::string print_system(const SystemSpec& spec) {
    std::ostringstream os;
    os << "system " << spec.name << "\n";
    if (spec.numeric) os << "numeric\n";
    auto list = [&](const char* key, const std::vector<std::string>& names) {
        if (names.empty()) return;
        os << key;
        for (const auto& n : names) os << " " << n;
        os << "\n";
    };
    list("params", spec.params);
    list("states", spec.states);
    list("inputs", spec.inputs);
    for (std::size_t i = 0; i < spec.states.size(); ++i) os << spec.states[i] << "' = " << print_expression(*spec.updates[i]) << "\n";
    return os.str();
}

bool is_rational(const SystemSpec& spec) {
    return std::none_of(spec.updates.begin(), spec.updates.end(), [](const ExprPtr& e) { return is_transcendental(*e); });
}

SystemModel to_model(const SystemSpec& spec) {
    std::vector<RationalFunction> phi;
    for (const auto& e : spec.updates) phi.push_back(to_rational(*e, spec.registry));
    return SystemModel(spec.name, spec.registry, std::move(phi));
}

NumericMap to_numeric_map(const SystemSpec& spec, const std::map<std::string, double>& params) {
    return NumericMap::from_expressions(spec.registry, spec.updates, params);
}

Rational parse_exact(std::string_view text) {
    std::string s = trim(text);
    auto bad = [&]() { return std::invalid_argument("not an exact number: '" + s + "'"); };
    if (s.empty()) throw bad();
    std::size_t i = 0;
    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = s[0] == '-';
        i = 1;
    }
    std::string body = s.substr(i);
    Rational value;
    auto digits = [](const std::string& d) {
        return !d.empty() && std::all_of(d.begin(), d.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    };
    if (auto slash = body.find('/'); slash != std::string::npos) {
        std::string a = body.substr(0, slash), b = body.substr(slash + 1);
        if (!digits(a) || !digits(b)) throw bad();
        Integer den(b, 10);
        if (den == 0) throw bad();
        value = Rational(Integer(a, 10), den);
    } else if (auto dot = body.find('.'); dot != std::string::npos) {
        std::string a = body.substr(0, dot), b = body.substr(dot + 1);
        if ((a.empty() && b.empty()) || (!a.empty() && !digits(a)) || (!b.empty() && !digits(b))) throw bad();
        Integer den = 1;
        for (std::size_t k = 0; k < b.size(); ++k) den *= 10;
        value = Rational(Integer((a.empty() ? "0" : a) + b, 10), den);
    } else {
        if (!digits(body)) throw bad();
        value = Rational(Integer(body, 10));
    }
    value.canonicalize();
    return negative ? Rational(-value) : value;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Commands

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Forward accessibility of rational discrete-time control systems", "raccess"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub, bool file = true) {
        if (file) sub->add_option("file", common.file, "system definition file")->required();
        sub->add_option("--bind", common.binds, "parameter values, NAME=VALUE[,NAME=VALUE...]");
        sub->add_flag("--json", common.json, "machine-readable JSON report on standard output");
    };

    auto* check = app.add_subcommand("check", "submersivity and generic accessibility");
    add_common(check);

    bool exact_radical = false, confirm = false;
    auto* index = app.add_subcommand("index", "ideal chains, kappa and the singular set");
    add_common(index);
    index->add_option("--max-k", common.max_k, "largest k to try (default 2n + 4)");
    index->add_flag("--exact-radical", exact_radical, "also run the real-radical chain for r*");
    index->add_flag("--confirm", confirm, "compare the stable ideal with one more step");

    auto* singular = app.add_subcommand("singular", "accessibility singular points");
    add_common(singular);
    singular->add_option("--max-k", common.max_k, "largest k to try (default 2n + 4)");

    std::string xs;
    int k = 0;
    auto* point = app.add_subcommand("point", "membership of one state in S_k");
    add_common(point);
    point->add_option("--x", xs, "state, comma separated exact values")->required();
    point->add_option("--k", k, "steps")->required();

    std::string us;
    int steps = 0;
    std::uint64_t seed = 20240531;
    auto* sim = app.add_subcommand("simulate", "iterate the update map");
    add_common(sim);
    sim->add_option("--x", xs, "initial state, comma separated")->required();
    sim->add_option("--u", us, "inputs: steps separated by ';', components by ','");
    sim->add_option("--steps", steps, "random inputs from [-1, 1] for this many steps");
    sim->add_option("--seed", seed, "seed for random inputs");

    RankOptions ropt;
    auto* rank = app.add_subcommand("rank", "numeric rank of the k-step input Jacobian");
    add_common(rank);
    rank->add_option("--x", xs, "state, comma separated")->required();
    rank->add_option("--k", k, "steps")->required();
    rank->add_option("--samples", ropt.samples, "random input sequences");
    rank->add_option("--tol", ropt.tol, "relative singular value tolerance");
    rank->add_option("--seed", ropt.seed, "sampling seed");

    ScanOptions sopt;
    auto* scan = app.add_subcommand("scan1d", "grid estimate of S_1..S_k for a one-state map");
    add_common(scan);
    scan->add_option("--lo", sopt.lo, "left end of the state interval")->required();
    scan->add_option("--hi", sopt.hi, "right end of the state interval")->required();
    scan->add_option("--step", sopt.step, "grid resolution")->required();
    scan->add_option("--k", sopt.k, "steps")->required();
    scan->add_option("--samples", sopt.samples, "input samples per grid point");
    scan->add_option("--threshold", sopt.threshold, "derivative threshold");
    scan->add_option("--ulo", sopt.input_lo, "lower input bound");
    scan->add_option("--uhi", sopt.input_hi, "upper input bound");
    scan->add_option("--seed", sopt.seed, "sampling seed");

    auto* back = app.add_subcommand("backward", "singular points of the time-inverted system");
    add_common(back, false);
    back->add_option("--inverse", common.file, "definition file of the inverse system")->required();
    back->add_option("--max-k", common.max_k, "largest k to try (default 2n + 4)");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        CLI::App* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        Loaded l = load(common);

        if (name == "check") {
            Analyzer an(exact_model(l));
            const bool subm = an.submersive();
            const bool acc = an.generically_accessible();
            std::string verdict = !subm  ? "not submersive; accessibility analysis does not apply"
                                  : acc ? "generically accessible"
                                        : "not generically accessible; singular everywhere";
            if (common.json) {
                Json j = header(name, l);
                j["submersive"] = subm;
                j["generically_accessible"] = acc;
                j["verdict"] = verdict;
                emit(out, std::move(j), start);
            } else {
                system_line(out, l);
                out << "submersive: " << (subm ? "yes" : "no") << "\n";
                out << "generically accessible: " << (acc ? "yes" : "no") << " (rank of M_" << l.spec.states.size()
                    << ")\n";
                out << "verdict: " << verdict << "\n";
            }
            return 0;
        }

        if (name == "index" || name == "singular" || name == "backward") {
            AnalysisOptions opt;
            opt.max_k = common.max_k;
            opt.exact_radical = exact_radical;
            opt.confirm = confirm;
            SystemModel sys = exact_model(l);
            AnalysisReport rep = name == "backward" ? backward_analysis(sys, opt) : analyze(sys, opt);
            if (common.json) {
                Json j = header(name, l);
                j["report"] = report_json(rep);
                emit(out, std::move(j), start);
            } else {
                system_line(out, l);
                print_report(out, rep, name == "singular");
            }
            return rep.kappa.status == ChainResult::Status::budget_exhausted ? 3 : 0;
        }

        if (name == "point") {
            std::vector<Rational> x0;
            try {
                x0 = parse_point(xs);
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string("--x: ") + e.what());
            }
            if (x0.size() != l.spec.states.size()) throw UsageError("--x needs " + std::to_string(l.spec.states.size()) + " values");
            if (k < 1) throw UsageError("--k must be positive");
            if (k < static_cast<int>(l.spec.states.size()))
                err << "warning: k < n; S_k for such k is a diagnostic only\n";
            PointVerdict v = point_status(exact_model(l), x0, k);
            std::string verdict = v.undefined ? "undefined (on the excluded denominator locus)"
                                  : v.in_S_k  ? "in S_" + std::to_string(k) + " (not accessible in " + std::to_string(k) + (k == 1 ? " step)" : " steps)")
                                              : "accessible (not in S_" + std::to_string(k) + ")";
            if (common.json) {
                Json j = header(name, l);
                Json p = Json::array();
                for (const auto& q : x0) p.push_back(q.get_str());
                j["point"] = std::move(p);
                j["k"] = k;
                j["in_S_k"] = v.in_S_k;
                j["undefined"] = v.undefined;
                j["verdict"] = verdict;
                emit(out, std::move(j), start);
            } else {
                system_line(out, l);
                out << "point " << format_rationals(x0) << ", k = " << k << ": " << verdict << "\n";
            }
            return 0;
        }

        NumericMap map = numeric_model(l);
        if (name == "simulate") {
            std::vector<double> x0;
            try {
                x0 = to_doubles(parse_point(xs));
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string("--x: ") + e.what());
            }
            std::vector<std::vector<double>> inputs;
            if (!us.empty()) {
                std::stringstream ss(us);
                std::string stepv;
                while (std::getline(ss, stepv, ';')) {
                    std::vector<double> u;
                    try {
                        u = to_doubles(parse_point(stepv));
                    } catch (const std::invalid_argument& e) {
                        throw UsageError(std::string("--u: ") + e.what());
                    }
                    inputs.push_back(std::move(u));
                }
            } else {
                if (steps < 1) throw UsageError("simulate needs --u or --steps");
                std::mt19937_64 rng(seed);
                std::uniform_real_distribution<double> box(-1.0, 1.0);
                inputs.assign(static_cast<std::size_t>(steps), std::vector<double>(map.m()));
                for (auto& row : inputs)
                    for (auto& c : row) c = box(rng);
            }
            Trajectory tr;
            try {
                tr = simulate(map, x0, inputs);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            if (common.json) {
                Json j = header(name, l);
                j["trajectory"] = {{"x", tr.x}, {"inputs", tr.inputs}};
                emit(out, std::move(j), start);
            } else {
                system_line(out, l);
                for (std::size_t t = 0; t < tr.x.size(); ++t) {
                    out << "x(" << t << ") = " << format_doubles(tr.x[t]);
                    if (t < tr.inputs.size()) out << "   u(" << t << ") = " << format_doubles(tr.inputs[t]);
                    out << "\n";
                }
            }
            return 0;
        }
        if (name == "rank") {
            std::vector<double> x0;
            try {
                x0 = to_doubles(parse_point(xs));
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string("--x: ") + e.what());
            }
            if (x0.size() != map.n()) throw UsageError("--x needs " + std::to_string(map.n()) + " values");
            if (k < 1 || ropt.samples < 1) throw UsageError("--k and --samples must be positive");
            RankEstimate r = jacobian_rank(map, x0, k, ropt);
            if (common.json) {
                Json j = header(name, l);
                j["k"] = k;
                j["rank"] = r.rank;
                j["n"] = map.n();
                j["singular_values"] = r.singular_values;
                j["tolerance"] = r.tolerance;
                j["relative_tolerance"] = ropt.tol;
                j["samples"] = r.samples;
                j["pole_samples"] = r.pole_samples;
                j["best_inputs"] = r.best_inputs;
                j["certification"] = "sampled";
                emit(out, std::move(j), start);
            } else {
                system_line(out, l);
                out << "numeric rank of M_" << k << " at " << format_doubles(x0) << ": " << r.rank << " of " << map.n()
                    << " (sampled, " << r.samples << " input sequences, relative tolerance " << ropt.tol << ")\n";
                out << "singular values: " << format_doubles(r.singular_values) << "\n";
            }
            return 0;
        }
        if (name == "scan1d") {
            ScanResult res;
            try {
                res = grid_scan_1d(map, sopt);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            if (common.json) {
                Json j = header(name, l);
                j["label"] = "estimate";
                j["grid_points"] = res.grid.size();
                j["options"] = {{"lo", sopt.lo},         {"hi", sopt.hi},           {"step", sopt.step},
                                {"k", sopt.k},           {"samples", sopt.samples}, {"threshold", sopt.threshold},
                                {"ulo", sopt.input_lo},  {"uhi", sopt.input_hi},    {"seed", sopt.seed}};
                Json f = Json::array();
                for (std::size_t i = 0; i < res.flagged.size(); ++i) f.push_back({{"k", i + 1}, {"points", res.flagged[i]}});
                j["flagged"] = std::move(f);
                emit(out, std::move(j), start);
            } else {
                system_line(out, l);
                out << "grid: " << res.grid.size() << " points on [" << format_double(sopt.lo) << ", "
                    << format_double(sopt.hi) << "], " << sopt.samples << " input samples, threshold "
                    << sopt.threshold << "\n";
                for (std::size_t i = 0; i < res.flagged.size(); ++i)
                    out << "S_" << i + 1 << " (estimate): " << set_text(res.flagged[i])
                        << "\n";
            }
            return 0;
        }
        throw UsageError("unknown command " + name);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        err << common.file << ":" << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        err << "resource budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const PoleError& e) {
        err << "pole: " << e.what() << "\n";
        return 4;
    } catch (const DegeneracyError& e) {
        err << "degenerate: " << e.what() << "\n";
        return 4;
    } catch (const EvaluationError& e) {
        err << "evaluation: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace raccess
