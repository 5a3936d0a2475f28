#include "qaoalab/csp_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qaoalab {
namespace {

std::string strip_comment(const std::string& line, char marker) {
    auto pos = line.find(marker);
    return pos == std::string::npos ? line : line.substr(0, pos);
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

[[noreturn]] void fail(int line_no, const std::string& what) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": " + what);
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path.string());
    return in;
}

}  // namespace

CspInstance read_csp(std::istream& in) {
    std::string line;
    int line_no = 0;
    int n = -1;
    int m = -1;
    std::vector<Clause> clauses;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_comment(line, '#');
        if (blank(line)) continue;
        std::istringstream ls(line);
        if (n < 0) {
            std::string tag;
            if (!(ls >> tag >> n >> m) || tag != "csp" || n < 1 || m < 1) fail(line_no, "expected header 'csp <n> <m>'");
            continue;
        }
        int k = 0;
        if (!(ls >> k) || k < 1 || k > 3) fail(line_no, "clause arity must be 1..3");
        std::vector<int> vars(static_cast<std::size_t>(k));
        for (auto& v : vars) {
            if (!(ls >> v)) fail(line_no, "missing clause variable");
        }
        std::string pats;
        if (!(ls >> pats)) fail(line_no, "missing satisfying patterns");
        std::string extra;
        if (ls >> extra) fail(line_no, "trailing text '" + extra + "'");
        std::vector<std::uint8_t> patterns;
        std::istringstream ps(pats);
        std::string p;
        while (std::getline(ps, p, ',')) {
            if (static_cast<int>(p.size()) != k) fail(line_no, "pattern '" + p + "' must have " + std::to_string(k) + " bits");
            std::uint8_t value = 0;
            for (int j = 0; j < k; ++j) {
                if (p[static_cast<std::size_t>(j)] == '1') {
                    value |= static_cast<std::uint8_t>(1u << j);
                } else if (p[static_cast<std::size_t>(j)] != '0') {
                    fail(line_no, "pattern '" + p + "' is not binary");
                }
            }
            patterns.push_back(value);
        }
        try {
            clauses.emplace_back(std::move(vars), std::move(patterns));
        } catch (const std::exception& e) {
            fail(line_no, e.what());
        }
    }
    if (n < 0) throw std::invalid_argument("missing 'csp <n> <m>' header");
    if (static_cast<int>(clauses.size()) != m) {
        throw std::invalid_argument("header declares " + std::to_string(m) + " clauses, found " + std::to_string(clauses.size()));
    }
    return CspInstance(n, std::move(clauses));
}

CspInstance read_csp_file(const std::filesystem::path& path) {
    auto in = open(path);
    return read_csp(in);
}

void write_csp(std::ostream& out, const CspInstance& instance) {
    out << "csp " << instance.n() << ' ' << instance.m() << '\n';
    for (const auto& clause : instance.clauses()) {
        out << clause.arity();
        for (int v : clause.vars()) out << ' ' << v;
        out << ' ';
        bool first = true;
        for (auto p : clause.patterns()) {
            if (!first) out << ',';
            first = false;
            for (int j = 0; j < clause.arity(); ++j) out << (((p >> j) & 1u) ? '1' : '0');
        }
        out << '\n';
    }
}

CspInstance read_dimacs(std::istream& in) {
    std::string line;
    int line_no = 0;
    int n = -1;
    int declared = -1;
    std::vector<Clause> clauses;
    std::vector<int> vars;
    std::vector<bool> negated;
    auto flush = [&](int at) {
        if (vars.empty()) fail(at, "empty clause");
        try {
            clauses.push_back(Clause::disjunction(vars, negated));
        } catch (const std::exception& e) {
            fail(at, e.what());
        }
        vars.clear();
        negated.clear();
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line) || line[0] == 'c' || line[0] == '%') continue;
        std::istringstream ls(line);
        if (line[0] == 'p') {
            std::string p, fmt;
            if (!(ls >> p >> fmt >> n >> declared) || fmt != "cnf" || n < 1) fail(line_no, "expected 'p cnf <vars> <clauses>'");
            continue;
        }
        if (n < 0) fail(line_no, "clause before 'p cnf' header");
        int lit = 0;
        while (ls >> lit) {
            if (lit == 0) {
                flush(line_no);
                continue;
            }
            const int v = (lit > 0 ? lit : -lit) - 1;
            if (v >= n) fail(line_no, "literal " + std::to_string(lit) + " exceeds declared variable count");
            vars.push_back(v);
            negated.push_back(lit < 0);
        }
    }
    if (!vars.empty()) flush(line_no);
    if (n < 0) throw std::invalid_argument("missing 'p cnf' header");
    if (declared >= 0 && static_cast<int>(clauses.size()) != declared) {
        throw std::invalid_argument("header declares " + std::to_string(declared) + " clauses, found " +
                                    std::to_string(clauses.size()));
    }
    return CspInstance(n, std::move(clauses));
}

CspInstance read_dimacs_file(const std::filesystem::path& path) {
    auto in = open(path);
    return read_dimacs(in);
}

}  // namespace qaoalab
