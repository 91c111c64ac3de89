#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "imkg/format.hpp"
#include "imkg/tableau.hpp"

namespace imkg {

// Line-oriented text:
//   name <id>
//   r <int>
//   A      followed by r rows
//   b      followed by one row
//   Ahat   followed by r rows
//   bhat   followed by one row
//   c, chat (optional) checked against the row sums to 1e-12
// '#' starts a comment.

inline void write_tableau(const DoubleTableau& t, std::ostream& os) {
    const int r = t.stages();
    auto rows = [&](const Matrix& M) {
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < r; ++j) os << (j ? " " : "") << fmt17(M(i, j));
            os << '\n';
        }
    };
    auto vec = [&](const Vector& v) {
        for (int j = 0; j < r; ++j) os << (j ? " " : "") << fmt17(v[j]);
        os << '\n';
    };
    os << "name " << t.name() << '\n' << "r " << r << '\n';
    os << "A\n";
    rows(t.explicit_part().A());
    os << "b\n";
    vec(t.explicit_part().b());
    os << "Ahat\n";
    rows(t.implicit_part().A());
    os << "bhat\n";
    vec(t.implicit_part().b());
    os << "# row sums\nc\n";
    vec(t.explicit_part().c());
    os << "chat\n";
    vec(t.implicit_part().c());
}

inline void write_tableau_file(const DoubleTableau& t, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_tableau(t, os);
    if (!os) throw Error("write failed: " + path);
}

namespace detail {

class TableauLexer {
public:
    explicit TableauLexer(std::istream& is) : is_(is) {}

    // Next non-empty line split into tokens; false at end of input.
    bool next(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(is_, line)) {
            ++line_no_;
            if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
            std::istringstream ss(line);
            tokens.clear();
            for (std::string tok; ss >> tok;) tokens.push_back(tok);
            if (!tokens.empty()) return true;
        }
        return false;
    }

    std::vector<std::string> expect_line(const char* what) {
        std::vector<std::string> tokens;
        if (!next(tokens)) throw ParseError(std::string("unexpected end of file, expected ") + what, line_no_ + 1);
        return tokens;
    }

    int line() const { return line_no_; }

private:
    std::istream& is_;
    int line_no_ = 0;
};

inline double parse_number(const std::string& s, int line) {
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad number '" + s + "'", line);
    return v;
}

inline std::vector<double> parse_row(TableauLexer& lx, int r, const char* what) {
    auto tok = lx.expect_line(what);
    if (static_cast<int>(tok.size()) != r)
        throw ParseError(std::string(what) + " row must have " + std::to_string(r) + " entries", lx.line());
    std::vector<double> row;
    for (const auto& t : tok) row.push_back(parse_number(t, lx.line()));
    return row;
}

inline void expect_keyword(TableauLexer& lx, const char* kw) {
    auto tok = lx.expect_line(kw);
    if (tok.size() != 1 || tok[0] != kw) throw ParseError(std::string("expected '") + kw + "'", lx.line());
}

}  // namespace detail

inline DoubleTableau read_tableau(std::istream& is) {
    detail::TableauLexer lx(is);
    auto tok = lx.expect_line("name");
    if (tok.size() != 2 || tok[0] != "name") throw ParseError("expected 'name <id>'", lx.line());
    const std::string name = tok[1];
    tok = lx.expect_line("r");
    if (tok.size() != 2 || tok[0] != "r") throw ParseError("expected 'r <int>'", lx.line());
    int r = 0;
    {
        auto [ptr, ec] = std::from_chars(tok[1].data(), tok[1].data() + tok[1].size(), r);
        if (ec != std::errc() || ptr != tok[1].data() + tok[1].size() || r < 1)
            throw ParseError("stage count must be a positive integer", lx.line());
    }

    auto read_matrix = [&](const char* kw, const char* row_name, Matrix& M, int& first_line) {
        detail::expect_keyword(lx, kw);
        first_line = lx.line() + 1;
        M.resize(r, r);
        for (int i = 0; i < r; ++i) {
            auto row = detail::parse_row(lx, r, row_name);
            for (int j = 0; j < r; ++j) M(i, j) = row[j];
        }
    };
    auto read_vector = [&](const char* kw, Vector& v) {
        detail::expect_keyword(lx, kw);
        auto row = detail::parse_row(lx, r, kw);
        v = Eigen::Map<Vector>(row.data(), r);
    };

    Matrix A, Ah;
    Vector b, bh;
    int a_line = 0, ah_line = 0;
    read_matrix("A", "A", A, a_line);
    read_vector("b", b);
    read_matrix("Ahat", "Ahat", Ah, ah_line);
    read_vector("bhat", bh);

    for (int i = 0; i < r; ++i)
        for (int j = i; j < r; ++j)
            if (A(i, j) != 0.0) throw ParseError("explicit part not strictly lower triangular", a_line + i);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j)
            if (Ah(i, j) != 0.0) throw ParseError("implicit part not lower triangular", ah_line + i);

    ButcherTableau ex(A, b), im(Ah, bh);

    std::vector<std::string> rest;
    while (lx.next(rest)) {
        if (rest.size() != 1 || (rest[0] != "c" && rest[0] != "chat"))
            throw ParseError("unexpected content '" + rest[0] + "'", lx.line());
        const bool hat = rest[0] == "chat";
        auto row = detail::parse_row(lx, r, hat ? "chat" : "c");
        const Vector& sums = hat ? im.c() : ex.c();
        for (int i = 0; i < r; ++i)
            if (std::abs(row[i] - sums[i]) > 1e-12)
                throw ParseError(std::string(hat ? "chat" : "c") + " differs from row sums of " +
                                     (hat ? "Ahat" : "A") + " at entry " + std::to_string(i + 1),
                                 lx.line());
    }
    return DoubleTableau(name, std::move(ex), std::move(im));
}

inline DoubleTableau read_tableau_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open " + path, 0);
    return read_tableau(is);
}

}  // namespace imkg
