#include "tensorlab/text_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <optional>
#include <vector>

#include <fmt/format.h>

#include "tensorlab/errors.hpp"

namespace tensorlab {

namespace {

struct Token {
    std::string text;
    int line;
    int column;
};

/// Whitespace-separated tokens; ';' is always a token of its own.
std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    int line = 1, column = 1;
    std::size_t n = 0;
    while (n < text.size()) {
        const char ch = text[n];
        if (ch == '\n') {
            ++line;
            column = 1;
            ++n;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++column;
            ++n;
            continue;
        }
        if (ch == '#') {
            while (n < text.size() && text[n] != '\n') ++n;
            continue;
        }
        Token tok{{}, line, column};
        if (ch == ';') {
            tok.text = ";";
            ++n;
            ++column;
        } else {
            while (n < text.size() && !std::isspace(static_cast<unsigned char>(text[n])) && text[n] != ';') {
                tok.text += text[n++];
                ++column;
            }
        }
        out.push_back(std::move(tok));
    }
    return out;
}

std::optional<double> to_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

Scalar parse_scalar(const Token& tok) {
    const std::string_view s = tok.text;
    const auto fail = [&] { return ParseError(fmt::format("malformed scalar '{}'", s), tok.line, tok.column); };
    if (s.empty()) throw fail();
    if (s.back() != 'i') {
        const auto re = to_double(s);
        if (!re) throw fail();
        return {*re, 0.0};
    }
    const std::string_view body = s.substr(0, s.size() - 1);
    // The sign that splits real and imaginary parts is the last '+' or '-'
    // not at the front and not part of an exponent.
    std::size_t split = std::string_view::npos;
    for (std::size_t n = body.size(); n-- > 1;) {
        if ((body[n] == '+' || body[n] == '-') && body[n - 1] != 'e' && body[n - 1] != 'E') {
            split = n;
            break;
        }
    }
    const auto imag_of = [&](std::string_view part) -> std::optional<double> {
        if (part.empty() || part == "+") return 1.0;
        if (part == "-") return -1.0;
        return to_double(part);
    };
    if (split == std::string_view::npos) {
        const auto im = imag_of(body);
        if (!im) throw fail();
        return {0.0, *im};
    }
    const auto re = to_double(body.substr(0, split));
    const auto im = imag_of(body.substr(split));
    if (!re || !im) throw fail();
    return {*re, *im};
}

int parse_extent(const Token& tok) {
    if (tok.text.size() != 1 || tok.text[0] < '1' || tok.text[0] > '3') {
        throw ParseError(fmt::format("dimension '{}' is not in 1..3", tok.text), tok.line, tok.column);
    }
    return tok.text[0] - '0';
}

std::optional<std::uint64_t> parse_integer(std::string_view s) {
    int base = 10;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        base = 16;
        s.remove_prefix(2);
    }
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

Dims parse_header(const std::vector<Token>& toks) {
    if (toks.size() < 3) {
        const int line = toks.empty() ? 1 : toks.back().line;
        throw ParseError("expected header 'p q r'", line, 1);
    }
    return Dims{parse_extent(toks[0]), parse_extent(toks[1]), parse_extent(toks[2])};
}

CVector parse_vector(const std::vector<Token>& toks, std::size_t& pos, int length) {
    CVector v(length);
    for (int n = 0; n < length; ++n) {
        if (pos >= toks.size() || toks[pos].text == ";") {
            const Token& at = pos < toks.size() ? toks[pos] : toks.back();
            throw ParseError(fmt::format("expected {} vector entries", length), at.line, at.column);
        }
        v(n) = parse_scalar(toks[pos++]);
    }
    return v;
}

} // namespace

DenseTensor parse_tensor(std::string_view text) {
    const std::vector<Token> toks = tokenize(text);
    const Dims d = parse_header(toks);
    const std::size_t count = toks.size() - 3;
    if (count == 1 && d.size() > 1) {
        const Token& tok = toks[3];
        const auto code = parse_integer(tok.text);
        if (!code) throw ParseError(fmt::format("malformed F2 code '{}'", tok.text), tok.line, tok.column);
        if (*code > f2_code_limit(d)) {
            throw ParseError(fmt::format("F2 code {} has more than {} bits", *code, d.size()), tok.line, tok.column);
        }
        return decode(static_cast<F2Code>(*code), d);
    }
    if (count != static_cast<std::size_t>(d.size())) {
        const Token& at = toks.back();
        throw ParseError(fmt::format("expected {} entries, found {}", d.size(), count), at.line, at.column);
    }
    std::vector<Scalar> entries;
    entries.reserve(count);
    for (std::size_t n = 3; n < toks.size(); ++n) {
        const Scalar z = parse_scalar(toks[n]);
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
            throw ParseError("non-finite entry", toks[n].line, toks[n].column);
        }
        entries.push_back(z);
    }
    return DenseTensor(d, std::move(entries));
}

F2Code parse_f2_tensor(std::string_view text, Dims& dims) {
    const DenseTensor t = parse_tensor(text);
    dims = t.dims();
    try {
        return encode(t);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), 1, 1);
    }
}

std::string format_scalar(Scalar z) {
    if (z.imag() == 0.0) return fmt::format("{}", z.real() == 0.0 ? 0.0 : z.real());
    return fmt::format("{}{}{}i", z.real() == 0.0 ? 0.0 : z.real(), z.imag() < 0 ? "" : "+", z.imag());
}

std::string format_tensor(const DenseTensor& t) {
    const Dims d = t.dims();
    std::string out = fmt::format("{} {} {}\n", d.p, d.q, d.r);
    for (int i = 0; i < d.p; ++i)
        for (int j = 0; j < d.q; ++j) {
            for (int k = 0; k < d.r; ++k) {
                if (k) out += ' ';
                out += format_scalar(t(i, j, k));
            }
            out += '\n';
        }
    return out;
}

std::string format_decomposition(const Decomposition& d) {
    std::string out = fmt::format("{} {} {}\n{}\n", d.dims.p, d.dims.q, d.dims.r, d.terms.size());
    const auto vec = [](const CVector& v) {
        std::string s;
        for (Eigen::Index n = 0; n < v.size(); ++n) {
            if (n) s += ' ';
            s += format_scalar(v(n));
        }
        return s;
    };
    for (const SimpleTerm& term : d.terms) out += fmt::format("{} ; {} ; {}\n", vec(term.a), vec(term.b), vec(term.c));
    out += fmt::format("residual {:.3e}\n", d.residual);
    return out;
}

Decomposition parse_decomposition(std::string_view text) {
    const std::vector<Token> toks = tokenize(text);
    Decomposition d;
    d.dims = parse_header(toks);
    if (toks.size() < 4) throw ParseError("expected term count", toks.back().line, toks.back().column);
    const auto count = parse_integer(toks[3].text);
    if (!count || *count > 64) throw ParseError("malformed term count", toks[3].line, toks[3].column);
    std::size_t pos = 4;
    const auto expect_sep = [&] {
        if (pos >= toks.size() || toks[pos].text != ";") {
            const Token& at = pos < toks.size() ? toks[pos] : toks.back();
            throw ParseError("expected ';'", at.line, at.column);
        }
        ++pos;
    };
    for (std::uint64_t n = 0; n < *count; ++n) {
        SimpleTerm term;
        term.a = parse_vector(toks, pos, d.dims.p);
        expect_sep();
        term.b = parse_vector(toks, pos, d.dims.q);
        expect_sep();
        term.c = parse_vector(toks, pos, d.dims.r);
        d.terms.push_back(std::move(term));
    }
    if (pos < toks.size() && toks[pos].text == "residual") {
        ++pos;
        if (pos >= toks.size()) throw ParseError("expected residual value", toks.back().line, toks.back().column);
        const auto r = to_double(toks[pos].text);
        if (!r || *r < 0) throw ParseError("malformed residual", toks[pos].line, toks[pos].column);
        d.residual = *r;
        ++pos;
    }
    if (pos != toks.size()) throw ParseError("trailing input", toks[pos].line, toks[pos].column);
    return d;
}

std::string dots_pattern(F2Code code, Dims d) {
    std::string s(d.size(), '.');
    for (int n = 0; n < d.size(); ++n)
        if ((code >> (d.size() - 1 - n)) & 1u) s[n] = '1';
    return s;
}

} // namespace tensorlab
