// State files: JSON documents holding one state each, complex entries as
// [re, im] pairs.
//
//   {"kind": "pure",           "dims": [n],    "data": [[re, im], ...]}
//   {"kind": "mixed",          "dims": [n],    "data": [[[re, im], ...], ...]}   n rows
//   {"kind": "bipartite-pure", "dims": [m, n], "data": [[[re, im], ...], ...]}   m rows of n
//   {"kind": "incoherent",     "dims": [n],    "data": [p_1, ..., p_n]}
//
// A stream is one document per line. Numbers are written with 17 significant
// digits, so a write-read cycle reproduces every double exactly.

#pragma once

#include "core.hpp"
#include "entanglement.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace coherence {

using Json = nlohmann::json;

/// Malformed or invalid state file; the message carries line and field context.
class ParseError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

enum class StateKind { pure, mixed, bipartite_pure, incoherent };

inline const char* to_string(StateKind k)
{
    switch (k) {
    case StateKind::pure: return "pure";
    case StateKind::mixed: return "mixed";
    case StateKind::bipartite_pure: return "bipartite-pure";
    case StateKind::incoherent: return "incoherent";
    }
    return "?";
}

/// Parsed state file. `data` is n x 1 for pure and incoherent kinds, n x n for
/// mixed, and m x n (amplitude matrix) for bipartite-pure.
struct StateFile {
    StateKind kind = StateKind::pure;
    std::vector<Index> dims;
    ComplexMatrix data;

    PureState pure() const
    {
        if (kind == StateKind::bipartite_pure)
            return PureState(bipartite().vector());
        require(StateKind::pure);
        return PureState(data.col(0));
    }

    DensityMatrix density() const
    {
        switch (kind) {
        case StateKind::mixed: return DensityMatrix(data);
        case StateKind::incoherent: return DensityMatrix::from_incoherent(incoherent());
        default: return DensityMatrix::from_pure(pure());
        }
    }

    BipartitePureState bipartite() const
    {
        require(StateKind::bipartite_pure);
        return BipartitePureState(data);
    }

    IncoherentState incoherent() const
    {
        require(StateKind::incoherent);
        return IncoherentState(RealVector(data.col(0).real()));
    }

    static StateFile from(const PureState& x)
    {
        return {StateKind::pure, {x.dim()}, x.amplitudes()};
    }
    static StateFile from(const DensityMatrix& rho)
    {
        return {StateKind::mixed, {rho.dim()}, rho.matrix()};
    }
    static StateFile from(const BipartitePureState& v)
    {
        return {StateKind::bipartite_pure, {v.dim_a(), v.dim_b()}, v.amplitudes()};
    }
    static StateFile from(const IncoherentState& d)
    {
        return {StateKind::incoherent, {d.dim()}, d.diag().cast<Complex>()};
    }

private:
    void require(StateKind want) const
    {
        if (kind != want)
            throw ValidationError(std::string("state file has kind '") + to_string(kind) +
                                  "', expected '" + to_string(want) + "'");
    }
};

namespace detail {

inline double parse_number(const Json& j, const std::string& path)
{
    if (!j.is_number())
        throw ParseError(path + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        throw ParseError(path + ": non-finite number");
    return v;
}

inline Complex parse_complex(const Json& j, const std::string& path)
{
    if (j.is_number())
        return {parse_number(j, path), 0.0};
    if (!j.is_array() || j.size() != 2)
        throw ParseError(path + ": expected a [re, im] pair");
    return {parse_number(j[0], path + "[0]"), parse_number(j[1], path + "[1]")};
}

inline Index parse_dim(const Json& j, const std::string& path)
{
    if (!j.is_number_integer() || j.get<long long>() < 1)
        throw ParseError(path + ": expected a positive integer");
    return static_cast<Index>(j.get<long long>());
}

inline Json complex_json(Complex z)
{
    return Json::array({z.real(), z.imag()});
}

} // namespace detail

/// Validates structure and the invariants of the state it describes.
inline StateFile parse_state(const Json& doc, const std::string& where = "state")
{
    if (!doc.is_object())
        throw ParseError(where + ": expected a JSON object");
    if (!doc.contains("kind") || !doc["kind"].is_string())
        throw ParseError(where + ".kind: missing or not a string");
    const std::string kind = doc["kind"].get<std::string>();
    if (!doc.contains("dims") || !doc["dims"].is_array() || doc["dims"].empty())
        throw ParseError(where + ".dims: missing or not a non-empty array");
    if (!doc.contains("data") || !doc["data"].is_array())
        throw ParseError(where + ".data: missing or not an array");
    const Json& dims = doc["dims"];
    const Json& data = doc["data"];

    StateFile sf;
    for (std::size_t i = 0; i < dims.size(); ++i)
        sf.dims.push_back(detail::parse_dim(dims[i], where + ".dims[" + std::to_string(i) + "]"));

    auto expect_dims = [&](std::size_t count) {
        if (sf.dims.size() != count)
            throw ParseError(where + ".dims: kind '" + kind + "' needs " + std::to_string(count) +
                             " dimension(s), got " + std::to_string(sf.dims.size()));
    };
    auto expect_len = [&](const Json& arr, Index len, const std::string& path) {
        if (!arr.is_array() || static_cast<Index>(arr.size()) != len)
            throw ParseError(path + ": expected an array of length " + std::to_string(len));
    };
    auto parse_matrix = [&](Index rows, Index cols) {
        expect_len(data, rows, where + ".data");
        ComplexMatrix m(rows, cols);
        for (Index i = 0; i < rows; ++i) {
            const std::string row_path = where + ".data[" + std::to_string(i) + "]";
            expect_len(data[static_cast<std::size_t>(i)], cols, row_path);
            for (Index j = 0; j < cols; ++j)
                m(i, j) = detail::parse_complex(data[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                                                row_path + "[" + std::to_string(j) + "]");
        }
        return m;
    };

    if (kind == "pure" || kind == "incoherent") {
        expect_dims(1);
        const Index n = sf.dims[0];
        expect_len(data, n, where + ".data");
        sf.data.resize(n, 1);
        for (Index i = 0; i < n; ++i) {
            const std::string path = where + ".data[" + std::to_string(i) + "]";
            sf.data(i, 0) = kind == "pure"
                                ? detail::parse_complex(data[static_cast<std::size_t>(i)], path)
                                : Complex(detail::parse_number(data[static_cast<std::size_t>(i)], path), 0.0);
        }
        sf.kind = kind == "pure" ? StateKind::pure : StateKind::incoherent;
    } else if (kind == "mixed") {
        expect_dims(1);
        sf.kind = StateKind::mixed;
        sf.data = parse_matrix(sf.dims[0], sf.dims[0]);
    } else if (kind == "bipartite-pure") {
        expect_dims(2);
        sf.kind = StateKind::bipartite_pure;
        sf.data = parse_matrix(sf.dims[0], sf.dims[1]);
    } else {
        throw ParseError(where + ".kind: unknown kind '" + kind +
                         "' (expected pure, mixed, bipartite-pure or incoherent)");
    }

    // Run the type validation so a parsed file is always a valid state.
    try {
        switch (sf.kind) {
        case StateKind::pure: (void)sf.pure(); break;
        case StateKind::mixed: (void)sf.density(); break;
        case StateKind::bipartite_pure: (void)sf.bipartite(); break;
        case StateKind::incoherent: (void)sf.incoherent(); break;
        }
    } catch (const ParseError&) {
        throw;
    } catch (const ValidationError& e) {
        throw ParseError(where + ": " + e.what());
    }
    return sf;
}

inline Json to_json(const StateFile& sf)
{
    Json doc;
    doc["kind"] = to_string(sf.kind);
    doc["dims"] = Json::array();
    for (Index d : sf.dims)
        doc["dims"].push_back(d);
    Json data = Json::array();
    switch (sf.kind) {
    case StateKind::pure:
        for (Index i = 0; i < sf.data.rows(); ++i)
            data.push_back(detail::complex_json(sf.data(i, 0)));
        break;
    case StateKind::incoherent:
        for (Index i = 0; i < sf.data.rows(); ++i)
            data.push_back(sf.data(i, 0).real());
        break;
    case StateKind::mixed:
    case StateKind::bipartite_pure:
        for (Index i = 0; i < sf.data.rows(); ++i) {
            Json row = Json::array();
            for (Index j = 0; j < sf.data.cols(); ++j)
                row.push_back(detail::complex_json(sf.data(i, j)));
            data.push_back(std::move(row));
        }
        break;
    }
    doc["data"] = std::move(data);
    return doc;
}

// ---------------------------------------------------------------------------
// Emission with 17 significant digits

inline std::string format_number(double v)
{
    if (!std::isfinite(v))
        return "null";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

/// indent < 0 writes on one line; `spaced` then still separates items with ", ".
inline void write_json(std::ostream& os, const Json& j, int indent, int depth, bool spaced = false)
{
    const bool pretty = indent >= 0;
    auto newline = [&](int d) {
        if (pretty)
            os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
    case Json::value_t::number_float:
        os << format_number(j.get<double>());
        break;
    case Json::value_t::array: {
        if (j.empty()) {
            os << "[]";
            break;
        }
        // Leaf arrays of numbers stay on one line.
        bool flat = true;
        for (const Json& e : j)
            flat = flat && (e.is_primitive() || (e.is_array() && e.size() <= 2 && !e.empty() && e[0].is_number()));
        os << '[';
        bool first = true;
        for (const Json& e : j) {
            if (!first)
                os << ((pretty || spaced) && flat ? ", " : ",");
            first = false;
            if (!flat)
                newline(depth + 1);
            write_json(os, e, flat ? -1 : indent, depth + 1, pretty || spaced);
        }
        if (!flat)
            newline(depth);
        os << ']';
        break;
    }
    case Json::value_t::object: {
        if (j.empty()) {
            os << "{}";
            break;
        }
        os << '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first)
                os << ',';
            first = false;
            newline(depth + 1);
            os << Json(it.key()).dump() << (pretty ? ": " : ":");
            write_json(os, it.value(), indent, depth + 1);
        }
        newline(depth);
        os << '}';
        break;
    }
    default:
        os << j.dump();
        break;
    }
}

} // namespace detail

/// Serializes with every floating-point value printed to 17 significant digits.
/// indent < 0 gives a single line.
inline std::string dump_json(const Json& j, int indent = -1)
{
    std::ostringstream os;
    detail::write_json(os, j, indent, 0);
    return os.str();
}

inline std::string write_state(const StateFile& sf)
{
    return dump_json(to_json(sf));
}

/// Reads one document, or a stream with one document per line. Blank lines
/// are skipped; errors name the line.
inline std::vector<StateFile> read_states(std::istream& in)
{
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<StateFile> out;
    // A single (possibly multi-line) document.
    try {
        const Json doc = Json::parse(text);
        if (doc.is_array()) {
            for (std::size_t i = 0; i < doc.size(); ++i)
                out.push_back(parse_state(doc[i], "state[" + std::to_string(i) + "]"));
        } else {
            out.push_back(parse_state(doc));
        }
        return out;
    } catch (const Json::parse_error&) {
        // Fall through to the line-delimited reading below.
    }
    std::istringstream lines(text);
    std::string line;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        Json doc;
        try {
            doc = Json::parse(line);
        } catch (const Json::parse_error& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
        out.push_back(parse_state(doc, "line " + std::to_string(lineno)));
    }
    if (out.empty())
        throw ParseError("input contains no state");
    return out;
}

inline StateFile read_state(std::istream& in)
{
    auto all = read_states(in);
    if (all.size() != 1)
        throw ParseError("expected exactly one state, found " + std::to_string(all.size()));
    return std::move(all.front());
}

} // namespace coherence
