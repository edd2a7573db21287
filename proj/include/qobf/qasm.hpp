#pragma once

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qobf/circuit.hpp"
#include "qobf/errors.hpp"
#include "qobf/slicing.hpp"

namespace qobf {

struct SerializeOptions {
    /// Emit `// DUMMY <marker-id>` after marked SWAPs. Off by default so the
    /// obfuscated file sent to a third party leaks no marker.
    bool include_markers = false;
};

namespace detail {

struct RegisterInfo {
    std::uint32_t base = 0;
    std::uint32_t size = 0;
    std::size_t declared_at = 0;  // statement index of the declaration
};

struct Statement {
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

// One operand of a statement: either reg[index] or a bare register name.
struct Operand {
    std::string reg;
    std::optional<std::uint32_t> index;
};

inline std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_args(const std::string& s) {
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
    if (!trim(cur).empty() || !out.empty()) {
        out.push_back(trim(cur));
    }
    return out;
}

inline Operand parse_operand(const std::string& text, const Statement& st) {
    auto bad = [&](const std::string& why) {
        return ParseError("bad operand '" + text + "': " + why, st.line, st.column);
    };
    std::size_t open = text.find('[');
    if (open == std::string::npos) {
        if (text.empty()) throw bad("empty");
        return {text, std::nullopt};
    }
    std::size_t close = text.find(']', open);
    if (close == std::string::npos || close != text.size() - 1) {
        throw bad("expected 'name[index]'");
    }
    std::string reg = trim(text.substr(0, open));
    std::string idx = trim(text.substr(open + 1, close - open - 1));
    if (reg.empty() || idx.empty() ||
        idx.find_first_not_of("0123456789") != std::string::npos) {
        throw bad("expected 'name[index]'");
    }
    return {reg, static_cast<std::uint32_t>(std::stoul(idx))};
}

}  // namespace detail

/// Parses the supported OpenQASM 2.0 subset: one or more qreg/creg
/// declarations, statements among {x, h, cx, ccx, swap, barrier, measure},
/// line comments, and the `// CONST reg[i] = b` constant pragma. The
/// `OPENQASM 2.0;` header and `include "qelib1.inc";` are tolerated and
/// ignored. Registers flatten to a single qubit/clbit index space in
/// declaration order.
inline Circuit parse_qasm(std::string_view text) {
    using detail::Operand;
    using detail::RegisterInfo;
    using detail::Statement;

    Circuit circuit;
    std::map<std::string, RegisterInfo> qregs;
    std::map<std::string, RegisterInfo> cregs;

    // Statements plus pragma/marker comments, in source order.
    std::vector<Statement> statements;
    struct PendingConst {
        std::string reg;
        std::uint32_t index;
        int value;
        std::size_t line, column;
        std::size_t after_statement;  // statements parsed before the pragma
    };
    std::vector<PendingConst> const_pragmas;
    struct PendingMarker {
        std::string id;
        std::size_t line;
        std::size_t after_statement;
    };
    std::vector<PendingMarker> markers;

    {
        std::size_t line = 1, col = 1;
        Statement cur;
        bool in_statement = false;
        for (std::size_t i = 0; i < text.size(); ++i) {
            char c = text[i];
            if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
                std::size_t end = text.find('\n', i);
                std::string comment(text.substr(i + 2, (end == std::string_view::npos
                                                            ? text.size()
                                                            : end) - i - 2));
                std::istringstream cs(comment);
                std::string word;
                cs >> word;
                if (word == "CONST") {
                    std::string operand, eq, value;
                    cs >> operand >> eq >> value;
                    if (eq != "=" || (value != "0" && value != "1")) {
                        throw ParseError("malformed CONST pragma", line, col);
                    }
                    Statement where{comment, line, col};
                    Operand op = detail::parse_operand(operand, where);
                    if (!op.index) {
                        throw ParseError("CONST pragma needs an indexed qubit", line, col);
                    }
                    const_pragmas.push_back({op.reg, *op.index, value == "1" ? 1 : 0,
                                             line, col, statements.size()});
                } else if (word == "DUMMY") {
                    std::string id;
                    cs >> id;
                    if (id.empty()) {
                        throw ParseError("DUMMY marker without id", line, col);
                    }
                    markers.push_back({id, line, statements.size()});
                }
                if (end == std::string_view::npos) break;
                i = end;
                ++line;
                col = 1;
                continue;
            }
            if (c == '\n') {
                ++line;
                col = 1;
                if (in_statement) cur.text += ' ';
                continue;
            }
            if (c == ';') {
                cur.text = detail::trim(cur.text);
                if (!cur.text.empty()) {
                    statements.push_back(cur);
                }
                cur = Statement{};
                in_statement = false;
                ++col;
                continue;
            }
            if (!in_statement && !std::isspace(static_cast<unsigned char>(c))) {
                cur.line = line;
                cur.column = col;
                in_statement = true;
            }
            if (in_statement) cur.text += c;
            ++col;
        }
        if (!detail::trim(cur.text).empty()) {
            throw ParseError("unterminated statement '" + detail::trim(cur.text) + "'",
                             cur.line, cur.column);
        }
    }

    bool saw_header = false;
    auto resolve_qubit = [&](const Operand& op, const Statement& st) -> QubitId {
        auto it = qregs.find(op.reg);
        if (it == qregs.end()) {
            throw ParseError("unknown quantum register '" + op.reg + "'", st.line,
                             st.column);
        }
        if (!op.index) {
            throw ParseError("whole-register operand '" + op.reg +
                                 "' not supported here",
                             st.line, st.column);
        }
        if (*op.index >= it->second.size) {
            throw ParseError("qubit index " + std::to_string(*op.index) +
                                 " out of range for register '" + op.reg + "' of size " +
                                 std::to_string(it->second.size),
                             st.line, st.column);
        }
        return it->second.base + *op.index;
    };

    // Gate count after each statement, for attaching marker comments.
    std::vector<std::size_t> gates_after_statement(statements.size(), 0);

    for (std::size_t si = 0; si < statements.size(); ++si) {
        const Statement& st = statements[si];
        std::istringstream ss(st.text);
        std::string head;
        ss >> head;
        std::string rest = detail::trim(st.text.substr(head.size()));

        struct StatementDone {
            std::vector<std::size_t>& table;
            std::size_t index;
            const Circuit& c;
            ~StatementDone() { table[index] = c.gates.size(); }
        } record_gate_count{gates_after_statement, si, circuit};

        if (head == "OPENQASM") {
            if (rest != "2.0") {
                throw ParseError("unsupported OpenQASM version '" + rest + "'", st.line,
                                 st.column);
            }
            saw_header = true;
            continue;
        }
        if (head == "include") {
            continue;
        }
        if (head == "qreg" || head == "creg") {
            Operand op = detail::parse_operand(rest, st);
            if (!op.index) {
                throw ParseError("register declaration needs a size", st.line, st.column);
            }
            auto& table = head == "qreg" ? qregs : cregs;
            auto& other = head == "qreg" ? cregs : qregs;
            if (table.count(op.reg) || other.count(op.reg)) {
                throw ParseError("duplicate register name '" + op.reg + "'", st.line,
                                 st.column);
            }
            std::uint32_t& total =
                head == "qreg" ? circuit.num_qubits : circuit.num_clbits;
            table[op.reg] = {total, *op.index, si};
            total += *op.index;
            continue;
        }
        if (head == "measure") {
            std::size_t arrow = rest.find("->");
            if (arrow == std::string::npos) {
                throw ParseError("measure without '->'", st.line, st.column);
            }
            Operand src = detail::parse_operand(detail::trim(rest.substr(0, arrow)), st);
            Operand dst = detail::parse_operand(detail::trim(rest.substr(arrow + 2)), st);
            auto cit = cregs.find(dst.reg);
            if (cit == cregs.end()) {
                throw ParseError("unknown classical register '" + dst.reg + "'", st.line,
                                 st.column);
            }
            if (src.index.has_value() != dst.index.has_value()) {
                throw ParseError("measure operands must both be indexed or both registers",
                                 st.line, st.column);
            }
            if (src.index) {
                if (*dst.index >= cit->second.size) {
                    throw ParseError("classical index out of range", st.line, st.column);
                }
                circuit.gates.push_back(
                    Gate::measure(resolve_qubit(src, st), cit->second.base + *dst.index));
            } else {
                // Whole-register broadcast: measure q -> c;
                auto qit = qregs.find(src.reg);
                if (qit == qregs.end()) {
                    throw ParseError("unknown quantum register '" + src.reg + "'",
                                     st.line, st.column);
                }
                if (qit->second.size != cit->second.size) {
                    throw ParseError("register sizes differ in whole-register measure",
                                     st.line, st.column);
                }
                for (std::uint32_t k = 0; k < qit->second.size; ++k) {
                    circuit.gates.push_back(
                        Gate::measure(qit->second.base + k, cit->second.base + k));
                }
            }
            continue;
        }
        if (head == "barrier") {
            std::vector<QubitId> spanned;
            if (rest.empty()) {
                for (QubitId q = 0; q < circuit.num_qubits; ++q) spanned.push_back(q);
            } else {
                for (const std::string& arg : detail::split_args(rest)) {
                    Operand op = detail::parse_operand(arg, st);
                    if (op.index) {
                        spanned.push_back(resolve_qubit(op, st));
                    } else {
                        auto it = qregs.find(op.reg);
                        if (it == qregs.end()) {
                            throw ParseError("unknown quantum register '" + op.reg + "'",
                                             st.line, st.column);
                        }
                        for (std::uint32_t k = 0; k < it->second.size; ++k) {
                            spanned.push_back(it->second.base + k);
                        }
                    }
                }
            }
            if (spanned.size() != circuit.num_qubits) {
                throw ParseError("partial barrier not supported (must span all qubits)",
                                 st.line, st.column);
            }
            circuit.gates.push_back(Gate::barrier(std::move(spanned)));
            continue;
        }

        GateKind kind;
        if (head == "x") kind = GateKind::X;
        else if (head == "h") kind = GateKind::H;
        else if (head == "cx") kind = GateKind::CX;
        else if (head == "ccx") kind = GateKind::CCX;
        else if (head == "swap") kind = GateKind::Swap;
        else {
            throw ParseError("unsupported gate '" + head + "'", st.line, st.column);
        }
        std::vector<QubitId> args;
        for (const std::string& arg : detail::split_args(rest)) {
            args.push_back(resolve_qubit(detail::parse_operand(arg, st), st));
        }
        std::size_t want = kind == GateKind::CCX ? 3 : (kind == GateKind::X || kind == GateKind::H) ? 1 : 2;
        if (args.size() != want) {
            throw ParseError("gate '" + head + "' expects " + std::to_string(want) +
                                 " qubits, got " + std::to_string(args.size()),
                             st.line, st.column);
        }
        circuit.gates.push_back(Gate{kind, std::move(args), {}, {}});
    }
    (void)saw_header;

    if (circuit.num_qubits == 0) {
        throw ParseError("no quantum register declared", 1, 1);
    }

    for (const auto& pragma : const_pragmas) {
        auto it = qregs.find(pragma.reg);
        if (it == qregs.end() || it->second.declared_at >= pragma.after_statement) {
            throw ParseError("CONST references undeclared register '" + pragma.reg + "'",
                             pragma.line, pragma.column);
        }
        if (pragma.index >= it->second.size) {
            throw ParseError("CONST qubit index out of range", pragma.line, pragma.column);
        }
        circuit.constant_qubits[it->second.base + pragma.index] = pragma.value;
    }
    // A DUMMY comment annotates the statement it follows, which must be a
    // swap.
    for (const auto& marker : markers) {
        std::size_t gate_count =
            marker.after_statement == 0 ? 0
                                        : gates_after_statement[marker.after_statement - 1];
        if (gate_count == 0 || circuit.gates[gate_count - 1].kind != GateKind::Swap) {
            throw ParseError("DUMMY marker without preceding swap", marker.line, 1);
        }
        circuit.gates[gate_count - 1].dummy_marker = marker.id;
    }

    circuit.validate();
    return circuit;
}

/// Emits parseable QASM in gate order. parse_qasm(serialize_qasm(c)) is
/// structurally equal to c (markers included only on request).
inline std::string serialize_qasm(const Circuit& circuit, SerializeOptions options = {}) {
    circuit.validate();
    std::ostringstream out;
    out << "OPENQASM 2.0;\n";
    out << "include \"qelib1.inc\";\n";
    if (circuit.num_qubits > 0) {
        out << "qreg q[" << circuit.num_qubits << "];\n";
    }
    if (circuit.num_clbits > 0) {
        out << "creg c[" << circuit.num_clbits << "];\n";
    }
    for (const auto& [q, value] : circuit.constant_qubits) {
        out << "// CONST q[" << q << "] = " << value << "\n";
    }
    for (const Gate& g : circuit.gates) {
        switch (g.kind) {
            case GateKind::Measure:
                out << "measure q[" << g.qubits[0] << "] -> c[" << *g.classical_target
                    << "];\n";
                break;
            case GateKind::Barrier:
                if (g.qubits.size() == circuit.num_qubits) {
                    out << "barrier q;\n";
                } else {
                    out << "barrier";
                    for (std::size_t i = 0; i < g.qubits.size(); ++i) {
                        out << (i ? "," : " ") << "q[" << g.qubits[i] << "]";
                    }
                    out << ";\n";
                }
                break;
            default:
                out << gate_name(g.kind);
                for (std::size_t i = 0; i < g.qubits.size(); ++i) {
                    out << (i ? "," : " ") << "q[" << g.qubits[i] << "]";
                }
                out << ";";
                if (options.include_markers && g.dummy_marker) {
                    out << " // DUMMY " << *g.dummy_marker;
                }
                out << "\n";
        }
    }
    return out.str();
}

/// Layer-normalized, marker-free serialization: gates in slice-major order
/// (stable within a slice), one barrier per boundary that carried at least
/// one barrier statement. Two circuits that differ only in the program
/// order of parallel gates, duplicate barriers, or markers canonicalize to
/// the same bytes. This is the digest input for obfuscation keys.
inline std::string canonical_qasm(const Circuit& circuit) {
    std::vector<Slice> slices = slice_circuit(circuit);
    auto barrier_stmts = barrier_statements_by_boundary(circuit, slices);

    Circuit normalized;
    normalized.num_qubits = circuit.num_qubits;
    normalized.num_clbits = circuit.num_clbits;
    normalized.constant_qubits = circuit.constant_qubits;
    std::vector<QubitId> all;
    for (QubitId q = 0; q < circuit.num_qubits; ++q) all.push_back(q);
    for (std::size_t b = 0; b <= slices.size(); ++b) {
        if (barrier_stmts.count(b)) {
            normalized.gates.push_back(Gate::barrier(all));
        }
        if (b < slices.size()) {
            for (std::size_t gi : slices[b].gate_indices) {
                Gate g = circuit.gates[gi];
                g.dummy_marker.reset();
                normalized.gates.push_back(std::move(g));
            }
        }
    }
    return serialize_qasm(normalized);
}

}  // namespace qobf
