#include "expresso/circuit/program.hpp"

#include <cctype>
#include <memory>
#include <optional>
#include <set>

#include "expresso/circuit/builder.hpp"
#include "expresso/circuit/membership_source.hpp"
#include "expresso/util/crypto.hpp"

namespace expresso::circuit {

using zk::EdwardsPoint;
using zk::JubScalar;
using zk::limbs_sub;

std::string_view to_string(Visibility v) { return v == Visibility::Public ? "public" : "private"; }

std::string_view to_string(ValueType t)
{
    switch (t) {
    case ValueType::Point: return "point";
    case ValueType::Scalar: return "scalar";
    case ValueType::Field: return "field";
    }
    return "?";
}

Digest BoilerplateProgram::program_digest() const { return sha256(as_bytes(source_text)); }

std::vector<ParameterDecl> BoilerplateProgram::membership_schema()
{
    return {{"pk", Visibility::Public, ValueType::Point},
            {"R", Visibility::Private, ValueType::Point},
            {"S", Visibility::Private, ValueType::Scalar},
            {"M", Visibility::Private, ValueType::Field}};
}

const BoilerplateProgram& BoilerplateProgram::membership()
{
    static const BoilerplateProgram p{std::string(kMembershipSource), membership_schema()};
    return p;
}

namespace {

// ---------------------------------------------------------------- lexing

struct Token {
    enum Kind { Ident, Number, Symbol, End } kind = End;
    std::string text;
    int line = 0;
    int col = 0;
};

[[noreturn]] void parse_error(int line, int col, const std::string& msg)
{
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
}

std::vector<Token> lex_line(std::string_view text, int line)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        const int col = static_cast<int>(i) + 1;
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' || text[j] == '-')) ++j;
            out.push_back({Token::Ident, std::string(text.substr(i, j - i)), line, col});
            i = j;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            out.push_back({Token::Number, std::string(text.substr(i, j - i)), line, col});
            i = j;
        } else if (text.substr(i, 2) == "==") {
            out.push_back({Token::Symbol, "==", line, col});
            i += 2;
        } else if (std::string_view("=:(),.*+-").find(c) != std::string_view::npos) {
            out.push_back({Token::Symbol, std::string(1, c), line, col});
            ++i;
        } else {
            parse_error(line, col, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Token::End, "", line, static_cast<int>(text.size()) + 1});
    return out;
}

// ---------------------------------------------------------------- syntax tree

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum Kind { Name, Number, Generator, Hash, Mul, Add, Sub, Coord } kind;
    std::string text;  // identifier, literal digits, or coordinate name
    std::vector<ExprPtr> args;
    int line = 0;
    int col = 0;
};

struct Statement {
    enum Kind { Let, AssertEqual, AssertSubgroup } kind;
    std::string name;
    ExprPtr lhs, rhs;
    int line = 0;
    int col = 0;
};

struct ParsedProgram {
    std::string name;
    std::vector<ParameterDecl> params;
    std::vector<Statement> body;
};

class LineParser {
public:
    explicit LineParser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    const Token& peek() const { return toks_[pos_]; }
    Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool accept(std::string_view sym)
    {
        if (peek().kind == Token::Symbol && peek().text == sym) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(std::string_view sym)
    {
        if (!accept(sym)) fail("expected '" + std::string(sym) + "'");
    }
    std::string ident()
    {
        if (peek().kind != Token::Ident) fail("expected identifier");
        return next().text;
    }
    void expect_end()
    {
        if (peek().kind != Token::End) fail("unexpected '" + peek().text + "'");
    }
    [[noreturn]] void fail(const std::string& msg) const { parse_error(peek().line, peek().col, msg); }

    ExprPtr expr()
    {
        ExprPtr lhs = term();
        for (;;) {
            const Token t = peek();
            if (accept("+")) {
                lhs = make(Expr::Add, t, "", {lhs, term()});
            } else if (accept("-")) {
                lhs = make(Expr::Sub, t, "", {lhs, term()});
            } else {
                return lhs;
            }
        }
    }

private:
    static ExprPtr make(Expr::Kind k, const Token& at, std::string text, std::vector<ExprPtr> args)
    {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->text = std::move(text);
        e->args = std::move(args);
        e->line = at.line;
        e->col = at.col;
        return e;
    }

    ExprPtr term()
    {
        ExprPtr lhs = factor();
        for (;;) {
            const Token t = peek();
            if (!accept("*")) return lhs;
            lhs = make(Expr::Mul, t, "", {lhs, factor()});
        }
    }

    ExprPtr factor()
    {
        const Token t = peek();
        if (accept("(")) {
            ExprPtr e = expr();
            expect(")");
            return e;
        }
        if (t.kind == Token::Number) {
            next();
            return make(Expr::Number, t, t.text, {});
        }
        if (t.kind != Token::Ident) fail("expected expression");
        next();
        if (t.text == "G") return make(Expr::Generator, t, "", {});
        if (t.text == "hash") {
            expect("(");
            std::vector<ExprPtr> args{expr()};
            while (accept(",")) args.push_back(expr());
            expect(")");
            return make(Expr::Hash, t, "", std::move(args));
        }
        ExprPtr e = make(Expr::Name, t, t.text, {});
        if (accept(".")) {
            const Token c = peek();
            const std::string coord = ident();
            if (coord != "x" && coord != "y") parse_error(c.line, c.col, "expected coordinate x or y");
            e = make(Expr::Coord, c, coord, {e});
        }
        return e;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

bool is_keyword(const std::string& s)
{
    static const std::set<std::string> kw{"program", "public", "private", "let", "assert", "hash", "G", "in_subgroup"};
    return kw.contains(s);
}

ParsedProgram parse(std::string_view source)
{
    ParsedProgram out;
    bool header = false;
    bool body_started = false;
    std::set<std::string> names;
    int line_no = 0;
    std::size_t start = 0;
    while (start <= source.size()) {
        const std::size_t end = std::min(source.find('\n', start), source.size());
        const std::string_view line = source.substr(start, end - start);
        start = end + 1;
        ++line_no;
        LineParser p(lex_line(line, line_no));
        if (p.peek().kind == Token::End) continue;
        const Token head = p.peek();
        const std::string kw = p.ident();
        if (!header) {
            if (kw != "program") parse_error(head.line, head.col, "program must start with 'program <name> v1'");
            out.name = p.ident();
            const Token v = p.peek();
            if (p.ident() != "v1") parse_error(v.line, v.col, "unsupported language version");
            p.expect_end();
            header = true;
            continue;
        }
        if (kw == "public" || kw == "private") {
            if (body_started) parse_error(head.line, head.col, "declarations must precede statements");
            const Token n = p.peek();
            ParameterDecl d;
            d.name = p.ident();
            if (is_keyword(d.name)) parse_error(n.line, n.col, "'" + d.name + "' is reserved");
            if (!names.insert(d.name).second) parse_error(n.line, n.col, "duplicate name '" + d.name + "'");
            d.visibility = kw == "public" ? Visibility::Public : Visibility::Private;
            p.expect(":");
            const Token t = p.peek();
            const std::string type = p.ident();
            if (type == "point") {
                d.type = ValueType::Point;
            } else if (type == "scalar") {
                d.type = ValueType::Scalar;
            } else if (type == "field") {
                d.type = ValueType::Field;
            } else {
                parse_error(t.line, t.col, "unknown type '" + type + "'");
            }
            p.expect_end();
            out.params.push_back(d);
        } else if (kw == "let") {
            body_started = true;
            Statement s{Statement::Let, {}, nullptr, nullptr, head.line, head.col};
            const Token n = p.peek();
            s.name = p.ident();
            if (is_keyword(s.name)) parse_error(n.line, n.col, "'" + s.name + "' is reserved");
            if (!names.insert(s.name).second) parse_error(n.line, n.col, "duplicate name '" + s.name + "'");
            p.expect("=");
            s.lhs = p.expr();
            p.expect_end();
            out.body.push_back(std::move(s));
        } else if (kw == "assert") {
            body_started = true;
            if (p.peek().kind == Token::Ident && p.peek().text == "in_subgroup") {
                p.next();
                Statement s{Statement::AssertSubgroup, {}, nullptr, nullptr, head.line, head.col};
                p.expect("(");
                s.lhs = p.expr();
                p.expect(")");
                p.expect_end();
                out.body.push_back(std::move(s));
            } else {
                Statement s{Statement::AssertEqual, {}, nullptr, nullptr, head.line, head.col};
                s.lhs = p.expr();
                p.expect("==");
                s.rhs = p.expr();
                p.expect_end();
                out.body.push_back(std::move(s));
            }
        } else {
            parse_error(head.line, head.col, "unknown statement '" + kw + "'");
        }
    }
    if (!header) parse_error(1, 1, "empty program");
    return out;
}

// ---------------------------------------------------------------- evaluation

constexpr std::size_t kScalarBits = 251;  // subgroup order < 2^251
constexpr std::size_t kFieldBits = 254;

struct Value {
    enum Kind { Field, Scalar, Point, Generator, Product } kind = Field;
    Wire wire;                 // Field, Scalar
    std::vector<Wire> bits;    // Scalar: range-checked little-endian bits
    PointWire point;           // Point
    Wire lhs, rhs;             // Product (deferred until it is compared or reused)
};

std::string_view kind_name(Value::Kind k)
{
    switch (k) {
    case Value::Field: return "field";
    case Value::Scalar: return "scalar";
    case Value::Point: return "point";
    case Value::Generator: return "generator";
    case Value::Product: return "field";
    }
    return "?";
}

class Interpreter {
public:
    Interpreter(CircuitBuilder& b, const InputAssignment* inputs) : b_(b), inputs_(inputs) {}

    void run(const ParsedProgram& prog)
    {
        // public inputs first so the witness layout is [1, public..., private...]
        for (const auto& d : prog.params)
            if (d.visibility == Visibility::Public) allocate(d);
        for (const auto& d : prog.params)
            if (d.visibility == Visibility::Private) allocate(d);
        for (const auto& d : prog.params) constrain_input(d);
        for (const auto& s : prog.body) execute(s);
    }

private:
    void allocate(const ParameterDecl& d)
    {
        auto alloc = [&](const Fr& v) { return d.visibility == Visibility::Public ? b_.public_input(v) : b_.private_input(v); };
        Value v;
        if (d.type == ValueType::Point) {
            const EdwardsPoint p = input_point(d.name);
            v.kind = Value::Point;
            v.point.x = alloc(p.x());
            v.point.y = alloc(p.y());
        } else {
            v.kind = d.type == ValueType::Scalar ? Value::Scalar : Value::Field;
            v.wire = alloc(input_field(d.name));
        }
        env_[d.name] = std::move(v);
    }

    void constrain_input(const ParameterDecl& d)
    {
        Value& v = env_.at(d.name);
        if (d.type == ValueType::Point) enforce_on_curve(b_, v.point);
        if (d.type == ValueType::Scalar) {
            v.bits = to_bits(b_, v.wire, kScalarBits);
            zk::Limbs bound = JubScalar::kModulus;
            limbs_sub(bound, zk::Limbs{1, 0, 0, 0});
            enforce_bits_at_most(b_, v.bits, bound);
        }
    }

    EdwardsPoint input_point(const std::string& name) const
    {
        if (!inputs_) return EdwardsPoint::identity();
        const auto it = inputs_->find(name);
        if (it == inputs_->end() || !std::holds_alternative<EdwardsPoint>(it->second)) {
            throw Error(Errc::SchemaMismatch, "missing point input '" + name + "'");
        }
        return std::get<EdwardsPoint>(it->second);
    }

    Fr input_field(const std::string& name) const
    {
        if (!inputs_) return Fr::zero();
        const auto it = inputs_->find(name);
        if (it == inputs_->end() || !std::holds_alternative<Fr>(it->second)) {
            throw Error(Errc::SchemaMismatch, "missing field input '" + name + "'");
        }
        return std::get<Fr>(it->second);
    }

    [[noreturn]] static void type_error(const Expr& e, const std::string& msg) { parse_error(e.line, e.col, msg); }

    Wire force(const Value& v, const Expr& at)
    {
        switch (v.kind) {
        case Value::Field:
        case Value::Scalar: return v.wire;
        case Value::Product: return b_.mul(v.lhs, v.rhs);
        default: type_error(at, "expected a field value, found " + std::string(kind_name(v.kind)));
        }
    }

    PointWire as_point(const Value& v, const Expr& at)
    {
        if (v.kind == Value::Point) return v.point;
        if (v.kind == Value::Generator) return constant_point(b_, EdwardsPoint::generator());
        type_error(at, "expected a point, found " + std::string(kind_name(v.kind)));
    }

    std::vector<Wire> scalar_bits(const Value& v, const Expr& at)
    {
        if (v.kind == Value::Scalar) return v.bits;
        const Wire w = force(v, at);
        auto bits = to_bits(b_, w, kFieldBits);
        zk::Limbs bound = Fr::kModulus;
        limbs_sub(bound, zk::Limbs{1, 0, 0, 0});
        enforce_bits_at_most(b_, bits, bound);
        return bits;
    }

    static bool is_pointish(const Value& v) { return v.kind == Value::Point || v.kind == Value::Generator; }

    Value eval(const Expr& e)
    {
        switch (e.kind) {
        case Expr::Name: {
            const auto it = env_.find(e.text);
            if (it == env_.end()) type_error(e, "unknown name '" + e.text + "'");
            return it->second;
        }
        case Expr::Number: {
            Value v;
            v.wire = b_.constant(Fr::from_dec(e.text));
            return v;
        }
        case Expr::Generator: {
            Value v;
            v.kind = Value::Generator;
            return v;
        }
        case Expr::Coord: {
            const Value p = eval(*e.args[0]);
            const PointWire pw = as_point(p, *e.args[0]);
            Value v;
            v.wire = e.text == "x" ? pw.x : pw.y;
            return v;
        }
        case Expr::Hash: {
            std::vector<Wire> args;
            for (const auto& a : e.args) {
                const Value v = eval(*a);
                if (is_pointish(v)) {
                    const PointWire p = as_point(v, *a);
                    args.push_back(p.x);
                    args.push_back(p.y);
                } else {
                    args.push_back(force(v, *a));
                }
            }
            Value v;
            v.wire = poseidon_hash(b_, args);
            return v;
        }
        case Expr::Add:
        case Expr::Sub: {
            const Value l = eval(*e.args[0]);
            const Value r = eval(*e.args[1]);
            if (is_pointish(l) != is_pointish(r)) type_error(e, "cannot mix points and field values in + or -");
            Value v;
            if (is_pointish(l)) {
                PointWire q = as_point(r, *e.args[1]);
                if (e.kind == Expr::Sub) q.x = q.x * -Fr::one();
                v.kind = Value::Point;
                v.point = edwards_add(b_, as_point(l, *e.args[0]), q);
            } else {
                const Wire a = force(l, *e.args[0]);
                const Wire c = force(r, *e.args[1]);
                v.wire = e.kind == Expr::Add ? a + c : a - c;
            }
            return v;
        }
        case Expr::Mul: {
            const Value l = eval(*e.args[0]);
            const Value r = eval(*e.args[1]);
            if (is_pointish(l) && is_pointish(r)) type_error(e, "cannot multiply two points");
            if (is_pointish(l) || is_pointish(r)) {
                const Value& pt = is_pointish(l) ? l : r;
                const Value& k = is_pointish(l) ? r : l;
                const Expr& k_expr = is_pointish(l) ? *e.args[1] : *e.args[0];
                const auto bits = scalar_bits(k, k_expr);
                Value v;
                v.kind = Value::Point;
                v.point = pt.kind == Value::Generator ? fixed_base_mul(b_, bits, EdwardsPoint::generator())
                                                      : variable_base_mul(b_, bits, pt.point);
                return v;
            }
            Value v;
            v.kind = Value::Product;
            v.lhs = force(l, *e.args[0]);
            v.rhs = force(r, *e.args[1]);
            if (v.lhs.lc.as_constant() || v.rhs.lc.as_constant()) {
                // scaling by a constant is linear
                v.kind = Value::Field;
                v.wire = b_.mul(v.lhs, v.rhs);
            }
            return v;
        }
        }
        type_error(e, "unsupported expression");
    }

    void execute(const Statement& s)
    {
        switch (s.kind) {
        case Statement::Let: {
            Value v = eval(*s.lhs);
            if (v.kind == Value::Product) {
                v.wire = force(v, *s.lhs);
                v.kind = Value::Field;
            }
            env_[s.name] = std::move(v);
            return;
        }
        case Statement::AssertSubgroup: {
            const Value v = eval(*s.lhs);
            if (v.kind != Value::Point) type_error(*s.lhs, "in_subgroup expects a point");
            enforce_in_subgroup(b_, v.point);
            return;
        }
        case Statement::AssertEqual: {
            const Value l = eval(*s.lhs);
            const Value r = eval(*s.rhs);
            if (is_pointish(l) != is_pointish(r)) type_error(*s.lhs, "cannot compare a point with a field value");
            if (is_pointish(l)) {
                enforce_point_equal(b_, as_point(l, *s.lhs), as_point(r, *s.rhs));
            } else if (l.kind == Value::Product && r.kind != Value::Product) {
                b_.enforce(l.lhs, l.rhs, force(r, *s.rhs));
            } else if (r.kind == Value::Product && l.kind != Value::Product) {
                b_.enforce(r.lhs, r.rhs, force(l, *s.lhs));
            } else {
                b_.enforce_equal(force(l, *s.lhs), force(r, *s.rhs));
            }
            return;
        }
        }
    }

    CircuitBuilder& b_;
    const InputAssignment* inputs_;
    std::map<std::string, Value> env_;
};

ConstraintSystem run_program(const BoilerplateProgram& program, const InputAssignment* inputs, WitnessVector* witness)
{
    const ParsedProgram parsed = parse(program.source_text);
    if (parsed.params != program.parameter_schema) {
        std::string got;
        for (const auto& d : parsed.params) {
            got += std::string(got.empty() ? "" : ", ") + d.name + " " + std::string(to_string(d.visibility)) + " " +
                   std::string(to_string(d.type));
        }
        throw Error(Errc::SchemaMismatch, "declared parameters [" + got + "] differ from the required schema");
    }
    CircuitBuilder b(inputs ? CircuitBuilder::Mode::Witness : CircuitBuilder::Mode::Compile);
    Interpreter(b, inputs).run(parsed);
    if (witness) *witness = b.witness();
    return std::move(b).finish(parsed.name, program.program_digest());
}

}  // namespace

ConstraintSystem compile(const BoilerplateProgram& program) { return run_program(program, nullptr, nullptr); }

WitnessVector synthesize_witness(const BoilerplateProgram& program, const ConstraintSystem& cs,
                                 const InputAssignment& inputs)
{
    if (cs.program_digest != program.program_digest()) {
        throw Error(Errc::SchemaMismatch, "constraint system was compiled from a different program");
    }
    WitnessVector w;
    const ConstraintSystem built = run_program(program, &inputs, &w);
    if (!(built == cs)) throw Error(Errc::SchemaMismatch, "constraint system differs from the program's compilation");
    return w;
}

std::vector<Fr> membership_public_inputs(const EdwardsPoint& pk) { return {pk.x(), pk.y()}; }

WitnessVector build_witness(const ConstraintSystem& cs, const EdwardsPoint& pk, const ClientCredential& credential)
{
    if (!(credential.idp_credential_pk == pk) || !zk::verify_native(pk, credential.client_id, credential.signature)) {
        throw Error(Errc::InvalidCredential, "credential signature does not verify under the IdP key");
    }
    const InputAssignment inputs{
        {"pk", pk},
        {"R", credential.signature.R},
        {"S", Fr::from_canonical(credential.signature.S.to_canonical())},
        {"M", credential.client_id},
    };
    return synthesize_witness(BoilerplateProgram::membership(), cs, inputs);
}

}  // namespace expresso::circuit
