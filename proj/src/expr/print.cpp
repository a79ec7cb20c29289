#include <charconv>

#include "fracbs/expr.hpp"

namespace fracbs::expr {

namespace {

enum Prec : int { kSum = 1, kProduct = 2, kPower = 4, kAtom = 5 };

std::string format_number(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

void print(const Expr& e, int parent, std::string& out);

bool leads_negative(const Expr& e) {
    if (e.is_constant()) return e.value() < 0;
    if (e.kind() == Kind::Mul && !e.args().empty()) return leads_negative(e.arg(0));
    return false;
}

// The term with its leading sign flipped; only called when leads_negative().
Expr negated(const Expr& e) {
    if (e.is_constant()) return num(-e.value());
    std::vector<Expr> f(e.args().begin(), e.args().end());
    f[0] = negated(f[0]);
    if (f[0].is_constant(1.0) && f.size() > 1) f.erase(f.begin());
    return Expr::mul(std::move(f));
}

void print_sum(const Expr& e, std::string& out) {
    bool first = true;
    for (const Expr& t : e.args()) {
        if (first) {
            print(t, kSum, out);
            first = false;
        } else if (leads_negative(t)) {
            out += " - ";
            print(negated(t), kProduct, out);
        } else {
            out += " + ";
            print(t, kSum, out);
        }
    }
}

void print_product(const Expr& e, std::string& out) {
    std::vector<Expr> numer;
    std::vector<Expr> denom;
    bool negative = false;
    for (const Expr& f : e.args()) {
        if (f.kind() == Kind::Pow && f.arg(1).is_constant() && f.arg(1).value() < 0) {
            double p = -f.arg(1).value();
            denom.push_back(p == 1.0 ? f.arg(0) : Expr::pow(f.arg(0), num(p)));
        } else if (&f == &e.args().front() && f.is_constant(-1.0) && e.args().size() > 1) {
            negative = true;
        } else {
            numer.push_back(f);
        }
    }
    if (negative) out += '-';
    if (numer.empty()) {
        out += '1';
    } else {
        bool first = true;
        for (const Expr& f : numer) {
            if (!first) out += '*';
            print(f, first ? kProduct : kProduct + 1, out);
            first = false;
        }
    }
    for (const Expr& d : denom) {
        out += '/';
        print(d, kPower, out);
    }
}

void print(const Expr& e, int parent, std::string& out) {
    std::string body;
    int prec = kAtom;
    switch (e.kind()) {
        case Kind::Constant:
            body = format_number(e.value());
            if (e.value() < 0) prec = kProduct;
            break;
        case Kind::Variable: body = std::string(var_name(e.var())); break;
        case Kind::Add:
            print_sum(e, body);
            prec = kSum;
            break;
        case Kind::Mul:
            print_product(e, body);
            prec = leads_negative(e) ? kProduct : kProduct + 1;
            break;
        case Kind::Pow:
            print(e.arg(0), kAtom, body);
            body += '^';
            print(e.arg(1), kAtom, body);
            prec = kPower;
            break;
        case Kind::Max:
            body = "max(";
            print(e.arg(0), 0, body);
            body += ", ";
            print(e.arg(1), 0, body);
            body += ')';
            break;
        default:
            body = std::string(kind_name(e.kind())) + '(';
            print(e.arg(0), 0, body);
            body += ')';
            break;
    }
    // A leading minus sign is only safe at the start of a sum or product.
    if (prec < parent || (parent > kProduct && !body.empty() && body.front() == '-')) {
        out += '(';
        out += body;
        out += ')';
    } else {
        out += body;
    }
}

}  // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, 0, out);
    return out;
}

}  // namespace fracbs::expr
