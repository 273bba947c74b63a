#include "nambu/poly.hpp"

#include "nambu/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace nambu {

namespace {

double ipow(double base, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= base;
    return r;
}

Monomial multiply(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.reserve(a.size() + b.size());
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first) {
            out.push_back(*ia++);
        } else if (ib->first < ia->first) {
            out.push_back(*ib++);
        } else {
            out.emplace_back(ia->first, ia->second + ib->second);
            ++ia;
            ++ib;
        }
    }
    out.insert(out.end(), ia, a.end());
    out.insert(out.end(), ib, b.end());
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, end);
}

} // namespace

std::string VarId::name() const {
    switch (kind) {
    case SlotKind::q:
        return "q" + std::to_string(dof);
    case SlotKind::p:
        return "p" + std::to_string(dof);
    case SlotKind::x:
        break;
    }
    return "x" + std::to_string(index) + "_" + std::to_string(dof);
}

Poly::Poly(double constant) {
    if (constant != 0.0) terms_.emplace(Monomial{}, constant);
}

Poly Poly::var(VarId v, int exponent) {
    Poly out;
    if (exponent == 0) {
        out.terms_.emplace(Monomial{}, 1.0);
    } else {
        out.terms_.emplace(Monomial{{v, exponent}}, 1.0);
    }
    return out;
}

Poly Poly::term(double coeff, Monomial m) {
    std::sort(m.begin(), m.end());
    Monomial canon;
    for (const auto& [v, e] : m) {
        if (e <= 0) continue;
        if (!canon.empty() && canon.back().first == v) {
            canon.back().second += e;
        } else {
            canon.emplace_back(v, e);
        }
    }
    Poly out;
    out.add_term(canon, coeff);
    return out;
}

void Poly::add_term(const Monomial& m, double c) {
    if (c == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

int Poly::degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) {
        int td = 0;
        for (const auto& [v, e] : m) td += e;
        d = std::max(d, td);
    }
    return d;
}

int Poly::degree_in(VarId v) const {
    int d = 0;
    for (const auto& [m, c] : terms_) {
        for (const auto& [w, e] : m) {
            if (w == v) d = std::max(d, e);
        }
    }
    return d;
}

std::set<VarId> Poly::variables() const {
    std::set<VarId> vars;
    for (const auto& [m, c] : terms_) {
        for (const auto& [v, e] : m) vars.insert(v);
    }
    return vars;
}

double Poly::coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
}

double Poly::eval(const Assignment& at) const {
    double sum = 0.0;
    for (const auto& [m, c] : terms_) {
        double t = c;
        for (const auto& [v, e] : m) {
            auto it = at.find(v);
            if (it == at.end()) throw MissingVariable(v.name());
            t *= ipow(it->second, e);
        }
        sum += t;
    }
    return sum;
}

Poly Poly::partial(VarId v) const {
    Poly out;
    for (const auto& [m, c] : terms_) {
        auto it = std::find_if(m.begin(), m.end(), [&](const auto& f) { return f.first == v; });
        if (it == m.end()) continue;
        Monomial dm = m;
        auto& slot = dm[static_cast<std::size_t>(it - m.begin())];
        const int e = slot.second;
        if (e == 1) {
            dm.erase(dm.begin() + (it - m.begin()));
        } else {
            slot.second = e - 1;
        }
        out.add_term(dm, c * e);
    }
    return out;
}

Poly Poly::substitute(const Substitution& subs) const {
    Poly out;
    for (const auto& [m, c] : terms_) {
        Poly t(c);
        Monomial kept;
        for (const auto& [v, e] : m) {
            auto it = subs.find(v);
            if (it == subs.end()) {
                kept.emplace_back(v, e);
            } else {
                t *= it->second.pow(e);
            }
        }
        if (!kept.empty()) t *= Poly::term(1.0, kept);
        out += t;
    }
    return out;
}

Poly Poly::pow(int n) const {
    Poly result(1.0);
    Poly base = *this;
    while (n > 0) {
        if (n & 1) result *= base;
        n >>= 1;
        if (n > 0) base *= base;
    }
    return result;
}

Poly Poly::operator-() const {
    Poly out = *this;
    for (auto& [m, c] : out.terms_) c = -c;
    return out;
}

Poly& Poly::operator+=(const Poly& other) {
    for (const auto& [m, c] : other.terms_) add_term(m, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& other) {
    for (const auto& [m, c] : other.terms_) add_term(m, -c);
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) out.add_term(multiply(ma, mb), ca * cb);
    }
    return out;
}

Poly& Poly::operator*=(const Poly& other) {
    *this = *this * other;
    return *this;
}

Poly& Poly::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto it = terms_.begin(); it != terms_.end();) {
        it->second *= s;
        if (it->second == 0.0) {
            it = terms_.erase(it);
        } else {
            ++it;
        }
    }
    return *this;
}

std::string Poly::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        double mag = std::abs(c);
        if (first) {
            if (c < 0) out += "-";
        } else {
            out += c < 0 ? " - " : " + ";
        }
        first = false;
        std::string factors;
        for (auto f = m.rbegin(); f != m.rend(); ++f) {
            if (!factors.empty()) factors += "*";
            factors += f->first.name();
            if (f->second != 1) factors += "^" + std::to_string(f->second);
        }
        if (factors.empty()) {
            out += format_double(mag);
        } else if (mag == 1.0) {
            out += factors;
        } else {
            out += format_double(mag) + "*" + factors;
        }
    }
    return out;
}

Poly scale(const Poly& f, double s) { return f * s; }

Poly shift_dof(const Poly& f, int dof) {
    if (dof == 0) return f;
    Substitution subs;
    for (VarId v : f.variables()) {
        if (v.dof != 0) continue;
        VarId w = v;
        w.dof = dof;
        subs.emplace(v, Poly::var(w));
    }
    return f.substitute(subs);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class PolyParser {
public:
    explicit PolyParser(std::string_view text) : s_(text) {}

    Poly parse_all() {
        Poly p = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected character");
        return p;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("poly: " + what + " at offset " + std::to_string(pos_) + " in '" +
                         std::string(s_) + "'");
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Poly expr() {
        skip_ws();
        Poly acc;
        bool neg = false;
        if (accept('-')) {
            neg = true;
        } else {
            accept('+');
        }
        Poly t = product();
        acc = neg ? -t : t;
        for (;;) {
            if (accept('+')) {
                acc += product();
            } else if (accept('-')) {
                acc -= product();
            } else {
                break;
            }
        }
        return acc;
    }

    Poly product() {
        Poly acc = power();
        while (accept('*')) acc *= power();
        return acc;
    }

    Poly power() {
        Poly base = primary();
        if (accept('^')) {
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("expected integer exponent");
            int e = std::stoi(std::string(s_.substr(start, pos_ - start)));
            return base.pow(e);
        }
        return base;
    }

    Poly primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Poly inner = expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (c == '-') {
            ++pos_;
            return -power();
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
            if (ec != std::errc()) fail("bad number");
            pos_ = static_cast<std::size_t>(ptr - s_.data());
            return Poly(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            try {
                return Poly::var(parse_var(s_.substr(start, pos_ - start)));
            } catch (const ParseError&) {
                pos_ = start;
                fail("unknown variable '" + std::string(s_.substr(start)) + "'");
            }
        }
        fail(std::string("unexpected '") + c + "'");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

bool all_digits(std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

} // namespace

VarId parse_var(std::string_view name) {
    if (name.empty()) throw ParseError("empty variable name");
    const char head = name.front();
    std::string_view rest = name.substr(1);
    if (head == 'q' || head == 'p') {
        int dof = 0;
        if (!rest.empty()) {
            if (!all_digits(rest)) throw ParseError("bad variable name: " + std::string(name));
            dof = std::stoi(std::string(rest));
        }
        return head == 'q' ? VarId::q(dof) : VarId::p(dof);
    }
    if (head == 'x') {
        auto us = rest.find('_');
        std::string_view idx = rest.substr(0, us);
        if (!all_digits(idx)) throw ParseError("bad variable name: " + std::string(name));
        int dof = 0;
        if (us != std::string_view::npos) {
            std::string_view d = rest.substr(us + 1);
            if (!all_digits(d)) throw ParseError("bad variable name: " + std::string(name));
            dof = std::stoi(std::string(d));
        }
        int i = std::stoi(std::string(idx));
        if (i < 1) throw ParseError("multiplet index starts at 1: " + std::string(name));
        return VarId::x(i, dof);
    }
    throw ParseError("bad variable name: " + std::string(name));
}

Poly Poly::parse(std::string_view text) { return PolyParser(text).parse_all(); }

// ---------------------------------------------------------------------------

CompiledPoly::CompiledPoly(const Poly& f, std::span<const VarId> order) {
    terms_.reserve(f.size());
    for (const auto& [m, c] : f.terms()) {
        Term t{c, {}};
        for (const auto& [v, e] : m) {
            auto it = std::find(order.begin(), order.end(), v);
            if (it == order.end()) throw MissingVariable(v.name());
            t.factors.push_back({static_cast<std::size_t>(it - order.begin()), e});
        }
        terms_.push_back(std::move(t));
    }
}

double CompiledPoly::operator()(std::span<const double> values) const {
    double sum = 0.0;
    for (const auto& t : terms_) {
        double v = t.coeff;
        for (const auto& f : t.factors) v *= ipow(values[f.index], f.exponent);
        sum += v;
    }
    return sum;
}

} // namespace nambu
