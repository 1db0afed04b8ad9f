#include "ktlab/manifold.hpp"

#include <algorithm>
#include <sstream>

namespace ktlab {

InvariantForm InvariantForm::generator(int index) {
    InvariantForm f(1);
    f.add_term({index}, ExactScalar(1));
    return f;
}

InvariantForm InvariantForm::constant(const ExactScalar& c) {
    InvariantForm f(0);
    f.add_term({}, c);
    return f;
}

ExactScalar InvariantForm::coefficient(const std::vector<int>& key) const {
    auto it = coeff_.find(key);
    return it == coeff_.end() ? ExactScalar() : it->second;
}

void InvariantForm::add_term(std::vector<int> idx, ExactScalar c) {
    if (c.is_zero()) return;
    // Insertion sort tracking permutation parity; repeated index kills the term.
    bool negate = false;
    for (size_t i = 1; i < idx.size(); ++i) {
        for (size_t j = i; j > 0 && idx[j] < idx[j - 1]; --j) {
            std::swap(idx[j], idx[j - 1]);
            negate = !negate;
        }
    }
    for (size_t i = 1; i < idx.size(); ++i) {
        if (idx[i] == idx[i - 1]) return;
    }
    if (negate) c = -c;
    auto it = coeff_.find(idx);
    if (it == coeff_.end()) {
        coeff_.emplace(std::move(idx), std::move(c));
    } else {
        const ExactScalar sum = it->second + c;
        if (sum.is_zero()) {
            coeff_.erase(it);
        } else {
            it->second = sum;
        }
    }
}

InvariantForm InvariantForm::operator+(const InvariantForm& o) const {
    if (!coeff_.empty() && !o.coeff_.empty() && degree_ != o.degree_)
        throw std::invalid_argument("InvariantForm::operator+: degree mismatch");
    InvariantForm out = *this;
    if (out.coeff_.empty()) out.degree_ = o.degree_;
    for (const auto& [k, c] : o.coeff_) out.add_term(k, c);
    return out;
}

InvariantForm InvariantForm::operator-() const {
    InvariantForm out(degree_);
    for (const auto& [k, c] : coeff_) out.coeff_.emplace(k, -c);
    return out;
}

InvariantForm InvariantForm::operator-(const InvariantForm& o) const { return *this + (-o); }

InvariantForm InvariantForm::operator*(const ExactScalar& c) const {
    InvariantForm out(degree_);
    if (c.is_zero()) return out;
    for (const auto& [k, v] : coeff_) out.coeff_.emplace(k, v * c);
    return out;
}

std::string InvariantForm::to_string() const {
    if (coeff_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : coeff_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.to_string() << ")";
        for (int idx : k) os << "*theta^" << idx;
    }
    return os.str();
}

InvariantForm wedge(const InvariantForm& a, const InvariantForm& b) {
    InvariantForm out(a.degree() + b.degree());
    for (const auto& [ka, ca] : a.terms()) {
        for (const auto& [kb, cb] : b.terms()) {
            std::vector<int> key = ka;
            key.insert(key.end(), kb.begin(), kb.end());
            out.add_term(std::move(key), ca * cb);
        }
    }
    return out;
}

InvariantForm exterior_d(const InvariantForm& form, const ManifoldModel& model) {
    InvariantForm out(form.degree() + 1);
    const ExactScalar minus_one(-1);
    for (const auto& [key, c] : form.terms()) {
        for (size_t p = 0; p < key.size(); ++p) {
            if (key[p] != model.n) continue;  // only d e^{n+1} is nonzero
            // Replace slot p by each -e^j ^ f^j, keeping Leibniz parity (-1)^p.
            ExactScalar sign_c = (p % 2 == 0) ? c * minus_one : c;
            for (int j = 0; j < model.n; ++j) {
                std::vector<int> idx;
                idx.reserve(key.size() + 1);
                idx.insert(idx.end(), key.begin(), key.begin() + static_cast<long>(p));
                idx.push_back(j);
                idx.push_back(model.n + 1 + j);
                idx.insert(idx.end(), key.begin() + static_cast<long>(p) + 1, key.end());
                out.add_term(std::move(idx), sign_c);
            }
        }
    }
    return out;
}

ExactScalar pair_one_form(const InvariantForm& omega, const std::vector<ExactScalar>& v,
                          const ManifoldModel& model) {
    if (omega.degree() != 1 && !omega.is_zero())
        throw std::invalid_argument("pair_one_form: expected a 1-form");
    if (static_cast<int>(v.size()) != model.dim())
        throw std::invalid_argument("pair_one_form: frame vector has wrong length");
    ExactScalar out;
    for (const auto& [key, c] : omega.terms()) {
        out = out + c * v[static_cast<size_t>(model.frame_of_coframe(key[0]))];
    }
    return out;
}

}  // namespace ktlab
