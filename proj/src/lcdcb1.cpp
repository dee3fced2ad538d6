#include "crnstab/lcdcb1.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>

#include "crnstab/error.hpp"
#include "crnstab/parse.hpp"

namespace crnstab {

namespace {

std::vector<Rational> rational_reaction_vector(const Reaction& r) {
    std::vector<Rational> v(r.reactant.size());
    for (std::size_t j = 0; j < v.size(); ++j)
        v[j] = r.product.coeffs[j] - r.reactant.coeffs[j];
    return v;
}

/// Factor b with v = b * w, exactly; nullopt if not positively collinear.
std::optional<Rational> collinearity_factor(const std::vector<Rational>& v,
                                            const std::vector<Rational>& w) {
    std::optional<Rational> b;
    for (std::size_t j = 0; j < v.size(); ++j) {
        if (w[j].is_zero()) {
            if (!v[j].is_zero()) return std::nullopt;
            continue;
        }
        Rational f = v[j] / w[j];
        if (!f.positive()) return std::nullopt;
        if (!b) b = f;
        else if (!(*b == f)) return std::nullopt;
    }
    return b;  // nullopt only if w == 0, excluded by the self-loop invariant
}

}  // namespace

Lcdcb1Result classify_lcdcb1(const Network& candidate, const Network& reference,
                             bool allow_b_greater_1) {
    candidate.validate();
    reference.validate();

    if (std::set<std::string>(candidate.species.begin(), candidate.species.end()) !=
        std::set<std::string>(reference.species.begin(), reference.species.end()))
        throw Error("species sets differ");
    if (candidate.reaction_count() != reference.reaction_count())
        throw Error("reaction counts differ (" + std::to_string(candidate.reaction_count()) +
                    " vs " + std::to_string(reference.reaction_count()) + ")");

    // Work in the candidate's species order.
    std::vector<std::size_t> map(reference.species.size());
    for (std::size_t j = 0; j < reference.species.size(); ++j)
        map[j] = static_cast<std::size_t>(candidate.species_index(reference.species[j]));

    auto aligned = [&](const Complex& c) {
        Complex out;
        out.coeffs.resize(c.size());
        for (std::size_t j = 0; j < c.size(); ++j) out.coeffs[map[j]] = c.coeffs[j];
        return out;
    };

    Lcdcb1Result res;
    res.pairing.assign(candidate.reaction_count(), -1);
    res.b.assign(candidate.reaction_count(), Rational(0));

    auto reject = [&](const std::string& why) {
        res.accepted = false;
        res.stability_applicable = false;
        res.rejection_reason = why;
        return res;
    };

    // Reference reactions grouped by (aligned) reactant complex.
    std::map<Complex, std::vector<int>> groups;
    std::vector<Complex> ref_reactant(reference.reaction_count());
    std::vector<std::vector<Rational>> ref_vec(reference.reaction_count());
    for (std::size_t i = 0; i < reference.reaction_count(); ++i) {
        ref_reactant[i] = aligned(reference.reactions[i].reactant);
        Reaction shifted = reference.reactions[i];
        shifted.reactant = ref_reactant[i];
        shifted.product = aligned(reference.reactions[i].product);
        ref_vec[i] = rational_reaction_vector(shifted);
        groups[ref_reactant[i]].push_back(static_cast<int>(i));
    }

    std::vector<bool> used(reference.reaction_count(), false);
    bool b_condition_violated = false;
    std::string b_violation_note;

    for (std::size_t i = 0; i < candidate.reaction_count(); ++i) {
        const Reaction& r = candidate.reactions[i];
        auto git = groups.find(r.reactant);
        if (git == groups.end())
            return reject("candidate reaction " + std::to_string(i + 1) +
                          ": reactant complex " +
                          format_complex(candidate.species, r.reactant) +
                          " has no reference counterpart");

        std::vector<Rational> v = rational_reaction_vector(r);
        int match = -1;
        Rational b_geom(0);
        for (int ref_i : git->second) {
            auto f = collinearity_factor(v, ref_vec[ref_i]);
            if (!f) continue;
            if (match >= 0)
                return reject("candidate reaction " + std::to_string(i + 1) +
                              ": pairing is ambiguous (reference reactions " +
                              std::to_string(match + 1) + " and " + std::to_string(ref_i + 1) +
                              " are both positively collinear); refusing to guess");
            match = ref_i;
            b_geom = *f;
        }
        if (match < 0)
            return reject("candidate reaction " + std::to_string(i + 1) +
                          ": no reference reaction with positively collinear reaction vector");
        if (used[match])
            return reject("reference reaction " + std::to_string(match + 1) +
                          " matched twice");
        used[match] = true;

        Rational b_rate = reference.reactions[match].rate / r.rate;
        if (b_rate > Rational(1)) {
            if (!allow_b_greater_1)
                return reject("b_" + std::to_string(i + 1) + " > 1 (b = " + b_rate.str() +
                              "): reaction vectors must shrink");
            b_condition_violated = true;
            b_violation_note = "b_" + std::to_string(i + 1) + " = " + b_rate.str() + " > 1";
        }
        // The rate-ratio and collinearity computations of b must agree; both
        // are exact here, so the comparison is too (tolerance 1e-12 would
        // only matter for float inputs).
        if (!(b_rate == b_geom)) {
            double gap = std::abs(b_rate.to_double() - b_geom.to_double());
            if (gap > 1e-12)
                return reject("candidate reaction " + std::to_string(i + 1) +
                              ": rate-ratio b = " + b_rate.str() +
                              " disagrees with collinearity factor " + b_geom.str());
        }

        res.pairing[i] = match;
        res.b[i] = b_rate;
    }

    res.accepted = true;
    res.stability_applicable = !b_condition_violated;
    if (b_condition_violated)
        res.rejection_reason = "accepted with waived condition: " + b_violation_note +
                               "; stability theorem inapplicable";
    return res;
}

Network companion_dcb(const Network& candidate, const Lcdcb1Result& result,
                      const Network& reference) {
    if (!result.accepted) throw Error("classification was not accepted");
    Network out = reference;
    for (std::size_t i = 0; i < result.pairing.size(); ++i) {
        // tau~ = tau / b, paired with the reference reaction's complexes/rate.
        out.reactions[result.pairing[i]].delay = candidate.reactions[i].delay / result.b[i];
    }
    out.validate();
    return out;
}

}  // namespace crnstab
