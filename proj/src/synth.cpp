#include "fairshap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fairshap {

namespace {

std::size_t pick(const std::vector<double>& probs, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.size() - 1;
}

}  // namespace

// The generator plants a specific bias pattern: women are issued much longer
// loan durations (a large, group-separating feature gap), and an offsetting
// direct sex effect in the historical outcomes keeps the approval rates of
// the two groups roughly equal. A model trained with the sensitive input
// reconstructs both halves of the pattern, so it carries a large direct sex
// dependence that feature repair can remove.
TabularDataset make_credit_dataset(std::size_t n_rows, std::uint64_t seed) {
    if (n_rows < 20) throw Error("make_credit_dataset: need at least 20 rows");

    TabularDataset ds;
    ds.schema.feature_names = {
        "duration_months", "credit_amount",    "age_years",
        "installment_rate", "residence_since", "existing_credits",
        "dependents",       "months_employed", "utilization_pct",
        "checking_status",  "savings_status",  "purpose",
        "housing",          "employment_since"};
    ds.schema.feature_kinds = {
        FeatureKind::numeric,     FeatureKind::numeric,     FeatureKind::numeric,
        FeatureKind::numeric,     FeatureKind::numeric,     FeatureKind::numeric,
        FeatureKind::numeric,     FeatureKind::numeric,     FeatureKind::numeric,
        FeatureKind::categorical, FeatureKind::categorical, FeatureKind::categorical,
        FeatureKind::categorical, FeatureKind::categorical};
    ds.schema.label_name = "credit_risk";
    ds.schema.label_positive_values = {"good"};
    ds.schema.sensitive_name = "sex";
    ds.schema.sensitive_positive_values = {"female"};

    const std::vector<std::string> checking = {"0to200", "200to500", "ge500",
                                               "lt0", "none"};
    const std::vector<std::string> savings = {"100to500", "500to1000", "lt100",
                                              "none", "unknown"};
    const std::vector<std::string> purpose = {"business",  "car_new",   "car_used",
                                              "education", "furniture", "radio_tv"};
    const std::vector<std::string> housing = {"coop", "free", "own", "rent"};
    const std::vector<std::string> employment = {"1to4", "4to7", "7to10",
                                                 "ge10", "lt1"};

    const std::vector<double> checking_p = {0.24, 0.16, 0.14, 0.24, 0.22};
    const std::vector<double> savings_p = {0.20, 0.16, 0.28, 0.20, 0.16};
    const std::vector<double> purpose_p = {0.15, 0.20, 0.14, 0.14, 0.17, 0.20};
    const std::vector<double> housing_p = {0.14, 0.15, 0.46, 0.25};
    const std::vector<double> employment_p = {0.28, 0.22, 0.16, 0.14, 0.20};

    const std::vector<double> checking_eff = {-0.015, 0.03, 0.06, -0.06, 0.02};
    const std::vector<double> savings_eff = {0.00, 0.03, -0.035, -0.055, 0.015};
    const std::vector<double> purpose_eff = {-0.015, 0.00, 0.02, -0.035, 0.00, 0.005};
    const std::vector<double> housing_eff = {0.015, -0.03, 0.035, -0.035};
    const std::vector<double> employment_eff = {0.005, 0.025, 0.035, 0.045, -0.03};

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> norm(0.0, 1.0);

    for (std::size_t i = 0; i < n_rows; ++i) {
        const int female = unif(rng) < 0.22 ? 1 : 0;

        const double duration = std::clamp(
            std::round((female ? 29.0 : 19.0) + 4.0 * norm(rng)), 6.0, 45.0);
        const double amount =
            std::round(std::exp(7.6 + 0.70 * norm(rng)) / 250.0) * 250.0;
        const double age =
            std::max(19.0, std::round((36.0 + 10.0 * norm(rng)) / 2.0) * 2.0);
        const double installment =
            std::clamp(std::round(2.2 + 1.1 * norm(rng)), 1.0, 4.0);
        const double residence = std::floor(unif(rng) * 4.0) + 1.0;
        const double credits = std::floor(unif(rng) * unif(rng) * 3.0) + 1.0;
        const double dependents = unif(rng) < 0.16 ? 2.0 : 1.0;
        const double employed =
            std::max(0.0, std::round(12.0 * unif(rng) * unif(rng)) * 5.0);
        const double utilization = std::round(20.0 * unif(rng)) * 5.0;

        const std::size_t chk = pick(checking_p, unif(rng));
        const std::size_t sav = pick(savings_p, unif(rng));
        const std::size_t pur = pick(purpose_p, unif(rng));
        const std::size_t hou = pick(housing_p, unif(rng));
        const std::size_t emp = pick(employment_p, unif(rng));

        double score = 2.45;
        score += -0.195 * (duration - 19.0);
        score += -0.000008 * (amount - 2600.0);
        score += 0.002 * (age - 36.0);
        score += -0.02 * (installment - 2.2);
        score += 0.01 * (residence - 2.5);
        score += -0.015 * (credits - 1.5);
        score += -0.015 * (dependents - 1.16);
        score += 0.001 * (employed - 15.0);
        score += -0.0005 * (utilization - 50.0);
        score += checking_eff[chk] + savings_eff[sav] + purpose_eff[pur] +
                 housing_eff[hou] + employment_eff[emp];
        score += 1.95 * female;
        score += 0.18 * norm(rng);
        const int good = unif(rng) < 1.0 / (1.0 + std::exp(-score)) ? 1 : 0;

        ds.rows.push_back({duration, amount, age, installment, residence, credits,
                           dependents, employed, utilization, checking[chk],
                           savings[sav], purpose[pur], housing[hou], employment[emp]});
        ds.sensitive.push_back(female);
        ds.labels.push_back(good);
        ds.sensitive_raw.push_back(female ? "female" : "male");
        ds.label_raw.push_back(good ? "good" : "bad");
    }

    // The generators above are probabilistic; the loaders require both label
    // classes and both groups, which holds for any reasonable n.
    return ds;
}

TabularDataset make_discrete_dataset(std::size_t n_rows, std::uint64_t seed) {
    TabularDataset ds;
    ds.schema.feature_names = {"shape", "shade"};
    ds.schema.feature_kinds = {FeatureKind::categorical, FeatureKind::categorical};
    ds.schema.label_name = "y";
    ds.schema.sensitive_name = "group";
    ds.schema.sensitive_positive_values = {"1"};

    const std::vector<std::string> shapes = {"circle", "square", "triangle"};
    const std::vector<std::string> shades = {"dark", "light"};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t i = 0; i < n_rows; ++i) {
        const int g = unif(rng) < 0.5 ? 1 : 0;
        const std::size_t sh = pick(g ? std::vector<double>{0.5, 0.3, 0.2}
                                      : std::vector<double>{0.2, 0.3, 0.5},
                                    unif(rng));
        const std::size_t sd =
            pick(g ? std::vector<double>{0.7, 0.3} : std::vector<double>{0.4, 0.6},
                 unif(rng));
        ds.rows.push_back({shapes[sh], shades[sd]});
        ds.sensitive.push_back(g);
        ds.labels.push_back(unif(rng) < (sh == 0 ? 0.8 : 0.3) ? 1 : 0);
    }
    return ds;
}

}  // namespace fairshap
