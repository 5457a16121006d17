#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fairshap/dataset.hpp"
#include "fairshap/matching.hpp"
#include "fairshap/matrix.hpp"
#include "fairshap/model.hpp"

namespace fairshap {

enum class GameKind { baseline, random_baseline, dr_game };

// Cooperative game over a set of players, addressed by bitmask. Values must
// be deterministic functions of the coalition.
class CoalitionGame {
public:
    CoalitionGame(GameKind kind, std::size_t players, std::function<double(std::uint32_t)> v)
        : kind_(kind), players_(players), v_(std::move(v)) {
        if (players_ == 0 || players_ > 25)
            throw Error("coalition game: player count must be in [1, 25]");
    }

    double value(std::uint32_t coalition) const { return v_(coalition); }
    std::size_t players() const { return players_; }
    GameKind kind() const { return kind_; }
    std::uint32_t full_mask() const { return (1u << players_) - 1u; }

private:
    GameKind kind_;
    std::size_t players_;
    std::function<double(std::uint32_t)> v_;
};

// Baseline-substitution game: coalition members keep their own value, the
// rest are taken from the reference vector r.
double value_baseline(const Predictor& f, std::span<const double> x, double a,
                      std::span<const double> r, std::uint32_t coalition);

// Random-baselines game: out-of-coalition values are averaged over reference
// rows (all of them when |D_ref| <= sample_cap, else a seeded subsample).
double value_random_baseline(const Predictor& f, std::span<const double> x, double a,
                             const Matrix& refs, std::uint32_t coalition,
                             std::size_t sample_cap = 64, std::uint64_t seed = 0);

// Discriminative-risk game over raw-feature blocks of encoded rows: the
// coalition keeps target cells, the complement is drawn from the matched
// conditional distribution, and the plan-marginal expected risk of the other
// group is subtracted so that the empty coalition is centred.
double dr_marginal_term(const Predictor& f, const MatchingPlan& plan, const Matrix& G_other);

double value_dr_game(const Predictor& f, std::size_t i, std::uint32_t coalition,
                     const MatchingPlan& plan, const Matrix& G,
                     const Matrix& G_other, std::span<const RawBlock> blocks);

struct DrGameContext {
    const Predictor* f = nullptr;
    const Matrix* G = nullptr;        // target group, encoded
    const Matrix* G_other = nullptr;  // other group, encoded
    const MatchingPlan* plan = nullptr;
    std::span<const RawBlock> blocks;
    double marginal_term = 0.0;       // fill via dr_marginal_term
};

// Game for one target row. reference_term receives the conditional expected
// risk of the pure reference (the phi0 baseline, without the marginal
// subtraction).
CoalitionGame make_dr_game(const DrGameContext& ctx, std::size_t i,
                           double* reference_term = nullptr);

struct ShapleyResult {
    std::vector<double> phi;
    double phi0 = 0.0;            // v(empty)
    std::vector<double> se;       // per-feature standard error (sampled only)
    std::size_t permutations = 0;
};

inline constexpr std::size_t kMaxExactPlayers = 14;

ShapleyResult exact_shapley(const CoalitionGame& game,
                            std::size_t max_players = kMaxExactPlayers);
ShapleyResult sampled_shapley(const CoalitionGame& game, std::size_t n_permutations,
                              std::uint64_t seed);

struct EstimatorConfig {
    enum class Mode { automatic, exact, sampled };
    Mode mode = Mode::automatic;
    std::size_t permutations = 200;
    std::uint64_t seed = 0;
    std::size_t exact_limit = kMaxExactPlayers;
};

// Per raw feature; one-hot blocks act as a single player. The sensitive
// attribute is not a player. phi0[i] is the conditional expected risk of the
// reference, so phi0[i] + sum_k phi(i,k) equals the target row's risk.
struct ShapleyAttribution {
    Matrix phi;                // n_target x n_raw_features
    std::vector<double> phi0;
    Matrix se;                 // same shape as phi when sampled, else empty
    std::string estimator;     // "exact" or "sampled"
    std::size_t permutations = 0;
    std::uint64_t seed = 0;
};

ShapleyAttribution shapley_matrix(const Predictor& f, const Matrix& G,
                                  const Matrix& G_other, const MatchingPlan& plan,
                                  std::span<const RawBlock> blocks,
                                  const EstimatorConfig& cfg);

void export_phi_csv(const ShapleyAttribution& attr, std::span<const RawBlock> blocks,
                    std::ostream& out);

}  // namespace fairshap
