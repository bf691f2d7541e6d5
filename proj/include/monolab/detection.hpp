// Copyright 2026 The monolab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MONOLAB_DETECTION_HPP_
#define MONOLAB_DETECTION_HPP_

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "monolab/board.hpp"
#include "monolab/engine.hpp"
#include "monolab/evaluation.hpp"
#include "monolab/json_util.hpp"

namespace monolab {

struct DeviationEvent {
  std::string path;
  double expected = 0;
  double observed = 0;
  int game = 0;
  double confidence = 1.0;
  std::string detail;

  bool operator==(const DeviationEvent&) const = default;
};

Json deviation_json(const DeviationEvent& deviation);

// Expected board attributes and the paths already reported this trial.
class AttributeTracker {
 public:
  explicit AttributeTracker(const BoardSpec& known);

  const BoardSpec& known() const { return known_; }
  const std::map<std::string, double>& expected() const { return expected_; }
  bool reported(const std::string& path) const { return reported_.contains(path); }

  // Compares the attributes printed on the board: rents, prices, taxes, Go
  // increment, set sizes, square order and colors.
  std::vector<DeviationEvent> observe_state(const BoardSpec& visible, int game);

  // Compares an attribute-determined cash flow to its expected amount.
  std::vector<DeviationEvent> observe_outcome(const GameState& state,
                                              const GameEvent& event, int game);

 private:
  void check(const std::string& path, double expected, double observed, int game,
             std::vector<DeviationEvent>& out, std::string detail = {});

  BoardSpec known_;
  std::map<std::string, double> expected_;
  std::set<std::string> reported_;
};

struct DieBelief {
  std::vector<int> faces;  // support, ascending
  Eigen::VectorXd alpha;
  Eigen::VectorXd prior;
  bool extended = false;  // a face outside the known support was seen
};

struct DiceBeliefs {
  std::vector<DieBelief> dice;
  int expected_count = 0;
  std::optional<int> observed_count;  // set once a roll disagrees
  double prior = 2.0;

  long observations(int die) const;
};

DiceBeliefs make_dice_beliefs(const DiceSpec& known, double prior = 2.0);
void update_dice_beliefs(DiceBeliefs& beliefs, std::span<const int> faces);

// Mode of the Dirichlet posterior: (α_i − 1) / (Σα − K).
template <typename Scalar = double>
VectorX<Scalar> dirichlet_map(const VectorX<Scalar>& alpha) {
  const Scalar denom = alpha.sum() - Scalar(alpha.size());
  if (!(denom > Scalar(0))) {
    throw std::domain_error("Dirichlet MAP undefined: sum(alpha) equals K");
  }
  return (alpha.array() - Scalar(1)).matrix() / denom;
}

template <typename Scalar = double>
Scalar kl_divergence(const VectorX<Scalar>& p, const VectorX<Scalar>& q) {
  Scalar total = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > Scalar(0)) total += p(i) * std::log(p(i) / q(i));
  }
  return total;
}

Eigen::VectorXd dice_map_estimate(const DiceBeliefs& beliefs, int die);

// Dice model implied by the current MAP estimates.
DiceSpec map_dice_model(const DiceBeliefs& beliefs);

struct DriftOptions {
  long min_rolls = 60;
  double kl_threshold = 0.02;
};

std::vector<DeviationEvent> detect_dice_novelty(const DiceBeliefs& beliefs,
                                                const DiceSpec& known, int game,
                                                const DriftOptions& options = {});

// First confident deviation of the trial, kept once made.
class NoveltyFlag {
 public:
  explicit NoveltyFlag(double threshold = 0.95) : threshold_(threshold) {}

  void observe(const std::vector<DeviationEvent>& deviations);
  std::optional<int> announced() const { return announced_; }
  const std::vector<DeviationEvent>& history() const { return history_; }

 private:
  double threshold_;
  std::optional<int> announced_;
  std::vector<DeviationEvent> history_;
};

// Folds detections into the agent's beliefs.
ValueParams adapt_params(ValueParams params,
                         const std::vector<DeviationEvent>& detections,
                         const DiceBeliefs* dice = nullptr);

}  // namespace monolab

#endif  // MONOLAB_DETECTION_HPP_
