#pragma once

#include <cmath>
#include <stdexcept>

namespace coopnet {

/// Symmetric 2x2 game. The focal player receives R against a cooperator when
/// cooperating, S against a defector when cooperating, T against a cooperator
/// when defecting, and P against a defector when defecting.
struct GameMatrix {
  double R = 0.0;
  double S = 0.0;
  double T = 0.0;
  double P = 0.0;

  /// Donation game: a cooperator pays cost c to deliver benefit b, so
  /// R = b - c, S = -c, T = b, P = 0.
  static GameMatrix donation(double b, double c) { return {b - c, -c, b, 0.0}; }
};

/// Structure Coefficient Theorem condition: cooperation fixation is favored
/// over defection fixation iff (R - P) * sigma > (T - S).
inline bool selection_condition(const GameMatrix& game, double sigma) {
  if (!std::isfinite(sigma)) {
    throw std::invalid_argument("selection_condition needs a finite sigma");
  }
  return (game.R - game.P) * sigma > (game.T - game.S);
}

}  // namespace coopnet
