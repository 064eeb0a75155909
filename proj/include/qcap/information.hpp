#pragma once

// Entropic information measures of a (state, channel) pair, in bits.
// Values are raw and may be negative; clipping at zero is a reporting concern.

#include "qcap/channels.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qcap {

enum class MeasureKind { coherent, mutual, choi_coherent, choi_mutual, holevo };

std::string_view to_string(MeasureKind k);
// Accepts both "choi_coherent" and "choi-coherent" spellings.
MeasureKind parse_measure(std::string_view s);
bool is_choi_measure(MeasureKind k);

struct InfoValue {
  double value = 0.0;
  MeasureKind kind = MeasureKind::coherent;
  int copies = 1;  // channel uses entering the measure

  double per_use() const { return value / copies; }
};

class Ensemble {
 public:
  // Probabilities must be >= 0 and sum to 1 within 1e-10.
  explicit Ensemble(std::vector<std::pair<double, DensityMatrix>> members);

  const std::vector<std::pair<double, DensityMatrix>>& members() const { return members_; }
  DensityMatrix average() const;

 private:
  std::vector<std::pair<double, DensityMatrix>> members_;
};

// Channel together with its complementary channel. Cheap to copy.
struct ChannelPair {
  std::shared_ptr<const KrausChannel> channel;
  std::shared_ptr<const KrausChannel> complement;
};

// Memoized by content hash; safe to call from several threads.
ChannelPair channel_pair(const KrausChannel& ch);

// S(Phi(rho)) - S(Phi^c(rho)) for a raw matrix, skipping all validation.
double coherent_information_raw(const Matrix& rho, const ChannelPair& pair);

InfoValue coherent_information(const DensityMatrix& rho, const KrausChannel& ch);
InfoValue mutual_information(const DensityMatrix& rho, const KrausChannel& ch);
// omega_E on [d_in, d_in] sent through ch (x) ch.
InfoValue choi_coherent_information(const ChoiState& omega, const KrausChannel& ch);
InfoValue choi_mutual_information(const ChoiState& omega, const KrausChannel& ch);
// S(sum p_i Phi(w_i)) - sum p_i S(Phi(w_i)); pass ch (x) ch for Choi ensembles.
InfoValue holevo_chi(const Ensemble& ens, const KrausChannel& ch);

inline constexpr int kDefaultDimensionCap = 256;

// Measure against ch^{(x) n} (coherent, mutual) or ch^{(x) 2n} (Choi kinds,
// with `state` a Choi state on [d_in^n, d_in^n]). `copies` is set to n or 2n.
// Throws CapExceeded when the total input dimension exceeds `cap`.
InfoValue n_shot(MeasureKind kind, const DensityMatrix& state, const KrausChannel& ch, int n,
                 int cap = kDefaultDimensionCap);
InfoValue n_shot(const Ensemble& ens, const KrausChannel& ch, int n, int cap = kDefaultDimensionCap);

// Channel whose action the n-shot measure of `kind` evaluates, after checking
// the cap: ch^{(x) n} or ch^{(x) 2n}.
KrausChannel measure_channel(MeasureKind kind, const KrausChannel& ch, int n, int cap = kDefaultDimensionCap);

}  // namespace qcap
