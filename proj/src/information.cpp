#include "qcap/information.hpp"

#include "qcap/error.hpp"

#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>

namespace qcap {

std::string_view to_string(MeasureKind k) {
  switch (k) {
    case MeasureKind::coherent: return "coherent";
    case MeasureKind::mutual: return "mutual";
    case MeasureKind::choi_coherent: return "choi-coherent";
    case MeasureKind::choi_mutual: return "choi-mutual";
    case MeasureKind::holevo: return "holevo";
  }
  return "unknown";
}

MeasureKind parse_measure(std::string_view s) {
  if (s == "coherent") return MeasureKind::coherent;
  if (s == "mutual") return MeasureKind::mutual;
  if (s == "choi-coherent" || s == "choi_coherent") return MeasureKind::choi_coherent;
  if (s == "choi-mutual" || s == "choi_mutual") return MeasureKind::choi_mutual;
  if (s == "holevo") return MeasureKind::holevo;
  throw InvalidArgument("unknown measure '" + std::string(s) + "'");
}

bool is_choi_measure(MeasureKind k) { return k == MeasureKind::choi_coherent || k == MeasureKind::choi_mutual; }

Ensemble::Ensemble(std::vector<std::pair<double, DensityMatrix>> members) : members_(std::move(members)) {
  if (members_.empty()) throw InvalidArgument("ensemble must not be empty");
  double sum = 0.0;
  const int d = members_.front().second.dim();
  for (const auto& [p, s] : members_) {
    if (p < 0.0) throw InvalidArgument("ensemble probability is negative");
    if (s.dim() != d) throw InvalidArgument("ensemble members differ in dimension");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw InvalidArgument("ensemble probabilities sum to " + std::to_string(sum));
}

DensityMatrix Ensemble::average() const {
  const auto& first = members_.front().second;
  Matrix avg = Matrix::Zero(first.dim(), first.dim());
  for (const auto& [p, s] : members_) avg += p * s.matrix();
  return DensityMatrix::trusted(std::move(avg), first.layout());
}

namespace {

class ComplementCache {
 public:
  ChannelPair get(const KrausChannel& ch) {
    const std::uint64_t key = ch.content_hash();
    {
      std::shared_lock lock(mu_);
      if (auto hit = find(key, ch)) return *hit;
    }
    ChannelPair fresh{std::make_shared<const KrausChannel>(ch),
                      std::make_shared<const KrausChannel>(complementary(ch))};
    std::unique_lock lock(mu_);
    if (auto hit = find(key, ch)) return *hit;
    if (size_ >= kMaxEntries) {
      map_.clear();
      size_ = 0;
    }
    map_[key].push_back(fresh);
    ++size_;
    return fresh;
  }

 private:
  static constexpr std::size_t kMaxEntries = 4096;

  const ChannelPair* find(std::uint64_t key, const KrausChannel& ch) const {
    auto it = map_.find(key);
    if (it == map_.end()) return nullptr;
    for (const auto& p : it->second)
      if (*p.channel == ch) return &p;
    return nullptr;
  }

  mutable std::shared_mutex mu_;
  std::unordered_map<std::uint64_t, std::vector<ChannelPair>> map_;
  std::size_t size_ = 0;
};

ComplementCache& cache() {
  static ComplementCache c;
  return c;
}

void check_input(const DensityMatrix& rho, const KrausChannel& ch) {
  if (rho.dim() != ch.dim_in())
    throw InvalidArgument("state dimension " + std::to_string(rho.dim()) + " does not match channel input " +
                          std::to_string(ch.dim_in()));
}

}  // namespace

ChannelPair channel_pair(const KrausChannel& ch) { return cache().get(ch); }

double coherent_information_raw(const Matrix& rho, const ChannelPair& pair) {
  return von_neumann_entropy(apply(*pair.channel, rho)) - von_neumann_entropy(apply(*pair.complement, rho));
}

InfoValue coherent_information(const DensityMatrix& rho, const KrausChannel& ch) {
  check_input(rho, ch);
  return {coherent_information_raw(rho.matrix(), channel_pair(ch)), MeasureKind::coherent, 1};
}

InfoValue mutual_information(const DensityMatrix& rho, const KrausChannel& ch) {
  check_input(rho, ch);
  const double ic = coherent_information_raw(rho.matrix(), channel_pair(ch));
  return {von_neumann_entropy(rho) + ic, MeasureKind::mutual, 1};
}

namespace {

KrausChannel two_copy_for(const ChoiState& omega, const KrausChannel& ch) {
  if (omega.dim_in() != ch.dim_in() || omega.dim_out() != ch.dim_in())
    throw InvalidArgument("Choi input must live on two copies of the channel input space");
  return tensor(ch, ch);
}

}  // namespace

InfoValue choi_coherent_information(const ChoiState& omega, const KrausChannel& ch) {
  const KrausChannel two = two_copy_for(omega, ch);
  return {coherent_information_raw(omega.matrix(), channel_pair(two)), MeasureKind::choi_coherent, 2};
}

InfoValue choi_mutual_information(const ChoiState& omega, const KrausChannel& ch) {
  const KrausChannel two = two_copy_for(omega, ch);
  const double ic = coherent_information_raw(omega.matrix(), channel_pair(two));
  return {von_neumann_entropy(omega.state()) + ic, MeasureKind::choi_mutual, 2};
}

InfoValue holevo_chi(const Ensemble& ens, const KrausChannel& ch) {
  Matrix avg_out = Matrix::Zero(ch.dim_out(), ch.dim_out());
  double avg_entropy = 0.0;
  for (const auto& [p, s] : ens.members()) {
    check_input(s, ch);
    const Matrix out = apply(ch, s.matrix());
    avg_out += p * out;
    avg_entropy += p * von_neumann_entropy(out);
  }
  return {von_neumann_entropy(avg_out) - avg_entropy, MeasureKind::holevo, 1};
}

namespace {

long long int_pow(long long base, int n) {
  long long r = 1;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

}  // namespace

KrausChannel measure_channel(MeasureKind kind, const KrausChannel& ch, int n, int cap) {
  if (n < 1) throw InvalidArgument("number of shots must be >= 1");
  const int uses = is_choi_measure(kind) ? 2 * n : n;
  const long long dim = int_pow(ch.dim_in(), uses);
  if (dim > cap)
    throw CapExceeded("input dimension " + std::to_string(ch.dim_in()) + "^" + std::to_string(uses) + " = " +
                      std::to_string(dim) + " exceeds cap " + std::to_string(cap));
  return tensor_power(ch, uses);
}

InfoValue n_shot(MeasureKind kind, const DensityMatrix& state, const KrausChannel& ch, int n, int cap) {
  if (kind == MeasureKind::holevo) throw InvalidArgument("holevo n_shot takes an ensemble");
  const KrausChannel big = measure_channel(kind, ch, n, cap);
  InfoValue v;
  switch (kind) {
    case MeasureKind::coherent: v = coherent_information(state, big); break;
    case MeasureKind::mutual: v = mutual_information(state, big); break;
    case MeasureKind::choi_coherent:
    case MeasureKind::choi_mutual: {
      const int side = static_cast<int>(int_pow(ch.dim_in(), n));
      const ChoiState omega(DensityMatrix::trusted(state.matrix(), DimLayout{side, side}));
      check_input(omega.state(), big);
      const double ic = coherent_information_raw(omega.matrix(), channel_pair(big));
      v.value = kind == MeasureKind::choi_coherent ? ic : von_neumann_entropy(omega.state()) + ic;
      break;
    }
    case MeasureKind::holevo: break;
  }
  v.kind = kind;
  v.copies = is_choi_measure(kind) ? 2 * n : n;
  return v;
}

InfoValue n_shot(const Ensemble& ens, const KrausChannel& ch, int n, int cap) {
  const KrausChannel big = measure_channel(MeasureKind::holevo, ch, n, cap);
  InfoValue v = holevo_chi(ens, big);
  v.copies = n;
  return v;
}

}  // namespace qcap
