#include <algorithm>
#include <cmath>

#include "tmpvc/dataset.hpp"
#include "tmpvc/errors.hpp"

namespace tmpvc::data {

namespace {

// Gaussian bump: amplitude (mV), centre and width in samples relative to R.
struct Wave {
  double amplitude;
  double centre;
  double width;
};

// Non-PVC: P, narrow QRS (R about 20 samples wide), upright T.
// PVC_R:   no P, wide upright R (about 60 samples), discordant T.
// PVC_L:   no P, wide negative QRS, upright T right after it.
std::vector<Wave> template_waves(BeatLabel label) {
  switch (label) {
    case BeatLabel::kNonPvc:
      return {{0.15, -62, 9}, {-0.12, -11, 2.5}, {1.0, 0, 3.5}, {-0.22, 11, 3}, {0.32, 92, 18}};
    case BeatLabel::kPvcR:
      return {{1.25, 0, 12}, {-0.38, 105, 24}};
    case BeatLabel::kPvcL:
      return {{0.12, -26, 5}, {-1.15, 0, 12}, {0.55, 78, 20}};
  }
  return {};
}

struct Jitter {
  double amplitude;
  double width;
  double offset;
};

Jitter draw_jitter(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.85, 1.15);
  std::uniform_real_distribution<double> width(0.9, 1.1);
  std::uniform_real_distribution<double> offset(-0.04, 0.04);
  // Argument evaluation order is unspecified; draw in sequence.
  const double a = amp(rng);
  const double w = width(rng);
  const double o = offset(rng);
  return {a, w, o};
}

double evaluate(const std::vector<Wave>& waves, const Jitter& j, double t) {
  double v = 0.0;
  for (const auto& w : waves) {
    const double width = w.width * j.width;
    const double z = (t - w.centre * j.width) / width;
    if (std::abs(z) < 8.0) v += j.amplitude * w.amplitude * std::exp(-0.5 * z * z);
  }
  return v;
}

}  // namespace

Eigen::VectorXd synth_beat(BeatLabel label, double noise_mv, std::mt19937_64& rng) {
  const auto waves = template_waves(label);
  const auto jitter = draw_jitter(rng);
  std::normal_distribution<double> noise(0.0, noise_mv > 0 ? noise_mv : 1.0);
  Eigen::VectorXd beat(seg::kBeatLength);
  for (int t = 0; t < seg::kBeatLength; ++t) {
    beat[t] = jitter.offset + evaluate(waves, jitter, t - seg::BeatWindow::r_index);
    if (noise_mv > 0) beat[t] += noise(rng);
  }
  return beat;
}

std::vector<SyntheticRecord> synth_records(int n_per_class, double noise_mv, std::uint64_t seed, int subjects) {
  if (n_per_class < 1) throw ConfigError("n_per_class must be >= 1");
  if (subjects < 1) throw ConfigError("subject count must be >= 1");
  if (!(noise_mv >= 0.0)) throw ConfigError("noise must be non-negative");

  std::mt19937_64 rng(seed);
  std::vector<std::vector<BeatLabel>> per_subject(static_cast<std::size_t>(subjects));
  for (int c = 0; c < kClassCount; ++c) {
    for (int i = 0; i < n_per_class; ++i) {
      per_subject[static_cast<std::size_t>(i % subjects)].push_back(static_cast<BeatLabel>(c));
    }
  }

  constexpr int kLead = 400;
  constexpr int kTail = 400;
  std::uniform_int_distribution<int> rr(340, 420);
  std::normal_distribution<double> noise(0.0, noise_mv > 0 ? noise_mv : 1.0);

  std::vector<SyntheticRecord> out;
  out.reserve(static_cast<std::size_t>(subjects));
  for (int s = 0; s < subjects; ++s) {
    auto labels = per_subject[static_cast<std::size_t>(s)];
    std::shuffle(labels.begin(), labels.end(), rng);

    SyntheticRecord rec;
    rec.record.subject_id = subject_name(s);
    std::vector<std::int64_t> peaks;
    std::int64_t r = kLead;
    for (std::size_t b = 0; b < labels.size(); ++b) {
      if (b) r += rr(rng);
      peaks.push_back(r);
    }
    const std::int64_t length = (peaks.empty() ? kLead : peaks.back()) + kTail;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(length);
    for (std::size_t b = 0; b < labels.size(); ++b) {
      const auto waves = template_waves(labels[b]);
      const auto jitter = draw_jitter(rng);
      const std::int64_t lo = std::max<std::int64_t>(0, peaks[b] - 300);
      const std::int64_t hi = std::min<std::int64_t>(length, peaks[b] + 300);
      // The baseline offset is per-beat; taper it so neighbouring beats join smoothly.
      for (std::int64_t t = lo; t < hi; ++t) {
        const double rel = static_cast<double>(t - peaks[b]);
        x[t] += evaluate(waves, jitter, rel) + jitter.offset * std::exp(-0.5 * (rel / 120.0) * (rel / 120.0));
      }
      BeatAnnotation a;
      a.sample_index = peaks[b];
      if (labels[b] == BeatLabel::kNonPvc) {
        a.symbol = 'N';
      } else {
        a.symbol = 'V';
        a.side = labels[b] == BeatLabel::kPvcR ? PvcSide::kRight : PvcSide::kLeft;
      }
      rec.annotations.push_back(a);
    }
    if (noise_mv > 0) {
      for (Eigen::Index t = 0; t < x.size(); ++t) x[t] += noise(rng);
    }
    rec.record.samples = std::move(x);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<LabeledBeat> synth_dataset(int n_per_class, double noise_mv, std::uint64_t seed, int subjects) {
  std::vector<LabeledBeat> out;
  for (const auto& rec : synth_records(n_per_class, noise_mv, seed, subjects)) {
    std::vector<std::int64_t> peaks;
    for (const auto& a : rec.annotations) peaks.push_back(a.sample_index);
    const auto segmentation = seg::segment_beats(rec.record.samples, peaks);
    const auto range = seg::percentile_range(rec.record.samples);
    for (std::size_t i = 0; i < segmentation.beats.size(); ++i) {
      const auto& a = rec.annotations[segmentation.peak_ids[i]];
      out.push_back({seg::flatten(seg::rasterize(segmentation.beats[i], range)), map_label(a.symbol, a.side),
                     rec.record.subject_id});
    }
  }
  return out;
}

}  // namespace tmpvc::data
