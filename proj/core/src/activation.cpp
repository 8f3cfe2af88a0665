#include "cliffkern/activation.hpp"

#include <algorithm>
#include <cmath>

#include "detail/vsigmoid.hpp"

namespace cliffkern {

std::string to_string(AggMode mode) {
  switch (mode) {
    case AggMode::Linear: return "linear";
    case AggMode::Sum: return "sum";
    case AggMode::Mean: return "mean";
  }
  return "unknown";
}

AggMode parse_agg_mode(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (t == "linear" || t == "0") return AggMode::Linear;
  if (t == "sum" || t == "1") return AggMode::Sum;
  if (t == "mean" || t == "2") return AggMode::Mean;
  throw Error(Errc::ConfigInvalid, "unknown aggregation mode '" + text + "'");
}

ActivationConfig::ActivationConfig(Signature sig, AggMode mode, std::vector<std::size_t> kernel_indices,
                                   std::optional<std::vector<float>> weight, std::optional<std::vector<float>> bias)
    : sig_(std::move(sig)), mode_(mode), indices_(std::move(kernel_indices)) {
  if (mode_ != AggMode::Linear && mode_ != AggMode::Sum && mode_ != AggMode::Mean) {
    throw Error(Errc::ConfigInvalid, "aggregation mode out of range");
  }
  const std::size_t NB = sig_.n_blades();
  if (indices_.empty() || indices_.size() > NB) {
    throw Error(Errc::ConfigInvalid, "need 1 <= K <= N_B kernel indices");
  }
  std::vector<bool> seen(NB, false);
  for (std::size_t idx : indices_) {
    if (idx >= NB) {
      throw Error(Errc::IndexOutOfRange, "kernel index " + std::to_string(idx) + " >= N_B " + std::to_string(NB));
    }
    if (seen[idx]) throw Error(Errc::ConfigInvalid, "kernel index " + std::to_string(idx) + " repeated");
    seen[idx] = true;
  }
  if (mode_ == AggMode::Linear) {
    if (!weight || !bias) throw Error(Errc::ModeConfigMismatch, "Linear mode requires weight and bias");
    const std::size_t C = bias->size();
    if (C == 0 || weight->size() != C * indices_.size()) {
      throw Error(Errc::ModeConfigMismatch, "Linear weight must be (C, K) with C = bias size");
    }
    channels_ = C;
    weight_ = std::move(*weight);
    bias_ = std::move(*bias);
  } else if (weight || bias) {
    throw Error(Errc::ModeConfigMismatch, "Sum/Mean modes take no weight or bias");
  }
}

std::vector<std::size_t> activation_shape(std::size_t B, std::size_t C, std::size_t n_blades) {
  return {B, C, n_blades};
}

float sigmoid(float s) { return 1.0f / (1.0f + std::exp(-s)); }

void sigmoid_vectorized(std::span<const float> in, std::span<float> out) {
  if (in.size() != out.size()) throw Error(Errc::ShapeMismatch, "sigmoid_vectorized size mismatch");
  std::size_t i = 0;
#if CLIFFKERN_HAVE_AVX2
  for (; i + 8 <= in.size(); i += 8) {
    _mm256_storeu_ps(out.data() + i, simd::sigmoid256_ps(_mm256_loadu_ps(in.data() + i)));
  }
  if (i < in.size()) {
    alignas(32) float buf[8] = {};
    std::copy(in.begin() + static_cast<std::ptrdiff_t>(i), in.end(), buf);
    _mm256_store_ps(buf, simd::sigmoid256_ps(_mm256_load_ps(buf)));
    std::copy(buf, buf + (in.size() - i), out.begin() + static_cast<std::ptrdiff_t>(i));
    i = in.size();
  }
#endif
  for (; i < in.size(); ++i) out[i] = sigmoid(in[i]);
}

namespace {

struct ActShape {
  std::size_t B, C, NB;
};

ActShape checked_shape(const ActivationTensor& x, const ActivationConfig& cfg, const char* what) {
  if (x.shape().size() != 3) throw Error(Errc::ShapeMismatch, std::string(what) + ": input must be (B, C, N_B)");
  const ActShape s{x.shape()[0], x.shape()[1], x.shape()[2]};
  if (s.NB != cfg.n_blades()) {
    throw Error(Errc::ShapeMismatch, std::string(what) + ": input has " + std::to_string(s.NB) +
                                         " blades, config expects " + std::to_string(cfg.n_blades()));
  }
  if (cfg.channels() && *cfg.channels() != s.C) {
    throw Error(Errc::ShapeMismatch, std::string(what) + ": Linear parameters are for " +
                                         std::to_string(*cfg.channels()) + " channels, input has " +
                                         std::to_string(s.C));
  }
  return s;
}

void check_vpack(const VPack& vp, const ActShape& s, const ActivationConfig& cfg) {
  require_shape(vp, {s.B, s.C, cfg.K()}, "vpack");
}

inline void apply_gate(const float* x, float* out, std::size_t NB, float gate) {
  for (std::size_t j = 0; j < NB; ++j) out[j] = x[j] * gate;
}

}  // namespace

ActivationTensor activation_reference(const ActivationTensor& x, const ActivationConfig& cfg) {
  const ActShape s = checked_shape(x, cfg, "activation_reference");
  const auto& idx = cfg.kernel_indices();
  const std::size_t K = idx.size();
  ActivationTensor out(x.shape());
  for (std::size_t b = 0; b < s.B; ++b) {
    for (std::size_t c = 0; c < s.C; ++c) {
      const float* xc = x.data() + (b * s.C + c) * s.NB;
      for (std::size_t j = 0; j < s.NB; ++j) {
        float acc = 0.0f;
        if (cfg.mode() == AggMode::Linear) {
          for (std::size_t k = 0; k < K; ++k) acc += xc[idx[k]] * cfg.weight()[c * K + k];
          acc += cfg.bias()[c];
        } else {
          for (std::size_t k = 0; k < K; ++k) acc += xc[idx[k]];
          if (cfg.mode() == AggMode::Mean) acc /= static_cast<float>(K);
        }
        out[(b * s.C + c) * s.NB + j] = xc[j] * sigmoid(acc);
      }
    }
  }
  return out;
}

std::vector<float> activation_gate_inputs(const ActivationTensor& x, const ActivationConfig& cfg) {
  const ActShape s = checked_shape(x, cfg, "activation_gate_inputs");
  const auto& idx = cfg.kernel_indices();
  const std::size_t K = idx.size();
  std::vector<float> gates(s.B * s.C);
  for (std::size_t bc = 0; bc < s.B * s.C; ++bc) {
    const std::size_t c = bc % s.C;
    const float* xc = x.data() + bc * s.NB;
    float acc = 0.0f;
    for (std::size_t k = 0; k < K; ++k) {
      acc += cfg.mode() == AggMode::Linear ? xc[idx[k]] * cfg.weight()[c * K + k] : xc[idx[k]];
    }
    if (cfg.mode() == AggMode::Linear) acc += cfg.bias()[c];
    if (cfg.mode() == AggMode::Mean) acc /= static_cast<float>(K);
    gates[bc] = acc;
  }
  return gates;
}

ActivationTensor activation_hoisted(const ActivationTensor& x, const ActivationConfig& cfg) {
  const ActShape s = checked_shape(x, cfg, "activation_hoisted");
  const auto& idx = cfg.kernel_indices();
  const std::size_t K = idx.size();
  const bool linear = cfg.mode() == AggMode::Linear;
  const float inv_k = 1.0f / static_cast<float>(K);
  ActivationTensor out(x.shape());
  for (std::size_t b = 0; b < s.B; ++b) {
    for (std::size_t c = 0; c < s.C; ++c) {
      const float* xc = x.data() + (b * s.C + c) * s.NB;
      const float* wc = linear ? cfg.weight().data() + c * K : nullptr;
      float acc0 = 0.0f, acc1 = 0.0f;
      std::size_t k = 0;
      if (linear) {
        for (; k + 2 <= K; k += 2) {
          acc0 += xc[idx[k]] * wc[k];
          acc1 += xc[idx[k + 1]] * wc[k + 1];
        }
        if (k < K) acc0 += xc[idx[k]] * wc[k];
      } else {
        for (; k + 2 <= K; k += 2) {
          acc0 += xc[idx[k]];
          acc1 += xc[idx[k + 1]];
        }
        if (k < K) acc0 += xc[idx[k]];
      }
      float agg = acc0 + acc1;
      if (linear) agg += cfg.bias()[c];
      if (cfg.mode() == AggMode::Mean) agg *= inv_k;
      apply_gate(xc, out.data() + (b * s.C + c) * s.NB, s.NB, sigmoid(agg));
    }
  }
  return out;
}

VPack gather_vpack(const ActivationTensor& x, const ActivationConfig& cfg) {
  const ActShape s = checked_shape(x, cfg, "gather_vpack");
  const auto& idx = cfg.kernel_indices();
  const std::size_t K = idx.size();
  for (std::size_t i : idx) {
    if (i >= s.NB) throw Error(Errc::IndexOutOfRange, "kernel index outside input blades");
  }
  VPack vp({s.B, s.C, K});
  for (std::size_t bc = 0; bc < s.B * s.C; ++bc) {
    const float* xc = x.data() + bc * s.NB;
    float* dst = vp.data() + bc * K;
    for (std::size_t k = 0; k < K; ++k) dst[k] = xc[idx[k]];
  }
  return vp;
}

ActivationTensor activation_gathered(const ActivationTensor& x, const VPack& vpack, const ActivationConfig& cfg) {
  const ActShape s = checked_shape(x, cfg, "activation_gathered");
  check_vpack(vpack, s, cfg);
  const std::size_t K = cfg.K();
  const float inv_k = 1.0f / static_cast<float>(K);
  ActivationTensor out(x.shape());
  for (std::size_t b = 0; b < s.B; ++b) {
    for (std::size_t c = 0; c < s.C; ++c) {
      const std::size_t bc = b * s.C + c;
      const float* v = vpack.data() + bc * K;
      float agg = 0.0f;
      if (cfg.mode() == AggMode::Linear) {
        const float* w = cfg.weight().data() + c * K;
        for (std::size_t k = 0; k < K; ++k) agg += v[k] * w[k];
        agg += cfg.bias()[c];
      } else {
        for (std::size_t k = 0; k < K; ++k) agg += v[k];
        if (cfg.mode() == AggMode::Mean) agg *= inv_k;
      }
      apply_gate(x.data() + bc * s.NB, out.data() + bc * s.NB, s.NB, sigmoid(agg));
    }
  }
  return out;
}

ActivationTensor activation_packed(const ActivationTensor& x, const VPack& vpack, const ActivationConfig& cfg) {
  const ActShape s = checked_shape(x, cfg, "activation_packed");
  check_vpack(vpack, s, cfg);
  const std::size_t K = cfg.K();
  const bool linear = cfg.mode() == AggMode::Linear;
  const float inv_k = 1.0f / static_cast<float>(K);
  ActivationTensor out(x.shape());
  for (std::size_t b = 0; b < s.B; ++b) {
    std::size_t c = 0;
#if CLIFFKERN_HAVE_AVX2
    // Lane i of every gather reads channel c + i: stride K floats.
    const __m256i lane_offsets = _mm256_mullo_epi32(_mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7),
                                                    _mm256_set1_epi32(static_cast<int>(K)));
    alignas(32) float gates[8];
    for (; c + 8 <= s.C; c += 8) {
      const float* v = vpack.data() + (b * s.C + c) * K;
      __m256 acc0 = _mm256_setzero_ps(), acc1 = _mm256_setzero_ps();
      std::size_t k = 0;
      if (linear) {
        const float* w = cfg.weight().data() + c * K;
        for (; k + 2 <= K; k += 2) {
          acc0 = _mm256_fmadd_ps(_mm256_i32gather_ps(v + k, lane_offsets, 4),
                                 _mm256_i32gather_ps(w + k, lane_offsets, 4), acc0);
          acc1 = _mm256_fmadd_ps(_mm256_i32gather_ps(v + k + 1, lane_offsets, 4),
                                 _mm256_i32gather_ps(w + k + 1, lane_offsets, 4), acc1);
        }
        if (k < K) {
          acc0 = _mm256_fmadd_ps(_mm256_i32gather_ps(v + k, lane_offsets, 4),
                                 _mm256_i32gather_ps(w + k, lane_offsets, 4), acc0);
        }
      } else {
        for (; k + 2 <= K; k += 2) {
          acc0 = _mm256_add_ps(acc0, _mm256_i32gather_ps(v + k, lane_offsets, 4));
          acc1 = _mm256_add_ps(acc1, _mm256_i32gather_ps(v + k + 1, lane_offsets, 4));
        }
        if (k < K) acc0 = _mm256_add_ps(acc0, _mm256_i32gather_ps(v + k, lane_offsets, 4));
      }
      __m256 agg = _mm256_add_ps(acc0, acc1);
      if (linear) agg = _mm256_add_ps(agg, _mm256_loadu_ps(cfg.bias().data() + c));
      if (cfg.mode() == AggMode::Mean) agg = _mm256_mul_ps(agg, _mm256_set1_ps(inv_k));
      _mm256_store_ps(gates, simd::sigmoid256_ps(agg));
      for (std::size_t i = 0; i < 8; ++i) {
        const std::size_t bc = b * s.C + c + i;
        apply_gate(x.data() + bc * s.NB, out.data() + bc * s.NB, s.NB, gates[i]);
      }
    }
#endif
    // Tail channels (and the whole row without AVX2).
    for (; c < s.C; ++c) {
      const std::size_t bc = b * s.C + c;
      const float* v = vpack.data() + bc * K;
      float agg = 0.0f;
      if (linear) {
        const float* w = cfg.weight().data() + c * K;
        for (std::size_t k = 0; k < K; ++k) agg += v[k] * w[k];
        agg += cfg.bias()[c];
      } else {
        for (std::size_t k = 0; k < K; ++k) agg += v[k];
        if (cfg.mode() == AggMode::Mean) agg *= inv_k;
      }
      apply_gate(x.data() + bc * s.NB, out.data() + bc * s.NB, s.NB, sigmoid(agg));
    }
  }
  return out;
}

bool specialization_applies(std::size_t C, const ActivationConfig& cfg) noexcept {
  const std::size_t NB = cfg.n_blades();
  if (cfg.K() != NB || (NB != 4 && NB != 8) || C % 8 != 0) return false;
  if (cfg.mode() == AggMode::Linear) {
    for (std::size_t k = 0; k < NB; ++k)
      if (cfg.kernel_indices()[k] != k) return false;
  }
  return true;
}

namespace {

void require_specialization(const ActShape& s, const ActivationConfig& cfg) {
  if (!specialization_applies(s.C, cfg)) {
    throw Error(Errc::SpecializationPreconditionViolated,
                "specialized activation needs K == N_B in {4, 8}, C % 8 == 0 and, in Linear mode, "
                "kernel indices in blade order (K=" +
                    std::to_string(cfg.K()) + ", N_B=" + std::to_string(cfg.n_blades()) +
                    ", C=" + std::to_string(s.C) + ")");
  }
}

#if CLIFFKERN_HAVE_AVX2

// Sum of each of eight vectors, lane i = horizontal sum of v_i.
inline __m256 transpose_sum8(__m256 v0, __m256 v1, __m256 v2, __m256 v3, __m256 v4, __m256 v5, __m256 v6,
                             __m256 v7) {
  const __m256 h01 = _mm256_hadd_ps(v0, v1);
  const __m256 h23 = _mm256_hadd_ps(v2, v3);
  const __m256 h45 = _mm256_hadd_ps(v4, v5);
  const __m256 h67 = _mm256_hadd_ps(v6, v7);
  const __m256 a = _mm256_hadd_ps(h01, h23);
  const __m256 z = _mm256_hadd_ps(h45, h67);
  return _mm256_add_ps(_mm256_permute2f128_ps(a, z, 0x20), _mm256_permute2f128_ps(a, z, 0x31));
}

// Four vectors of two 4-blade channels each; lane i = sum of channel i.
inline __m256 transpose_sum4x2(__m256 u0, __m256 u1, __m256 u2, __m256 u3) {
  const __m256 h = _mm256_hadd_ps(_mm256_hadd_ps(u0, u1), _mm256_hadd_ps(u2, u3));
  return _mm256_permutevar8x32_ps(h, _mm256_setr_epi32(0, 4, 1, 5, 2, 6, 3, 7));
}

template <AggMode M>
inline __m256 finish_gate(__m256 agg, const float* bias, float inv_k) {
  if constexpr (M == AggMode::Linear) agg = _mm256_add_ps(agg, _mm256_loadu_ps(bias));
  if constexpr (M == AggMode::Mean) agg = _mm256_mul_ps(agg, _mm256_set1_ps(inv_k));
  return simd::sigmoid256_ps(agg);
}

inline __m256 lane(__m256 g, int i) { return _mm256_permutevar8x32_ps(g, _mm256_set1_epi32(i)); }
inline __m256 lane_pair(__m256 g, int i) {
  return _mm256_permutevar8x32_ps(g, _mm256_setr_epi32(i, i, i, i, i + 1, i + 1, i + 1, i + 1));
}

// Fused single pass, SSA style: every value of the 8-channel block is a
// named temporary, no loops inside the block.
template <AggMode M>
void fused_block8(const float* x, float* out, const float* w, const float* bias) {
  const __m256 x0 = _mm256_loadu_ps(x + 0), x1 = _mm256_loadu_ps(x + 8);
  const __m256 x2 = _mm256_loadu_ps(x + 16), x3 = _mm256_loadu_ps(x + 24);
  const __m256 x4 = _mm256_loadu_ps(x + 32), x5 = _mm256_loadu_ps(x + 40);
  const __m256 x6 = _mm256_loadu_ps(x + 48), x7 = _mm256_loadu_ps(x + 56);
  __m256 s;
  if constexpr (M == AggMode::Linear) {
    const __m256 p0 = _mm256_mul_ps(x0, _mm256_loadu_ps(w + 0)), p1 = _mm256_mul_ps(x1, _mm256_loadu_ps(w + 8));
    const __m256 p2 = _mm256_mul_ps(x2, _mm256_loadu_ps(w + 16)), p3 = _mm256_mul_ps(x3, _mm256_loadu_ps(w + 24));
    const __m256 p4 = _mm256_mul_ps(x4, _mm256_loadu_ps(w + 32)), p5 = _mm256_mul_ps(x5, _mm256_loadu_ps(w + 40));
    const __m256 p6 = _mm256_mul_ps(x6, _mm256_loadu_ps(w + 48)), p7 = _mm256_mul_ps(x7, _mm256_loadu_ps(w + 56));
    s = transpose_sum8(p0, p1, p2, p3, p4, p5, p6, p7);
  } else {
    s = transpose_sum8(x0, x1, x2, x3, x4, x5, x6, x7);
  }
  const __m256 g = finish_gate<M>(s, bias, 0.125f);
  _mm256_storeu_ps(out + 0, _mm256_mul_ps(x0, lane(g, 0)));
  _mm256_storeu_ps(out + 8, _mm256_mul_ps(x1, lane(g, 1)));
  _mm256_storeu_ps(out + 16, _mm256_mul_ps(x2, lane(g, 2)));
  _mm256_storeu_ps(out + 24, _mm256_mul_ps(x3, lane(g, 3)));
  _mm256_storeu_ps(out + 32, _mm256_mul_ps(x4, lane(g, 4)));
  _mm256_storeu_ps(out + 40, _mm256_mul_ps(x5, lane(g, 5)));
  _mm256_storeu_ps(out + 48, _mm256_mul_ps(x6, lane(g, 6)));
  _mm256_storeu_ps(out + 56, _mm256_mul_ps(x7, lane(g, 7)));
}

template <AggMode M>
void fused_block4(const float* x, float* out, const float* w, const float* bias) {
  const __m256 u0 = _mm256_loadu_ps(x + 0), u1 = _mm256_loadu_ps(x + 8);
  const __m256 u2 = _mm256_loadu_ps(x + 16), u3 = _mm256_loadu_ps(x + 24);
  __m256 s;
  if constexpr (M == AggMode::Linear) {
    const __m256 p0 = _mm256_mul_ps(u0, _mm256_loadu_ps(w + 0)), p1 = _mm256_mul_ps(u1, _mm256_loadu_ps(w + 8));
    const __m256 p2 = _mm256_mul_ps(u2, _mm256_loadu_ps(w + 16)), p3 = _mm256_mul_ps(u3, _mm256_loadu_ps(w + 24));
    s = transpose_sum4x2(p0, p1, p2, p3);
  } else {
    s = transpose_sum4x2(u0, u1, u2, u3);
  }
  const __m256 g = finish_gate<M>(s, bias, 0.25f);
  _mm256_storeu_ps(out + 0, _mm256_mul_ps(u0, lane_pair(g, 0)));
  _mm256_storeu_ps(out + 8, _mm256_mul_ps(u1, lane_pair(g, 2)));
  _mm256_storeu_ps(out + 16, _mm256_mul_ps(u2, lane_pair(g, 4)));
  _mm256_storeu_ps(out + 24, _mm256_mul_ps(u3, lane_pair(g, 6)));
}

// Two-phase form: gates for a whole batch row first, then the scaling pass.
template <AggMode M, int NB>
void two_phase_row(const float* x, float* out, std::size_t C, const float* w, const float* bias, float* gates) {
  constexpr int kVecs = NB;  // 8 channels * NB blades / 8 lanes
  for (std::size_t c = 0; c < C; c += 8) {
    const float* xc = x + c * NB;
    __m256 v[kVecs];
    for (int i = 0; i < kVecs; ++i) {
      v[i] = _mm256_loadu_ps(xc + 8 * i);
      if constexpr (M == AggMode::Linear) v[i] = _mm256_mul_ps(v[i], _mm256_loadu_ps(w + c * NB + 8 * i));
    }
    __m256 s;
    if constexpr (NB == 8) {
      s = transpose_sum8(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]);
    } else {
      s = transpose_sum4x2(v[0], v[1], v[2], v[3]);
    }
    _mm256_storeu_ps(gates + c, finish_gate<M>(s, bias + c, 1.0f / NB));
  }
  for (std::size_t c = 0; c < C; ++c) {
    const __m256 g = _mm256_set1_ps(gates[c]);
    if constexpr (NB == 8) {
      _mm256_storeu_ps(out + c * 8, _mm256_mul_ps(_mm256_loadu_ps(x + c * 8), g));
    } else {
      _mm_storeu_ps(out + c * 4, _mm_mul_ps(_mm_loadu_ps(x + c * 4), _mm256_castps256_ps128(g)));
    }
  }
}

#endif

// Portable branch-free path for builds without AVX2.
template <AggMode M, int NB>
void scalar_row(const float* x, float* out, std::size_t C, const float* w, const float* bias) {
  for (std::size_t c = 0; c < C; ++c) {
    const float* xc = x + c * NB;
    float agg = 0.0f;
    for (int j = 0; j < NB; ++j) agg += (M == AggMode::Linear) ? xc[j] * w[c * NB + j] : xc[j];
    if constexpr (M == AggMode::Linear) agg += bias[c];
    if constexpr (M == AggMode::Mean) agg *= 1.0f / NB;
    apply_gate(xc, out + c * NB, NB, sigmoid(agg));
  }
}

template <AggMode M, int NB, bool Fused>
void specialized_impl(const ActivationTensor& x, ActivationTensor& out, const ActShape& s,
                      const ActivationConfig& cfg) {
  const float* w = cfg.weight().data();
  const float* bias = cfg.bias().data();
#if CLIFFKERN_HAVE_AVX2
  FloatBuffer gates(Fused ? 0 : s.C);
  for (std::size_t b = 0; b < s.B; ++b) {
    const float* xb = x.data() + b * s.C * NB;
    float* ob = out.data() + b * s.C * NB;
    if constexpr (Fused) {
      for (std::size_t c = 0; c < s.C; c += 8) {
        if constexpr (NB == 8) {
          fused_block8<M>(xb + c * NB, ob + c * NB, w + c * NB, bias + c);
        } else {
          fused_block4<M>(xb + c * NB, ob + c * NB, w + c * NB, bias + c);
        }
      }
    } else {
      two_phase_row<M, NB>(xb, ob, s.C, w, bias, gates.data());
    }
  }
#else
  for (std::size_t b = 0; b < s.B; ++b) {
    scalar_row<M, NB>(x.data() + b * s.C * NB, out.data() + b * s.C * NB, s.C, w, bias);
  }
#endif
}

template <bool Fused>
ActivationTensor specialized_dispatch(const ActivationTensor& x, const ActivationConfig& cfg, const char* what) {
  const ActShape s = checked_shape(x, cfg, what);
  require_specialization(s, cfg);
  ActivationTensor out(x.shape());
  using Fn = void (*)(const ActivationTensor&, ActivationTensor&, const ActShape&, const ActivationConfig&);
  static constexpr Fn table[3][2] = {
      {&specialized_impl<AggMode::Linear, 4, Fused>, &specialized_impl<AggMode::Linear, 8, Fused>},
      {&specialized_impl<AggMode::Sum, 4, Fused>, &specialized_impl<AggMode::Sum, 8, Fused>},
      {&specialized_impl<AggMode::Mean, 4, Fused>, &specialized_impl<AggMode::Mean, 8, Fused>},
  };
  table[static_cast<int>(cfg.mode())][s.NB == 8 ? 1 : 0](x, out, s, cfg);
  return out;
}

}  // namespace

ActivationTensor activation_specialized(const ActivationTensor& x, const ActivationConfig& cfg) {
  return specialized_dispatch<true>(x, cfg, "activation_specialized");
}

ActivationTensor activation_specialized_looped(const ActivationTensor& x, const ActivationConfig& cfg) {
  return specialized_dispatch<false>(x, cfg, "activation_specialized_looped");
}

std::int64_t activation_flops(std::size_t B, std::size_t C, std::size_t n_blades, std::size_t K, AggMode mode,
                              std::int64_t sigmoid_flops) {
  const auto k = static_cast<std::int64_t>(K);
  const auto nb = static_cast<std::int64_t>(n_blades);
  std::int64_t per = 0;
  switch (mode) {
    case AggMode::Linear: per = 2 * k + 1 + sigmoid_flops + nb; break;
    case AggMode::Sum: per = k - 1 + sigmoid_flops + nb; break;
    case AggMode::Mean: per = k - 1 + 1 + sigmoid_flops + nb; break;
  }
  return static_cast<std::int64_t>(B * C) * per;
}

}  // namespace cliffkern
