#pragma once

#include <cfloat>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>

// Hot loops are written once over GCC/Clang vector-extension types and
// compiled twice on x86-64: 4-lane (baseline) and 8-lane (AVX2, picked at run
// time). FMA stays off so both paths round identically.
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#define VISIM_AVX2_DISPATCH 1
#define VISIM_TARGET_AVX2 __attribute__((target("avx2")))
#else
#define VISIM_AVX2_DISPATCH 0
#define VISIM_TARGET_AVX2
#endif

namespace visim::simd {

typedef float f4 __attribute__((vector_size(16)));
typedef std::int32_t i4 __attribute__((vector_size(16)));
typedef float f8 __attribute__((vector_size(32)));
typedef std::int32_t i8 __attribute__((vector_size(32)));

template <class V>
struct Traits;
template <>
struct Traits<f4> {
    using Int = i4;
    static constexpr std::size_t lanes = 4;
};
template <>
struct Traits<f8> {
    using Int = i8;
    static constexpr std::size_t lanes = 8;
};

// Vector helpers take references: passing 32-byte vectors by value from code
// built without AVX would change the calling convention.
template <class V>
[[gnu::always_inline]] inline void load(V& v, const float* p) {
    std::memcpy(&v, p, sizeof v);
}

template <class V>
[[gnu::always_inline]] inline void store(float* p, const V& v) {
    std::memcpy(p, &v, sizeof v);
}

template <class V>
[[gnu::always_inline]] inline void clamp01(V& v) {
    v = v < 0.0f ? V{} : v;
    v = v > 1.0f ? V{} + 1.0f : v;
}

inline float clamp01(float a) { return a < 0.0f ? 0.0f : (a > 1.0f ? 1.0f : a); }

inline bool has_avx2() {
#if VISIM_AVX2_DISPATCH
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok;
#else
    return false;
#endif
}

namespace detail {

template <class V>
[[gnu::always_inline]] inline void symmetric_filter(float* out, const float* c, const float* const* lo,
                                                    const float* const* hi, const float* w, int r, std::size_t n,
                                                    bool clamp) {
    constexpr std::size_t L = Traits<V>::lanes;
    std::size_t i = 0;
    for (; i + 4 * L <= n; i += 4 * L) {
        V a0, a1, a2, a3, p0, p1, p2, p3, q0, q1, q2, q3;
        load(a0, c + i);
        load(a1, c + i + L);
        load(a2, c + i + 2 * L);
        load(a3, c + i + 3 * L);
        a0 *= w[0];
        a1 *= w[0];
        a2 *= w[0];
        a3 *= w[0];
        for (int k = 1; k <= r; ++k) {
            const float* p = lo[k - 1] + i;
            const float* q = hi[k - 1] + i;
            const float wk = w[k];
            load(p0, p);
            load(q0, q);
            load(p1, p + L);
            load(q1, q + L);
            load(p2, p + 2 * L);
            load(q2, q + 2 * L);
            load(p3, p + 3 * L);
            load(q3, q + 3 * L);
            a0 += wk * (p0 + q0);
            a1 += wk * (p1 + q1);
            a2 += wk * (p2 + q2);
            a3 += wk * (p3 + q3);
        }
        if (clamp) {
            clamp01(a0);
            clamp01(a1);
            clamp01(a2);
            clamp01(a3);
        }
        store(out + i, a0);
        store(out + i + L, a1);
        store(out + i + 2 * L, a2);
        store(out + i + 3 * L, a3);
    }
    for (; i < n; ++i) {
        float a = w[0] * c[i];
        for (int k = 1; k <= r; ++k) a += w[k] * (lo[k - 1][i] + hi[k - 1][i]);
        out[i] = clamp ? clamp01(a) : a;
    }
}

/// x^g for x in [0,1] and g in (0,1]. Logarithm from an odd series in
/// (m-1)/(m+1) on [sqrt(1/2), sqrt(2)), exponential from a degree-7 Taylor
/// polynomial on [-1/2, 1/2]; relative error below 1e-6.
template <class V>
[[gnu::always_inline]] inline void pow_unit(V& x, float g) {
    using I = typename Traits<V>::Int;
    // subnormals are scaled into the normal range first
    const I sub = x < FLT_MIN;
    const V xn = sub ? x * 16777216.0f : x;
    const I bits = reinterpret_cast<I>(xn);
    I e = ((bits >> 23) & 0xff) - 127 + (sub & -24);
    V m = reinterpret_cast<V>((bits & 0x7fffff) | 0x3f800000);
    const I big = m > 1.41421356f;
    m = big ? 0.5f * m : m;
    e -= big;  // true lanes are -1
    const V s = (m - 1.0f) / (m + 1.0f);
    const V s2 = s * s;
    const V log2m =
        s * (2.88539008f + s2 * (0.961796694f + s2 * (0.577078016f + s2 * (0.412198583f + s2 * 0.320598892f))));
    const V y = g * (__builtin_convertvector(e, V) + log2m);
    I k = __builtin_convertvector(y - 0.5f, I);
    k = k < -126 ? I{} - 126 : k;
    const V t = (y - __builtin_convertvector(k, V)) * 0.693147181f;
    const V p =
        1.0f + t * (1.0f + t * (0.5f + t * (1.0f / 6 + t * (1.0f / 24 + t * (1.0f / 120 + t * (1.0f / 720 + t * (1.0f / 5040)))))));
    const V scale = reinterpret_cast<V>((k + 127) << 23);
    const V r = p * scale;
    x = x > 0.0f ? r : V{};
}

/// Scalar x^g with the same arithmetic as the vector paths.
inline float pow_unit(float x, float g) {
    f4 v = f4{} + x;
    pow_unit(v, g);
    return v[0];
}

template <class V>
[[gnu::always_inline]] inline void affine_pow(float* v, std::size_t n, float slope, float offset, bool curve,
                                              float g) {
    constexpr std::size_t L = Traits<V>::lanes;
    std::size_t i = 0;
    for (; i + L <= n; i += L) {
        V x;
        load(x, v + i);
        x = x * slope + offset;
        clamp01(x);
        if (curve) pow_unit(x, g);
        store(v + i, x);
    }
    for (; i < n; ++i) {
        const float x = clamp01(v[i] * slope + offset);
        v[i] = curve ? pow_unit(x, g) : x;
    }
}

inline void symmetric_filter_base(float* out, const float* c, const float* const* lo, const float* const* hi,
                                  const float* w, int r, std::size_t n, bool clamp) {
    symmetric_filter<f4>(out, c, lo, hi, w, r, n, clamp);
}

inline void affine_pow_base(float* v, std::size_t n, float slope, float offset, bool curve, float g) {
    affine_pow<f4>(v, n, slope, offset, curve, g);
}

#if VISIM_AVX2_DISPATCH
VISIM_TARGET_AVX2 inline void symmetric_filter_avx2(float* out, const float* c, const float* const* lo,
                                                    const float* const* hi, const float* w, int r, std::size_t n,
                                                    bool clamp) {
    symmetric_filter<f8>(out, c, lo, hi, w, r, n, clamp);
}

VISIM_TARGET_AVX2 inline void affine_pow_avx2(float* v, std::size_t n, float slope, float offset, bool curve,
                                              float g) {
    affine_pow<f8>(v, n, slope, offset, curve, g);
}
#endif

}  // namespace detail

using detail::pow_unit;

/// out[i] = w[0]*c[i] + sum_k w[k]*(lo[k-1][i] + hi[k-1][i]) for k = 1..r,
/// optionally clamped to [0,1].
inline void symmetric_filter(float* out, const float* c, const float* const* lo, const float* const* hi,
                             const float* w, int r, std::size_t n, bool clamp) {
#if VISIM_AVX2_DISPATCH
    if (has_avx2()) return detail::symmetric_filter_avx2(out, c, lo, hi, w, r, n, clamp);
#endif
    detail::symmetric_filter_base(out, c, lo, hi, w, r, n, clamp);
}

/// In place: v = clamp01(v * slope + offset), then raised to g when `curve`.
inline void affine_pow(float* v, std::size_t n, float slope, float offset, bool curve, float g) {
#if VISIM_AVX2_DISPATCH
    if (has_avx2()) return detail::affine_pow_avx2(v, n, slope, offset, curve, g);
#endif
    detail::affine_pow_base(v, n, slope, offset, curve, g);
}


}  // namespace visim::simd
