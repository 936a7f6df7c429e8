#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "xplore/graph.hpp"

namespace xplore {

// --- symmetric eigensolver ---------------------------------------------------

// Cyclic Jacobi rotations; ample for the <=100-node graphs this project
// handles. Returns eigenvalues sorted ascending.
inline std::vector<double> symmetric_eigenvalues(Matrix a, std::size_t max_sweeps = 64) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw ContractError("symmetric_eigenvalues: matrix not square");
  if (n == 0) return {};
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-24 * static_cast<double>(n * n)) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

// --- graph embedders ---------------------------------------------------------

enum class Embedder { degree_hist, ldp, spectral };

inline std::string to_string(Embedder e) {
  switch (e) {
    case Embedder::degree_hist: return "degree_hist";
    case Embedder::ldp: return "ldp";
    default: return "spectral";
  }
}

struct EmbedderConfig {
  std::size_t bins = 32;
  // Degree histogram range; 0 means "this graph's own max degree". A fixed
  // value must be used across an evaluation run so embeddings are comparable.
  std::size_t max_degree = 0;
  std::size_t spectral_k = 16;
};

namespace detail {

inline void hist_insert(std::vector<double>& hist, std::size_t offset, std::size_t bins,
                        double value, double range) {
  auto bin = static_cast<std::size_t>(value * static_cast<double>(bins) / range);
  if (bin >= bins) bin = bins - 1;
  hist[offset + bin] += 1.0;
}

}  // namespace detail

inline std::vector<double> embed(const Graph& g, Embedder kind, const EmbedderConfig& cfg) {
  if (g.n == 0) throw ContractError("embed: empty graph");
  std::vector<std::size_t> deg(g.n);
  std::size_t max_deg = 0;
  for (std::size_t v = 0; v < g.n; ++v) {
    deg[v] = g.degree(v);
    max_deg = std::max(max_deg, deg[v]);
  }
  const double range = static_cast<double>((cfg.max_degree > 0 ? cfg.max_degree : max_deg) + 1);

  if (kind == Embedder::degree_hist) {
    std::vector<double> hist(cfg.bins, 0.0);
    for (std::size_t v = 0; v < g.n; ++v)
      detail::hist_insert(hist, 0, cfg.bins, static_cast<double>(deg[v]), range);
    return hist;
  }

  if (kind == Embedder::ldp) {
    // Local degree profile: per node, own degree plus min/max/mean/std of
    // neighbour degrees; each of the five channels histogrammed.
    std::vector<double> hist(5 * cfg.bins, 0.0);
    for (std::size_t v = 0; v < g.n; ++v) {
      double mn = 0.0, mx = 0.0, mean = 0.0, sd = 0.0;
      if (deg[v] > 0) {
        mn = std::numeric_limits<double>::infinity();
        double sum = 0.0, sumsq = 0.0;
        for (std::size_t w = 0; w < g.n; ++w) {
          if (!g.adj(v, w)) continue;
          const auto dw = static_cast<double>(deg[w]);
          mn = std::min(mn, dw);
          mx = std::max(mx, dw);
          sum += dw;
          sumsq += dw * dw;
        }
        mean = sum / static_cast<double>(deg[v]);
        sd = std::sqrt(std::max(0.0, sumsq / static_cast<double>(deg[v]) - mean * mean));
      }
      const double channels[5] = {static_cast<double>(deg[v]), mn, mx, mean, sd};
      for (std::size_t c = 0; c < 5; ++c)
        detail::hist_insert(hist, c * cfg.bins, cfg.bins, channels[c], range);
    }
    return hist;
  }

  // Spectral: k smallest eigenvalues of the combinatorial Laplacian D - A,
  // zero-padded / truncated to k.
  Matrix lap(g.n, g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    lap(i, i) = static_cast<double>(deg[i]);
    for (std::size_t j = 0; j < g.n; ++j)
      if (i != j && g.adj(i, j)) lap(i, j) = -1.0;
  }
  std::vector<double> eig = symmetric_eigenvalues(std::move(lap));
  eig.resize(cfg.spectral_k, 0.0);
  return eig;
}

// Zero vectors contribute similarity 0 by convention.
inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ContractError("cosine_similarity: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// (1/MN) sum over embedders and pairs of cos(E_j(G_i), E_j(G'_i)).
inline double cosine_similarity_metric(
    const std::vector<std::pair<const Graph*, const Graph*>>& pairs,
    const std::vector<Embedder>& embedders, const EmbedderConfig& cfg) {
  if (pairs.empty()) throw ContractError("cosine_similarity_metric: empty pair set");
  if (embedders.empty()) throw ContractError("cosine_similarity_metric: no embedders");
  double acc = 0.0;
  for (Embedder e : embedders)
    for (const auto& [g, cf] : pairs)
      acc += cosine_similarity(embed(*g, e, cfg), embed(*cf, e, cfg));
  return acc / (static_cast<double>(embedders.size()) * static_cast<double>(pairs.size()));
}

inline const std::vector<Embedder>& default_embedders() {
  static const std::vector<Embedder> set = {Embedder::degree_hist, Embedder::ldp,
                                            Embedder::spectral};
  return set;
}

}  // namespace xplore
