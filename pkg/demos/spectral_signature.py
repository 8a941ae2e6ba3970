"""Count adjacency eigenvalues above the sqrt(n) bulk.

A beta graph has a single large eigenvalue; a planted k-color graph has
2k - 1 of them.
"""
import numpy as np

from rgraph import BetaParams, KBetaParams, Labeling, sample_graph, spectrum


def planted(n, k, a, seed):
    rng = np.random.default_rng(seed)
    lab = rng.permutation(np.arange(n) % k)
    z = rng.uniform(-a, a, n)
    b = np.exp(-z / (k - 1))[:, None] * np.ones((n, k))
    b[np.arange(n), lab] = np.exp(z)
    return KBetaParams(b, Labeling.from_index(lab, k))


def show(label, rep):
    top = ", ".join(f"{x:.1f}" for x in rep.eigenvalues[:6])
    print(f"{label:>12}: count={rep.nontrivial_count}  |l2|/l1={rep.ratio:.3f}  "
          f"cutoff={rep.threshold * np.sqrt(rep.n):.1f}  top: {top}")


def main():
    n = 400
    beta = np.random.default_rng(0).uniform(0.5, 2.0, n)
    show("beta", spectrum(sample_graph(BetaParams(beta), seed=1)))
    show("k-beta k=2", spectrum(sample_graph(planted(n, 2, 2.0, 2), seed=3)))
    show("k-beta k=3", spectrum(sample_graph(planted(n, 3, 8.0, 4), seed=5)))


if __name__ == "__main__":
    main()
