"""A short tour of graph weights.

Prints a few graphs, their operators on sample inputs, and their weights in
both charts.  Uses 2^16 samples so it finishes in seconds.

    python demos/weights_tour.py
"""

from cycformality.algebra import parse_polynomial
from cycformality.graphs import evaluate, parse_graph
from cycformality.tpoly import parse_polyvector
from cycformality.weights import integrate

SAMPLES = 1 << 16

GRAPHS = [
    ("1 1 | b1", [0], "single edge"),
    ("1 2 | b1 b2", [0], "wedge"),
    ("1 1 | i1", [0], "tadpole"),
    ("1 2 | -", [1], "one varpi, no edges"),
    ("2 2 | b1 b2 | b1 b2", [0, 0], "second Moyal graph"),
    ("1 1 | b0", [0], "edge to b0"),
]


def main():
    print(f"{'graph':<24} {'u':<8} {'chart z1=0':>22} {'chart z1=i/2':>22}  note")
    for text, u, note in GRAPHS:
        g = parse_graph(text)
        a = integrate(g, u, SAMPLES)
        b = integrate(g, u, SAMPLES, anchor=0.5j)
        print(f"{text:<24} {str(u):<8} {a.value:>11.5f} +- {a.stderr:<7.1g} {b.value:>11.5f} +- {b.stderr:<7.1g}  {note}")

    # the wedge graph applies a bivector to two boundary functions
    g = parse_graph("1 2 | b1 b2")
    pi = parse_polyvector("d1^d2", 2)
    fs = [parse_polynomial(t, 2) for t in ("1", "x1^2", "x2")]
    print("\nwedge graph on d1^d2 with (1, x1^2, x2):", evaluate(g, [pi], fs))


if __name__ == "__main__":
    main()
