"""Regenerate the bundled golden files; expected values come from closed forms or plain loops."""
import itertools
import json
import math
import cmath
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "spinq" / "data" / "golden"


def c(z):
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def write(name, doc):
    (OUT / name).write_text(json.dumps(doc, indent=1) + "\n")


def sigma(s):
    return 1 - 2 * s


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    checks = []

    write("ising-edge.model.json", {
        "variables": {"count": 2, "levels": 2},
        "beta": c(1.0),
        "interactions": [{"vars": [0, 1], "type": "ising", "J": 1.0}],
    })
    z = 2 * math.e + 2 / math.e
    for method in ("exact", "overlap"):
        checks.append({"name": f"ising-edge {method}", "argv": ["z", method, "ising-edge.model.json"],
                       "expect": c(z)})

    beta = 0.5
    write("potts-triangle.model.json", {
        "variables": {"count": 3, "levels": 3},
        "beta": c(beta),
        "interactions": [{"vars": list(e), "type": "potts", "J": 1.0} for e in ((0, 1), (1, 2), (0, 2))],
    })
    # all equal: 3 configurations; exactly one equal pair: 18; all distinct: 6
    z = 3 * math.exp(3 * beta) + 18 * math.exp(beta) + 6
    for method in ("exact", "overlap"):
        checks.append({"name": f"potts-triangle {method}", "argv": ["z", method, "potts-triangle.model.json"],
                       "expect": c(z)})

    beta = complex(0.7, 0.3)
    table = [complex(0.2, -0.1), complex(-0.5, 0.0), complex(0.0, 0.4), complex(1.0, 0.25)]
    write("mixed-complex.model.json", {
        "variables": {"count": 3, "levels": 2},
        "beta": c(beta),
        "interactions": [
            {"vars": [0, 2], "type": "table", "energies": [c(x) for x in table]},
            {"vars": [1, 2], "type": "constraint-equal"},
            {"vars": [0], "type": "field", "h": c(complex(0.3, -0.2))},
            {"vars": [0, 1], "type": "ising", "J": c(-0.8)},
        ],
    })
    z = 0
    for s0, s1, s2 in itertools.product((0, 1), repeat=3):
        if s1 != s2:
            continue
        e = table[2 * s0 + s2] - complex(0.3, -0.2) * sigma(s0) + 0.8 * sigma(s0) * sigma(s1)
        z += cmath.exp(-beta * e)
    for method in ("exact", "overlap"):
        checks.append({"name": f"mixed-complex {method}", "argv": ["z", method, "mixed-complex.model.json"],
                       "expect": c(z)})

    n, T = 3, 4
    beta = complex(0.6, 0.4)
    jh = [[0.3, -0.5, 0.8], [0.1, 0.4, -0.2], [-0.7, 0.6, 0.25]]
    jv = [[0.5, -0.3], [0.2, 0.9], [-0.4, 0.1], [0.35, -0.6]]
    h = [[0.1, -0.2, 0.3], [0.0, 0.15, -0.1], [0.2, 0.05, -0.3], [-0.25, 0.1, 0.4]]
    left, right = [1, 0, 1], [0, 0, 1]
    write("edge-3x4.lattice.json", {
        "family": "edge-2d",
        "dims": {"sites": n, "columns": T},
        "beta": c(beta),
        "boundary": {"kind": "fixed", "left": left, "right": right},
        "couplings": {"J_h": jh, "J_v": jv, "h": h},
    })
    z = 0
    for mid in itertools.product((0, 1), repeat=n * (T - 2)):
        s = [right] + [list(mid[k * n:(k + 1) * n]) for k in range(T - 2)] + [left]
        e = 0.0
        for t in range(T):
            for i in range(n):
                e -= h[t][i] * sigma(s[t][i])
                if i + 1 < n:
                    e -= jv[t][i] * sigma(s[t][i]) * sigma(s[t][i + 1])
                if t + 1 < T:
                    e -= jh[t][i] * sigma(s[t][i]) * sigma(s[t + 1][i])
        z += cmath.exp(-beta * e)
    checks.append({"name": "edge-3x4 circuit", "argv": ["z", "circuit", "edge-3x4.lattice.json"],
                   "expect": {**c(z), "width": n, "boundary": "fixed"}})
    checks.append({"name": "edge-3x4 exact", "argv": ["z", "exact", "edge-3x4.lattice.json"], "expect": c(z)})

    def var(t, i):
        return t * n + i

    inters = []
    for t in range(T):
        inters += [{"vars": [var(t, i)], "type": "field", "h": h[t][i]} for i in range(n)]
        inters += [{"vars": [var(t, i), var(t, i + 1)], "type": "ising", "J": jv[t][i]} for i in range(n - 1)]
        if t + 1 < T:
            inters += [{"vars": [var(t + 1, i), var(t, i)], "type": "ising", "J": jh[t][i]} for i in range(n)]
    for t, pins in ((0, right), (T - 1, left)):
        inters += [{"vars": [var(t, i)], "type": "table", "weights": [1 - x, x], "tag": "pin"}
                   for i, x in enumerate(pins)]
    write("edge-3x4.model.json", {"variables": {"count": n * T, "levels": 2}, "beta": c(beta),
                                  "interactions": inters})
    checks.append({"name": "edge-3x4 model exact", "argv": ["z", "exact", "edge-3x4.model.json"],
                   "expect": c(z)})
    checks.append({"name": "edge-3x4 real couplings are not unitary",
                   "argv": ["estimate", "edge-3x4.lattice.json", "--samples", "100", "--seed", "1"],
                   "expect": {}, "expect_error": "NonUnitaryRegime"})

    (OUT / "ones-4x6.txt").write_text("111111\n" * 4)
    # two apexes plus 7 vertices on each of 4 slices; Euler V - E + F = 1 gives E
    V, F = 2 + 4 * 7, 48
    E = V + F - 1
    checks.append({"name": "ones-4x6 observe",
                   "argv": ["cdt", "observe", "ones-4x6.txt", "--lambda-cc", "0.5"],
                   "expect": {"volume": 48, "action": 24.0, "vertices": V, "edges": E, "bulk_coordination": [6],
                              "deficit_total": 2 * math.pi * V - (math.pi / 3) * 2 * E,
                              "curvature_total": 2 * math.pi}})
    (OUT / "single-fork.txt").write_text("1\n")
    checks.append({"name": "single fork observe", "argv": ["cdt", "observe", "single-fork.txt"],
                   "expect": {"volume": 2, "vertices": 4, "edges": 5}})

    write("manifest.json", {"checks": checks})


if __name__ == "__main__":
    main()
