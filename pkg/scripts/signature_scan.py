#!/usr/bin/env python3
"""Map the metric signature of a scenario's field over a 2D slice.

Classically allowed regions tend to be Riemannian (+++); forbidden regions
flip components negative and admit no real quantum-coordinate Jacobian.
Prints an ASCII map (one character per point) and a census.

Legend: '+' all components positive, digits 1..3 = number of negative
components, 'o' nodal, 'x' momentum-singular, '.' outside the domain.
"""

import argparse

import numpy as np

from qhj3d import metric_at
from qhj3d.errors import NodalPoint, NodeSingularity, OutOfDomain
from qhj3d.scenario import build_action, parse_scenario


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("scenario")
    ap.add_argument("--plane", default="xy", choices=["xy", "xz", "yz"])
    ap.add_argument("--offset", type=float, default=0.3,
                    help="coordinate of the remaining axis")
    ap.add_argument("--n", type=int, default=41)
    args = ap.parse_args()

    scenario = parse_scenario(open(args.scenario).read())
    action = build_action(scenario)
    bounds = dict(zip("xyz", scenario.verify.bounds))
    ax1, ax2 = args.plane
    other = ({"x", "y", "z"} - {ax1, ax2}).pop()

    u = np.linspace(*bounds[ax1], args.n)
    v = np.linspace(*bounds[ax2], args.n)
    census = {}
    lines = []
    for vv in v[::-1]:
        chars = []
        for uu in u:
            coords = {ax1: uu, ax2: vv, other: args.offset}
            r = (coords["x"], coords["y"], coords["z"])
            try:
                met = metric_at(action, r)
            except NodalPoint:
                ch = "o"
            except NodeSingularity:
                ch = "x"
            except OutOfDomain:
                ch = "."
            else:
                n_neg = int(np.sum(met.a_upper < 0))
                ch = "+" if n_neg == 0 else str(n_neg)
            census[ch] = census.get(ch, 0) + 1
            chars.append(ch)
        lines.append("".join(chars))

    print(f"{ax1}-{ax2} plane at {other} = {args.offset}, "
          f"{ax1} in {bounds[ax1]}, {ax2} in {bounds[ax2]}")
    for line in lines:
        print(line)
    print("census:", dict(sorted(census.items())))


if __name__ == "__main__":
    main()
