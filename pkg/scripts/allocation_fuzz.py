#!/usr/bin/env python3
"""Fuzz the allocation search against a brute-force feasibility check.

Generates small random stands and requirement sets, then compares the
backtracking result with plain enumeration over every resource assignment.
A disagreement prints the offending case and exits non-zero.
"""

import argparse
import itertools
import random
import sys
import time
from decimal import Decimal
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from comptest import (AllocationError, ConnectionMatrix, Connector, INF,
                      MethodInvocation, Requirement, ResourceDef,
                      ResourceTable, StandModel, allocate)
from comptest.sheets import method_class
from comptest.stand import BUS_METHODS


def random_case(rng):
    methods = ["put_r", "get_u", "put_v"]
    pins = [f"p{i}" for i in range(rng.randint(1, 8))]
    resources = []
    for i in range(rng.randint(1, 5)):
        method = rng.choice(methods)
        low = Decimal(rng.randint(-5, 5))
        resources.append(ResourceDef(f"R{i}", method, method.split("_")[1],
                                     low, low + Decimal(rng.randint(5, 25))))
    cells = {}
    for i, _ in enumerate(resources):
        for pin in pins:
            if rng.random() < 0.7:
                cells[(f"R{i}", pin)] = Connector(
                    rng.choice(["switch", "mux"]),
                    rng.randint(1, max(2, len(pins) // 2)), i + 1)
    stand = StandModel(
        ResourceTable(resources),
        ConnectionMatrix(pins, [r.id for r in resources], cells))
    requirements = []
    for pin in rng.sample(pins, rng.randint(1, min(6, len(pins)))):
        method = rng.choice([r.method for r in resources] + methods)
        attr = method.split("_")[1]
        value = INF if rng.random() < 0.1 else Decimal(rng.randint(-10, 30))
        requirements.append(Requirement(pin, MethodInvocation(method,
                                                              {attr: value})))
    return stand, requirements


def feasible_by_enumeration(reqs, stand):
    needing = [r for r in reqs
               if r.invocation.method not in BUS_METHODS
               and next(iter(r.invocation.params.values())) is not INF]
    if not needing:
        return True
    ids = [res.id for res in stand.resources]
    for choice in itertools.product(ids, repeat=len(needing)):
        put_res, put_grp, get_res, get_grp = {}, {}, set(), set()
        good = True
        for req, rid in zip(needing, choice):
            res = stand.resources[rid]
            conn = stand.matrix.connector_for(rid, req.pin)
            if res.method != req.invocation.method or conn is None:
                good = False
                break
            if any(isinstance(v, Decimal) and not res.min <= v <= res.max
                   for v in req.invocation.params.values()):
                good = False
                break
            grp = (conn.kind, conn.group)
            if method_class(req.invocation.method) == "get":
                if rid in put_res or grp in put_grp:
                    good = False
                    break
                get_res.add(rid)
                get_grp.add(grp)
            else:
                if rid in put_res or rid in get_res or grp in put_grp \
                        or grp in get_grp:
                    good = False
                    break
                put_res[rid] = put_grp[grp] = req.pin
        if good:
            return True
    return False


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    feasible = infeasible = 0
    start = time.perf_counter()
    for case in range(args.cases):
        stand, reqs = random_case(rng)
        expected = feasible_by_enumeration(reqs, stand)
        try:
            allocate(reqs, stand)
            got = True
        except AllocationError:
            got = False
        if got != expected:
            print(f"case {case}: search={got} enumeration={expected}")
            print(f"  stand: {stand}")
            print(f"  requirements: {reqs}")
            return 1
        feasible += got
        infeasible += not got
    elapsed = time.perf_counter() - start
    print(f"{args.cases} cases agree ({feasible} feasible, {infeasible} "
          f"infeasible) in {elapsed:.2f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
