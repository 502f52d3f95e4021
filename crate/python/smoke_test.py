#!/usr/bin/env python3
"""Smoke test for the efpp extension module.

Builds are produced by `cargo build --release -p efpp-py`; this script
locates the resulting cdylib, loads it under the module name `efpp`, and
exercises the main types and operations end to end.
"""
import json
import math
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def locate_cdylib():
    candidates = []
    for profile in ("release", "debug"):
        for name in ("libefpp.so", "efpp.so", "libefpp.dylib", "efpp.pyd"):
            path = os.path.join(ROOT, "target", profile, name)
            if os.path.exists(path):
                candidates.append(path)
    if not candidates:
        sys.exit(
            "efpp cdylib not found; run `cargo build --release -p efpp-py` first"
        )
    return max(candidates, key=os.path.getmtime)


def import_efpp():
    lib = locate_cdylib()
    tmp = tempfile.mkdtemp(prefix="efpp-py-")
    target = os.path.join(tmp, "efpp.so")
    shutil.copyfile(lib, target)
    sys.path.insert(0, tmp)
    import efpp  # noqa: E402

    return efpp


def approx(a, b, tol=1e-12):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def main():
    efpp = import_efpp()
    print(f"loaded efpp {efpp.__version__}")

    # Constant algebra.
    p = efpp.derive_constants(2, 2.0, 0.4)
    assert p.kappa1 == 1.0 and approx(p.kappa2, 1.0 / 11.0)
    assert approx(p.gamma, 2.5) and approx(p.beta, 0.5) and approx(p.eta, 3.0)
    try:
        efpp.derive_constants(2, 1.0, 0.4)
        raise AssertionError("alpha = 1 must be rejected")
    except ValueError:
        pass
    print("constants ok")

    # Iterated log and angles.
    assert efpp.iterated_log(0, 5.0) == 5.0
    assert approx(efpp.iterated_log(1, math.e), 1.0)
    assert approx(efpp.theta([0.0, 1.0]), math.pi / 2)
    assert approx(efpp.rotation_containment_factor(1.0, 2.0, math.pi / 2), 0.5)
    image = efpp.rotate_from_e1([0.0, 1.0], [1.0, 0.0])
    assert approx(image[0], 0.0, 1e-12) and approx(image[1], 1.0)
    print("geometry ok")

    # Crafted geodesic: the middle point halves the quadratic cost.
    sample = efpp.PoissonSample.from_points(
        [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], [-5.0, -5.0], [5.0, 5.0]
    )
    g = efpp.geodesic(sample, [0.0, 0.0], [2.0, 0.0], 2.0)
    assert g.total == 2.0 and len(g.path) == 3
    assert approx(efpp.path_time(g.path, 2.0), g.total)
    print("crafted geodesic ok")

    # Random sample: determinism, nearest/ball queries, oracle agreement.
    s1 = efpp.PoissonSample.sample([-10.0, -10.0], [10.0, 10.0], 1.0, seed=42)
    s2 = efpp.PoissonSample.sample([-10.0, -10.0], [10.0, 10.0], 1.0, seed=42)
    assert s1.points() == s2.points() and len(s1) > 200
    near = s1.nearest_point([0.0, 0.0])
    ball = s1.ball_query([0.0, 0.0], 3.0)
    dist_near = math.hypot(near[0], near[1])
    assert all(math.hypot(q[0], q[1]) <= 3.0 for q in ball)
    assert dist_near <= min(math.hypot(q[0], q[1]) for q in ball) + 1e-12
    fast = efpp.geodesic(s1, [-8.0, -8.0], [8.0, 8.0], 1.5)
    slow = efpp.brute_force_geodesic(s1, [-8.0, -8.0], [8.0, 8.0], 1.5)
    assert approx(fast.total, slow.total)
    print(f"sampling + solving ok (n={len(s1)}, T={fast.total:.4f})")

    # dist_max of the path against its own segment: the wandering value.
    wander = efpp.dist_max(fast.path, [-8.0, -8.0], [8.0, 8.0])
    assert wander is not None and wander >= 0.0
    assert efpp.dist_max([], [0.0, 0.0], [1.0, 0.0]) is None

    # Replicate records mirror the on-disk schema.
    records = efpp.measure_records([16, 24], replicates=3, master_seed=9)
    assert len(records) == 6
    keys = {"n", "replicate_index", "seed", "t_n", "wandering", "slab", "flags"}
    assert set(records[0].keys()) == keys
    assert all(r["t_n"] > 0 for r in records)
    again = efpp.measure_records([16, 24], replicates=3, master_seed=9)
    assert json.dumps(records, sort_keys=True) == json.dumps(again, sort_keys=True)
    print("replicate records ok")

    print("smoke test passed")


if __name__ == "__main__":
    main()
