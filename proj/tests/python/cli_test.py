"""End-to-end CLI checks: formats, exit codes, report reproducibility."""

import json
import math
import os
import struct
import subprocess
import sys
import tempfile

CLI = os.environ["RIGIDREG_CLI"]


def write_pgm(path, values, maxval=65535):
    h = len(values)
    w = len(values[0])
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n{maxval}\n".encode())
        for row in values:
            for v in row:
                q = max(0, min(maxval, int(round(v * maxval))))
                f.write(struct.pack(">H", q))


def make_pair(n=24, theta=0.35, tx=0.8, ty=-0.6, sigma=1.8, seed=3):
    import random

    rng = random.Random(seed)
    blobs = [
        (rng.uniform(7, n - 8), rng.uniform(7, n - 8), rng.uniform(0.3, 1.0))
        for _ in range(5)
    ]
    c = (n - 1) / 2.0

    def scene(x, y):
        return sum(
            w * math.exp(-0.5 * ((x - cx) ** 2 + (y - cy) ** 2) / sigma**2)
            for cx, cy, w in blobs
        )

    ct, st = math.cos(theta), math.sin(theta)
    f = [[0.5 * scene(ix, iy) for ix in range(n)] for iy in range(n)]
    g = [[0.0] * n for _ in range(n)]
    for iy in range(n):
        for ix in range(n):
            ux, uy = ix - c, iy - c
            rx, ry = ct * ux + st * uy, -st * ux + ct * uy
            g[iy][ix] = 0.5 * scene(rx - tx + c, ry - ty + c)
    return f, g


def run(args, expect=0):
    proc = subprocess.run([CLI] + args, capture_output=True, text=True)
    assert proc.returncode == expect, (args, proc.returncode, proc.stderr[-500:])
    return proc


def main():
    tmp = tempfile.mkdtemp(prefix="rigidreg_cli_")
    fp, gp = os.path.join(tmp, "f.pgm"), os.path.join(tmp, "g.pgm")
    f, g = make_pair()
    write_pgm(fp, f)
    write_pgm(gp, g)

    # registration recovers the constructed motion and writes a report
    rep = os.path.join(tmp, "report.json")
    out = os.path.join(tmp, "registered.pgm")
    run(
        [
            "register2d", fp, gp,
            "--report", rep,
            "--max-shift", "2",
            "--write-registered", out,
        ]
    )
    with open(rep) as fh:
        report = json.load(fh)
    assert report["schema"] == "rigidreg-report/1"
    motion = report["result"]["motion"]
    assert abs(motion["theta"] - 0.35) < 0.05, motion
    assert report["result"]["complete"]
    assert os.path.exists(out)
    q1 = report["result"]["q_star"]
    print("ok register2d:", motion)

    # rerun from the echoed config reproduces Q* exactly
    cfg_path = os.path.join(tmp, "rerun.ini")
    echoed = report["config"]
    flags = [
        "epsilon-rel", "epsilon-abs", "energy-fraction", "min-coarse-extent",
        "pad", "pipeline", "p", "alpha", "safety", "bands", "node-budget",
        "max-shift",
    ]
    with open(cfg_path, "w") as fh:
        fh.write("[register2d]\n")
        for key in flags:
            if key in echoed and echoed[key] != "":
                fh.write(f"{key}={echoed[key]}\n")
    rep2 = os.path.join(tmp, "report2.json")
    run(["register2d", fp, gp, "--config", cfg_path, "--report", rep2])
    with open(rep2) as fh:
        q2 = json.load(fh)["result"]["q_star"]
    assert abs(q1 - q2) <= 1e-12 * max(1.0, abs(q1)), (q1, q2)
    print("ok config rerun reproduces q_star")

    # symmetry on a symmetric image
    sp = os.path.join(tmp, "sym.pgm")
    n = 24
    c = (n - 1) / 2.0
    phi = math.radians(25)
    ux, uy = math.cos(phi), math.sin(phi)
    sym = [[0.0] * n for _ in range(n)]
    import random

    rng = random.Random(11)
    blobs = []
    for _ in range(4):
        bx, by, w = rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(0.3, 1.0)
        d = bx * ux + by * uy
        blobs += [(bx, by, w), (bx - 2 * d * ux, by - 2 * d * uy, w)]
    for iy in range(n):
        for ix in range(n):
            sym[iy][ix] = 0.4 * sum(
                w * math.exp(-0.5 * ((ix - c - bx) ** 2 + (iy - c - by) ** 2) / 1.8**2)
                for bx, by, w in blobs
            )
    write_pgm(sp, sym)
    rep3 = os.path.join(tmp, "sym.json")
    run(["symmetry", sp, "--report", rep3, "--alpha-range", "4"])
    with open(rep3) as fh:
        sym_res = json.load(fh)["result"]
    got = sym_res["phi"] % math.pi
    want = phi % math.pi
    delta = min(abs(got - want), math.pi - abs(got - want))
    assert delta < math.radians(1.5), sym_res
    print("ok symmetry cli:", sym_res["phi"])

    # bounds-report envelope columns exist and parse
    csv_path = os.path.join(tmp, "bounds.csv")
    run(
        [
            "bounds-report", fp, gp,
            "--variant", "sinc", "--m", "2",
            "--sweep", "theta:-1.0:1.0:20",
            "--out", csv_path,
        ]
    )
    with open(csv_path) as fh:
        rows = fh.read().strip().splitlines()
    assert rows[0] == "variant,m,theta,q_high,q_low,lower,upper"
    assert len(rows) == 22
    print("ok bounds-report csv")

    # register3d: rotation-only self-registration under a small node budget
    # exercises the RAWVOL path and the budget-exhausted exit code; the
    # best-so-far motion is the exact identity (the initial box center)
    vol3 = os.path.join(tmp, "self.rawvol")
    n3 = 12
    import random

    rng3 = random.Random(5)
    blobs3 = [
        (
            rng3.uniform(3.5, n3 - 4.5),
            rng3.uniform(3.5, n3 - 4.5),
            rng3.uniform(3.5, n3 - 4.5),
            rng3.uniform(0.3, 1.0),
        )
        for _ in range(4)
    ]
    with open(vol3, "wb") as fh:
        fh.write(f"RAWVOL {n3} {n3} {n3} f32 1.0\n".encode())
        vals = []
        for z in range(n3):
            for y in range(n3):
                for x in range(n3):
                    vals.append(
                        sum(
                            w
                            * math.exp(
                                -0.5
                                * ((x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2)
                                / 1.5**2
                            )
                            for cx, cy, cz, w in blobs3
                        )
                    )
        fh.write(struct.pack(f"<{len(vals)}f", *vals))
    rep3d = os.path.join(tmp, "self3d.json")
    run(
        [
            "register3d", vol3, vol3,
            "--epsilon-rel", "0.08", "--bands", "64", "--level-tie", "0.25",
            "--node-budget", "30000", "--report", rep3d,
        ],
        expect=4,
    )
    with open(rep3d) as fh:
        r3 = json.load(fh)
    assert r3["result"]["complete"] is False
    m3 = r3["result"]["motion"]
    assert abs(m3["theta"]) < 1e-9 and abs(m3["phi"]) < 1e-9
    print("ok register3d budget path")

    # bench: multiresolution vs single resolution on the same pair
    repb = os.path.join(tmp, "bench.json")
    run(
        [
            "bench", fp, gp,
            "--max-shift", "2", "--epsilon-rel", "0.03", "--level-tie", "0.25",
            "--report", repb,
        ]
    )
    with open(repb) as fh:
        bench = json.load(fh)
    assert bench["result"]["multiresolution"]["complete"]
    assert bench["result"]["single_resolution"]["complete"]
    assert bench["result"]["speedup_full_res_evals"] >= 1.0
    mm = bench["result"]["multiresolution"]["motion"]["theta"]
    sm = bench["result"]["single_resolution"]["motion"]["theta"]
    assert abs(mm - sm) < 0.05
    print("ok bench:", bench["result"]["speedup_full_res_evals"])

    # exit codes: missing file -> 2, bad dims -> 3
    run(["register2d", "/nonexistent.pgm", gp], expect=2)
    vol = os.path.join(tmp, "vol.rawvol")
    with open(vol, "wb") as fh:
        fh.write(b"RAWVOL 4 4 4 f32 1.0\n")
        fh.write(struct.pack("<64f", *([0.5] * 64)))
    run(["register2d", vol, gp], expect=3)
    print("ok exit codes")

    print("cli tests passed")


if __name__ == "__main__":
    main()
