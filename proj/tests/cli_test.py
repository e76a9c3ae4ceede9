"""End-to-end checks of the qfh command line tool.

Usage: cli_test.py QFH_BINARY WORK_DIR
"""
import csv
import math
import os
import shutil
import subprocess
import sys
import unittest

QFH = ""
WORK = ""


def qfh(*args, check=None):
    proc = subprocess.run([QFH, *args], cwd=WORK, capture_output=True, text=True)
    if check is not None and proc.returncode != check:
        raise AssertionError(
            f"qfh {' '.join(args)} exited {proc.returncode}, expected {check}\n{proc.stderr}")
    return proc


def path(name):
    return os.path.join(WORK, name)


def read_csv(name):
    with open(path(name)) as f:
        lines = f.read().splitlines()
    assert lines[0].startswith("# qfh "), lines[0]
    rows = list(csv.reader(lines[1:]))
    return lines[0], rows[0], rows[1:]


def body(name):
    with open(path(name)) as f:
        return f.read().split("\n", 1)[1]


class Dispersion(unittest.TestCase):
    def test_default_sweep(self):
        qfh("dispersion", "--hbar", "0.5", "-o", "d.csv", check=0)
        _, header, rows = read_csv("d.csv")
        self.assertEqual(header, ["k", "omega_sq", "omega", "relation"])
        self.assertEqual(len(rows), 101)
        self.assertEqual(float(rows[0][1]), 1.0)
        k, w2 = float(rows[50][0]), float(rows[50][1])
        self.assertAlmostEqual(k, 1.0, places=15)
        self.assertAlmostEqual(w2, 0.5 * (1.0 + math.sqrt(1.0 + 0.25)), places=14)
        for r in rows:
            self.assertFalse(any(c.startswith("-0.0000000000000000e+00") for c in r))

    def test_compare_and_preset(self):
        qfh("dispersion", "--compare", "--n", "5", "--T0_par", "0.1", "-o", "c.csv", check=0)
        _, header, rows = read_csv("c.csv")
        self.assertEqual(header[0], "k")
        self.assertEqual(len(header), 6)
        self.assertEqual(len(rows), 5)
        qfh("dispersion", "--eq14-sweep", "-o", "s.csv", check=0)
        _, _, rows = read_csv("s.csv")
        self.assertEqual(len(rows), 301)
        self.assertAlmostEqual(float(rows[0][0]), 1e-3, places=18)

    def test_stdout(self):
        out = qfh("dispersion", "--n", "3", check=0).stdout
        self.assertTrue(out.startswith("# qfh dispersion"))
        self.assertEqual(len(out.strip().splitlines()), 5)


class ExitCodes(unittest.TestCase):
    def test_bad_arguments(self):
        self.assertEqual(qfh("dispersion", "--kmin", "-1").returncode, 2)
        self.assertEqual(qfh("dispersion", "--relation", "kinetic").returncode, 2)
        self.assertEqual(qfh("dispersion", "--hbar", "-1").returncode, 2)
        self.assertEqual(qfh("nosuchcommand").returncode, 2)
        self.assertEqual(qfh("fluid1d", "--filter", "band", "--band-modes", "0").returncode, 2)

    def test_numerical_failure(self):
        proc = qfh("tw", "run", "--H", "1.5", "--p-init", "0.1", "--psi-init", "0.3",
                   "-o", "halt.csv")
        self.assertEqual(proc.returncode, 3)
        self.assertIn("singular", proc.stderr)
        _, _, rows = read_csv("halt.csv")
        self.assertGreater(len(rows), 1)
        self.assertLess(float(rows[-1][0]), 200.0)
        self.assertEqual(qfh("fluid1d", "--N", "32", "--dt", "10").returncode, 3)

    def test_io_failure(self):
        self.assertEqual(qfh("moments", "--input", "missing.csv").returncode, 4)
        self.assertEqual(qfh("dispersion", "-o", "no/such/dir/x.csv").returncode, 4)
        self.assertEqual(qfh("replay", "missing.csv").returncode, 4)
        self.assertFalse(os.path.exists(path("no")))


class Replay(unittest.TestCase):
    def roundtrip(self, name, *args):
        qfh(*args, "-o", name, check=0)
        qfh("replay", name, "-o", "again_" + name, check=0)
        first, _, _ = read_csv(name)
        second, _, _ = read_csv("again_" + name)
        self.assertEqual(first, second)
        self.assertEqual(body(name), body("again_" + name))

    def test_all_subcommands(self):
        self.roundtrip("disp.csv", "dispersion", "--relation", "adiabatic_gamma", "--gamma", "3",
                       "--n", "7", "--log", "--kmin", "0.01")
        self.roundtrip("lr.csv", "linear-response", "--n", "4", "--theta", "0.3",
                       "--T0_par", "0.2", "--T0_perp", "0.1")
        self.roundtrip("fl.csv", "fluid1d", "--N", "32", "--filter", "band", "--periods", "1",
                       "--T0_par", "0.02", "--probe-every", "10")
        self.roundtrip("tw.csv", "tw", "run", "--fig23-ic", "--H", "1", "--xi-max", "20",
                       "--sample-step", "0.5")
        self.roundtrip("st.csv", "tw", "stability", "--H-n", "4")
        self.roundtrip("th.csv", "tw", "threshold", "--p0-bar", "0.2")
        with open(path("dist.csv"), "w") as f:
            f.write("v,f\n")
            for i in range(41):
                v = -8.0 + 16.0 * i / 40
                f.write(f"{v!r},{math.exp(-v * v)!r}\n")
        self.roundtrip("mo.csv", "moments", "--input", "dist.csv")

    def test_wigner(self):
        qfh("wigner", "--tbar", "2", "--nx", "9", "--nv", "9", "-o", "w", check=0)
        qfh("replay", "w_t2.csv", "-o", "again", check=0)
        self.assertEqual(body("w_t2.csv"), body("again_t2.csv"))
        _, header, rows = read_csv("w_t2.csv")
        self.assertEqual(header, ["x_bar", "v_bar", "t_bar", "f_bar"])
        self.assertEqual(len(rows), 81)
        for x, v, t, f in rows:
            x, v, t, f = map(float, (x, v, t, f))
            self.assertLess(abs(f - math.exp(-(x - v * t) ** 2 - v * v)), 1e-10)


class Config(unittest.TestCase):
    def test_precedence(self):
        with open(path("run.ini"), "w") as f:
            f.write("[dispersion]\nn = 4\nhbar = 0.5\n")
        qfh("--config", "run.ini", "dispersion", "-o", "cfg.csv", check=0)
        cmd, _, rows = read_csv("cfg.csv")
        self.assertEqual(len(rows), 4)
        self.assertIn("--hbar 0.5", cmd)
        qfh("--config", "run.ini", "dispersion", "--n", "6", "-o", "cfg2.csv", check=0)
        _, _, rows = read_csv("cfg2.csv")
        self.assertEqual(len(rows), 6)

    def test_params_file(self):
        with open(path("p.txt"), "w") as f:
            f.write("# warm\nT0_par = 0.1\nhbar = 0.2\n")
        qfh("dispersion", "--params", "p.txt", "--hbar", "0.3", "--n", "2", "-o", "pf.csv",
            check=0)
        cmd, _, _ = read_csv("pf.csv")
        self.assertIn("--T0_par 0.10000000000000001", cmd)
        self.assertIn("--hbar 0.29999999999999999", cmd)
        with open(path("bad.txt"), "w") as f:
            f.write("Te = 1\n")
        self.assertEqual(qfh("dispersion", "--params", "bad.txt").returncode, 2)


class Determinism(unittest.TestCase):
    def test_identical_output(self):
        args = ["fluid1d", "--N", "64", "--filter", "band", "--periods", "2", "--hbar", "0.6",
                "--T0_par", "0.02", "--probe-every", "5"]
        qfh(*args, "-o", "a.csv", "--snapshot", "as.csv", check=0)
        qfh(*args, "-o", "b.csv", "--snapshot", "bs.csv", check=0)
        with open(path("a.csv")) as a, open(path("b.csv")) as b:
            self.assertEqual(a.read(), b.read())
        with open(path("as.csv")) as a, open(path("bs.csv")) as b:
            self.assertEqual(a.read(), b.read())
        _, header, rows = read_csv("as.csv")
        self.assertEqual(header, ["x", "n", "u", "p", "Q", "phi"])
        self.assertEqual(len(rows), 64)


if __name__ == "__main__":
    QFH = os.path.abspath(sys.argv[1])
    WORK = os.path.abspath(sys.argv[2])
    shutil.rmtree(WORK, ignore_errors=True)
    os.makedirs(WORK)
    unittest.main(argv=sys.argv[:1], verbosity=2)
