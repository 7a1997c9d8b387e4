import os
import sys
import tempfile
import time
import unittest
import xml.etree.ElementTree as ET

HERE = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, os.path.join(HERE, "..", "plotviz"))

import render  # noqa: E402

DATA = os.path.join(HERE, "data")
SVG = "{http://www.w3.org/2000/svg}"
GL3_LIMIT = 0.000732476036628005


def groups_by_id(path):
    root = ET.parse(path).getroot()
    return {g.get("id"): g for g in root.iter(SVG + "g") if g.get("id")}


def marker_count(groups, gid):
    g = groups.get(gid)
    return 0 if g is None else len(g.findall(".//" + SVG + "use"))


def data_rows(path):
    return render.parse(path).rows


class RenderTest(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def out(self, name):
        return os.path.join(self.tmp.name, name)

    def test_reference_line_and_one_marker_per_row(self):
        src = os.path.join(DATA, "gl3_ratio.plotdata")
        data = render.parse(src)
        self.assertAlmostEqual(data.reference, GL3_LIMIT, delta=1e-12)
        start = time.monotonic()
        self.assertEqual(render.main([src, self.out("a.svg")]), 0)
        self.assertLess(time.monotonic() - start, 5.0)

        groups = groups_by_id(self.out("a.svg"))
        self.assertEqual(sum(1 for k in groups if k == "reference"), 1)
        ref_paths = groups["reference"].findall(".//" + SVG + "path")
        self.assertEqual(len(ref_paths), 1)
        ys = {tok.split()[-1] for tok in ref_paths[0].get("d").replace("M", "|").replace("L", "|").split("|") if tok.strip()}
        self.assertEqual(len(ys), 1, "reference path is not horizontal")

        primes = sum(1 for r in data.rows if r[2])
        self.assertEqual(marker_count(groups, "markers-prime"), primes)
        self.assertEqual(marker_count(groups, "markers-composite"), len(data.rows) - primes)
        self.assertGreater(primes, 0)

    def test_prime_marker_is_distinct(self):
        src = os.path.join(DATA, "gl3_ratio.plotdata")
        render.main([src, self.out("a.svg")])
        groups = groups_by_id(self.out("a.svg"))
        shape = {}
        for gid in ("markers-prime", "markers-composite"):
            path = groups[gid].find(".//" + SVG + "defs/" + SVG + "path")
            shape[gid] = path.get("d")
        self.assertNotEqual(shape["markers-prime"], shape["markers-composite"])

    def test_rerender_is_byte_identical(self):
        src = os.path.join(DATA, "gl3_ratio.plotdata")
        for name in ("a.svg", "b.svg"):
            render.main([src, self.out(name), "--title", "GL3(Z)", "--log-x"])
        with open(self.out("a.svg"), "rb") as a, open(self.out("b.svg"), "rb") as b:
            self.assertEqual(a.read(), b.read())

    def test_tower_rows_are_joined(self):
        src = os.path.join(DATA, "gl3_tower.plotdata")
        rows = data_rows(src)
        render.main([src, self.out("t.svg")])
        groups = groups_by_id(self.out("t.svg"))
        self.assertIn("tower-0", groups)
        d = groups["tower-0"].find(".//" + SVG + "path").get("d")
        self.assertEqual(d.count("M") + d.count("L"), len(rows))

    def test_empty_data_gives_warning(self):
        src = self.out("empty.plotdata")
        with open(src, "w") as f:
            f.write("vkt-plotdata 1\ngroup=GL3/1.1.1.1\ndegree=2\nmode=ratio\nordering=index\nfilter=all\n"
                    "conjecturally_zero=0\nnote=no rows\nx,y,is_prime,tower\n")
        self.assertEqual(render.main([src, self.out("e.svg")]), 0)
        groups = groups_by_id(self.out("e.svg"))
        self.assertIn("warning", groups)
        self.assertEqual(marker_count(groups, "markers-prime") + marker_count(groups, "markers-composite"), 0)

    def test_malformed_input_is_rejected(self):
        bad = self.out("bad.plotdata")
        with open(bad, "w") as f:
            f.write("vkt-plotdata 1\nmode=ratio\nx,y,is_prime,tower\n5,1,0,-\n3,1,0,-\n")
        self.assertEqual(render.main([bad, self.out("x.svg")]), 2)
        with open(bad, "w") as f:
            f.write("something else\n")
        self.assertEqual(render.main([bad, self.out("x.svg")]), 2)


if __name__ == "__main__":
    unittest.main()
