"""Smoke test for the altbisim Python extension.

Run after `cargo build -p altbisim-py` (or `--release`); the script loads the
built library directly, so no install step is needed. An installed wheel
(`maturin build` in crates/python) is used instead when importable.
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"


def load_extension():
    try:
        import altbisim

        return altbisim
    except ImportError:
        pass
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libaltbisim_py.so"
        if lib.exists():
            tmp = pathlib.Path(tempfile.mkdtemp()) / "altbisim.abi3.so"
            shutil.copy(lib, tmp)
            spec = importlib.util.spec_from_file_location("altbisim", tmp)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("extension not built: run `cargo build -p altbisim-py` first")


def main():
    ab = load_extension()

    t = ab.load(str(FIXTURES / "example1.ats"))
    assert t.states == ["q1", "q2", "q3"] and t.validate() == []
    one = ab.bisim(t, t, 1.0)
    assert len(one) == 7 and not one.related("q1", "q3")
    assert len(ab.bisim(t, t, 0.0)) == 3
    assert ab.distinguish(t, t, "q1", "q2", 1.0) is None
    phi, gamma = ab.distinguish(t, t, "q1", "q3", 1.0)
    assert ab.check(t, "q1", phi, eps=1.0) and not ab.check(t, "q3", gamma, eps=1.0)

    m = ab.load(str(FIXTURES / "matrix.ats"))
    assert ab.check(m, "s", "<<1,2>> X p2") is True
    assert ab.check(m, "s", "<<1>> X p2") is False
    assert ab.check(m, "s", "<<1,2>> X p2", bounded=1) is None

    assert ab.partner("<<1>> X p1", [1], 1.0) == "<<1>> X <1.0> p1"
    assert ab.partner("<0.5> p2", [1], 1.0) is None
    assert ab.tr("p1 U p2", 0.5) == "<0.5> p1 U <0.5> p2"

    reach = ab.load(str(FIXTURES / "reach.lats"))
    sample = ab.load(str(FIXTURES / "reach_sample.lats"))
    assert ab.synthesize(reach, "q0", "X p2") == (True, 1)
    assert ab.synthesize(reach, "q0", "X p3")[0] is False
    assert ab.transfer(sample, reach, 1.0, "X p2") == 0

    g = ab.gen_agent(7)
    assert g.to_text() == ab.gen_agent(7).to_text()
    assert ab.parse(g.to_text()).to_text() == g.to_text()
    assert len(ab.aea_bisimulation(ab.gen_labeled(1), ab.gen_labeled(1), 0.0)) >= 1

    try:
        ab.parse("ats x\nagents one")
    except ab.ParseError as e:
        assert "2:" in str(e)
    else:
        raise AssertionError("malformed text parsed")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
