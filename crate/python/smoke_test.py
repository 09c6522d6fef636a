#!/usr/bin/env python3
"""Smoke test for the wgmaser_py extension module.

Builds the cdylib with cargo, loads it, and spot-checks the headline
numbers of every subsystem. Run from anywhere:

    python3 python/smoke_test.py
"""
import math
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def build_and_import():
    subprocess.run(
        ["cargo", "build", "--release", "-p", "wgmaser-python"],
        cwd=REPO,
        check=True,
    )
    ext = sysconfig.get_config_var("EXT_SUFFIX") or ".so"
    built = REPO / "target" / "release" / "libwgmaser_py.so"
    if not built.exists():  # e.g. macOS
        built = REPO / "target" / "release" / "libwgmaser_py.dylib"
    stage = Path(tempfile.mkdtemp(prefix="wgmaser_py_"))
    shutil.copy2(built, stage / f"wgmaser_py{ext}")
    sys.path.insert(0, str(stage))
    import wgmaser_py

    return wgmaser_py


def approx(got, want, rel=1e-6):
    assert math.isfinite(got), f"non-finite value {got}"
    assert abs(got - want) <= rel * abs(want), f"got {got}, wanted {want} (rel {rel})"


def main():
    m = build_and_import()

    # broadening chain
    approx(m.homogeneous_linewidth(80e-6), 3978.8735772973832)
    approx(m.homogeneous_linewidth(10e-9), 31.830988618379068e6)
    approx(m.scale_t2(1.5e-6, 0.005, 0.02, "wt%"), 0.75e-6)

    # pump field and saturation
    mode = m.WgMode(31.3e9, 1e9, 5e-6, 1.0)
    h, b = m.field_amplitude(mode, 1e-3)
    approx(h, 2254.9550911270608)
    approx(b, 2.8336601393838708e-3)
    chi_si = m.rabi_frequency(0.05, h, b, "si_tesla")
    chi_lit = m.rabi_frequency(0.05, h, b, "paper_literal")
    approx(chi_si, 1.9835620975687096e6)
    approx(chi_lit, 1.5784685637889426e12)
    s = m.saturation(chi_si, 7e-3, 80e-6)
    assert s > 1000
    dfe = m.intensity_broadened_linewidth(s, 80e-6)
    assert m.classify_mode_pair(8e6, dfe) == "coexist"
    assert m.classify_mode_pair(10e3, dfe) == "compete"

    # maser rate model round trip
    system = m.ThreeLevelSystem.from_signal_and_pump(12.0281059e9, 31.312570e9)
    n1, n2, n3 = system.boltzmann_populations(8.72)
    approx(n1 + n2 + n3, 1.0, rel=1e-12)
    signal = m.WgMode(12.0281059e9, m.q_from_linewidth(12.0281059e9, 199.0), 5e-6, 1.0)
    config = m.MaserConfig(system, signal, 3.0, 1e22, 7e-3, 80e-6, 0.06295751677793947)
    p = config.output_power()
    ppb, density, upper = config.infer_concentration(p)
    approx(density, 1e22, rel=1e-9)
    assert not upper
    ppb, _, _ = config.infer_concentration(m.dbm_to_watts(-47.0))
    assert 1.0 < ppb < 1000.0, ppb

    # pump loop
    approx(m.pump_loop_dc_watts(), 6.5, rel=1e-12)
    picker = m.BandpassFilter(31.33522815e9, 17.4e6, 3, 11.3)
    approx(picker.response(31.33522815e9), -11.3, rel=1e-12)
    approx(picker.response(31.33522815e9 + 8.7e6), -14.3, rel=1e-9)
    assert m.pump_loop_gain(31.340330e9) > 0 > m.pump_loop_gain(31.312570e9)

    # Pound discriminator
    res = m.ResonatorModel(12.0267126e9, 6e7, 1.0)
    gamma = res.reflection(12.0267126e9)
    assert abs(gamma) < 1e-12
    lw = res.linewidth()
    assert res.pound_error(12.0267126e9) == 0.0
    assert res.pound_error(12.0267126e9 + lw / 100) < 0

    # stability
    tau0, d = 0.5, 1e-14
    drift = [d * k * tau0 for k in range(4000)]
    approx(m.adev(drift, tau0, 10.0), d * 10 / math.sqrt(2), rel=1e-6)
    curve = m.ThermalCurve(12.0267126e9, 8.72, -11.85)
    approx(curve.frequency_at(9.72) - curve.frequency_at(8.72), -11.85, rel=1e-6)
    table = m.thermal_adev_pipeline(
        curve, 0.1, 1.4, 8.72, 12.0267126e9, 400.0, 0.0625, [10.0]
    )
    assert table[0][1] <= 1e-13

    # optics
    approx(m.aged_intensity(4.5, 2000.0), 3.15, rel=1e-12)
    approx(m.transmission(6, 0.0337, 14.0, 0.005), 0.7589182693572681)
    approx(m.fiber_loss(700.0, 1.2), 0.84, rel=1e-12)

    # shipped scenario summary
    summary = m.fixture_summary("leonard")
    assert 1.0 < summary["inferred_ppb"] < 1000.0
    approx(summary["signal_q"], 6.044274321608041e7)

    print("smoke test passed:", len(dir(m)), "bindings checked")


if __name__ == "__main__":
    main()
