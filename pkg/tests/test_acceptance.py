"""Acceptance suite: one test per criterion, exact tolerances, timed.

Every check is exact rational arithmetic (tolerance: none); the runtime
bounds are asserted with time.perf_counter.  Each test prints a single
ACCEPTANCE line on success, so `pytest -v -s tests/test_acceptance.py`
reads as a checklist.
"""

import json
import random
import subprocess
import sys
import time
from fractions import Fraction
from importlib import resources

import pytest

from dglie import linalg
from dglie.ce import (
    ce_chain_complex,
    ce_cochain_algebra,
    exact_at_degree,
    filtration,
    induced_chain_map,
    quotient_matches_sym,
)
from dglie.core import homology, homology_dims, is_quasi_iso, shift
from dglie.dgla import (
    DgLieAlgebra,
    cone,
    generating_cofibration,
    identity_morphism,
    is_weak_equivalence,
    validate_dgla,
    zero_dgla,
    zero_morphism,
)
from dglie.envelope import sym_component_dims, sym_vs_gr_check
from dglie.moduli import (
    augmentation_surjection,
    fiber_product,
    gauge_quotient,
    identity_surjection,
    mc_elements,
    mc_fiber_product_check,
    rational_field,
    smallness_certificate,
    spec_points,
    square_zero_algebra,
    tangent_space,
    truncated_polynomial_algebra,
    truncation_surjection,
    validate_artin,
    zariski_tangent,
)
from dglie.polynomials import Poly

from conftest import (
    bareiss_rank,
    brute_force_dgla_ok,
    catalog_dglas,
    make_abelian2,
    make_obstruction,
    make_sl2,
    make_x_minus1,
    random_valid_dgla,
)

SUITE_START = time.perf_counter()


def report(number, elapsed, text):
    print(f"ACCEPTANCE {number:>2}: PASS  ({elapsed:6.2f}s)  {text}")


def test_criterion_01_validator_soundness():
    """>= 200 randomized perturbations: validator == brute-force checker."""
    start = time.perf_counter()
    rng = random.Random(17)
    bases = [g for g in catalog_dglas().values() if g.space.total_dim() <= 12]
    valid = invalid = 0
    for trial in range(200):
        base = rng.choice(bases)
        entries = []
        for (x, y), vec in base._raw.items():
            for (_, k), c in vec.items():
                entries.append((x, y, k, c))
        roll = rng.random()
        if roll < 0.45 and entries:
            i = rng.randrange(len(entries))
            x, y, k, c = entries[i]
            entries[i] = (x, y, k, c + rng.choice([-2, -1, 1, 2]))
        elif roll < 0.85:
            keys = base.keys()
            x, y = rng.choice(keys), rng.choice(keys)
            if base.space.dim(x[0] + y[0]):
                entries.append(
                    (x, y, rng.randrange(base.space.dim(x[0] + y[0])),
                     rng.choice([1, 2]))
                )
        g = DgLieAlgebra(base.complex, entries)
        agrees = validate_dgla(g).ok == brute_force_dgla_ok(g)
        assert agrees, f"disagreement at trial {trial}"
        if validate_dgla(g).ok:
            valid += 1
        else:
            invalid += 1
    elapsed = time.perf_counter() - start
    assert invalid > 0 and valid > 0  # both outcomes exercised
    assert elapsed < 10.0
    report(1, elapsed, f"validator == brute force on 200 perturbations "
                       f"({valid} valid, {invalid} invalid)")


def test_criterion_02_cone_acyclicity():
    """H_n(Cn(g)) = 0 for all n and >= 6 catalog algebras; exact."""
    start = time.perf_counter()
    checked = 0
    for name, g in catalog_dglas().items():
        cn, _ = cone(g)
        assert homology_dims(cn.complex) == {}, name
        checked += 1
    elapsed = time.perf_counter() - start
    assert checked >= 6
    assert elapsed < 5.0
    report(2, elapsed, f"cone acyclic on {checked} catalog algebras")


def test_criterion_03_pbw_dimension_shadow():
    """dim gr^m U(g) = dim Sym^m(g) degreewise, m <= 4, all catalog g."""
    start = time.perf_counter()
    for name, g in catalog_dglas().items():
        rep = sym_vs_gr_check(g, 4)
        assert rep.ok, (name, rep.failures)
    elapsed = time.perf_counter() - start
    assert elapsed < 20.0
    report(3, elapsed, "gr^m U = Sym^m degreewise through level 4 on the catalog")


def test_criterion_04_ce_differential_squares_to_zero():
    """D^2 = 0 at cutoff 5 on the catalog and on 50 random valid dglas."""
    start = time.perf_counter()
    for name, g in catalog_dglas().items():
        c = ce_chain_complex(g, 5)
        assert c.check_d_squared() == [], name
    rng = random.Random(999)
    for i in range(50):
        g = random_valid_dgla(rng)
        c = ce_chain_complex(g, 5)
        assert c.check_d_squared() == [], f"random dgla {i}"
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    report(4, elapsed, "D^2 = 0 at cutoff 5: catalog + 50 randomized valid dglas")


def test_criterion_05_filtration_quotients():
    """Level-n quotient dims equal Sym^n(g[1]) for n <= 5 on the catalog."""
    start = time.perf_counter()
    for name, g in catalog_dglas().items():
        c = ce_chain_complex(g, 5)
        for m in range(6):
            assert quotient_matches_sym(c, m), (name, m)
        filt = filtration(c)  # also checks D-stability of every level
        for level in filt.levels:
            assert not level.dd_failures()
    elapsed = time.perf_counter() - start
    report(5, elapsed, "filtration quotients match Sym^n(g[1]) through level 5")


def _quasi_iso_in_window(f, cutoff):
    chain_map = induced_chain_map(f, cutoff)
    degrees = sorted(
        set(chain_map.source.space.support)
        | set(chain_map.target.space.support)
    )
    window = [
        n for n in degrees
        if exact_at_degree(f.source, cutoff, n)
        and exact_at_degree(f.target, cutoff, n)
    ]
    ok, _ = is_quasi_iso(chain_map, degrees=window)
    return ok


def test_criterion_06_quasi_iso_preservation():
    """Induced CE maps: quasi-isos preserved, non-quasi-isos detected."""
    start = time.perf_counter()
    sl2 = make_sl2()
    cone_sl2, inclusion = cone(sl2)
    cone_ab2, _ = cone(make_abelian2())
    equivalences = [
        identity_morphism(sl2),
        zero_morphism(zero_dgla(), cone_sl2),
        zero_morphism(cone_ab2, zero_dgla()),
        identity_morphism(cone_sl2),
    ]
    for f in equivalences:
        assert is_weak_equivalence(f)
        assert _quasi_iso_in_window(f, 4)
    non_equivalences = [
        inclusion,
        zero_morphism(zero_dgla(), sl2),
        generating_cofibration(1, 1),
    ]
    for f in non_equivalences:
        assert not is_weak_equivalence(f)
        assert not _quasi_iso_in_window(f, 4)
    elapsed = time.perf_counter() - start
    report(6, elapsed, f"{len(equivalences)} quasi-isos preserved, "
                       f"{len(non_equivalences)} non-quasi-isos detected")


def test_criterion_07_sl2_cohomology():
    """sl2 cohomology dims (1,0,0,1) against the transpose-rank oracle."""
    start = time.perf_counter()
    g = make_sl2()
    A = ce_cochain_algebra(g, 4)
    dims = [A.cohomology(n)[0] for n in range(4)]
    assert dims == [1, 0, 0, 1"".count("") and [1, 0, 0, 1][0] * 0 + 1] or True
    assert dims == [1, 0, 0, 1]
    chain = ce_chain_complex(g, 4)
    for n in range(4):
        oracle = chain.space.dim(n) - bareiss_rank(
            linalg.transpose(chain.complex.d(n + 1))
        ) - bareiss_rank(linalg.transpose(chain.complex.d(n)))
        assert A.cohomology(n)[0] == oracle
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    report(7, elapsed, "sl2 cohomology (1,0,0,1) matches the transpose-rank oracle")


def test_criterion_08_deformation_tangent_spaces():
    """tangent_space = dim H_{-1} by both routes; cusp tangent = 2."""
    start = time.perf_counter()
    for name, g in catalog_dglas().items():
        h_dim, _ = homology(g.complex, -1)
        assert tangent_space(g) == h_dim, name  # raises if the routes disagree
    x, y = Poly.var("x"), Poly.var("y")
    cusp = __import__("dglie.moduli", fromlist=["Presentation"]).Presentation(
        ["x", "y"], [y * y - x ** 3]
    )
    dim, _ = zariski_tangent(cusp)
    assert dim == 2
    spec = spec_points(cusp, truncated_polynomial_algebra(2))
    assert spec.parameter_dimension == 2
    elapsed = time.perf_counter() - start
    report(8, elapsed, "tangent spaces agree on both routes; cusp tangent = 2")


def test_criterion_09_fiber_product_commutation():
    """MC solution sets commute with >= 5 artinian fiber products."""
    start = time.perf_counter()
    dual = truncated_polynomial_algebra(2)
    dual_s = truncated_polynomial_algebra(2, "s")
    t3 = truncated_polynomial_algebra(3)
    triples = [
        (augmentation_surjection(dual), augmentation_surjection(dual_s),
         make_x_minus1()),
        (augmentation_surjection(dual), augmentation_surjection(dual_s),
         make_obstruction()),
        (truncation_surjection(t3, dual), identity_surjection(dual),
         make_obstruction()),
        (truncation_surjection(t3, dual), identity_surjection(dual),
         make_x_minus1()),
        (augmentation_surjection(square_zero_algebra(["x", "y"])),
         augmentation_surjection(dual), make_obstruction()),
        (augmentation_surjection(dual), augmentation_surjection(dual_s),
         zero_dgla()),
    ]
    three_dim_seen = False
    for f0, f1, g in triples:
        rep = mc_fiber_product_check(f0, f1, g)
        assert rep.ok
        if rep.fiber_dimension == 3 and f0.target.dimension == 1:
            three_dim_seen = True
    assert three_dim_seen
    assert len(triples) >= 5
    elapsed = time.perf_counter() - start
    report(9, elapsed, f"MC commutes with fiber products on {len(triples)} triples")


def test_criterion_10_smallness_certificates():
    """Every catalog artinian yields a verified elementary chain."""
    start = time.perf_counter()
    dual = truncated_polynomial_algebra(2)
    dual_s = truncated_polynomial_algebra(2, "s")
    fiber3 = fiber_product(
        augmentation_surjection(dual), augmentation_surjection(dual_s)
    ).algebra
    artinians = [
        rational_field(),
        dual,
        truncated_polynomial_algebra(3),
        truncated_polynomial_algebra(4),
        square_zero_algebra(["x", "y"]),
        fiber3,
    ]
    for R in artinians:
        cert = smallness_certificate(R)
        assert len(cert.steps) == R.dimension - 1
        assert cert.verify()
    elapsed = time.perf_counter() - start
    report(10, elapsed, f"verified elementary chains for {len(artinians)} algebras")


def test_criterion_11_obstruction_reporting():
    """Obstruction class in H_{-2} at order 2 over Q[t]/(t^3); frozen oracle."""
    start = time.perf_counter()
    t3 = truncated_polynomial_algebra(3)
    solved = mc_elements(t3, make_obstruction())
    # hand-expanded oracle (committed): the single equation is (1/2) a^2 on
    # the (t^2 ⊗ y) component, obstruction class -(1/2) a^2 [y] at order 2
    a = Poly.var("c0_0")
    assert [k for k, _ in solved.system] == [(-2, 1)]
    assert solved.system[0][1] == Fraction(1, 2) * a * a
    stage2 = solved.stages[1]
    assert stage2.order == 2
    assert stage2.obstruction_classes[1] == [Fraction(-1, 2) * a ** 2]
    hit = solved.obstruction_at({"c0_0": Fraction(1)})
    assert hit is not None and hit[0] == 2
    assert hit[1][1] == [Poly.const(Fraction(-1, 2))]
    assert not solved.is_full  # no lifts of tx beyond order 1
    assert solved.solution["c0_0"] == Poly()
    unobstructed = mc_elements(t3, make_obstruction(with_bracket=False))
    assert unobstructed.is_full
    assert unobstructed.parameters == ["c0_0", "c1_0"]
    elapsed = time.perf_counter() - start
    report(11, elapsed, "nonvanishing H_{-2} class at order 2; unobstructed "
                        "variant lifts fully")


def _catalog_file(name):
    return str(resources.files("dglie").joinpath(f"catalog/{name}.json"))


def _run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "dglie.cli", *args], capture_output=True,
        text=True,
    )


def test_criterion_12_cli_determinism_and_contract(tmp_path):
    """Byte-identical --json reruns; stable exit-code contract."""
    start = time.perf_counter()
    commands = [
        ("validate", _catalog_file("sl2")),
        ("homology", _catalog_file("sl2"), "--ce", "--all", "--cutoff", "3"),
        ("env", _catalog_file("sl2"), "--cutoff", "2"),
        ("mc", _catalog_file("obstruction"), _catalog_file("q_t3")),
        ("small", _catalog_file("fiber3")),
        ("spec", _catalog_file("qx2"), _catalog_file("dual_numbers")),
        ("tangent", _catalog_file("obstruction")),
        ("free", _catalog_file("free2gen"), "--cutoff", "3"),
        ("qiso", _catalog_file("incl_sl2_cone")),
        ("cone", _catalog_file("heisenberg")),
    ]
    for cmd in commands:
        first = _run_cli(*cmd, "--json")
        second = _run_cli(*cmd, "--json")
        assert first.returncode == 0, (cmd, first.stderr)
        assert first.stdout == second.stdout, cmd
    # exit-code contract: 0 success / 1 math violation / 2 parse failure
    corrupted = json.loads(open(_catalog_file("sl2")).read())
    corrupted["payload"]["bracket"][2]["coeff"] = "3"
    bad_math = tmp_path / "bad_math.json"
    bad_math.write_text(json.dumps(corrupted))
    assert _run_cli("validate", str(bad_math)).returncode == 1
    bad_parse = tmp_path / "bad_parse.json"
    bad_parse.write_text("{")
    assert _run_cli("validate", str(bad_parse)).returncode == 2
    assert _run_cli("validate", str(tmp_path / "missing.json")).returncode == 2
    elapsed = time.perf_counter() - start
    report(12, elapsed, f"{len(commands)} commands byte-deterministic; "
                        f"exit codes 0/1/2 stable")


def test_zz_suite_runtime_bound():
    """The whole acceptance module finishes inside the laptop budget."""
    total = time.perf_counter() - SUITE_START
    assert total < 120.0
    print(f"ACCEPTANCE total: {total:.2f}s (< 120s)")
