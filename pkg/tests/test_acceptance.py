"""Acceptance criteria 1-12, one PASS/FAIL line each.

Every check is exact: rational arithmetic throughout, dimensions compared as
integers.  Random inputs are seeded so a failure can be replayed.
"""

import random
import subprocess
import sys
import time
from pathlib import Path

import pytest

from o2models import formats
from o2models.adams import generator_table
from o2models.burnside import (
    DihedralBurnside, dihedral_idempotents, dihedral_one, divisors, hasse_assemble, hasse_decompose, one, restrict,
)
from o2models.euler_of import (
    AdmissibleRep, EulerClass, FpModule, O_F, Presentation, dimension_function, euler_mul, is_fg_projective,
)
from o2models.exactlin import ChainCx, GradedVec, Mat, Ring, WChainCx, WVec, rank
from o2models.germ import Germ
from o2models.model_d import (
    assemble_pi, constant, cq, graded_d, hom_ext, i_k, isomorphic_d, p_inf, p_k, regular_stalk, sphere_datum,
    subgroup_datum,
)
from o2models.model_t import (
    GTruncation, coproduct, cover, e_torsion, function_object, g, g_sequence_failures, hom_dims, is_dualisable,
    isomorphic, sigma_t, sphere, tensor_t, unit, wide_sphere,
)
from generators import (
    burnside, d_extension, d_object, dualisable_object, element, lattice_object, rand_mat, random_submodule_sequence,
    small_object, torsion_module, wide_data,
)
from oracles import commuting_dim, g_piece_dim, regular_action, restriction_table, six_term

ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture
def report(capsys):
    """Print the verdict line for a criterion outside pytest's capture, then assert it."""
    def emit(number: int, title: str, failures: list, started: float):
        verdict = "PASS" if not failures else "FAIL"
        detail = "" if not failures else f" ({len(failures)} failures, first: {failures[0]})"
        with capsys.disabled():
            print(f"\n[{verdict}] criterion {number:2d}: {title}{detail} [{time.time() - started:.1f}s]")
        assert not failures, failures[:5]
    return emit


# ---------------------------------------------------------------- 1


def _expansion(f) -> dict:
    terms = {"C": f.so2, "D": f.at_o2}
    for k, v in f.dihedral.items():
        terms[k] = v - f.at_o2
    return terms


def test_criterion_01_burnside_restriction(report):
    t0 = time.time()
    rng = random.Random(1)
    failures = []
    pairs = [(burnside(rng), burnside(rng)) for _ in range(100)]
    for n in range(1, 13):
        if restrict(one(), n) != dihedral_one(n):
            failures.append(("unit", n))
        for a, b in pairs:
            ra, rb = restrict(a, n), restrict(b, n)
            if restrict(a + b, n) != ra + rb or restrict(a * b, n) != ra * rb:
                failures.append(("ring map", n, str(a), str(b)))
            if dict(ra.coords) != restriction_table(_expansion(a), n):
                failures.append(("table", n, str(a)))
        es = dihedral_idempotents(n)
        if len(es) != 2 * len(divisors(n)):
            failures.append(("count", n))
        total = DihedralBurnside.of(n, {})
        for i, e in enumerate(es):
            if e * e != e:
                failures.append(("idempotent", n, str(e)))
            for f in es[i + 1:]:
                if (e * f).coords:
                    failures.append(("orthogonal", n, str(e), str(f)))
            total = total + e
        if total != dihedral_one(n):
            failures.append(("sum", n))
    report(1, "restriction is a unital ring map; idempotents orthogonal and sum to 1 (n <= 12)", failures, t0)


# ---------------------------------------------------------------- 2


def test_criterion_02_hasse_square(report):
    t0 = time.time()
    rng = random.Random(2)
    failures = []
    for _ in range(500):
        f = burnside(rng, max_exceptional=8)
        germ, corner = hasse_decompose(f)
        if germ.generic != corner[1]:
            failures.append(("compatibility", str(f)))
        if hasse_assemble(germ, corner) != f:
            failures.append(("round trip", str(f)))
    report(2, "Hasse decompose then assemble is the identity on 500 elements", failures, t0)


# ---------------------------------------------------------------- 3


def _random_rep(rng: random.Random) -> AdmissibleRep:
    return AdmissibleRep(tuple(rng.randint(1, 12) for _ in range(rng.randint(0, 4))))


def test_criterion_03_euler_identities(report):
    t0 = time.time()
    rng = random.Random(3)
    failures = []
    for _ in range(200):
        v, w = _random_rep(rng), _random_rep(rng)
        both = dimension_function(v + w)
        if euler_mul(dimension_function(v), dimension_function(w)) != both:
            failures.append(("product", v.chars, w.chars))
        if any(both.at(k) != sum(1 for x in v.chars + w.chars if x % k == 0) for k in range(1, 13)):
            failures.append(("fixed dims", v.chars, w.chars))
    window = range(-20, 12)
    for n in range(0, 6):
        shifted = Presentation.free((0,)).shift(2 * n)
        lattice = [sum(1 for j in range(-n, 30) if -2 * j == d) for d in window]
        if [shifted.dim(d) for d in window] != lattice:
            failures.append(("double suspension", n))
    for _ in range(10):
        v = dimension_function(_random_rep(rng))
        if not isomorphic(sigma_t(unit(), v), sphere(v)):
            failures.append(("representation sphere", str(v)))
    report(3, "Euler classes multiply; double suspensions and representation spheres match", failures, t0)


# ---------------------------------------------------------------- 4


def _probes() -> list:
    tors = FpModule(O_F, Germ({k: Presentation(Ring.POLY, (0, 1), (-6, -5), Mat([[1, 0], [0, 1]]))
                               for k in range(1, 7)}, Presentation.zero()))
    rng = random.Random(99)
    return [unit(), sphere(EulerClass.of({1: 1, 3: 2})), e_torsion(tors), wide_sphere(wide_data(rng, [2, 4])),
            lattice_object(rng, [1, 5], 2)]


def _shape(obj, keys, window):
    dims = {(k, d): obj.nub.at(k).piece(d).dim for k in list(keys) + [None] for d in window}
    return dims, obj.vertex.graded()


def _dualisable_by_definition(a, probes, window=range(-10, 11)) -> bool:
    da = function_object(a, unit())
    for b in probes:
        lhs, rhs = tensor_t(da, b), function_object(a, b)
        keys = sorted(set(lhs.indices()) | set(rhs.indices()) | set(a.indices()) | set(b.indices()))
        if _shape(lhs, keys, window) != _shape(rhs, keys, window):
            return False
    return True


def _dualisability_suite(rng: random.Random) -> list:
    suite = []
    for _ in range(6):
        suite.append(sphere(EulerClass.of({k: rng.randint(0, 2) for k in rng.sample(range(1, 7), 2)})))
    for _ in range(6):
        suite.append(wide_sphere(wide_data(rng, rng.sample(range(1, 6), 2))))
    for _ in range(6):
        suite.append(g(torsion_module(rng, rng.sample(range(1, 7), rng.randint(1, 2)))))
    for _ in range(8):
        a, b = rng.choice(suite), rng.choice(suite)
        suite.append(coproduct(a, b))
    for _ in range(4):
        suite.append(lattice_object(rng, rng.sample(range(1, 6), 2)))
    return suite


def test_criterion_04_dualisability(report):
    t0 = time.time()
    rng = random.Random(4)
    probes = _probes()
    failures = []
    suite = _dualisability_suite(rng)
    seen = set()
    for a in suite:
        direct = _dualisable_by_definition(a, probes)
        seen.add(direct)
        if is_dualisable(a) != direct:
            failures.append(("disagree", repr(a)[:120]))
    if seen != {True, False}:
        failures.append(("suite lacks both outcomes", seen))
    report(4, f"is_dualisable agrees with F(A,S0) (x) B = F(A,B) on {len(suite)} objects, 5 probes", failures, t0)


# ---------------------------------------------------------------- 5


def test_criterion_05_enough_wide_spheres(report):
    t0 = time.time()
    rng = random.Random(5)
    failures = []
    for trial in range(200):
        a = small_object(rng, 3)
        n = element(rng, a.nub)
        try:
            res = cover(a, n)
            res.map.check()
        except Exception as exc:  # a failure of any kind counts against the criterion
            failures.append((trial, type(exc).__name__, str(exc)))
            continue
        if not is_fg_projective(res.sphere.nub)[0]:
            failures.append((trial, "nub not projective"))
        for k in sorted(set(a.indices()) | set(n.indices())) + [None]:
            image = res.map.theta_at(k).apply(res.preimage.at(k))
            diff = [x - y for x, y in zip(image, n.at(k))]
            if not a.nub.at(k).contains(diff, n.degree):
                failures.append((trial, "element not in image", k))
    report(5, "cover succeeds on 200 random objects: element in image, projective nub", failures, t0)


# ---------------------------------------------------------------- 6


def test_criterion_06_hom_tensor_adjunction(report):
    t0 = time.time()
    rng = random.Random(6)
    failures = []
    for trial in range(50):
        a, b, c = small_object(rng, 2), dualisable_object(rng), small_object(rng, 2)
        keys = sorted(set(a.indices()) | set(b.indices()) | set(c.indices()))
        left = hom_dims(tensor_t(a, b), c, range(-3, 4), keys)
        right = hom_dims(a, function_object(b, c), range(-3, 4), keys)
        if left != right:
            failures.append((trial, left, right))
    report(6, "hom(A (x) B, C) and hom(A, F(B, C)) agree degreewise on 50 triples", failures, t0)


# ---------------------------------------------------------------- 7


def test_criterion_07_generator_table(report):
    t0 = time.time()
    table = generator_table()
    failures = list(table.failures())
    checked = 0
    for line in table.lines:
        if line.name.startswith("[i_k QW^") and ", i_k QW^" in line.name:
            j, i = (int(x) for x in line.name.replace("[i_k QW^", "").replace(" i_k QW^", "").rstrip("]").split(","))
            brute = commuting_dim(regular_action(j), regular_action(i))
            checked += 1
            if not (brute == 2 ** (i + j - 1) == line.computed):
                failures.append((line.name, brute, line.computed))
    if checked != 16:
        failures.append(("brute-force checks run", checked))
    report(7, f"generator table reproduced ({len(table.lines)} lines, brute-force character check)", failures, t0)


# ---------------------------------------------------------------- 8


def _injective_sigma_object(rng: random.Random):
    gen = {n: rng.randint(1, 3) for n in (0, 1)}
    inf = {n: rng.randint(0, gen[n]) for n in (0, 1)}
    sigma = {}
    for n in (0, 1):
        m = rand_mat(rng, gen[n], inf[n], density=1.0)
        while inf[n] and rank(m) < inf[n]:
            m = rand_mat(rng, gen[n], inf[n], density=1.0)
        sigma[n] = m
    stalks = {k: WChainCx.graded({0: rng.randint(0, 2)}, {1: rng.randint(0, 1)}) for k in rng.sample(range(1, 9), 2)}
    return graded_d({k: s.spaces for k, s in stalks.items()}, WVec(GradedVec(gen)), inf, sigma)


def test_criterion_08_ext_soundness(report):
    t0 = time.time()
    rng = random.Random(8)
    failures = []
    degrees = (-1, 0, 1)
    for trial in range(100):
        s, q, w = d_object(rng), d_object(rng), d_object(rng)
        m, inc, pr = d_extension(rng, s, q)
        n = degrees[trial % 3]
        res = six_term(s, m, q, inc, pr, w, n, 8)
        impl = [hom_ext(x, w, (n,)) for x in (s, m, q)]
        if res["defects"] != [0] * 6:
            failures.append((trial, "not exact", res["defects"]))
        if res["hom"] != tuple(h.hom.truncated(8)[n] for h in impl):
            failures.append((trial, "hom", res["hom"]))
        if res["ext"] != tuple(h.ext[n] for h in impl):
            failures.append((trial, "ext", res["ext"]))
    for trial in range(50):
        w = d_object(rng)
        v = _injective_sigma_object(rng)
        if hom_ext(v, w, degrees).ext.total:
            failures.append((trial, "ext with injective sigma"))
        no_inf = d_object(rng)
        no_inf = graded_d({k: s.spaces for k, s in no_inf.stalks.items()}, no_inf.generic.spaces)
        if hom_ext(no_inf, w, degrees).ext.total:
            failures.append((trial, "ext with zero V_inf"))
    report(8, "six-term Hom/Ext sequence exact on 100 extensions at K = 8; Ext vanishing", failures, t0)


# ---------------------------------------------------------------- 9


def test_criterion_09_pi_assembly(report):
    t0 = time.time()
    failures = []
    if not isomorphic_d(assemble_pi(*sphere_datum()), cq()):
        failures.append("sphere datum")
    for k in range(1, 7):
        for i in range(0, 5):
            if not isomorphic_d(assemble_pi(*subgroup_datum(k, i)), i_k(k, regular_stalk(i))):
                failures.append(("subgroup datum", k, i))
    report(9, "sphere datum assembles to cQ; subgroup data to skyscrapers", failures, t0)


# ---------------------------------------------------------------- 10


def _w_hom(src: WChainCx, tgt: WChainCx, n: int) -> int:
    return sum(src.plus.dims[m] * tgt.plus.dims[m + n] + src.minus.dims[m] * tgt.minus.dims[m + n]
               for m in range(-4, 5))


def test_criterion_10_adjunction_ladder(report):
    t0 = time.time()
    rng = random.Random(10)
    failures = []
    for k in range(1, 9):
        r = WChainCx.graded({0: k % 3, 1: 1}, {0: 1})
        if p_k(i_k(k, r), k) != r or any(p_k(i_k(k, r), j).spaces.total.total for j in range(1, 10) if j != k):
            failures.append(("p_k i_k", k))
    for dims in ({0: 1}, {0: 2, 1: 1}, {-1: 3}):
        m = ChainCx.graded(dims)
        if p_inf(constant(m)) != m:
            failures.append(("p_inf c", dims))
    degrees = (-1, 0, 1)
    for trial in range(50):
        v = d_object(rng)
        k = rng.randint(1, 8)
        r = WChainCx.graded({0: rng.randint(0, 2), 1: rng.randint(0, 1)}, {0: rng.randint(0, 2)})
        left = hom_ext(i_k(k, r), v, degrees).hom
        right = hom_ext(v, i_k(k, r), degrees).hom
        for n in degrees:
            if left.truncated(8)[n] != _w_hom(r, v.stalk(k), n):
                failures.append((trial, "i_k -| p_k", n))
            if right.truncated(8)[n] != _w_hom(v.stalk(k), r, n):
                failures.append((trial, "p_k -| i_k", n))
    report(10, "p_k i_k = id, p_inf c = id, i_k -| p_k -| i_k on 50 objects", failures, t0)


# ---------------------------------------------------------------- 11


def test_criterion_11_g_exactness(report):
    t0 = time.time()
    rng = random.Random(11)
    failures = []
    window, top = (-4, 2), 8
    for trial in range(50):
        incl, proj = random_submodule_sequence(rng, rng.sample(range(1, top + 1), 3))
        bad = g_sequence_failures(incl, proj, top, window)
        if bad:
            failures.append((trial, bad[:3]))
        if trial % 5 == 0:
            for module in (incl.src, incl.tgt, proj.tgt):
                gt = GTruncation(module, top, window)
                for k in range(1, top + 1):
                    for d in range(window[0], window[1] + 1):
                        if gt.nub_dim(k, d) != g_piece_dim(module, k, d, top, window):
                            failures.append((trial, "piece dim", k, d))
    report(11, "g preserves exactness on 50 short exact sequences at K = 8", failures, t0)


# ---------------------------------------------------------------- 12


def test_criterion_12_cli_determinism(report):
    t0 = time.time()
    failures = []
    for path in sorted((ROOT / "corpus").glob("*.json")):
        text = path.read_text()
        if formats.dumps(formats.loads(text)) != text:
            failures.append(("round trip", path.name))
    commands = [
        ["hom", "corpus/t_sphere.json", "corpus/t_unit.json", "--format", "machine"],
        ["tensor", "corpus/c_sphere.json", "corpus/c_sphere.json"],
        ["adams", "corpus/d_cq.json", "corpus/d_ik.json", "--degree-window=-1:1"],
        ["restrict", "--n", "12", "e_C + 2*e_3 - f_2"],
        ["generator-table", "--format", "machine"],
    ]
    for args in commands:
        runs = [subprocess.run([sys.executable, "-m", "o2models.cli", *args], cwd=ROOT, capture_output=True)
                for _ in range(2)]
        if runs[0].returncode or runs[0].stdout != runs[1].stdout:
            failures.append(("nondeterministic or failing", args[0], runs[0].stderr[:200]))
    report(12, "corpus round trip and byte-identical repeated CLI reports", failures, t0)
