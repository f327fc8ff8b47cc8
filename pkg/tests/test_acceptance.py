"""Acceptance gate: the nine shipping criteria, one verdict line each.

Criteria 4 and 5 are Monte-Carlo studies and dominate the runtime
(roughly 90 and 6 minutes on one CPU); everything else completes in
about a minute combined.  Verdict lines bypass output capture so the
per-criterion summary is always visible in the test log.

Detection-rate checks use equal-tailed exact binomial acceptance
regions at the 99% level around the long-run reference rates; an
observed count outside the region fails the criterion.
"""

import io
import math
import time
from contextlib import redirect_stdout

import numpy as np
import pytest
from scipy.stats import binom

from _oracles import min_overlap_penalty
from thermalcert.certify import (
    certify_ball,
    entropy_gap,
    relative_entropy_lower_bound,
)
from thermalcert.cli import main as cli_main
from thermalcert.expfamily import (
    ExponentialCoordinates,
    KLocalHamiltonian,
    MAXIMALLY_MIXED_MARGINALS,
    local_basis,
    log_partition,
    max_entropy_projection,
    overlap_ascent,
    overlap_bound,
    pythagorean_residual,
    reduced_overlap_objective,
    thermal_state,
)
from thermalcert.experiments import (
    ExperimentConfig,
    run_fraction_experiment,
    run_nn_restricted_experiment,
)
from thermalcert.graphs import (
    GraphState,
    min_stabilizer_weight,
    permuted_linear_cluster,
    ring_cluster,
)
from thermalcert.linalg import eig_hermitian
from thermalcert.pauli import PauliBasis, weight_at_most_strings
from thermalcert.sdp import FEASIBLE, SolverConfig, marginal_program, solve
from thermalcert.states import ghz_state, haar_random_pure, trace_distance

C5 = GraphState(ring_cluster(5)).state_vector()

# iteration budget for the Monte-Carlo sweeps; hopeless instances stall
# out well before 12k, so the trim only costs borderline samples, which
# are reported inconclusive and never counted as detections
TRIMMED = SolverConfig(max_iterations=12_000, stall_window=1200)

# multiplied out by hand from the generators XIZI, IXZZ, ZZXI, IZIX
ETA_STABILIZER = {
    "IIII": 1, "XIZI": 1, "IXZZ": 1, "ZZXI": 1,
    "IZIX": 1, "XXIZ": 1, "YZYI": 1, "XZZX": 1,
    "IYZY": 1, "ZIXX": 1, "ZYYZ": 1, "YYXZ": -1,
    "XYIY": 1, "YIYX": 1, "ZXYY": -1, "YXXY": 1,
}


def binomial_99_region(n: int, p: float) -> tuple[int, int]:
    """Counts whose lower and upper exact tail probabilities exceed 0.005."""
    ks = np.arange(n + 1)
    admissible = ks[(binom.cdf(ks, n, p) > 0.005) & (binom.sf(ks - 1, n, p) > 0.005)]
    return int(admissible[0]), int(admissible[-1])


@pytest.fixture
def verdict(capfd):
    def emit(num: int, name: str, ok: bool, detail: str) -> None:
        line = f"[criterion {num}] {name}: {'PASS' if ok else 'FAIL'} ({detail})"
        with capfd.disabled():
            print(line, flush=True)
        assert ok, line
    return emit


def test_criterion_1_exact_constants(verdict):
    start = time.perf_counter()
    ceilings_ok = (
        overlap_bound(MAXIMALLY_MIXED_MARGINALS, 32) == 31 / 32
        and overlap_bound(MAXIMALLY_MIXED_MARGINALS, 64) == 63 / 64
        and overlap_bound(MAXIMALLY_MIXED_MARGINALS, 2 ** 25) == (2 ** 25 - 1) / 2 ** 25
    )
    floor = relative_entropy_lower_bound(31 / 32)
    elapsed = time.perf_counter() - start
    ok = ceilings_ok and abs(floor - 0.0317) <= 5e-4 and elapsed < 1.0
    verdict(1, "exact ceilings and divergence floor", ok,
            f"floor={floor:.6f} nats, {elapsed * 1e3:.1f} ms")


def test_criterion_2_stabilizer_exactness(verdict):
    start = time.perf_counter()
    elements = list(GraphState(permuted_linear_cluster()).stabilizer_elements())
    signed = {str(p.unsigned()): p.phase for p in elements}
    stabilizer_ok = len(elements) == 16 and signed == ETA_STABILIZER
    ring = ring_cluster(5)
    m = min_stabilizer_weight(ring)
    basis = PauliBasis(5, weight_at_most_strings(5, 2))
    marginal_err = float(np.abs(basis.expectations(C5.vector)).max())
    elapsed = time.perf_counter() - start
    ok = stabilizer_ok and m == 3 and marginal_err <= 1e-12 and elapsed < 1.0
    verdict(2, "signed stabilizer and ring marginals", ok,
            f"m={m}, max 2-body coefficient {marginal_err:.1e}, {elapsed:.2f} s")


def test_criterion_3_ball_certification(verdict):
    start = time.perf_counter()
    res = certify_ball(C5, 2, 1 / 32, target_label="C5")
    elapsed = time.perf_counter() - start
    ok = (
        res.certified
        and res.solver.iterations <= 50_000
        and res.solver.affine_residual <= 1e-9
        and res.solver.cone_residual <= 1e-9
        and f"{res.alpha:.5f}" == "0.99902"
        and elapsed < 60.0
    )
    verdict(3, "ball certificate for the 5-qubit ring state", ok,
            f"alpha={res.alpha:.10f}, residuals "
            f"{res.solver.affine_residual:.1e}/{res.solver.cone_residual:.1e}, "
            f"{elapsed:.1f} s")


def test_criterion_4_detection_fractions(verdict):
    start = time.perf_counter()
    parts = []
    rows5 = run_fraction_experiment(ExperimentConfig(
        "acceptance-n5", 5, 2, (1e-3, 1e-5, 1e-7), 1000, seed=0, solver=TRIMMED,
    ))
    grid_ok = True
    for row, rate in zip(rows5, (0.0040, 0.2976, 0.4000)):
        lo, hi = binomial_99_region(row.samples, rate)
        grid_ok = grid_ok and lo <= row.detected <= hi
        parts.append(f"n5 d={row.delta:.0e}: {row.detected} in [{lo},{hi}]")
    row6 = run_fraction_experiment(ExperimentConfig(
        "acceptance-n6", 6, 2, (1e-6,), 200, seed=0, solver=TRIMMED,
    ))[0]
    parts.append(f"n6: {row6.detected}/200")
    row4 = run_fraction_experiment(ExperimentConfig(
        "acceptance-n4", 4, 2, (1e-5,), 1000, seed=0, solver=TRIMMED,
    ))[0]
    parts.append(f"n4: {row4.detected}/1000")
    elapsed = time.perf_counter() - start
    ok = grid_ok and row6.fraction >= 0.95 and row4.fraction == 0.0 and elapsed < 7200.0
    verdict(4, "Haar detection fractions", ok,
            "; ".join(parts) + f"; {elapsed / 60:.0f} min")


def test_criterion_5_chain_scope_study(verdict):
    start = time.perf_counter()
    study = run_nn_restricted_experiment(samples=500, delta=1e-6, seed=0)
    lo, hi = binomial_99_region(500, 0.94)
    cert = study.certificate
    elapsed = time.perf_counter() - start
    ok = (
        lo <= study.nearest.detected <= hi
        and study.with_next_nearest.detected == 0
        and cert.certified
        and cert.alpha == 15 / 16
        and cert.delta == 1 / 16
        and elapsed < 1800.0
    )
    verdict(5, "chain-restricted study", ok,
            f"nn {study.nearest.detected} in [{lo},{hi}], "
            f"nn+nnn {study.with_next_nearest.detected}, "
            f"eta alpha={cert.alpha}, {elapsed / 60:.1f} min")


def test_criterion_6_information_projection(verdict):
    start = time.perf_counter()
    projection = max_entropy_projection(ghz_state(3).projector(), 2)
    gamma = np.zeros((8, 8), dtype=complex)
    gamma[0, 0] = gamma[7, 7] = 0.5
    ghz_dist = trace_distance(projection.state.matrix, gamma)
    ghz_residual = pythagorean_residual(ghz_state(3).projector(), np.eye(8) / 8, 2)
    basis = local_basis(4, 2)
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(50):
        raw = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        rho = raw @ raw.conj().T
        rho /= np.trace(rho).real
        theta = 0.4 * rng.standard_normal(len(basis))
        tau = thermal_state(KLocalHamiltonian.from_coefficients(basis.strings, theta, 2))
        worst = max(worst, pythagorean_residual(rho, tau, 2))
    elapsed = time.perf_counter() - start
    ok = ghz_dist <= 1e-4 and ghz_residual <= 1e-4 and worst <= 1e-4
    verdict(6, "information projection", ok,
            f"GHZ distance {ghz_dist:.1e}, worst residual {worst:.1e}, {elapsed:.0f} s")


def test_criterion_7_reduced_overlap_property(verdict):
    start = time.perf_counter()
    violations = 0
    for dim in (8, 32, 64):
        rng = np.random.default_rng(dim)
        ceiling = (dim - 1) / dim
        for _ in range(10_000):
            ep = float(10 ** rng.uniform(-2, 1))
            em = -float(10 ** rng.uniform(-2, 1))
            t = rng.uniform(0.0, 1.0 / (ep - em))
            if reduced_overlap_objective(-em * t, ep * t, ep, em, dim) > ceiling + 1e-12:
                violations += 1
    ascent = overlap_ascent(C5, 2, restarts=20, seed=0)
    elapsed = time.perf_counter() - start
    ok = violations == 0 and ascent.value <= 31 / 32 + 1e-6
    verdict(7, "overlap ceiling property suite", ok,
            f"{violations} violations in 3x10^4 points, "
            f"ascent best {ascent.value:.4f} vs {31 / 32:.4f}, {elapsed:.0f} s")


def test_criterion_8_numerical_foundations(verdict):
    start = time.perf_counter()
    rng = np.random.default_rng(8)
    worst_eig = 0.0
    for _ in range(100):
        raw = rng.standard_normal((64, 64)) + 1j * rng.standard_normal((64, 64))
        herm = (raw + raw.conj().T) / 2
        w, v = eig_hermitian(herm)
        residual = np.linalg.norm(herm @ v - v * w) / max(1.0, np.linalg.norm(herm))
        worst_eig = max(worst_eig, residual)

    basis = local_basis(3, 2)
    theta = 0.3 * np.random.default_rng(9).standard_normal(len(basis))
    ham = KLocalHamiltonian.from_coefficients(basis.strings, theta, 2)
    eta = ExponentialCoordinates.from_hamiltonian(ham).eta
    step = 1e-5
    gradient_ok = True
    for i in np.random.default_rng(10).choice(len(basis), size=12, replace=False):
        up, down = theta.copy(), theta.copy()
        up[i] += step
        down[i] -= step
        fd = (
            log_partition(KLocalHamiltonian.from_coefficients(basis.strings, up, 2))
            - log_partition(KLocalHamiltonian.from_coefficients(basis.strings, down, 2))
        ) / (2 * step)
        gradient_ok = gradient_ok and abs(fd - eta[i]) <= 1e-5 * max(1.0, abs(fd))

    gap_ok = all(
        min(entropy_gap(d, dim) for d in np.linspace(0.0, 1.0 / dim, 1000)) >= 0.0
        for dim in (2 ** p for p in range(3, 13))
    )

    objective_ok = True
    for seed in (11, 12):
        sample_rng = np.random.default_rng(np.random.SeedSequence(7, spawn_key=(seed,)))
        psi = haar_random_pure(3, seed=sample_rng)
        out = solve(marginal_program(psi, 2, 0.0, objective=True))
        reference = min_overlap_penalty(psi, 2)
        objective_ok = (
            objective_ok
            and out.status == FEASIBLE
            and abs(out.objective - reference) <= 1e-4
        )

    elapsed = time.perf_counter() - start
    ok = worst_eig <= 1e-9 and gradient_ok and gap_ok and objective_ok
    verdict(8, "numerical foundations", ok,
            f"worst eig residual {worst_eig:.1e}, gradient ok={gradient_ok}, "
            f"gap grids ok={gap_ok}, objective ok={objective_ok}, {elapsed:.0f} s")


def test_criterion_9_cli_byte_reproducibility(verdict):
    start = time.perf_counter()
    runs = [
        ["certify", "--state", "ring:5", "--k", "2", "--delta", "0.03125"],
        ["fractions", "--n", "3", "--k", "2", "--deltas", "1e-3,1e-6",
         "--samples", "2", "--seed", "11"],
        ["constants", "--no-search"],
        ["nn-restricted", "--samples", "2", "--seed", "1"],
    ]
    ok = True
    for argv in runs:
        captures = []
        for _ in range(2):
            buffer = io.StringIO()
            with redirect_stdout(buffer):
                code = cli_main(list(argv))
            ok = ok and code == 0
            captures.append(buffer.getvalue())
        ok = ok and captures[0] == captures[1] and captures[0]
    elapsed = time.perf_counter() - start
    ok = bool(ok)
    verdict(9, "CLI byte reproducibility", ok, f"{len(runs)} commands run twice, {elapsed:.0f} s")
